//! Quasi-Newton minimization with finite-difference derivatives.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Relative change in the objective below which an iteration counts as stalled.
    pub f_tol: f64,
    pub grad_tol: f64,
    /// Consecutive small-change iterations required for convergence.
    pub patience: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            f_tol: 1e-8,
            grad_tol: 1e-6,
            patience: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
    pub message: String,
}

/// Central-difference gradient with step cbrt(ε)·max(1, |xᵢ|).
pub fn central_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Vec<f64> {
    let base = f64::EPSILON.cbrt();
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = base * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Symmetric finite-difference Hessian with step 1e-4·max(|xᵢ|, 0.01).
pub fn numerical_hessian<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let h: Vec<f64> = x.iter().map(|v| 1e-4 * v.abs().max(0.01)).collect();
    let f0 = f(x);
    let mut probe = x.to_vec();
    let eval = |probe: &mut Vec<f64>, moves: &[(usize, f64)]| {
        for &(i, d) in moves {
            probe[i] += d;
        }
        let v = f(probe);
        for &(i, d) in moves {
            probe[i] -= d;
        }
        v
    };
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = eval(&mut probe, &[(i, h[i])]);
        let fm = eval(&mut probe, &[(i, -h[i])]);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = eval(&mut probe, &[(i, h[i]), (j, h[j])]);
            let fpm = eval(&mut probe, &[(i, h[i]), (j, -h[j])]);
            let fmp = eval(&mut probe, &[(i, -h[i]), (j, h[j])]);
            let fmm = eval(&mut probe, &[(i, -h[i]), (j, -h[j])]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Minimizes `f` from `x0` with BFGS and Armijo backtracking.
///
/// Non-finite objective values are treated as +∞, so the line search backs
/// away from them. When the line search fails the inverse Hessian is reset
/// to the identity once; a second failure ends the run unconverged.
pub fn minimize_bfgs<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &BfgsOptions) -> Minimum {
    let n = x0.len();
    let obj = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let grad = |x: &DVector<f64>| DVector::from_vec(central_gradient(&obj, x.as_slice()));

    let mut x = DVector::from_column_slice(x0);
    let mut fx = obj(x.as_slice());
    if !fx.is_finite() {
        return Minimum {
            x: x0.to_vec(),
            f: fx,
            iterations: 0,
            converged: false,
            message: "objective is not finite at the starting point".into(),
        };
    }
    let mut g = grad(&x);
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut calm = 0usize;
    let mut reset_used = false;

    for iter in 1..=opts.max_iter {
        if inf_norm(&g) < opts.grad_tol {
            return Minimum {
                x: x.as_slice().to_vec(),
                f: fx,
                iterations: iter - 1,
                converged: true,
                message: "gradient norm below tolerance".into(),
            };
        }
        let mut dir = -(&hinv * &g);
        let mut slope = g.dot(&dir);
        if !(slope < 0.0) {
            hinv = DMatrix::identity(n, n);
            dir = -g.clone();
            slope = g.dot(&dir);
        }
        // Keep the first trial step bounded in the transformed coordinates.
        let max_step = inf_norm(&dir);
        let mut step = if max_step > 2.0 { 2.0 / max_step } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &x + &dir * step;
            let ft = obj(trial.as_slice());
            if ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if reset_used {
                return Minimum {
                    x: x.as_slice().to_vec(),
                    f: fx,
                    iterations: iter,
                    converged: false,
                    message: "line search failed to find a decrease".into(),
                };
            }
            reset_used = true;
            hinv = DMatrix::identity(n, n);
            continue;
        };
        let g_new = grad(&x_new);
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            hinv += (&s * s.transpose()) * (rho * rho * yhy + rho) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        let rel = (fx - f_new).abs() / fx.abs().max(1.0);
        x = x_new;
        fx = f_new;
        g = g_new;
        if rel < opts.f_tol {
            calm += 1;
            if calm >= opts.patience {
                return Minimum {
                    x: x.as_slice().to_vec(),
                    f: fx,
                    iterations: iter,
                    converged: true,
                    message: "relative objective change below tolerance".into(),
                };
            }
        } else {
            calm = 0;
        }
    }
    Minimum {
        x: x.as_slice().to_vec(),
        f: fx,
        iterations: opts.max_iter,
        converged: false,
        message: format!("no convergence after {} iterations", opts.max_iter),
    }
}
