use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::VolatilityPanel;
use crate::error::{Error, Result};

/// Reduced-form VAR(P) with intercept: xₜ = c + Σₖ Φₖ xₜ₋ₖ + uₜ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarModel {
    pub markets: Vec<String>,
    pub lag_order: usize,
    pub intercepts: DVector<f64>,
    pub coefficients: Vec<DMatrix<f64>>,
    /// Standard errors matching `coefficients` entry by entry.
    pub std_errors: Vec<DMatrix<f64>>,
    /// Residual covariance with divisor T − N·P − 1.
    pub sigma: DMatrix<f64>,
    /// ln det Σ̂ + 2(N²P + N)/T with the maximum-likelihood Σ̂.
    pub aic: f64,
    pub n_obs: usize,
    pub spectral_radius: f64,
}

impl VarModel {
    /// A model from given coefficients, for analysis without estimation.
    pub fn from_parts(
        markets: Vec<String>,
        intercepts: DVector<f64>,
        coefficients: Vec<DMatrix<f64>>,
        sigma: DMatrix<f64>,
    ) -> Result<Self> {
        let n = markets.len();
        let shapes_ok = intercepts.len() == n
            && sigma.shape() == (n, n)
            && coefficients.iter().all(|c| c.shape() == (n, n));
        if !shapes_ok {
            return Err(Error::InvalidInput(format!(
                "VAR parts do not all have dimension {n}"
            )));
        }
        let spectral_radius = companion_spectral_radius(&coefficients, n);
        Ok(Self {
            markets,
            lag_order: coefficients.len(),
            intercepts,
            std_errors: coefficients.iter().map(|_| DMatrix::zeros(n, n)).collect(),
            coefficients,
            sigma,
            aic: f64::NAN,
            n_obs: 0,
            spectral_radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.markets.len()
    }

    /// False when the companion matrix has an eigenvalue on or outside the
    /// unit circle.
    pub fn is_stable(&self) -> bool {
        self.spectral_radius < 1.0
    }
}

fn companion_spectral_radius(coefficients: &[DMatrix<f64>], n: usize) -> f64 {
    let p = coefficients.len();
    if p == 0 || n == 0 {
        return 0.0;
    }
    let mut comp = DMatrix::zeros(n * p, n * p);
    for (k, phi) in coefficients.iter().enumerate() {
        comp.view_mut((0, k * n), (n, n)).copy_from(phi);
    }
    for i in n..n * p {
        comp[(i, i - n)] = 1.0;
    }
    comp.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

struct OlsFit {
    /// (1 + N·P) × N
    beta: DMatrix<f64>,
    resid: DMatrix<f64>,
    xtx_inv_diag: DVector<f64>,
}

fn column_names(markets: &[String], p: usize) -> Vec<String> {
    let mut names = vec!["const".to_string()];
    for k in 1..=p {
        names.extend(markets.iter().map(|m| format!("{m}_lag{k}")));
    }
    names
}

/// Least squares of y[start..] on an intercept and lags 1..=p.
fn ols(data: &DMatrix<f64>, markets: &[String], p: usize, start: usize) -> Result<OlsFit> {
    let (t, n) = data.shape();
    let rows = t - start;
    let cols = 1 + n * p;
    let x = DMatrix::from_fn(rows, cols, |r, c| {
        if c == 0 {
            1.0
        } else {
            let k = (c - 1) / n + 1;
            let j = (c - 1) % n;
            data[(start + r - k, j)]
        }
    });
    let y = data.rows(start, rows).into_owned();

    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..cols).map(|i| x.column(i).norm()).fold(0.0, f64::max).max(1.0);
    let names = column_names(markets, p);
    let collinear: Vec<String> = (0..cols)
        .filter(|&i| r[(i, i)].abs() <= 1e-10 * scale)
        .map(|i| names[i].clone())
        .collect();
    if !collinear.is_empty() {
        return Err(Error::RankDeficient { columns: collinear });
    }
    let qty = qr.q().transpose() * &y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient { columns: names.clone() })?;
    let resid = &y - &x * &beta;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(cols, cols))
        .ok_or_else(|| Error::RankDeficient { columns: names })?;
    // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ
    let xtx_inv_diag = DVector::from_fn(cols, |i, _| r_inv.row(i).norm_squared());
    Ok(OlsFit {
        beta,
        resid,
        xtx_inv_diag,
    })
}

fn ln_det_ml(resid: &DMatrix<f64>) -> f64 {
    let rows = resid.nrows() as f64;
    let s = resid.transpose() * resid / rows;
    match s.clone().cholesky() {
        Some(c) => 2.0 * c.l().diagonal().iter().map(|v| v.ln()).sum::<f64>(),
        None => s.determinant().ln(),
    }
}

fn var_aic(resid: &DMatrix<f64>, n: usize, p: usize) -> f64 {
    let t = resid.nrows() as f64;
    ln_det_ml(resid) + 2.0 * ((n * n * p + n) as f64) / t
}

fn check_size(t: usize, n: usize, p: usize) -> Result<()> {
    let needed = n * p + 11;
    if t < needed || t - p < n * p + 2 {
        return Err(Error::TooShort { needed: needed.max(n * p + p + 2), got: t });
    }
    Ok(())
}

/// Fits a VAR(`p`) by equation-by-equation least squares.
pub fn fit_var(panel: &VolatilityPanel, p: usize) -> Result<VarModel> {
    if p == 0 {
        return Err(Error::InvalidInput("VAR lag order must be at least 1".into()));
    }
    let data = panel.data();
    let (t, n) = data.shape();
    check_size(t, n, p)?;
    let fit = ols(&data, panel.markets(), p, p)?;
    let rows = fit.resid.nrows();
    let dof = (rows - n * p - 1) as f64;
    let sigma = fit.resid.transpose() * &fit.resid / dof;
    let intercepts = fit.beta.row(0).transpose();
    let mut coefficients = Vec::with_capacity(p);
    let mut std_errors = Vec::with_capacity(p);
    for k in 0..p {
        // Row 1 + k·N + j of beta holds the loading of every equation on x_{j,t−k−1}.
        let block = fit.beta.rows(1 + k * n, n).transpose();
        let se = DMatrix::from_fn(n, n, |i, j| (sigma[(i, i)] * fit.xtx_inv_diag[1 + k * n + j]).sqrt());
        coefficients.push(block);
        std_errors.push(se);
    }
    let spectral_radius = companion_spectral_radius(&coefficients, n);
    Ok(VarModel {
        markets: panel.markets().to_vec(),
        lag_order: p,
        intercepts,
        coefficients,
        std_errors,
        aic: var_aic(&fit.resid, n, p),
        sigma,
        n_obs: rows,
        spectral_radius,
    })
}

/// Lag order in 1..=`max_p` minimizing the multivariate AIC. Every
/// candidate is estimated on the same observations, those after the first
/// `max_p`. Ties go to the smaller order.
pub fn select_var_lag(panel: &VolatilityPanel, max_p: usize) -> Result<usize> {
    if max_p == 0 {
        return Err(Error::InvalidInput("maximum VAR lag must be at least 1".into()));
    }
    if max_p == 1 {
        return Ok(1);
    }
    let data = panel.data();
    let (t, n) = data.shape();
    check_size(t, n, max_p)?;
    let mut best = (1, f64::INFINITY);
    for p in 1..=max_p {
        let fit = ols(&data, panel.markets(), p, max_p)?;
        let aic = var_aic(&fit.resid, n, p);
        if aic < best.1 {
            best = (p, aic);
        }
    }
    Ok(best.0)
}
