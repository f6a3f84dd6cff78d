//! Forward recursions of the conditional variance.

use std::f64::consts::{FRAC_2_PI, PI};

use super::family::{asym_abs_moment, power_drive, GarchFamily, GarchParams, GarchSpec};
use crate::error::{Error, Result};

/// Largest |ln σ²| before `exp` is treated as out of range.
const MAX_LOG_VARIANCE: f64 = 700.0;

/// Steps the variance equation of one family.
///
/// `backcast` is used for σ²₀ and for every lagged quantity that falls
/// before the start of the sample (shocks are replaced by their expectation
/// under that variance).
pub(crate) struct Recursion<'a> {
    spec: GarchSpec,
    params: &'a GarchParams,
    backcast: f64,
    /// CGARCH permanent component qₜ.
    long_run: Vec<f64>,
}

impl<'a> Recursion<'a> {
    pub(crate) fn new(spec: GarchSpec, params: &'a GarchParams, backcast: f64) -> Self {
        Self {
            spec,
            params,
            backcast,
            long_run: Vec::new(),
        }
    }

    /// σ²ₜ given shocks `eps[..t]` and variances `var[..t]`.
    pub(crate) fn variance_at(&mut self, t: usize, eps: &[f64], var: &[f64]) -> Result<f64> {
        let p = self.params;
        let s0 = self.backcast;
        let e2 = |i: usize| if t >= i { eps[t - i] * eps[t - i] } else { s0 };
        let neg_e2 = |i: usize| {
            if t >= i {
                let e = eps[t - i];
                if e < 0.0 {
                    e * e
                } else {
                    0.0
                }
            } else {
                0.5 * s0
            }
        };
        let lag_var = |j: usize| if t >= j { var[t - j] } else { s0 };

        let value = if t == 0 {
            if self.spec.family == GarchFamily::Cgarch {
                self.long_run.push(s0);
            }
            s0
        } else {
            match self.spec.family {
                GarchFamily::Garch | GarchFamily::Garchm | GarchFamily::Igarch => {
                    let arch: f64 = p.alpha.iter().enumerate().map(|(i, a)| a * e2(i + 1)).sum();
                    let gar: f64 = p.beta.iter().enumerate().map(|(j, b)| b * lag_var(j + 1)).sum();
                    p.omega + arch + gar
                }
                GarchFamily::Tgarch => {
                    let arch: f64 = p
                        .alpha
                        .iter()
                        .zip(&p.gamma)
                        .enumerate()
                        .map(|(i, (a, g))| a * e2(i + 1) + g * neg_e2(i + 1))
                        .sum();
                    let gar: f64 = p.beta.iter().enumerate().map(|(j, b)| b * lag_var(j + 1)).sum();
                    p.omega + arch + gar
                }
                GarchFamily::Egarch => {
                    let mut lv = p.omega;
                    for (i, (a, g)) in p.alpha.iter().zip(&p.gamma).enumerate() {
                        let lag = i + 1;
                        if t >= lag {
                            let z = eps[t - lag] / var[t - lag].sqrt();
                            lv += a * z + g * (z.abs() - FRAC_2_PI.sqrt());
                        }
                    }
                    for (j, b) in p.beta.iter().enumerate() {
                        lv += b * lag_var(j + 1).ln();
                    }
                    if lv.abs() > MAX_LOG_VARIANCE || lv.is_nan() {
                        return Err(Error::Overflow { index: t });
                    }
                    lv.exp()
                }
                GarchFamily::Pgarch | GarchFamily::Apgarch => {
                    let phi = p.phi.expect("power family carries φ");
                    let mut acc = p.omega;
                    for (i, a) in p.alpha.iter().enumerate() {
                        let lag = i + 1;
                        let g = p.gamma.get(i).copied().unwrap_or(0.0);
                        let shock = if t >= lag {
                            let e = eps[t - lag];
                            (e.abs() - g * e).powf(phi)
                        } else {
                            asym_abs_moment(phi, g) * s0.powf(phi / 2.0)
                        };
                        acc += a * shock;
                    }
                    for (j, b) in p.beta.iter().enumerate() {
                        acc += b * lag_var(j + 1).powf(phi / 2.0);
                    }
                    if !(acc > 0.0) {
                        return Err(Error::NonPositiveVariance { index: t, value: acc });
                    }
                    acc.powf(2.0 / phi)
                }
                GarchFamily::Cgarch => {
                    let (a, b) = (p.alpha[0], p.beta[0]);
                    let rho = p.rho_c.expect("CGARCH carries ρ_c");
                    let shock = p.long_run_shock.expect("CGARCH carries its long-run loading");
                    let q_prev = self.long_run[t - 1];
                    let (e2_prev, v_prev) = (e2(1), var[t - 1]);
                    let q = p.omega + rho * q_prev + shock * (e2_prev - v_prev);
                    self.long_run.push(q);
                    q + a * (e2_prev - q_prev) + b * (v_prev - q_prev)
                }
                GarchFamily::Cmtgarch => {
                    let (a, b, g) = (p.alpha[0], p.beta[0], p.gamma[0]);
                    let inner = p.omega + a * e2(2) + g * neg_e2(2) + b * lag_var(2);
                    p.omega + a * e2(1) + b * inner
                }
            }
        };
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveVariance { index: t, value });
        }
        Ok(value)
    }
}

/// Runs the variance equation over fixed residuals starting from σ²₀ =
/// `initial_variance`. The output has one entry per residual.
pub fn variance_recursion(
    spec: &GarchSpec,
    params: &GarchParams,
    residuals: &[f64],
    initial_variance: f64,
) -> Result<Vec<f64>> {
    params.validate(spec)?;
    if let Some(i) = residuals.iter().position(|e| !e.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite residual at index {i}")));
    }
    if !(initial_variance > 0.0) {
        return Err(Error::InvalidInput(format!(
            "initial variance {initial_variance} must be positive"
        )));
    }
    let mut rec = Recursion::new(*spec, params, initial_variance);
    let mut var = Vec::with_capacity(residuals.len());
    for t in 0..residuals.len() {
        let v = rec.variance_at(t, residuals, &var)?;
        var.push(v);
    }
    Ok(var)
}

/// Unconditional variance of the process, when it is finite.
///
/// For EGARCH this is exp(E ln σ²), and for the power families the
/// φ-th moment is mapped back to a variance.
pub fn unconditional_variance(spec: &GarchSpec, params: &GarchParams) -> Option<f64> {
    let (sa, sb, sg) = (params.sum_alpha(), params.sum_beta(), params.sum_gamma());
    let positive = |num: f64, den: f64| (den > 0.0).then_some(num / den);
    match spec.family {
        GarchFamily::Garch | GarchFamily::Garchm => positive(params.omega, 1.0 - sa - sb),
        GarchFamily::Tgarch => positive(params.omega, 1.0 - sa - sb - 0.5 * sg),
        GarchFamily::Igarch => None,
        GarchFamily::Egarch => positive(params.omega, 1.0 - sb).map(f64::exp),
        GarchFamily::Pgarch | GarchFamily::Apgarch => {
            let phi = params.phi?;
            positive(params.omega, 1.0 - power_drive(params, phi) - sb).map(|m| m.powf(2.0 / phi))
        }
        GarchFamily::Cgarch => {
            let rho = params.rho_c?;
            positive(params.omega, 1.0 - rho)
        }
        GarchFamily::Cmtgarch => {
            let (a, b, g) = (params.alpha[0], params.beta[0], params.gamma[0]);
            positive(params.omega * (1.0 + b), 1.0 - a - b * (a + 0.5 * g) - b * b)
        }
    }
}

/// Gaussian log density contribution −½ (ln 2πσ² + ε²/σ²).
#[inline]
pub(crate) fn gaussian_term(eps: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * PI * var).ln() + eps * eps / var)
}
