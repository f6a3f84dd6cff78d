//! Gaussian quasi-likelihood.

use super::family::{GarchParams, GarchSpec, MeanParams};
use super::recursion::{gaussian_term, Recursion};
use super::transform::num_free;
use crate::data::ReturnSeries;
use crate::error::{Error, Result};

/// Output of one pass of the filter. Index k refers to observation k + 1 of
/// the input returns (the first return only serves as a lag).
pub(crate) struct Filtered {
    pub var: Vec<f64>,
    pub eps: Vec<f64>,
    pub loglik: f64,
}

pub(crate) fn filter(
    spec: &GarchSpec,
    mean: &MeanParams,
    params: &GarchParams,
    returns: &[f64],
    backcast: f64,
) -> Result<Filtered> {
    let m = returns.len().saturating_sub(1);
    let lambda = mean.lambda.unwrap_or(0.0);
    let mut rec = Recursion::new(*spec, params, backcast);
    let mut var = Vec::with_capacity(m);
    let mut eps = Vec::with_capacity(m);
    let mut loglik = 0.0;
    for k in 0..m {
        let v = rec.variance_at(k, &eps, &var)?;
        let e = returns[k + 1] - mean.c - mean.rho * returns[k] - lambda * v;
        loglik += gaussian_term(e, v);
        var.push(v);
        eps.push(e);
    }
    Ok(Filtered { var, eps, loglik })
}

/// Residual variance of the OLS regression of rₜ on (1, rₜ₋₁), divided by
/// the number of regression observations.
pub(crate) fn presample_variance(returns: &[f64]) -> Result<f64> {
    let (c, rho) = ols_ar1(returns)?;
    let m = returns.len() - 1;
    let ss: f64 = returns
        .windows(2)
        .map(|w| {
            let e = w[1] - c - rho * w[0];
            e * e
        })
        .sum();
    let v = ss / m as f64;
    if !(v > 0.0) {
        return Err(Error::ZeroVariance(
            "mean-equation residuals have zero variance".into(),
        ));
    }
    Ok(v)
}

/// OLS estimate of (C, ρ) in rₜ = C + ρ rₜ₋₁. ρ is 0 when the lagged
/// regressor is constant.
pub(crate) fn ols_ar1(returns: &[f64]) -> Result<(f64, f64)> {
    if returns.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: returns.len(),
        });
    }
    let m = (returns.len() - 1) as f64;
    let x = &returns[..returns.len() - 1];
    let y = &returns[1..];
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let rho = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok((my - rho * mx, rho))
}

pub(crate) fn check_length(spec: &GarchSpec, n: usize) -> Result<()> {
    let needed = 10 * num_free(spec);
    if n < needed {
        return Err(Error::TooShort { needed, got: n });
    }
    Ok(())
}

/// Log-likelihood in nats and the conditional variances σ²ₜ for t = 2..n.
///
/// σ² before the sample is the residual variance of an OLS fit of the mean
/// equation without the in-mean term.
pub fn log_likelihood(
    spec: &GarchSpec,
    mean: &MeanParams,
    params: &GarchParams,
    returns: &ReturnSeries,
) -> Result<(f64, Vec<f64>)> {
    mean.validate(spec)?;
    params.validate(spec)?;
    let r = &returns.values;
    check_length(spec, r.len())?;
    let backcast = presample_variance(r)?;
    let out = filter(spec, mean, params, r, backcast)?;
    Ok((out.loglik, out.var))
}
