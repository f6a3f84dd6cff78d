use nalgebra::{DMatrix, DVector};

use super::VarModel;
use crate::error::{Error, Result};

/// Moving-average matrices A₀ … A_{H−1}: A₀ = I, A_h = Σₖ Φₖ A_{h−k}.
pub fn ma_coefficients(model: &VarModel, horizon: usize) -> Vec<DMatrix<f64>> {
    let n = model.dim();
    let mut a: Vec<DMatrix<f64>> = Vec::with_capacity(horizon);
    for h in 0..horizon {
        if h == 0 {
            a.push(DMatrix::identity(n, n));
            continue;
        }
        let mut next = DMatrix::zeros(n, n);
        for (k, phi) in model.coefficients.iter().enumerate().take(h) {
            next += phi * &a[h - k - 1];
        }
        a.push(next);
    }
    a
}

/// Generalized decomposition before normalization, θᵢⱼ(H), as fractions.
/// Row sums of the returned matrix are generally not 1.
pub fn generalized_fevd_parts(model: &VarModel, horizon: usize) -> Result<DMatrix<f64>> {
    if horizon == 0 {
        return Err(Error::InvalidInput("forecast horizon must be at least 1".into()));
    }
    let n = model.dim();
    let sigma = &model.sigma;
    if let Some(i) = (0..n).find(|&i| !(sigma[(i, i)] > 0.0)) {
        return Err(Error::ZeroVariance(format!(
            "residual variance of '{}' is not positive",
            model.markets[i]
        )));
    }
    let a = ma_coefficients(model, horizon);
    let mut num = DMatrix::zeros(n, n);
    let mut den = DVector::zeros(n);
    for ah in &a {
        let a_sigma = ah * sigma;
        num += a_sigma.map(|v| v * v);
        den += (&a_sigma * ah.transpose()).diagonal();
    }
    Ok(DMatrix::from_fn(n, n, |i, j| num[(i, j)] / sigma[(j, j)] / den[i]))
}

/// Row-normalized generalized FEVD in percent: entry (i, j) is the share of
/// market i's H-step forecast-error variance due to shocks in market j.
pub fn generalized_fevd(model: &VarModel, horizon: usize) -> Result<DMatrix<f64>> {
    let theta = generalized_fevd_parts(model, horizon)?;
    Ok(normalize_rows(&theta))
}

pub(crate) fn normalize_rows(theta: &DMatrix<f64>) -> DMatrix<f64> {
    let mut d = theta.clone();
    for mut row in d.row_iter_mut() {
        let s: f64 = row.sum();
        row *= 100.0 / s;
    }
    d
}
