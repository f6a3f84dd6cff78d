use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::family::{GarchFamily, GarchParams, GarchSpec, MeanParams};
use super::recursion::{unconditional_variance, Recursion};
use crate::data::ReturnSeries;
use crate::error::{Error, Result};

fn start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date")
}

/// Simulates `n` returns with i.i.d. standard normal innovations drawn from
/// a ChaCha8 generator seeded with `seed`.
pub fn simulate(
    spec: &GarchSpec,
    mean: &MeanParams,
    params: &GarchParams,
    n: usize,
    seed: u64,
) -> Result<ReturnSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    simulate_with_innovations(spec, mean, params, &z)
}

/// Runs the model forward on given standardized innovations. The variance
/// starts at its unconditional level, or at ω/0.01 for IGARCH.
pub fn simulate_with_innovations(
    spec: &GarchSpec,
    mean: &MeanParams,
    params: &GarchParams,
    z: &[f64],
) -> Result<ReturnSeries> {
    if z.is_empty() {
        return Err(Error::InvalidInput("cannot simulate zero observations".into()));
    }
    mean.validate(spec)?;
    params.validate(spec)?;
    let init = if spec.family == GarchFamily::Igarch {
        params.omega / 0.01
    } else {
        unconditional_variance(spec, params).ok_or_else(|| {
            Error::Inadmissible(format!(
                "{}: persistence ≥ 1, no finite unconditional variance",
                spec.family
            ))
        })?
    };
    let lambda = mean.lambda.unwrap_or(0.0);
    let mut r_prev = if mean.rho.abs() < 1.0 {
        (mean.c + lambda * init) / (1.0 - mean.rho)
    } else {
        0.0
    };
    let mut rec = Recursion::new(*spec, params, init);
    let mut var = Vec::with_capacity(z.len());
    let mut eps = Vec::with_capacity(z.len());
    let mut values = Vec::with_capacity(z.len());
    for (t, zt) in z.iter().enumerate() {
        let v = rec.variance_at(t, &eps, &var)?;
        let e = v.sqrt() * zt;
        let r = mean.c + mean.rho * r_prev + lambda * v + e;
        var.push(v);
        eps.push(e);
        values.push(r);
        r_prev = r;
    }
    Ok(ReturnSeries::with_daily_dates("simulated", start_date(), values))
}
