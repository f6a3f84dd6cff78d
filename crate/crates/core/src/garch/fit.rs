use std::cmp::Ordering;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::family::{GarchFamily, GarchParams, GarchSpec, MeanParams};
use super::likelihood::{check_length, filter, presample_variance};
use super::transform::{from_unconstrained, natural_names, num_free, pack_natural, to_unconstrained, unpack_natural};
use crate::data::ReturnSeries;
use crate::error::{Error, Result};
use crate::optim::{central_gradient, minimize_bfgs, numerical_hessian, BfgsOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub name: String,
    pub value: f64,
    pub std_error: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchFit {
    pub market: String,
    pub spec: GarchSpec,
    pub mean: MeanParams,
    pub params: GarchParams,
    pub dates: Vec<NaiveDate>,
    pub cond_variance: Vec<f64>,
    pub residuals: Vec<f64>,
    pub std_residuals: Vec<f64>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub persistence: f64,
    pub leverage: Option<f64>,
    pub asymmetry_degree: Option<f64>,
    pub estimates: Vec<ParamEstimate>,
    pub converged: bool,
    pub iterations: usize,
    pub message: String,
    pub n_obs: usize,
}

impl GarchFit {
    pub fn num_params(&self) -> usize {
        num_free(&self.spec)
    }

    pub fn estimate(&self, name: &str) -> Option<&ParamEstimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    /// Header of the coefficient-table CSV layout.
    pub fn table_header() -> Vec<&'static str> {
        vec![
            "market", "model", "p", "q", "C", "C_p", "lagged_returns", "lagged_returns_p", "omega", "omega_p", "alpha",
            "alpha_p", "beta", "beta_p", "gamma", "gamma_p", "persistence", "leverage", "asymmetry_degree",
            "log_likelihood", "aic", "converged",
        ]
    }

    /// One row in the [`table_header`](Self::table_header) layout. Absent
    /// entries are left empty.
    pub fn table_row(&self) -> Vec<String> {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let est = |name: &str| self.estimate(name);
        let pair = |name: &str| {
            let e = est(name);
            [fmt(e.map(|e| e.value)), fmt(e.and_then(|e| e.p_value))]
        };
        let beta = match est("beta1") {
            Some(_) => pair("beta1"),
            None => [fmt(self.params.beta.first().copied()), String::new()],
        };
        let mut row = vec![
            self.market.clone(),
            self.spec.family.to_string(),
            self.spec.p.to_string(),
            self.spec.q.to_string(),
        ];
        row.extend(pair("C"));
        row.extend(pair("rho"));
        row.extend(pair("omega"));
        row.extend(pair("alpha1"));
        row.extend(beta);
        row.extend(pair("gamma1"));
        row.push(fmt(Some(self.persistence)));
        row.push(fmt(self.leverage));
        row.push(fmt(self.asymmetry_degree));
        row.push(fmt(Some(self.log_likelihood)));
        row.push(fmt(Some(self.aic)));
        row.push(self.converged.to_string());
        row
    }
}

/// Writes fits in the coefficient-table CSV layout.
pub fn write_fits_csv<W: std::io::Write>(writer: W, fits: &[GarchFit]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(GarchFit::table_header())?;
    for f in fits {
        w.write_record(f.table_row())?;
    }
    w.flush()?;
    Ok(())
}

/// AIC = 2k − 2·loglik.
pub fn aic(log_likelihood: f64, k: usize) -> f64 {
    2.0 * k as f64 - 2.0 * log_likelihood
}

/// Σα + Σβ + ½Σγ.
pub fn persistence(params: &GarchParams) -> f64 {
    params.sum_alpha() + params.sum_beta() + 0.5 * params.sum_gamma()
}

/// (α₁ + γ₁)/α₁ for families with γ, absent when α₁ = 0.
pub fn asymmetry_degree(spec: &GarchSpec, params: &GarchParams) -> Option<f64> {
    if !spec.family.has_gamma() {
        return None;
    }
    let a = *params.alpha.first()?;
    let g = *params.gamma.first()?;
    (a != 0.0).then(|| (a + g) / a)
}

pub fn leverage(spec: &GarchSpec, params: &GarchParams) -> Option<f64> {
    spec.family.has_gamma().then(|| params.gamma.first().copied()).flatten()
}

fn lag1_autocorrelation(r: &[f64]) -> f64 {
    let n = r.len() as f64;
    let m = r.iter().sum::<f64>() / n;
    let den: f64 = r.iter().map(|v| (v - m).powi(2)).sum();
    if den == 0.0 {
        return 0.0;
    }
    r.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum::<f64>() / den
}

/// Starting points in natural coordinates. The first one is the
/// variance-targeting default.
fn starting_points(spec: &GarchSpec, r: &[f64]) -> Vec<(MeanParams, GarchParams)> {
    let n = r.len() as f64;
    let mu = r.iter().sum::<f64>() / n;
    let s2 = r.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1.0);
    let mut mean = MeanParams::new(mu, lag1_autocorrelation(r));
    if spec.family.has_in_mean() {
        mean.lambda = Some(0.0);
    }
    let (p, q) = (spec.p, spec.q);
    let split = |total: f64, k: usize| vec![total / k as f64; k];
    let make = |a: f64, b: f64| -> GarchParams {
        let alpha = split(a, q);
        let beta = split(b, p);
        match spec.family {
            GarchFamily::Garch | GarchFamily::Garchm => GarchParams::new(s2 * (1.0 - a - b), alpha, beta),
            GarchFamily::Tgarch => GarchParams::new(s2 * (1.0 - a - b), alpha, beta).with_gamma(vec![0.0; q]),
            GarchFamily::Igarch => {
                let beta = split(1.0 - a, p);
                GarchParams::new(0.01 * s2, alpha, beta)
            }
            GarchFamily::Egarch => {
                GarchParams::new(s2.ln() * (1.0 - b), split(0.0, q), beta).with_gamma(split(a + 0.05, q))
            }
            GarchFamily::Pgarch => GarchParams::new(s2 * (1.0 - a - b), alpha, beta).with_phi(2.0),
            GarchFamily::Apgarch => GarchParams::new(s2 * (1.0 - a - b), alpha, beta)
                .with_gamma(vec![0.0; q])
                .with_phi(2.0),
            GarchFamily::Cgarch => {
                let rho = 0.98;
                GarchParams::new(s2 * (1.0 - rho), alpha, beta).with_component(rho, 0.02)
            }
            GarchFamily::Cmtgarch => {
                let omega = s2 * (1.0 - a - b * a - b * b) / (1.0 + b);
                GarchParams::new(omega, alpha, beta).with_gamma(vec![0.0])
            }
        }
    };
    [(0.05, 0.85), (0.1, 0.6), (0.15, 0.8)]
        .into_iter()
        .map(|(a, b)| (mean, make(a, b)))
        .collect()
}

/// Fits `spec` to `returns` by Gaussian quasi-maximum likelihood.
pub fn fit(spec: &GarchSpec, returns: &ReturnSeries) -> Result<GarchFit> {
    let r = &returns.values;
    if let Some(i) = r.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite return at index {i}")));
    }
    check_length(spec, r.len())?;
    let backcast = presample_variance(r)?;
    let m = (r.len() - 1) as f64;

    let objective = |theta: &[f64]| {
        let (mean, params) = from_unconstrained(spec, theta);
        match filter(spec, &mean, &params, r, backcast) {
            Ok(out) => -out.loglik / m,
            Err(_) => f64::INFINITY,
        }
    };

    let opts = BfgsOptions::default();
    let mut best = None::<crate::optim::Minimum>;
    for (mean, params) in starting_points(spec, r) {
        let theta0 = to_unconstrained(spec, &mean, &params);
        let run = minimize_bfgs(objective, &theta0, &opts);
        if best.as_ref().is_none_or(|b| run.f < b.f) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one starting point");
    if !best.f.is_finite() {
        return Err(Error::InvalidInput(format!(
            "{}: likelihood is not finite at any starting point",
            spec.label()
        )));
    }
    if !best.converged {
        let polished = minimize_bfgs(objective, &best.x, &opts);
        if polished.f <= best.f {
            let iterations = best.iterations + polished.iterations;
            best = polished;
            best.iterations = iterations;
        }
    }

    let (mean, params) = from_unconstrained(spec, &best.x);
    let out = filter(spec, &mean, &params, r, backcast)?;
    let estimates = standard_errors(spec, &mean, &params, r, backcast);
    let k = num_free(spec);
    let std_residuals = out.eps.iter().zip(&out.var).map(|(e, v)| e / v.sqrt()).collect();
    Ok(GarchFit {
        market: returns.market.clone(),
        spec: *spec,
        mean,
        dates: returns.dates[1..].to_vec(),
        cond_variance: out.var,
        residuals: out.eps,
        std_residuals,
        log_likelihood: out.loglik,
        aic: aic(out.loglik, k),
        persistence: persistence(&params),
        leverage: leverage(spec, &params),
        asymmetry_degree: asymmetry_degree(spec, &params),
        params,
        estimates,
        converged: best.converged,
        iterations: best.iterations,
        message: best.message,
        n_obs: r.len() - 1,
    })
}

fn natural_objective<'a>(
    spec: &'a GarchSpec,
    r: &'a [f64],
    backcast: f64,
) -> impl Fn(&[f64]) -> f64 + 'a {
    move |x: &[f64]| {
        let (mean, params) = unpack_natural(spec, x);
        match filter(spec, &mean, &params, r, backcast) {
            Ok(out) => -out.loglik,
            Err(_) => f64::NAN,
        }
    }
}

/// Standard errors from the inverse Hessian of the negative log-likelihood
/// in natural coordinates. Entries whose variance is not positive and finite
/// are left empty.
fn standard_errors(
    spec: &GarchSpec,
    mean: &MeanParams,
    params: &GarchParams,
    r: &[f64],
    backcast: f64,
) -> Vec<ParamEstimate> {
    let x = pack_natural(spec, mean, params);
    let f = natural_objective(spec, r, backcast);
    let hess = numerical_hessian(&f, &x);
    let cov: Option<DMatrix<f64>> = if hess.iter().all(|v| v.is_finite()) {
        hess.clone()
            .cholesky()
            .map(|c| c.inverse())
            .or_else(|| hess.try_inverse())
    } else {
        None
    };
    natural_names(spec)
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let se = cov
                .as_ref()
                .map(|c| c[(i, i)])
                .filter(|v| v.is_finite() && *v > 0.0)
                .map(f64::sqrt);
            let p_value = se.map(|s| erfc((x[i] / s).abs() / std::f64::consts::SQRT_2));
            ParamEstimate {
                name,
                value: x[i],
                std_error: se,
                p_value,
            }
        })
        .collect()
}

/// Gradient of the log-likelihood in natural coordinates, by the same
/// finite-difference scheme the optimizer uses.
pub fn loglik_gradient(
    spec: &GarchSpec,
    mean: &MeanParams,
    params: &GarchParams,
    returns: &ReturnSeries,
) -> Result<Vec<f64>> {
    mean.validate(spec)?;
    params.validate(spec)?;
    let r = &returns.values;
    check_length(spec, r.len())?;
    let backcast = presample_variance(r)?;
    let f = natural_objective(spec, r, backcast);
    let x = pack_natural(spec, mean, params);
    Ok(central_gradient(&f, &x).into_iter().map(|g| -g).collect())
}

fn rank(a: &GarchFit, b: &GarchFit) -> Ordering {
    a.aic
        .total_cmp(&b.aic)
        .then(a.num_params().cmp(&b.num_params()))
        .then(a.spec.family.cmp(&b.spec.family))
        .then((a.spec.p, a.spec.q).cmp(&(b.spec.p, b.spec.q)))
}

/// Picks the converged fit with minimal AIC; ties go to fewer parameters,
/// then to the earlier family.
pub fn best_fit(fits: Vec<GarchFit>) -> Option<GarchFit> {
    fits.into_iter().filter(|f| f.converged).min_by(rank)
}

/// Fits every candidate in parallel and returns the best converged one.
pub fn select_model(candidates: &[GarchSpec], returns: &ReturnSeries) -> Result<GarchFit> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidate models given".into()));
    }
    let results: Vec<Result<GarchFit>> = candidates.par_iter().map(|s| fit(s, returns)).collect();
    let mut failures = Vec::new();
    let mut fits = Vec::new();
    for (spec, res) in candidates.iter().zip(results) {
        match res {
            Ok(f) if f.converged => fits.push(f),
            Ok(f) => failures.push((spec.label(), format!("did not converge: {}", f.message))),
            Err(e) => failures.push((spec.label(), e.to_string())),
        }
    }
    best_fit(fits).ok_or(Error::AllCandidatesFailed(failures))
}
