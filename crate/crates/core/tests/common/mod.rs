#![allow(dead_code)]

use chrono::{Days, NaiveDate};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use volspill_core::garch::{
    log_likelihood, natural_names, simulate_with_innovations, GarchFamily, GarchParams, GarchSpec, MeanParams,
};
use volspill_core::spillover::{VolatilityPanel, VolatilityTransform};
use volspill_core::{EventWindowConfig, ReturnSeries};

pub const MARKETS: [&str; 5] = ["qatar", "bahrain", "saudi", "uae", "egypt"];

pub fn day(k: u64) -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 1, 1).unwrap() + Days::new(k)
}

/// Innovations sharing a common factor with loading `c`.
fn factor_innovations(rng: &mut ChaCha8Rng, n: usize, markets: usize, c: f64) -> Vec<Vec<f64>> {
    let common: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    (0..markets)
        .map(|_| {
            common
                .iter()
                .map(|f| c.sqrt() * f + (1.0 - c).sqrt() * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect()
}

/// Five GARCH(1,1) markets over `n` pre-event and `n` post-event days. After
/// the event α + β rises by 0.1 in every market and the common-factor
/// loading of the innovations goes from 0.3 to 0.6.
pub fn regime_shift(seed: u64, n: usize) -> (Vec<ReturnSeries>, EventWindowConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = GarchSpec::first_order(GarchFamily::Garch);
    let pre_z = factor_innovations(&mut rng, n + 1, MARKETS.len(), 0.3);
    let post_z = factor_innovations(&mut rng, n, MARKETS.len(), 0.6);
    let returns = MARKETS
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let a = 0.10 + 0.01 * i as f64;
            let b = 0.75 - 0.02 * i as f64;
            let omega = 0.1 * (1.0 + 0.2 * i as f64);
            let pre = GarchParams::simple(omega, a, b);
            let post = GarchParams::simple(omega * 0.5, a + 0.03, b + 0.07);
            let mean = MeanParams::new(0.01, 0.05);
            let mut values = simulate_with_innovations(&spec, &mean, &pre, &pre_z[i]).unwrap().values;
            values.extend(simulate_with_innovations(&spec, &mean, &post, &post_z[i]).unwrap().values);
            ReturnSeries::with_daily_dates(*m, day(0), values)
        })
        .collect();
    // Day n is the event day and belongs to neither window.
    let cfg = EventWindowConfig::new(day(n as u64), (day(0), day(n as u64 - 1)), (day(n as u64 + 1), day(2 * n as u64)), true)
        .unwrap();
    (returns, cfg)
}

/// Price CSV whose log returns, in percent, are `returns`.
pub fn prices_csv(returns: &[ReturnSeries]) -> String {
    let mut out = String::from("date");
    for r in returns {
        out.push(',');
        out.push_str(&r.market);
    }
    out.push('\n');
    let n = returns[0].len();
    let start = returns[0].dates[0] - Days::new(1);
    let mut level = vec![100.0f64; returns.len()];
    let write_row = |out: &mut String, d: NaiveDate, level: &[f64]| {
        out.push_str(&d.to_string());
        for p in level {
            out.push_str(&format!(",{p:.12e}"));
        }
        out.push('\n');
    };
    write_row(&mut out, start, &level);
    for t in 0..n {
        for (i, r) in returns.iter().enumerate() {
            level[i] *= (r.values[t] / 100.0).exp();
        }
        write_row(&mut out, returns[0].dates[t], &level);
    }
    out
}

/// A point inside the admissible region of `family`, from five uniforms in (0, 1).
pub fn admissible(family: GarchFamily, u: [f64; 5]) -> GarchParams {
    match family {
        GarchFamily::Garch | GarchFamily::Garchm => GarchParams::simple(0.05 + u[0], 0.3 * u[1], 0.6 * u[2]),
        GarchFamily::Igarch => GarchParams::simple(0.05 + u[0], 0.3 * u[1], 1.0 - 0.3 * u[1]),
        GarchFamily::Tgarch | GarchFamily::Cmtgarch => {
            GarchParams::simple(0.05 + u[0], 0.2 * u[1], 0.5 * u[2]).with_gamma(vec![0.3 * u[3] - 0.2 * u[1]])
        }
        GarchFamily::Egarch => {
            GarchParams::simple(0.4 * u[0] - 0.2, 0.6 * u[1] - 0.3, 0.5 + 0.45 * u[2]).with_gamma(vec![0.4 * u[3]])
        }
        GarchFamily::Pgarch => GarchParams::simple(0.05 + u[0], 0.2 * u[1], 0.6 * u[2]).with_phi(0.5 + 2.0 * u[4]),
        GarchFamily::Apgarch => GarchParams::simple(0.05 + u[0], 0.2 * u[1], 0.6 * u[2])
            .with_gamma(vec![1.6 * u[3] - 0.8])
            .with_phi(0.5 + 2.0 * u[4]),
        GarchFamily::Cgarch => {
            let rho = 0.5 + 0.49 * u[3];
            let a = 0.2 * u[1];
            let b = (rho - a) * 0.9 * u[2];
            GarchParams::simple(0.01 + 0.1 * u[0], a, b).with_component(rho, b * u[4])
        }
    }
}

/// Independent finite-difference evaluation with a fixed step of 1e-6.
pub fn reference_gradient(sp: &GarchSpec, mean: &MeanParams, params: &GarchParams, s: &ReturnSeries) -> Vec<f64> {
    let names = natural_names(sp);
    let h = 1e-6;
    let ll = |mean: &MeanParams, p: &GarchParams| log_likelihood(sp, mean, p, s).unwrap().0;
    names
        .iter()
        .map(|name| {
            let bump = |d: f64| {
                let mut m = *mean;
                let mut p = params.clone();
                match name.as_str() {
                    "C" => m.c += d,
                    "rho" => m.rho += d,
                    "lambda" => m.lambda = m.lambda.map(|l| l + d),
                    "omega" => p.omega += d,
                    "alpha1" => p.alpha[0] += d,
                    "beta1" => p.beta[0] += d,
                    "gamma1" => p.gamma[0] += d,
                    "phi" => p.phi = p.phi.map(|v| v + d),
                    "rho_c" => p.rho_c = p.rho_c.map(|v| v + d),
                    "long_run_shock" => p.long_run_shock = p.long_run_shock.map(|v| v + d),
                    other => panic!("unexpected {other}"),
                }
                if sp.family == GarchFamily::Igarch && name == "alpha1" {
                    p.beta[0] -= d;
                }
                ll(&m, &p)
            };
            (bump(h) - bump(-h)) / (2.0 * h)
        })
        .collect()
}

/// Simulates a VAR with zero intercept and Gaussian innovations N(0, Σ).
pub fn simulate_var(phi: &[DMatrix<f64>], sigma: &DMatrix<f64>, t: usize, seed: u64) -> DMatrix<f64> {
    let n = sigma.nrows();
    let l = sigma.clone().cholesky().unwrap().l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = 200;
    let mut x: Vec<DVector<f64>> = vec![DVector::zeros(n); phi.len()];
    for _ in 0..t + burn {
        let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut next = &l * z;
        for (k, p) in phi.iter().enumerate() {
            next += p * &x[x.len() - 1 - k];
        }
        x.push(next);
    }
    let tail = &x[x.len() - t..];
    DMatrix::from_fn(t, n, |r, c| tail[r][c])
}

/// Panel whose log transform reproduces `data` column by column.
pub fn log_panel(data: &DMatrix<f64>) -> VolatilityPanel {
    let (t, n) = data.shape();
    let dates = (0..t as u64).map(day).collect();
    let cols = (0..n).map(|c| data.column(c).iter().map(|v| v.exp()).collect()).collect();
    VolatilityPanel::new((0..n).map(|i| format!("m{i}")).collect(), dates, cols, VolatilityTransform::Log).unwrap()
}

/// Shares of forecast-error variance estimated by simulating the VAR
/// forward from a zero state. Independent of the MA representation.
pub fn monte_carlo_fevd(phi: &[DMatrix<f64>], sigma: &DMatrix<f64>, h: usize, draws: usize, seed: u64) -> DMatrix<f64> {
    let n = sigma.nrows();
    let l = sigma.clone().cholesky().unwrap().l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Moments of e_i and u_{j,s}, all zero-mean by construction.
    let mut cross = vec![DMatrix::<f64>::zeros(n, n); h];
    let mut var_u = vec![DVector::<f64>::zeros(n); h];
    let mut var_e = DVector::<f64>::zeros(n);
    for _ in 0..draws {
        let mut x: Vec<DVector<f64>> = vec![DVector::zeros(n); phi.len()];
        let mut shocks = Vec::with_capacity(h);
        for _ in 0..h {
            let u = &l * DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let mut next = u.clone();
            for (k, p) in phi.iter().enumerate() {
                next += p * &x[x.len() - 1 - k];
            }
            x.push(next);
            shocks.push(u);
        }
        let e = x.last().unwrap();
        for (s, u) in shocks.iter().enumerate() {
            cross[s] += e * u.transpose();
            var_u[s] += u.component_mul(u);
        }
        var_e += e.component_mul(e);
    }
    let mut theta = DMatrix::zeros(n, n);
    for s in 0..h {
        for i in 0..n {
            for j in 0..n {
                let c = cross[s][(i, j)] / draws as f64;
                theta[(i, j)] += c * c / (var_u[s][j] / draws as f64);
            }
        }
    }
    for i in 0..n {
        let v = var_e[i] / draws as f64;
        for j in 0..n {
            theta[(i, j)] /= v;
        }
    }
    for i in 0..n {
        let s: f64 = theta.row(i).sum();
        for j in 0..n {
            theta[(i, j)] *= 100.0 / s;
        }
    }
    theta
}
