//! Parameter layouts.
//!
//! Two coordinate systems are used for a model's free parameters:
//!
//! * natural coordinates: the reported quantities (C, ρ, λ, ω, α, γ, β, φ, ...),
//!   in which standard errors are computed;
//! * unconstrained coordinates: an invertible map onto ℝᵏ in which the
//!   optimizer works. Every unconstrained point maps to an admissible model.
//!
//! Stationarity constraints are imposed with a softmax that carries an extra
//! "slack" category, so the mapped coefficients are positive and sum to less
//! than one.

use super::family::{asym_abs_moment, GarchFamily, GarchParams, GarchSpec, MeanParams, PHI_MAX, PHI_MIN};

const FLOOR: f64 = 1e-10;

/// Names of the free parameters in natural coordinates, in vector order.
pub fn natural_names(spec: &GarchSpec) -> Vec<String> {
    let fam = spec.family;
    let mut names = vec!["C".to_string(), "rho".to_string()];
    if fam.has_in_mean() {
        names.push("lambda".into());
    }
    names.push("omega".into());
    names.extend((1..=spec.q).map(|i| format!("alpha{i}")));
    if fam.has_gamma() {
        names.extend((1..=spec.q).map(|i| format!("gamma{i}")));
    }
    let free_beta = if fam == GarchFamily::Igarch { spec.p - 1 } else { spec.p };
    names.extend((1..=free_beta).map(|j| format!("beta{j}")));
    if fam.has_power() {
        names.push("phi".into());
    }
    if fam == GarchFamily::Cgarch {
        names.push("rho_c".into());
        names.push("long_run_shock".into());
    }
    names
}

pub fn num_free(spec: &GarchSpec) -> usize {
    natural_names(spec).len()
}

pub(crate) fn pack_natural(spec: &GarchSpec, mean: &MeanParams, params: &GarchParams) -> Vec<f64> {
    let fam = spec.family;
    let mut x = vec![mean.c, mean.rho];
    if fam.has_in_mean() {
        x.push(mean.lambda.unwrap_or(0.0));
    }
    x.push(params.omega);
    x.extend(&params.alpha);
    if fam.has_gamma() {
        x.extend(&params.gamma);
    }
    if fam == GarchFamily::Igarch {
        x.extend(&params.beta[..spec.p - 1]);
    } else {
        x.extend(&params.beta);
    }
    if fam.has_power() {
        x.push(params.phi.unwrap_or(2.0));
    }
    if fam == GarchFamily::Cgarch {
        x.push(params.rho_c.unwrap_or(0.0));
        x.push(params.long_run_shock.unwrap_or(0.0));
    }
    x
}

/// Inverse of [`pack_natural`]. No admissibility check is made.
pub(crate) fn unpack_natural(spec: &GarchSpec, x: &[f64]) -> (MeanParams, GarchParams) {
    let fam = spec.family;
    let mut it = x.iter().copied();
    let mut next = || it.next().expect("natural vector has the layout length");
    let mut mean = MeanParams::new(next(), next());
    if fam.has_in_mean() {
        mean.lambda = Some(next());
    }
    let omega = next();
    let alpha: Vec<f64> = (0..spec.q).map(|_| next()).collect();
    let gamma: Vec<f64> = if fam.has_gamma() {
        (0..spec.q).map(|_| next()).collect()
    } else {
        Vec::new()
    };
    let beta = if fam == GarchFamily::Igarch {
        let mut b: Vec<f64> = (0..spec.p - 1).map(|_| next()).collect();
        let rest = 1.0 - alpha.iter().sum::<f64>() - b.iter().sum::<f64>();
        b.push(rest);
        b
    } else {
        (0..spec.p).map(|_| next()).collect()
    };
    let mut params = GarchParams::new(omega, alpha, beta).with_gamma(gamma);
    if fam.has_power() {
        params.phi = Some(next());
    }
    if fam == GarchFamily::Cgarch {
        let rho = next();
        let shock = next();
        params = params.with_component(rho, shock);
    }
    (mean, params)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(FLOOR, 1.0 - FLOOR);
    (p / (1.0 - p)).ln()
}

/// Weights eˡⁱ / (1 + Σ eˡʲ): positive, summing to less than one.
fn softmax_with_slack(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(0.0f64, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let denom = (-m).exp() + exps.iter().sum::<f64>();
    exps.into_iter().map(|e| e / denom).collect()
}

fn slack_logits(weights: &[f64]) -> Vec<f64> {
    let w: Vec<f64> = weights.iter().map(|v| v.max(FLOOR)).collect();
    let slack = (1.0 - w.iter().sum::<f64>()).max(FLOOR);
    w.iter().map(|v| (v / slack).ln()).collect()
}

fn phi_from(u: f64) -> f64 {
    PHI_MIN + (PHI_MAX - PHI_MIN) * sigmoid(u)
}

fn phi_to(phi: f64) -> f64 {
    logit((phi - PHI_MIN) / (PHI_MAX - PHI_MIN))
}

/// Maps unconstrained coordinates to an admissible model.
pub(crate) fn from_unconstrained(spec: &GarchSpec, theta: &[f64]) -> (MeanParams, GarchParams) {
    let (p, q) = (spec.p, spec.q);
    let fam = spec.family;
    let mut mean = MeanParams::new(theta[0], theta[1]);
    let mut k = 2;
    if fam.has_in_mean() {
        mean.lambda = Some(theta[k]);
        k += 1;
    }
    let v = &theta[k..];
    let params = match fam {
        GarchFamily::Garch | GarchFamily::Garchm => {
            let w = softmax_with_slack(&v[1..1 + q + p]);
            GarchParams::new(v[0].exp(), w[..q].to_vec(), w[q..].to_vec())
        }
        GarchFamily::Igarch => {
            let mut logits = v[1..q + p].to_vec();
            logits.push(0.0);
            let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
            let total: f64 = exps.iter().sum();
            let w: Vec<f64> = exps.iter().map(|e| e / total).collect();
            GarchParams::new(v[0].exp(), w[..q].to_vec(), w[q..].to_vec())
        }
        GarchFamily::Tgarch | GarchFamily::Cmtgarch => {
            // Categories: α/2, (α+γ)/2, β.
            let w = softmax_with_slack(&v[1..1 + 2 * q + p]);
            let alpha: Vec<f64> = w[..q].iter().map(|a| 2.0 * a).collect();
            let gamma: Vec<f64> = w[q..2 * q]
                .iter()
                .zip(&alpha)
                .map(|(d, a)| 2.0 * d - a)
                .collect();
            GarchParams::new(v[0].exp(), alpha, w[2 * q..].to_vec()).with_gamma(gamma)
        }
        GarchFamily::Egarch => {
            let alpha = v[1..1 + q].to_vec();
            let gamma = v[1 + q..1 + 2 * q].to_vec();
            let beta = v[1 + 2 * q..1 + 2 * q + p]
                .iter()
                .map(|b| b.tanh() / p as f64)
                .collect();
            GarchParams::new(v[0], alpha, beta).with_gamma(gamma)
        }
        GarchFamily::Pgarch | GarchFamily::Apgarch => {
            let asym = fam == GarchFamily::Apgarch;
            let n_gamma = if asym { q } else { 0 };
            let gamma: Vec<f64> = v[1 + q..1 + q + n_gamma].iter().map(|g| g.tanh()).collect();
            let mut logits = v[1..1 + q].to_vec();
            logits.extend_from_slice(&v[1 + q + n_gamma..1 + q + n_gamma + p]);
            let phi = phi_from(v[1 + q + n_gamma + p]);
            let w = softmax_with_slack(&logits);
            let alpha = (0..q)
                .map(|i| w[i] / asym_abs_moment(phi, gamma.get(i).copied().unwrap_or(0.0)))
                .collect();
            GarchParams::new(v[0].exp(), alpha, w[q..].to_vec())
                .with_gamma(gamma)
                .with_phi(phi)
        }
        GarchFamily::Cgarch => {
            let rho = sigmoid(v[1]);
            let persistence = rho * sigmoid(v[2]);
            let alpha = persistence * sigmoid(v[3]);
            let beta = persistence - alpha;
            let shock = beta * sigmoid(v[4]);
            GarchParams::simple(v[0].exp(), alpha, beta).with_component(rho, shock)
        }
    };
    (mean, params)
}

/// Inverse of [`from_unconstrained`], clamping points on the boundary of the
/// admissible region slightly inside it.
pub(crate) fn to_unconstrained(spec: &GarchSpec, mean: &MeanParams, params: &GarchParams) -> Vec<f64> {
    let (p, q) = (spec.p, spec.q);
    let fam = spec.family;
    let mut theta = vec![mean.c, mean.rho];
    if fam.has_in_mean() {
        theta.push(mean.lambda.unwrap_or(0.0));
    }
    let ln_omega = params.omega.max(FLOOR).ln();
    match fam {
        GarchFamily::Garch | GarchFamily::Garchm => {
            theta.push(ln_omega);
            let w: Vec<f64> = params.alpha.iter().chain(&params.beta).copied().collect();
            theta.extend(slack_logits(&w));
        }
        GarchFamily::Igarch => {
            theta.push(ln_omega);
            let last = params.beta[p - 1].max(FLOOR);
            theta.extend(
                params
                    .alpha
                    .iter()
                    .chain(&params.beta[..p - 1])
                    .map(|w| (w.max(FLOOR) / last).ln()),
            );
        }
        GarchFamily::Tgarch | GarchFamily::Cmtgarch => {
            theta.push(ln_omega);
            let mut w: Vec<f64> = params.alpha.iter().map(|a| a / 2.0).collect();
            w.extend(params.alpha.iter().zip(&params.gamma).map(|(a, g)| (a + g) / 2.0));
            w.extend(&params.beta);
            theta.extend(slack_logits(&w));
        }
        GarchFamily::Egarch => {
            theta.push(params.omega);
            theta.extend(&params.alpha);
            theta.extend(&params.gamma);
            theta.extend(
                params
                    .beta
                    .iter()
                    .map(|b| (b * p as f64).clamp(-1.0 + 1e-9, 1.0 - 1e-9).atanh()),
            );
        }
        GarchFamily::Pgarch | GarchFamily::Apgarch => {
            let phi = params.phi.unwrap_or(2.0).clamp(PHI_MIN + 1e-6, PHI_MAX - 1e-6);
            theta.push(ln_omega);
            let mut w: Vec<f64> = (0..q)
                .map(|i| params.alpha[i] * asym_abs_moment(phi, params.gamma.get(i).copied().unwrap_or(0.0)))
                .collect();
            w.extend(&params.beta);
            let logits = slack_logits(&w);
            theta.extend(&logits[..q]);
            if fam == GarchFamily::Apgarch {
                theta.extend(params.gamma.iter().map(|g| g.clamp(-1.0 + 1e-9, 1.0 - 1e-9).atanh()));
            }
            theta.extend(&logits[q..]);
            theta.push(phi_to(phi));
        }
        GarchFamily::Cgarch => {
            let rho = params.rho_c.unwrap_or(0.9);
            let persistence = params.alpha[0] + params.beta[0];
            theta.push(ln_omega);
            theta.push(logit(rho));
            theta.push(logit(persistence / rho));
            theta.push(logit(params.alpha[0] / persistence.max(FLOOR)));
            theta.push(logit(params.long_run_shock.unwrap_or(0.0) / params.beta[0].max(FLOOR)));
        }
    }
    theta
}
