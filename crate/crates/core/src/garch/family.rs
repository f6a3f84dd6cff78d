use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The model menu. Declaration order is the tie-break order used by
/// [`select_model`](super::select_model).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GarchFamily {
    /// σ²ₜ = ω + Σ αᵢ ε²ₜ₋ᵢ + Σ βⱼ σ²ₜ₋ⱼ
    Garch,
    /// ln σ²ₜ = ω + Σ (αᵢ zₜ₋ᵢ + γᵢ (|zₜ₋ᵢ| − √(2/π))) + Σ βⱼ ln σ²ₜ₋ⱼ
    Egarch,
    /// σ²ₜ = ω + Σ (αᵢ + γᵢ 1[εₜ₋ᵢ < 0]) ε²ₜ₋ᵢ + Σ βⱼ σ²ₜ₋ⱼ
    Tgarch,
    /// GARCH with Σα + Σβ = 1.
    Igarch,
    /// σᵩₜ = ω + Σ αᵢ |εₜ₋ᵢ|ᵠ + Σ βⱼ σᵩₜ₋ⱼ
    Pgarch,
    /// σᵩₜ = ω + Σ αᵢ (|εₜ₋ᵢ| − γᵢ εₜ₋ᵢ)ᵠ + Σ βⱼ σᵩₜ₋ⱼ
    Apgarch,
    /// GARCH variance with λ σ²ₜ added to the mean equation.
    Garchm,
    /// Permanent/transitory component model (orders 1,1 only).
    Cgarch,
    /// Two-lag threshold recursion
    /// σ²ₜ = ω + α ε²ₜ₋₁ + β (ω + (α + γ 1[εₜ₋₂ < 0]) ε²ₜ₋₂ + β σ²ₜ₋₂)
    /// (orders 1,1 only).
    Cmtgarch,
}

impl GarchFamily {
    pub const ALL: [GarchFamily; 9] = [
        GarchFamily::Garch,
        GarchFamily::Egarch,
        GarchFamily::Tgarch,
        GarchFamily::Igarch,
        GarchFamily::Pgarch,
        GarchFamily::Apgarch,
        GarchFamily::Garchm,
        GarchFamily::Cgarch,
        GarchFamily::Cmtgarch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GarchFamily::Garch => "GARCH",
            GarchFamily::Egarch => "EGARCH",
            GarchFamily::Tgarch => "TGARCH",
            GarchFamily::Igarch => "IGARCH",
            GarchFamily::Pgarch => "PGARCH",
            GarchFamily::Apgarch => "APGARCH",
            GarchFamily::Garchm => "GARCHM",
            GarchFamily::Cgarch => "CGARCH",
            GarchFamily::Cmtgarch => "CMTGARCH",
        }
    }

    /// Families carrying γ coefficients.
    pub fn has_gamma(self) -> bool {
        matches!(
            self,
            GarchFamily::Egarch | GarchFamily::Tgarch | GarchFamily::Apgarch | GarchFamily::Cmtgarch
        )
    }

    pub fn has_power(self) -> bool {
        matches!(self, GarchFamily::Pgarch | GarchFamily::Apgarch)
    }

    pub fn has_in_mean(self) -> bool {
        self == GarchFamily::Garchm
    }

    fn fixed_orders(self) -> bool {
        matches!(self, GarchFamily::Cgarch | GarchFamily::Cmtgarch)
    }
}

impl fmt::Display for GarchFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GarchFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        GarchFamily::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown GARCH family '{s}'")))
    }
}

/// A family together with its orders: `p` lagged variances, `q` lagged shocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GarchSpec {
    pub family: GarchFamily,
    pub p: usize,
    pub q: usize,
}

impl GarchSpec {
    pub fn new(family: GarchFamily, p: usize, q: usize) -> Result<Self> {
        if p < 1 || q < 1 {
            return Err(Error::InvalidInput(format!(
                "{family}: orders must be at least 1 (p={p}, q={q})"
            )));
        }
        if family.fixed_orders() && (p, q) != (1, 1) {
            return Err(Error::InvalidInput(format!(
                "{family} is defined for p = q = 1 only"
            )));
        }
        Ok(Self { family, p, q })
    }

    /// Order (1,1) of the given family.
    pub fn first_order(family: GarchFamily) -> Self {
        Self { family, p: 1, q: 1 }
    }

    /// Every family at order (1,1), in enumeration order.
    pub fn all_first_order() -> Vec<Self> {
        GarchFamily::ALL.into_iter().map(Self::first_order).collect()
    }

    pub fn label(&self) -> String {
        format!("{}({},{})", self.family, self.p, self.q)
    }
}

/// Mean equation rₜ = C + ρ rₜ₋₁ (+ λ σ²ₜ) + εₜ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanParams {
    pub c: f64,
    pub rho: f64,
    pub lambda: Option<f64>,
}

impl MeanParams {
    pub fn new(c: f64, rho: f64) -> Self {
        Self {
            c,
            rho,
            lambda: None,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub(crate) fn validate(&self, spec: &GarchSpec) -> Result<()> {
        if self.lambda.is_some() != spec.family.has_in_mean() {
            return Err(Error::InvalidInput(format!(
                "{}: λ must be present exactly for GARCHM",
                spec.family
            )));
        }
        let finite = self.c.is_finite() && self.rho.is_finite() && self.lambda.is_none_or(f64::is_finite);
        if !finite {
            return Err(Error::Inadmissible("non-finite mean parameter".into()));
        }
        Ok(())
    }
}

/// Variance-equation coefficients.
///
/// `alpha` and `gamma` have length q, `beta` has length p. For EGARCH, α is
/// the sign term and γ the magnitude term. For CGARCH, `omega` is the
/// intercept of the long-run component, `rho_c` its persistence and
/// `long_run_shock` its loading on ε² − σ².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub omega: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub long_run_shock: Option<f64>,
}

/// Bounds of the power exponent explored by the optimizer.
pub(crate) const PHI_MIN: f64 = 0.2;
pub(crate) const PHI_MAX: f64 = 4.0;

impl GarchParams {
    pub fn new(omega: f64, alpha: Vec<f64>, beta: Vec<f64>) -> Self {
        Self {
            omega,
            alpha,
            beta,
            gamma: Vec::new(),
            phi: None,
            rho_c: None,
            long_run_shock: None,
        }
    }

    /// Order (1,1) shorthand.
    pub fn simple(omega: f64, alpha: f64, beta: f64) -> Self {
        Self::new(omega, vec![alpha], vec![beta])
    }

    pub fn with_gamma(mut self, gamma: Vec<f64>) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_component(mut self, rho_c: f64, long_run_shock: f64) -> Self {
        self.rho_c = Some(rho_c);
        self.long_run_shock = Some(long_run_shock);
        self
    }

    /// Long-run variance level of the CGARCH permanent component, ω / (1 − ρ_c).
    pub fn sigma_bar(&self) -> Option<f64> {
        self.rho_c.map(|r| self.omega / (1.0 - r))
    }

    pub fn sum_alpha(&self) -> f64 {
        self.alpha.iter().sum()
    }

    pub fn sum_beta(&self) -> f64 {
        self.beta.iter().sum()
    }

    pub fn sum_gamma(&self) -> f64 {
        self.gamma.iter().sum()
    }

    /// Checks shapes and the family's admissibility region.
    pub fn validate(&self, spec: &GarchSpec) -> Result<()> {
        let fam = spec.family;
        let bad = |msg: String| Err(Error::Inadmissible(format!("{fam}: {msg}")));
        if self.alpha.len() != spec.q || self.beta.len() != spec.p {
            return bad(format!(
                "expected {} alpha and {} beta coefficients, got {} and {}",
                spec.q,
                spec.p,
                self.alpha.len(),
                self.beta.len()
            ));
        }
        let want_gamma = if fam.has_gamma() { spec.q } else { 0 };
        if self.gamma.len() != want_gamma {
            return bad(format!("expected {want_gamma} gamma coefficients, got {}", self.gamma.len()));
        }
        if self.phi.is_some() != fam.has_power() {
            return bad("power exponent must be present exactly for PGARCH/APGARCH".into());
        }
        let component = fam == GarchFamily::Cgarch;
        if self.rho_c.is_some() != component || self.long_run_shock.is_some() != component {
            return bad("component parameters must be present exactly for CGARCH".into());
        }
        let all_finite = self.omega.is_finite()
            && self.alpha.iter().chain(&self.beta).chain(&self.gamma).all(|v| v.is_finite())
            && self.phi.is_none_or(f64::is_finite);
        if !all_finite {
            return bad("non-finite coefficient".into());
        }

        let nonneg = |v: &[f64]| v.iter().all(|&x| x >= 0.0);
        let (sa, sb, sg) = (self.sum_alpha(), self.sum_beta(), self.sum_gamma());
        match fam {
            GarchFamily::Egarch => {
                let sum_abs: f64 = self.beta.iter().map(|b| b.abs()).sum();
                if sum_abs >= 1.0 {
                    return bad(format!("Σ|β| = {sum_abs} must be below 1"));
                }
                return Ok(());
            }
            _ if !(self.omega > 0.0) => return bad(format!("ω = {} must be positive", self.omega)),
            _ => {}
        }
        if !nonneg(&self.alpha) || !nonneg(&self.beta) {
            return bad("α and β must be non-negative".into());
        }
        match fam {
            GarchFamily::Garch | GarchFamily::Garchm => {
                if sa + sb >= 1.0 {
                    return bad(format!("Σα + Σβ = {} must be below 1", sa + sb));
                }
            }
            GarchFamily::Igarch => {
                if (sa + sb - 1.0).abs() > 1e-9 {
                    return bad(format!("Σα + Σβ = {} must equal 1", sa + sb));
                }
            }
            GarchFamily::Tgarch | GarchFamily::Cmtgarch => {
                if self.alpha.iter().zip(&self.gamma).any(|(a, g)| a + g < 0.0) {
                    return bad("α + γ must be non-negative".into());
                }
                if sa + sb + 0.5 * sg >= 1.0 {
                    return bad(format!("Σα + Σβ + ½Σγ = {} must be below 1", sa + sb + 0.5 * sg));
                }
            }
            GarchFamily::Pgarch | GarchFamily::Apgarch => {
                let phi = self.phi.expect("checked above");
                if !(phi > 0.0) {
                    return bad(format!("φ = {phi} must be positive"));
                }
                if self.gamma.iter().any(|g| g.abs() >= 1.0) {
                    return bad("|γ| must be below 1".into());
                }
                let drive = power_drive(self, phi);
                if drive + sb >= 1.0 {
                    return bad(format!("Σ αᵢ E|shock|^φ + Σβ = {} must be below 1", drive + sb));
                }
            }
            GarchFamily::Cgarch => {
                let rho = self.rho_c.expect("checked above");
                let shock = self.long_run_shock.expect("checked above");
                if !(rho > 0.0 && rho < 1.0) {
                    return bad(format!("ρ_c = {rho} must lie in (0, 1)"));
                }
                if sa + sb >= rho {
                    return bad(format!("α + β = {} must be below ρ_c = {rho}", sa + sb));
                }
                if !(shock >= 0.0 && shock <= sb) {
                    return bad(format!("long-run shock loading {shock} must lie in [0, β]"));
                }
            }
            GarchFamily::Egarch => unreachable!(),
        }
        Ok(())
    }
}

/// E|z|^φ for standard normal z.
pub(crate) fn abs_moment(phi: f64) -> f64 {
    2f64.powf(phi / 2.0) * statrs::function::gamma::gamma((phi + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}

/// E(|z| − γ z)^φ for standard normal z.
pub(crate) fn asym_abs_moment(phi: f64, gamma: f64) -> f64 {
    abs_moment(phi) * 0.5 * ((1.0 + gamma).powf(phi) + (1.0 - gamma).powf(phi))
}

/// Σ αᵢ E(|z| − γᵢ z)^φ, the expected ARCH contribution to σᵩ per unit σᵩ.
pub(crate) fn power_drive(params: &GarchParams, phi: f64) -> f64 {
    params
        .alpha
        .iter()
        .enumerate()
        .map(|(i, a)| a * asym_abs_moment(phi, params.gamma.get(i).copied().unwrap_or(0.0)))
        .sum()
}
