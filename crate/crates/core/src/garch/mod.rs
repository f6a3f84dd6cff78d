//! The GARCH model menu: recursions, likelihood, estimation and simulation.

mod family;
mod fit;
mod likelihood;
mod recursion;
mod simulate;
mod transform;

pub use family::{GarchFamily, GarchParams, GarchSpec, MeanParams};
pub use fit::{
    aic, asymmetry_degree, best_fit, fit, leverage, loglik_gradient, persistence, select_model, write_fits_csv,
    GarchFit, ParamEstimate,
};
pub use likelihood::log_likelihood;
pub use recursion::{unconditional_variance, variance_recursion};
pub use simulate::{simulate, simulate_with_innovations};
pub use transform::{natural_names, num_free};
