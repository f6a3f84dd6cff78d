//! Conditional-volatility modelling and volatility-spillover measurement.
//!
//! The pipeline has two stages. First, each market's return series is fitted
//! with a menu of GARCH-type models by Gaussian quasi-maximum likelihood and
//! the best model is chosen by AIC. Second, the fitted conditional variances
//! are stacked into a panel, a VAR is estimated on it, and a generalized
//! forecast-error variance decomposition yields total, directional and net
//! spillover indices. [`event`] runs both stages on the two sides of an event
//! date and reports the differences.

pub mod data;
pub mod error;
pub mod event;
pub mod garch;
pub mod optim;
pub mod plot;
pub mod spillover;
pub mod stats;
pub mod window;

pub use data::{log_returns, PricePanel, ReturnSeries};
pub use error::{Error, Result};
pub use event::{run_event_analysis, EventReport, VarConfig};
pub use garch::{
    fit, select_model, simulate, GarchFamily, GarchFit, GarchParams, GarchSpec, MeanParams,
};
pub use spillover::{
    fit_var, generalized_fevd, ma_coefficients, net_directional, select_var_lag, spillover_table,
    SpilloverTable, VarModel, VolatilityPanel, VolatilityTransform,
};
pub use stats::{describe, DescriptiveStats};
pub use window::{split_event, EventWindowConfig};
