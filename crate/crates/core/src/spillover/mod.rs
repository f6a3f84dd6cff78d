//! Generalized-FEVD volatility spillover indices.

mod fevd;
mod table;
mod var;

use std::collections::BTreeSet;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::garch::GarchFit;

pub use fevd::{generalized_fevd, generalized_fevd_parts, ma_coefficients};
pub use table::{net_directional, net_spillover, spillover_table, SpilloverTable};
pub use var::{fit_var, select_var_lag, VarModel};

/// Scale on which the VAR is estimated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolatilityTransform {
    /// ln σ²ₜ
    #[default]
    Log,
    /// σ²ₜ
    Raw,
}

/// Conditional variances of several markets on common dates.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityPanel {
    markets: Vec<String>,
    dates: Vec<NaiveDate>,
    /// T × N, untransformed.
    variances: DMatrix<f64>,
    transform: VolatilityTransform,
}

impl VolatilityPanel {
    /// `columns[i]` holds the variances of `markets[i]` on `dates`.
    pub fn new(
        markets: Vec<String>,
        dates: Vec<NaiveDate>,
        columns: Vec<Vec<f64>>,
        transform: VolatilityTransform,
    ) -> Result<Self> {
        if markets.len() != columns.len() {
            return Err(Error::InvalidInput(format!(
                "{} market names for {} columns",
                markets.len(),
                columns.len()
            )));
        }
        if markets.is_empty() {
            return Err(Error::InvalidInput("volatility panel has no markets".into()));
        }
        let t = dates.len();
        for (m, col) in markets.iter().zip(&columns) {
            if col.len() != t {
                return Err(Error::InvalidInput(format!(
                    "market '{m}' has {} values for {t} dates",
                    col.len()
                )));
            }
            if let Some(v) = col.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "market '{m}' has a non-positive or non-finite variance {v}"
                )));
            }
        }
        let variances = DMatrix::from_fn(t, markets.len(), |r, c| columns[c][r]);
        Ok(Self {
            markets,
            dates,
            variances,
            transform,
        })
    }

    /// Stacks the conditional variances of several fits on the dates they
    /// all share.
    pub fn from_fits(fits: &[&GarchFit], transform: VolatilityTransform) -> Result<Self> {
        let mut common: Option<BTreeSet<NaiveDate>> = None;
        for f in fits {
            let dates: BTreeSet<NaiveDate> = f.dates.iter().copied().collect();
            common = Some(match common {
                None => dates,
                Some(c) => c.intersection(&dates).copied().collect(),
            });
        }
        let dates: Vec<NaiveDate> = common.unwrap_or_default().into_iter().collect();
        let columns = fits
            .iter()
            .map(|f| {
                let mut it = f.dates.iter().zip(&f.cond_variance).peekable();
                dates
                    .iter()
                    .map(|d| loop {
                        let (fd, v) = it.next().expect("common date is present in every fit");
                        if fd == d {
                            break *v;
                        }
                    })
                    .collect()
            })
            .collect();
        let markets = fits.iter().map(|f| f.market.clone()).collect();
        Self::new(markets, dates, columns, transform)
    }

    pub fn markets(&self) -> &[String] {
        &self.markets
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn num_markets(&self) -> usize {
        self.markets.len()
    }

    pub fn transform(&self) -> VolatilityTransform {
        self.transform
    }

    pub fn variances(&self) -> &DMatrix<f64> {
        &self.variances
    }

    /// The T × N matrix the VAR is estimated on.
    pub fn data(&self) -> DMatrix<f64> {
        match self.transform {
            VolatilityTransform::Log => self.variances.map(f64::ln),
            VolatilityTransform::Raw => self.variances.clone(),
        }
    }

    /// Columns reordered so that column k of the result is column `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.markets.len()];
        if order.len() != self.markets.len() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidInput(format!("{order:?} is not a permutation of the markets")));
        }
        let variances = DMatrix::from_fn(self.len(), order.len(), |r, c| self.variances[(r, order[c])]);
        Ok(Self {
            markets: order.iter().map(|&i| self.markets[i].clone()).collect(),
            dates: self.dates.clone(),
            variances,
            transform: self.transform,
        })
    }
}
