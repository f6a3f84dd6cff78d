use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fevd::{generalized_fevd_parts, normalize_rows};
use super::{fit_var, VarModel, VolatilityPanel};
use crate::error::Result;

/// Spillover decomposition of one panel.
///
/// `matrix[i][j]` is the percentage of market i's forecast-error variance
/// due to shocks in market j; each row sums to 100. Aggregates follow the
/// usual connectedness convention: `from_others` sums a row off the
/// diagonal, `to_others` a column, and `total_index` is the off-diagonal
/// mass divided by the number of markets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpilloverTable {
    pub markets: Vec<String>,
    pub horizon: usize,
    pub lag_order: usize,
    pub matrix: Vec<Vec<f64>>,
    pub from_others: Vec<f64>,
    pub to_others: Vec<f64>,
    pub net: Vec<f64>,
    pub includes_own: Vec<f64>,
    pub total_index: f64,
    /// Row sums of the generalized decomposition before normalization, in percent.
    pub raw_row_sums: Vec<f64>,
}

/// to − from, element by element.
pub fn net_spillover(to_others: &[f64], from_others: &[f64]) -> Vec<f64> {
    to_others.iter().zip(from_others).map(|(t, f)| t - f).collect()
}

pub fn net_directional(table: &SpilloverTable) -> Vec<f64> {
    net_spillover(&table.to_others, &table.from_others)
}

impl SpilloverTable {
    /// Builds the table from the unnormalized generalized decomposition.
    pub fn from_parts(markets: Vec<String>, theta: &DMatrix<f64>, horizon: usize, lag_order: usize) -> Self {
        let n = markets.len();
        let d = normalize_rows(theta);
        let off = |i: usize, j: usize| if i == j { 0.0 } else { d[(i, j)] };
        let from_others: Vec<f64> = (0..n).map(|i| (0..n).map(|j| off(i, j)).sum()).collect();
        let to_others: Vec<f64> = (0..n).map(|j| (0..n).map(|i| off(i, j)).sum()).collect();
        let net = net_spillover(&to_others, &from_others);
        let includes_own = (0..n).map(|j| to_others[j] + d[(j, j)]).collect();
        let total_index = from_others.iter().sum::<f64>() / n as f64;
        Self {
            matrix: (0..n).map(|i| d.row(i).iter().copied().collect()).collect(),
            raw_row_sums: (0..n).map(|i| 100.0 * theta.row(i).sum()).collect(),
            markets,
            horizon,
            lag_order,
            from_others,
            to_others,
            net,
            includes_own,
            total_index,
        }
    }

    pub fn from_model(model: &VarModel, horizon: usize) -> Result<Self> {
        let theta = generalized_fevd_parts(model, horizon)?;
        Ok(Self::from_parts(model.markets.clone(), &theta, horizon, model.lag_order))
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.markets.len();
        DMatrix::from_fn(n, n, |i, j| self.matrix[i][j])
    }

    /// Writes the table as an N × N block with a "from others" column and
    /// "to others" / "including own" rows. The total index sits in the
    /// bottom-right corner.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let f = |v: f64| format!("{v:.6}");
        let mut header = vec![String::new()];
        header.extend(self.markets.iter().cloned());
        header.push("Contribution from others".into());
        w.write_record(&header)?;
        for (i, m) in self.markets.iter().enumerate() {
            let mut rec = vec![m.clone()];
            rec.extend(self.matrix[i].iter().map(|v| f(*v)));
            rec.push(f(self.from_others[i]));
            w.write_record(&rec)?;
        }
        let mut to = vec!["Contribution to others".to_string()];
        to.extend(self.to_others.iter().map(|v| f(*v)));
        to.push(f(self.to_others.iter().sum()));
        w.write_record(&to)?;
        let mut own = vec!["Contribution including own".to_string()];
        own.extend(self.includes_own.iter().map(|v| f(*v)));
        own.push(f(self.total_index));
        w.write_record(&own)?;
        let mut raw = vec!["Unnormalized row sum".to_string()];
        raw.extend(self.raw_row_sums.iter().map(|v| f(*v)));
        raw.push(String::new());
        w.write_record(&raw)?;
        w.flush()?;
        Ok(())
    }

    /// Writes one line per market: market, to, from, net.
    pub fn write_net_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["market", "to_others", "from_others", "net"])?;
        for (i, m) in self.markets.iter().enumerate() {
            w.write_record([
                m.clone(),
                format!("{:.6}", self.to_others[i]),
                format!("{:.6}", self.from_others[i]),
                format!("{:.6}", self.net[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fits a VAR(`p`) to the panel and decomposes its `horizon`-step
/// forecast-error variances.
pub fn spillover_table(panel: &VolatilityPanel, p: usize, horizon: usize) -> Result<SpilloverTable> {
    let model = fit_var(panel, p)?;
    SpilloverTable::from_model(&model, horizon)
}
