//! Price panels, CSV ingestion and log returns.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aligned price levels, one column per market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricePanel {
    markets: Vec<String>,
    dates: Vec<NaiveDate>,
    /// `prices[m][t]` is the level of market `m` on `dates[t]`.
    prices: Vec<Vec<f64>>,
}

impl PricePanel {
    pub fn new(markets: Vec<String>, dates: Vec<NaiveDate>, prices: Vec<Vec<f64>>) -> Result<Self> {
        if markets.is_empty() {
            return Err(Error::InvalidInput("panel has no markets".into()));
        }
        if prices.len() != markets.len() {
            return Err(Error::InvalidInput(format!(
                "{} markets but {} price columns",
                markets.len(),
                prices.len()
            )));
        }
        for w in dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidInput(format!(
                    "dates must be strictly increasing: {} follows {}",
                    w[1], w[0]
                )));
            }
        }
        for (market, column) in markets.iter().zip(&prices) {
            if column.len() != dates.len() {
                return Err(Error::InvalidInput(format!(
                    "market '{market}' has {} prices for {} dates",
                    column.len(),
                    dates.len()
                )));
            }
            for (date, &value) in dates.iter().zip(column) {
                if !(value > 0.0) || !value.is_finite() {
                    return Err(Error::NonPositivePrice {
                        market: market.clone(),
                        date: date.to_string(),
                        value,
                    });
                }
            }
        }
        Ok(Self {
            markets,
            dates,
            prices,
        })
    }

    pub fn markets(&self) -> &[String] {
        &self.markets
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self, market: usize) -> &[f64] {
        &self.prices[market]
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Restricts the panel to the named markets, in the order given.
    pub fn select(&self, names: &[String]) -> Result<Self> {
        let mut prices = Vec::with_capacity(names.len());
        for name in names {
            let idx = self
                .markets
                .iter()
                .position(|m| m == name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown market '{name}'")))?;
            prices.push(self.prices[idx].clone());
        }
        Ok(Self {
            markets: names.to_vec(),
            dates: self.dates.clone(),
            prices,
        })
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file, &path.display().to_string())
    }

    /// Reads `date,<market>,...` CSV with ISO-8601 dates.
    ///
    /// Rows with an empty, `NA` or `NaN` cell in any market are dropped for
    /// the whole panel so that every market stays aligned on the same dates.
    pub fn from_csv_reader(reader: impl Read, source_name: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let parse_err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };

        let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
        if headers.len() < 2 || !headers[0].eq_ignore_ascii_case("date") {
            return Err(parse_err(
                1,
                "header must be `date,<market>,...`".to_string(),
            ));
        }
        let markets: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();

        let mut dates: Vec<NaiveDate> = Vec::new();
        let mut prices: Vec<Vec<f64>> = vec![Vec::new(); markets.len()];
        for (row_idx, record) in rdr.records().enumerate() {
            let line = row_idx + 2;
            let record = record.map_err(|e| parse_err(line, e.to_string()))?;
            if record.len() != headers.len() {
                return Err(parse_err(
                    line,
                    format!("expected {} fields, found {}", headers.len(), record.len()),
                ));
            }
            let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
                .map_err(|e| parse_err(line, format!("bad date '{}': {e}", &record[0])))?;
            if let Some(last) = dates.last() {
                if date <= *last {
                    return Err(parse_err(
                        line,
                        format!("date {date} is not after the previous date {last}"),
                    ));
                }
            }

            let mut row = Vec::with_capacity(markets.len());
            let mut missing = false;
            for (cell, market) in record.iter().skip(1).zip(&markets) {
                if is_missing(cell) {
                    missing = true;
                    continue;
                }
                let value: f64 = cell.parse().map_err(|_| {
                    parse_err(line, format!("market '{market}': '{cell}' is not a number"))
                })?;
                if !(value > 0.0) || !value.is_finite() {
                    return Err(parse_err(
                        line,
                        format!("non-positive price {value} for market '{market}' on {date}"),
                    ));
                }
                row.push(value);
            }
            if missing {
                continue;
            }
            dates.push(date);
            for (column, value) in prices.iter_mut().zip(row) {
                column.push(value);
            }
        }
        Self::new(markets, dates, prices)
    }
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan")
}

/// Dated log returns of one market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub market: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(market: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        let market = market.into();
        if dates.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "market '{market}': {} dates for {} values",
                dates.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "market '{market}': non-finite return at index {i}"
            )));
        }
        Ok(Self {
            market,
            dates,
            values,
        })
    }

    /// Builds a series on consecutive calendar days starting at `start`.
    pub fn with_daily_dates(market: impl Into<String>, start: NaiveDate, values: Vec<f64>) -> Self {
        let dates = start.iter_days().take(values.len()).collect();
        Self {
            market: market.into(),
            dates,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            market: self.market.clone(),
            dates: self.dates.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// `values[t] = ln p[t+1] - ln p[t]`, dated at the later observation.
pub fn log_returns(panel: &PricePanel) -> Result<Vec<ReturnSeries>> {
    panel
        .markets
        .iter()
        .zip(&panel.prices)
        .map(|(market, column)| {
            for (date, &p) in panel.dates.iter().zip(column) {
                if !(p > 0.0) {
                    return Err(Error::NonPositivePrice {
                        market: market.clone(),
                        date: date.to_string(),
                        value: p,
                    });
                }
            }
            let values = column.windows(2).map(|w| w[1].ln() - w[0].ln()).collect();
            let dates = panel.dates.iter().skip(1).copied().collect();
            ReturnSeries::new(market.clone(), dates, values)
        })
        .collect()
}
