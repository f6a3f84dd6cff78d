//! Resolved command configuration: TOML file values overridden by flags.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use volspill_core::garch::{GarchFamily, GarchSpec};
use volspill_core::spillover::VolatilityTransform;
use volspill_core::{EventWindowConfig, Error, Result, VarConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Every field is optional so a config file may set any subset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub markets: Option<Vec<String>>,
    pub scale: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub event_date: Option<NaiveDate>,
    pub pre: Option<String>,
    pub post: Option<String>,
    pub equal_windows: Option<bool>,
    pub families: Option<Vec<String>>,
    pub max_var_lag: Option<usize>,
    pub horizon: Option<usize>,
    pub log_variance: Option<bool>,
    pub plots: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            source_name: path.display().to_string(),
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: FileConfig) -> Self {
        Self {
            input: over.input.or(self.input),
            markets: over.markets.or(self.markets),
            scale: over.scale.or(self.scale),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            seed: over.seed.or(self.seed),
            event_date: over.event_date.or(self.event_date),
            pre: over.pre.or(self.pre),
            post: over.post.or(self.post),
            equal_windows: over.equal_windows.or(self.equal_windows),
            families: over.families.or(self.families),
            max_var_lag: over.max_var_lag.or(self.max_var_lag),
            horizon: over.horizon.or(self.horizon),
            log_variance: over.log_variance.or(self.log_variance),
            plots: over.plots.or(self.plots),
        }
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliConfig {
    pub input: PathBuf,
    pub markets: Option<Vec<String>>,
    pub scale: f64,
    /// Left out of the serialized form so reports do not depend on where they are written.
    #[serde(skip)]
    pub out: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
    pub window: EventWindowConfig,
    pub candidates: Vec<GarchSpec>,
    pub var: VarConfig,
    pub plots: bool,
}

impl CliConfig {
    pub fn resolve(f: FileConfig) -> Result<Self> {
        let input = f
            .input
            .filter(|p| !p.as_os_str().is_empty())
            .ok_or_else(|| Error::InvalidInput("--input is required".into()))?;
        let out = f.out.unwrap_or_else(|| PathBuf::from("out"));
        if out.as_os_str().is_empty() {
            return Err(Error::InvalidInput("--out must not be empty".into()));
        }
        let scale = f.scale.unwrap_or(100.0);
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidInput(format!("--scale must be positive, got {scale}")));
        }
        let horizon = f.horizon.unwrap_or(1);
        let max_p = f.max_var_lag.unwrap_or(6);
        if horizon == 0 || max_p == 0 {
            return Err(Error::InvalidInput("--horizon and --max-var-lag must be at least 1".into()));
        }
        let candidates = match f.families {
            Some(names) => names.iter().map(|s| parse_spec(s)).collect::<Result<Vec<_>>>()?,
            None => GarchSpec::all_first_order(),
        };
        if candidates.is_empty() {
            return Err(Error::InvalidInput("--families lists no candidate models".into()));
        }
        Ok(Self {
            input,
            markets: f.markets.filter(|m| !m.is_empty()),
            scale,
            out,
            format: f.format.unwrap_or_default(),
            seed: f.seed.unwrap_or(0),
            window: resolve_window(f.event_date, f.pre.as_deref(), f.post.as_deref(), f.equal_windows)?,
            candidates,
            var: VarConfig {
                max_p,
                horizon,
                transform: if f.log_variance.unwrap_or(true) {
                    VolatilityTransform::Log
                } else {
                    VolatilityTransform::Raw
                },
            },
            plots: f.plots.unwrap_or(false),
        })
    }
}

fn resolve_window(
    event: Option<NaiveDate>,
    pre: Option<&str>,
    post: Option<&str>,
    equal: Option<bool>,
) -> Result<EventWindowConfig> {
    let base = EventWindowConfig::gulf_2017();
    let pre = pre.map(parse_range).transpose()?.unwrap_or((base.pre_start, base.pre_end));
    let post = post.map(parse_range).transpose()?.unwrap_or((base.post_start, base.post_end));
    EventWindowConfig::new(
        event.unwrap_or(base.event_date),
        pre,
        post,
        equal.unwrap_or(base.require_equal_length),
    )
}

/// `START..END` with ISO dates.
pub fn parse_range(s: &str) -> Result<(NaiveDate, NaiveDate)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::InvalidInput(format!("window '{s}' must look like START..END")))?;
    let date = |d: &str| {
        NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d")
            .map_err(|e| Error::InvalidInput(format!("bad date '{d}' in window '{s}': {e}")))
    };
    Ok((date(a)?, date(b)?))
}

/// `TGARCH` or `TGARCH(p,q)`.
pub fn parse_spec(s: &str) -> Result<GarchSpec> {
    let s = s.trim();
    match s.split_once('(') {
        None => Ok(GarchSpec::first_order(s.parse::<GarchFamily>()?)),
        Some((name, rest)) => {
            let orders = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidInput(format!("bad model '{s}'")))?;
            let (p, q) = orders
                .split_once(',')
                .ok_or_else(|| Error::InvalidInput(format!("bad orders in '{s}'")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad order '{v}' in '{s}'")))
            };
            GarchSpec::new(name.parse()?, num(p)?, num(q)?)
        }
    }
}
