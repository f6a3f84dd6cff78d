//! Before/after comparison around an event date.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{log_returns, PricePanel, ReturnSeries};
use crate::error::{Error, Result};
use crate::garch::{select_model, write_fits_csv, GarchFamily, GarchFit, GarchParams, GarchSpec, MeanParams, ParamEstimate};
use crate::spillover::{select_var_lag, spillover_table, SpilloverTable, VolatilityPanel, VolatilityTransform};
use crate::stats::{describe, write_stats_csv, DescriptiveStats};
use crate::window::{split_event, EventWindowConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarConfig {
    pub max_p: usize,
    pub horizon: usize,
    pub transform: VolatilityTransform,
}

impl Default for VarConfig {
    fn default() -> Self {
        Self {
            max_p: 6,
            horizon: 1,
            transform: VolatilityTransform::Log,
        }
    }
}

/// The selected model of one market in one window, without the series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub market: String,
    pub family: GarchFamily,
    pub spec: GarchSpec,
    pub mean: MeanParams,
    pub params: GarchParams,
    pub estimates: Vec<ParamEstimate>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub persistence: f64,
    pub leverage: Option<f64>,
    pub asymmetry_degree: Option<f64>,
    pub n_obs: usize,
}

impl From<&GarchFit> for FitSummary {
    fn from(f: &GarchFit) -> Self {
        Self {
            market: f.market.clone(),
            family: f.spec.family,
            spec: f.spec,
            mean: f.mean,
            params: f.params.clone(),
            estimates: f.estimates.clone(),
            log_likelihood: f.log_likelihood,
            aic: f.aic,
            persistence: f.persistence,
            leverage: f.leverage,
            asymmetry_degree: f.asymmetry_degree,
            n_obs: f.n_obs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketStats {
    pub market: String,
    pub stats: DescriptiveStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub stats: Vec<MarketStats>,
    pub models: Vec<FitSummary>,
    pub var_lag: usize,
    pub spillover: SpilloverTable,
    #[serde(skip)]
    pub fits: Vec<GarchFit>,
}

/// A market left out of the comparison, with the reason per window and
/// candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketFailure {
    pub market: String,
    pub window: String,
    pub reasons: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketDelta {
    pub market: String,
    pub pre_family: GarchFamily,
    pub post_family: GarchFamily,
    pub persistence: f64,
    pub net: f64,
}

/// Post-minus-pre differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub markets: Vec<MarketDelta>,
    pub total_index: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub config: EventWindowConfig,
    pub var_config: VarConfig,
    pub candidates: Vec<GarchSpec>,
    pub markets: Vec<String>,
    pub pre: WindowReport,
    pub post: WindowReport,
    pub failures: Vec<MarketFailure>,
    pub deltas: Deltas,
}

/// Runs the comparison on log returns of a price panel.
pub fn run_event_analysis(
    panel: &PricePanel,
    cfg: &EventWindowConfig,
    candidates: &[GarchSpec],
    var_cfg: &VarConfig,
) -> Result<EventReport> {
    run_event_on_returns(&log_returns(panel)?, cfg, candidates, var_cfg)
}

enum Outcome {
    Fitted(DescriptiveStats, GarchFit),
    Failed(Vec<(String, String)>),
}

fn analyse(series: &ReturnSeries, candidates: &[GarchSpec]) -> Outcome {
    let stats = match describe(series) {
        Ok(s) => s,
        Err(e) => return Outcome::Failed(vec![("describe".into(), e.to_string())]),
    };
    match select_model(candidates, series) {
        Ok(fit) => Outcome::Fitted(stats, fit),
        Err(Error::AllCandidatesFailed(reasons)) => Outcome::Failed(reasons),
        Err(e) => Outcome::Failed(vec![("all".into(), e.to_string())]),
    }
}

/// Runs the comparison on return series that are already computed.
///
/// A market whose every candidate fails in either window is listed in
/// `failures` and left out of both windows.
pub fn run_event_on_returns(
    returns: &[ReturnSeries],
    cfg: &EventWindowConfig,
    candidates: &[GarchSpec],
    var_cfg: &VarConfig,
) -> Result<EventReport> {
    if returns.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "spillover needs at least 2 markets, got {}",
            returns.len()
        )));
    }
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidate models given".into()));
    }
    if var_cfg.horizon == 0 || var_cfg.max_p == 0 {
        return Err(Error::InvalidInput("VAR lag and horizon must be at least 1".into()));
    }
    let split: Vec<(ReturnSeries, ReturnSeries)> = returns
        .iter()
        .map(|s| split_event(s, cfg))
        .collect::<Result<_>>()?;

    let jobs: Vec<&ReturnSeries> = split.iter().flat_map(|(pre, post)| [pre, post]).collect();
    let outcomes: Vec<Outcome> = jobs.par_iter().map(|s| analyse(s, candidates)).collect();

    let mut failures = Vec::new();
    let mut kept: Vec<[(DescriptiveStats, GarchFit); 2]> = Vec::new();
    for (pair, series) in outcomes.chunks(2).zip(returns) {
        let mut ok = Vec::with_capacity(2);
        for (label, outcome) in ["pre", "post"].iter().zip(pair) {
            match outcome {
                Outcome::Fitted(s, f) => ok.push((s.clone(), f.clone())),
                Outcome::Failed(reasons) => failures.push(MarketFailure {
                    market: series.market.clone(),
                    window: label.to_string(),
                    reasons: reasons.clone(),
                }),
            }
        }
        if let Ok(both) = <[(DescriptiveStats, GarchFit); 2]>::try_from(ok) {
            kept.push(both);
        }
    }
    if kept.len() < 2 {
        let reasons = failures
            .iter()
            .map(|f| (format!("{} ({})", f.market, f.window), describe_reasons(&f.reasons)))
            .collect();
        return Err(Error::AllCandidatesFailed(reasons));
    }

    let window = |w: usize, label: &str, start: NaiveDate, end: NaiveDate| -> Result<WindowReport> {
        let fits: Vec<GarchFit> = kept.iter().map(|k| k[w].1.clone()).collect();
        let refs: Vec<&GarchFit> = fits.iter().collect();
        let panel = VolatilityPanel::from_fits(&refs, var_cfg.transform)?;
        let var_lag = select_var_lag(&panel, var_cfg.max_p)?;
        let spillover = spillover_table(&panel, var_lag, var_cfg.horizon)?;
        Ok(WindowReport {
            label: label.to_string(),
            start,
            end,
            stats: kept
                .iter()
                .map(|k| MarketStats {
                    market: k[w].1.market.clone(),
                    stats: k[w].0.clone(),
                })
                .collect(),
            models: fits.iter().map(FitSummary::from).collect(),
            var_lag,
            spillover,
            fits,
        })
    };
    let pre = window(0, "pre", cfg.pre_start, cfg.pre_end)?;
    let post = window(1, "post", cfg.post_start, cfg.post_end)?;

    let markets: Vec<String> = pre.models.iter().map(|m| m.market.clone()).collect();
    let deltas = Deltas {
        markets: (0..markets.len())
            .map(|i| MarketDelta {
                market: markets[i].clone(),
                pre_family: pre.models[i].family,
                post_family: post.models[i].family,
                persistence: post.models[i].persistence - pre.models[i].persistence,
                net: post.spillover.net[i] - pre.spillover.net[i],
            })
            .collect(),
        total_index: post.spillover.total_index - pre.spillover.total_index,
    };
    Ok(EventReport {
        config: cfg.clone(),
        var_config: *var_cfg,
        candidates: candidates.to_vec(),
        markets,
        pre,
        post,
        failures,
        deltas,
    })
}

fn describe_reasons(reasons: &[(String, String)]) -> String {
    reasons
        .iter()
        .map(|(c, r)| format!("{c}: {r}"))
        .collect::<Vec<_>>()
        .join("; ")
}

impl EventReport {
    /// Writes the report files into `dir`, creating it if needed.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for w in [&self.pre, &self.post] {
            let l = &w.label;
            let names: Vec<String> = w.stats.iter().map(|s| s.market.clone()).collect();
            let stats: Vec<DescriptiveStats> = w.stats.iter().map(|s| s.stats.clone()).collect();
            write_stats_csv(fs::File::create(dir.join(format!("stats_{l}.csv")))?, &names, &stats)?;
            fs::write(dir.join(format!("fits_{l}.json")), serde_json::to_string_pretty(&w.fits)?)?;
            write_fits_csv(fs::File::create(dir.join(format!("fits_{l}.csv")))?, &w.fits)?;
            w.spillover.write_csv(fs::File::create(dir.join(format!("spillover_{l}.csv")))?)?;
            w.spillover.write_net_csv(fs::File::create(dir.join(format!("net_{l}.csv")))?)?;
        }
        self.write_deltas_csv(fs::File::create(dir.join("deltas.csv"))?)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Long format: quantity, market, pre, post, delta.
    pub fn write_deltas_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["quantity", "market", "pre", "post", "delta"])?;
        let f = |v: f64| format!("{v:.6}");
        for (i, d) in self.deltas.markets.iter().enumerate() {
            w.write_record(["model", &d.market, d.pre_family.name(), d.post_family.name(), ""])?;
            let (pre, post) = (self.pre.models[i].persistence, self.post.models[i].persistence);
            w.write_record(["persistence", &d.market, &f(pre), &f(post), &f(d.persistence)])?;
            let (pre, post) = (self.pre.spillover.net[i], self.post.spillover.net[i]);
            w.write_record(["net_spillover", &d.market, &f(pre), &f(post), &f(d.net)])?;
        }
        let (pre, post) = (self.pre.spillover.total_index, self.post.spillover.total_index);
        w.write_record(["total_index", "", &f(pre), &f(post), &f(self.deltas.total_index)])?;
        w.flush()?;
        Ok(())
    }
}
