//! Command-line front end: volatility models and spillover tables from a
//! price CSV.
//!
//! Exit codes: 0 on success, 2 on usage or input errors, 3 when the
//! numerical machinery fails.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use config::{CliConfig, FileConfig, OutputFormat};

#[derive(Parser)]
#[command(name = "volspill", version, about = "GARCH volatility and spillover analysis around an event")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics of each market's returns.
    Describe(Flags),
    /// Selects a volatility model per market by AIC.
    Fit(Flags),
    /// Spillover table of the fitted volatilities over the whole sample.
    Spillover(Flags),
    /// Compares models and spillovers before and after an event.
    Event(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Price CSV: `date,<market>,...`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated market columns to use (default: all).
    #[arg(long, value_delimiter = ',')]
    markets: Option<Vec<String>>,
    /// Factor applied to log returns (default 100, i.e. percent).
    #[arg(long)]
    scale: Option<f64>,
    /// Output directory (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Recorded in the event configuration; estimation is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    event_date: Option<NaiveDate>,
    /// Pre-event window, `START..END`.
    #[arg(long)]
    pre: Option<String>,
    /// Post-event window, `START..END`.
    #[arg(long)]
    post: Option<String>,
    /// Require both windows to hold the same number of observations.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    equal_windows: Option<bool>,
    /// Comma-separated candidates, e.g. `GARCH,TGARCH(1,2)` (default: all nine at (1,1)).
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<String>>,
    #[arg(long)]
    max_var_lag: Option<usize>,
    /// Forecast horizon of the variance decomposition.
    #[arg(long)]
    horizon: Option<usize>,
    /// Model log variances (default) rather than variances.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    log_variance: Option<bool>,
    /// Write SVG charts with the event report.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    plots: Option<bool>,
}

impl Flags {
    fn resolve(self) -> volspill_core::Result<CliConfig> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            input: self.input,
            markets: self.markets,
            scale: self.scale,
            out: self.out,
            format: self.format,
            seed: self.seed,
            event_date: self.event_date,
            pre: self.pre,
            post: self.post,
            equal_windows: self.equal_windows,
            // An empty `--families ""` arrives as one empty name.
            families: self.families.map(|f| f.into_iter().filter(|s| !s.trim().is_empty()).collect()),
            max_var_lag: self.max_var_lag,
            horizon: self.horizon,
            log_variance: self.log_variance,
            plots: self.plots,
        };
        CliConfig::resolve(file.overlay(flags))
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (flags, command): (Flags, fn(&CliConfig) -> volspill_core::Result<()>) = match cli.command {
        Command::Describe(f) => (f, commands::describe_cmd),
        Command::Fit(f) => (f, commands::fit_cmd),
        Command::Spillover(f) => (f, commands::spillover_cmd),
        Command::Event(f) => (f, commands::event_cmd),
    };
    match flags.resolve().and_then(|cfg| command(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() { 3 } else { 2 }
        }
    }
}
