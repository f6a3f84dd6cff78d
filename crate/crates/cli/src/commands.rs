use std::fs;
use std::path::Path;

use volspill_core::event::run_event_on_returns;
use volspill_core::garch::write_fits_csv;
use volspill_core::plot::write_event_plots;
use volspill_core::spillover::{select_var_lag, spillover_table, VolatilityPanel};
use volspill_core::stats::write_stats_csv;
use volspill_core::{describe, log_returns, select_model, Error, GarchFit, PricePanel, Result, ReturnSeries};

use crate::config::{CliConfig, OutputFormat};

fn load_returns(cfg: &CliConfig) -> Result<Vec<ReturnSeries>> {
    let panel = PricePanel::from_csv_path(&cfg.input).map_err(|e| match e {
        Error::Io(io) => Error::InvalidInput(format!("{}: {io}", cfg.input.display())),
        other => other,
    })?;
    let panel = match &cfg.markets {
        Some(names) => panel.select(names)?,
        None => panel,
    };
    Ok(log_returns(&panel)?.iter().map(|r| r.scaled(cfg.scale)).collect())
}

fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

pub fn describe_cmd(cfg: &CliConfig) -> Result<()> {
    let returns = load_returns(cfg)?;
    let stats = returns.iter().map(describe).collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = returns.iter().map(|r| r.market.clone()).collect();
    fs::create_dir_all(&cfg.out)?;
    match cfg.format {
        OutputFormat::Csv => write_stats_csv(fs::File::create(cfg.out.join("stats.csv"))?, &names, &stats)?,
        OutputFormat::Json => {
            let rows: Vec<_> = names.iter().zip(&stats).collect();
            write_json(&cfg.out.join("stats.json"), &rows)?
        }
    }
    write_stats_csv(std::io::stdout().lock(), &names, &stats)
}

/// Fits every market; markets whose candidates all fail are reported
/// after the others are written.
fn fit_all(returns: &[ReturnSeries], cfg: &CliConfig) -> (Vec<GarchFit>, Vec<(String, String)>) {
    let mut fits = Vec::new();
    let mut failed = Vec::new();
    for r in returns {
        match select_model(&cfg.candidates, r) {
            Ok(f) => fits.push(f),
            Err(e) => failed.push((r.market.clone(), e.to_string())),
        }
    }
    (fits, failed)
}

pub fn fit_cmd(cfg: &CliConfig) -> Result<()> {
    let returns = load_returns(cfg)?;
    let (fits, failed) = fit_all(&returns, cfg);
    fs::create_dir_all(&cfg.out)?;
    match cfg.format {
        OutputFormat::Csv => write_fits_csv(fs::File::create(cfg.out.join("fits.csv"))?, &fits)?,
        OutputFormat::Json => write_json(&cfg.out.join("fits.json"), &fits)?,
    }
    for f in &fits {
        println!(
            "{}: {} aic={:.4} persistence={:.4}",
            f.market,
            f.spec.label(),
            f.aic,
            f.persistence
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::AllCandidatesFailed(failed))
    }
}

pub fn spillover_cmd(cfg: &CliConfig) -> Result<()> {
    let returns = load_returns(cfg)?;
    if returns.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "spillover needs at least 2 markets, got {}",
            returns.len()
        )));
    }
    let (fits, failed) = fit_all(&returns, cfg);
    if !failed.is_empty() {
        return Err(Error::AllCandidatesFailed(failed));
    }
    let refs: Vec<&GarchFit> = fits.iter().collect();
    let panel = VolatilityPanel::from_fits(&refs, cfg.var.transform)?;
    let p = select_var_lag(&panel, cfg.var.max_p)?;
    let table = spillover_table(&panel, p, cfg.var.horizon)?;
    fs::create_dir_all(&cfg.out)?;
    match cfg.format {
        OutputFormat::Csv => {
            table.write_csv(fs::File::create(cfg.out.join("spillover.csv"))?)?;
            table.write_net_csv(fs::File::create(cfg.out.join("net.csv"))?)?;
        }
        OutputFormat::Json => write_json(&cfg.out.join("spillover.json"), &table)?,
    }
    table.write_csv(std::io::stdout().lock())?;
    println!("total spillover index: {:.4} (VAR lag {p}, horizon {})", table.total_index, cfg.var.horizon);
    Ok(())
}

pub fn event_cmd(cfg: &CliConfig) -> Result<()> {
    let returns = load_returns(cfg)?;
    let report = run_event_on_returns(&returns, &cfg.window, &cfg.candidates, &cfg.var)?;
    report.write_dir(&cfg.out)?;
    write_json(&cfg.out.join("config.json"), cfg)?;
    if cfg.plots {
        write_event_plots(&report, &cfg.out)?;
    }
    for f in &report.failures {
        eprintln!("excluded {} ({} window)", f.market, f.window);
    }
    for d in &report.deltas.markets {
        println!(
            "{}: {} -> {}, persistence {:+.4}, net spillover {:+.4}",
            d.market, d.pre_family, d.post_family, d.persistence, d.net
        );
    }
    println!(
        "total spillover index: {:.4} -> {:.4}",
        report.pre.spillover.total_index, report.post.spillover.total_index
    );
    Ok(())
}
