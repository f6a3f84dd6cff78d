//! Minimal SVG charts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::event::EventReport;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{x}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{t}</text>\n",
        x = WIDTH / 2.0,
        t = escape(title)
    )
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line chart of several series drawn one after another on a shared x axis,
/// separated by dashed vertical rules.
pub fn line_chart_svg(title: &str, segments: &[(&str, &[f64])]) -> String {
    let total: usize = segments.iter().map(|(_, v)| v.len()).sum::<usize>().max(2);
    let (lo, hi) = range(segments.iter().flat_map(|(_, v)| v.iter().copied()));
    let x = |i: usize| MARGIN + (WIDTH - 2.0 * MARGIN) * i as f64 / (total - 1) as f64;
    let y = |v: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v - lo) / (hi - lo);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

    let mut svg = header(title);
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(svg, "<text x=\"4\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\">{hi:.4}</text>", MARGIN);
    let _ = writeln!(svg, "<text x=\"4\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\">{lo:.4}</text>", HEIGHT - MARGIN);
    let mut offset = 0;
    for (k, (label, values)) in segments.iter().enumerate() {
        let color = colors[k % colors.len()];
        if k > 0 {
            let _ = writeln!(
                svg,
                "<line x1=\"{0:.2}\" y1=\"{1}\" x2=\"{0:.2}\" y2=\"{2}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>",
                x(offset),
                MARGIN,
                HEIGHT - MARGIN
            );
        }
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{:.2},{:.2}", x(offset + i), y(*v)))
            .collect();
        let _ = writeln!(svg, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" points=\"{}\"/>", points.join(" "));
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>",
            x(offset) + 4.0,
            MARGIN - 6.0,
            escape(label)
        );
        offset += values.len();
    }
    svg.push_str("</svg>\n");
    svg
}

/// Bar chart of signed values around a zero line.
pub fn bar_chart_svg(title: &str, labels: &[String], values: &[f64]) -> String {
    let (lo, hi) = range(values.iter().copied().chain([0.0]));
    let y = |v: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v - lo) / (hi - lo);
    let slot = (WIDTH - 2.0 * MARGIN) / values.len().max(1) as f64;
    let mut svg = header(title);
    let zero = y(0.0);
    for (i, (label, v)) in labels.iter().zip(values).enumerate() {
        let x0 = MARGIN + slot * i as f64 + slot * 0.15;
        let (top, h) = if *v >= 0.0 { (y(*v), zero - y(*v)) } else { (zero, y(*v) - zero) };
        let color = if *v >= 0.0 { "#2ca02c" } else { "#d62728" };
        let _ = writeln!(
            svg,
            "<rect x=\"{x0:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"{color}\"/>",
            slot * 0.7
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            x0 + slot * 0.35,
            HEIGHT - MARGIN + 16.0,
            escape(label)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{v:.1}</text>",
            x0 + slot * 0.35,
            if *v >= 0.0 { top - 4.0 } else { top + h + 12.0 }
        );
    }
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{zero:.2}\" x2=\"{}\" y2=\"{zero:.2}\" stroke=\"black\"/>",
        MARGIN,
        WIDTH - MARGIN
    );
    svg.push_str("</svg>\n");
    svg
}

fn file_stem(market: &str) -> String {
    market
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes one conditional-variance chart per market and one net-spillover
/// chart per window. Returns the paths written.
pub fn write_event_plots(report: &EventReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (pre, post) in report.pre.fits.iter().zip(&report.post.fits) {
        let svg = line_chart_svg(
            &format!("Conditional variance: {}", pre.market),
            &[
                (&format!("pre ({})", pre.spec.family), &pre.cond_variance),
                (&format!("post ({})", post.spec.family), &post.cond_variance),
            ],
        );
        let path = dir.join(format!("variance_{}.svg", file_stem(&pre.market)));
        fs::write(&path, svg)?;
        written.push(path);
    }
    for w in [&report.pre, &report.post] {
        let svg = bar_chart_svg(
            &format!("Net spillover ({})", w.label),
            &w.spillover.markets,
            &w.spillover.net,
        );
        let path = dir.join(format!("net_{}.svg", w.label));
        fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}
