//! Hand-written SVG figures: metric-vs-budget line charts with ±1 s.d. bands
//! and relative-improvement heatmaps. Output depends only on the records.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::perturb::Method;
use crate::records::{ExperimentRecord, Metric};
use crate::stats::{self, ImprovementRow};

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 320.0;
const MARGIN: f64 = 50.0;

fn color(method: Method) -> &'static str {
    match method {
        Method::Dice => "#1f77b4",
        Method::FcomDice => "#d62728",
    }
}

/// Mean and s.d. per budget for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub method: Method,
    pub points: Vec<(f64, f64, f64)>,
}

fn series(records: &[&ExperimentRecord], metric: Metric) -> Vec<Series> {
    let mut by_method: BTreeMap<&'static str, (Method, BTreeMap<u64, Vec<f64>>)> = BTreeMap::new();
    for r in records {
        by_method
            .entry(r.method.as_str())
            .or_insert_with(|| (r.method, BTreeMap::new()))
            .1
            .entry(r.beta_b.to_bits())
            .or_default()
            .push(metric.of(r));
    }
    by_method
        .into_values()
        .map(|(method, points)| {
            let mut pts: Vec<(f64, f64, f64)> = points
                .into_iter()
                .map(|(b, v)| {
                    let s = stats::summarize(&v).expect("nonempty group");
                    (f64::from_bits(b), s.mean, s.sd)
                })
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { method, points: pts }
        })
        .collect()
}

/// Line chart of `metric` against the budget fraction, one line per method.
pub fn line_chart_svg(title: &str, metric: Metric, series: &[Series]) -> String {
    let (x0, x1) = (MARGIN, WIDTH - 20.0);
    let (y0, y1) = (HEIGHT - MARGIN, 30.0);
    let sx = |b: f64| x0 + b * (x1 - x0);
    let sy = |v: f64| y0 - v.clamp(0.0, 1.0) * (y0 - y1);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{title}</text>"#, WIDTH / 2.0);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t:.1}</text>"#, sx(t), y0 + 15.0);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{t:.1}</text>"#, x0 - 5.0, sy(t) + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">budget fraction</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0);
    let _ = writeln!(svg, r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0, metric.as_str().to_uppercase());
    for (i, s) in series.iter().enumerate() {
        let c = color(s.method);
        let upper: Vec<String> = s.points.iter().map(|&(b, m, sd)| format!("{:.2},{:.2}", sx(b), sy(m + sd))).collect();
        let lower: Vec<String> = s.points.iter().rev().map(|&(b, m, sd)| format!("{:.2},{:.2}", sx(b), sy(m - sd))).collect();
        let _ = writeln!(svg, r#"<polygon points="{} {}" fill="{c}" fill-opacity="0.2" stroke="none"/>"#, upper.join(" "), lower.join(" "));
        let line: Vec<String> = s.points.iter().map(|&(b, m, _)| format!("{:.2},{:.2}", sx(b), sy(m))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#, line.join(" "));
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" fill="{c}">{}</text>"#, x0 + 10.0, y1 + 14.0 * (i as f64 + 1.0), s.method);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Heatmap of mean relative improvement over `(mu, sigma_c)`, each cell
/// labelled `mean ± sd`.
pub fn heatmap_svg(title: &str, rows: &[ImprovementRow]) -> String {
    let mut mus: Vec<f64> = rows.iter().map(|r| r.mu).collect();
    let mut sigmas: Vec<f64> = rows.iter().map(|r| r.sigma_c).collect();
    for v in [&mut mus, &mut sigmas] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let cell_w = (WIDTH - 2.0 * MARGIN) / sigmas.len().max(1) as f64;
    let cell_h = (HEIGHT - 2.0 * MARGIN) / mus.len().max(1) as f64;
    let span = rows.iter().filter_map(|r| r.mean).map(f64::abs).fold(1e-9, f64::max);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{title}</text>"#, WIDTH / 2.0);
    for r in rows {
        let i = mus.iter().position(|&m| m == r.mu).expect("collected");
        let j = sigmas.iter().position(|&s| s == r.sigma_c).expect("collected");
        let (x, y) = (MARGIN + j as f64 * cell_w, MARGIN + i as f64 * cell_h);
        let (fill, label) = match (r.mean, r.sd) {
            (Some(mean), Some(sd)) => {
                let t = (mean / span).clamp(-1.0, 1.0);
                let shade = (255.0 * (1.0 - t.abs())).round() as u8;
                let fill = if t >= 0.0 { format!("rgb(255,{shade},{shade})") } else { format!("rgb({shade},{shade},255)") };
                (fill, format!("{mean:.1}% ± {sd:.1}"))
            }
            _ => ("rgb(220,220,220)".to_string(), "n/a".to_string()),
        };
        let _ = writeln!(svg, r#"<rect x="{x:.2}" y="{y:.2}" width="{cell_w:.2}" height="{cell_h:.2}" fill="{fill}" stroke="black"/>"#);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, x + cell_w / 2.0, y + cell_h / 2.0 + 4.0);
    }
    for (j, s) in sigmas.iter().enumerate() {
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">σc={s}</text>"#, MARGIN + (j as f64 + 0.5) * cell_w, HEIGHT - MARGIN + 15.0);
    }
    for (i, m) in mus.iter().enumerate() {
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">μ={m}</text>"#, MARGIN - 4.0, MARGIN + (i as f64 + 0.5) * cell_h + 4.0);
    }
    svg.push_str("</svg>\n");
    svg
}

fn write(path: PathBuf, content: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes line charts for M1 and M2 per `(dataset, mu, sigma_c, s_min, p)`
/// and, when both methods are present, one heatmap per metric.
pub fn emit_plots(records: &[ExperimentRecord], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::EmptySelection);
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut groups: BTreeMap<String, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        let key = format!("{}_mu{}_sc{}_smin{}_p{}", r.dataset, r.mu, r.sigma_c, r.s_min, r.p);
        groups.entry(key).or_default().push(r);
    }
    let mut written = Vec::new();
    for (key, group) in &groups {
        for metric in [Metric::M1, Metric::M2] {
            let svg = line_chart_svg(key, metric, &series(group, metric));
            write(out_dir.join(format!("{}_{key}.svg", metric.as_str())), &svg, &mut written)?;
        }
    }
    let has_both = records.iter().any(|r| r.method == Method::Dice) && records.iter().any(|r| r.method == Method::FcomDice);
    if has_both {
        for metric in [Metric::M1, Metric::M2] {
            let rows = stats::mean_relative_improvement(records, metric)?;
            let title = format!("mean relative improvement of {} (%)", metric.as_str().to_uppercase());
            write(out_dir.join(format!("heatmap_{}.svg", metric.as_str())), &heatmap_svg(&title, &rows), &mut written)?;
        }
    }
    Ok(written)
}
