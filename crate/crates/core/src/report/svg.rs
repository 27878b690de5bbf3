use std::fmt::Write;

use super::ExperimentReport;
use crate::error::Result;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotOptions {
    pub log_x: bool,
    pub log_y: bool,
    pub title: Option<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64, log: bool) -> String {
    let x = if log { 10f64.powf(v) } else { v };
    if x != 0.0 && (x.abs() >= 1e4 || x.abs() < 1e-3) {
        format!("{x:.2e}")
    } else {
        format!("{x:.4}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 * lo.abs().max(1.0) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line and marker chart of `y_columns` against `x_column` from the named
/// table, as a self-contained SVG (960×540). Cells that are not finite
/// numbers (or not positive on a log axis) are skipped. The output depends
/// only on the report, so repeated runs are byte-identical.
pub fn emit_plot(
    report: &ExperimentReport,
    table: &str,
    x_column: &str,
    y_columns: &[&str],
    opts: &PlotOptions,
) -> Result<String> {
    let t = report.table(table)?;
    let xs = t.column(x_column)?;
    let transform = |v: Option<f64>, log: bool| -> Option<f64> {
        let v = v?;
        if log {
            (v > 0.0).then(|| v.log10())
        } else {
            Some(v)
        }
    };
    let mut series = Vec::new();
    for name in y_columns {
        let ys = t.column(name)?;
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(&ys)
            .filter_map(|(x, y)| Some((transform(*x, opts.log_x)?, transform(*y, opts.log_y)?)))
            .collect();
        series.push((*name, pts));
    }
    let (x0, x1) = range(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)));
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let seed = report.seed.map_or("none".to_string(), |s| s.to_string());
    let _ = writeln!(
        s,
        r#"<metadata>experiment={} table={} seed={seed}</metadata>"#,
        escape(&report.experiment),
        escape(table)
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let title = opts.title.clone().unwrap_or_else(|| format!("{} / {}", report.experiment, table));
    let _ = writeln!(s, r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#, WIDTH / 2.0, escape(&title));
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#333"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            tick_label(xv, opts.log_x)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            tick_label(yv, opts.log_y)
        );
    }
    let log_tag = |log: bool| if log { " (log)" } else { "" };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 20.0,
        escape(x_column),
        log_tag(opts.log_x)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&y_columns.join(", ")),
        log_tag(opts.log_y)
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        }
        for (x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(*x), sy(*y));
        }
        let ly = TOP + 15.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            WIDTH - RIGHT - 150.0,
            ly - 9.0,
            WIDTH - RIGHT - 135.0,
            ly,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::report::{Cell, Table};

    fn report(rows: usize) -> ExperimentReport {
        let mut r = ExperimentReport::new("decay");
        r.seed = Some(3);
        let mut t = Table::new("t", &["n", "d"]);
        for n in 1..=rows {
            t.push(vec![n.into(), (0.5f64.powi(n as i32)).into()]);
        }
        r.tables.push(t);
        r
    }

    #[test]
    fn deterministic_and_labelled() {
        let opts = PlotOptions {
            log_y: true,
            ..PlotOptions::default()
        };
        let a = emit_plot(&report(10), "t", "n", &["d"], &opts).unwrap();
        let b = emit_plot(&report(10), "t", "n", &["d"], &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("seed=3"));
        assert!(a.contains("<polyline"));
        assert_eq!(a.matches("<circle").count(), 10);
    }

    #[test]
    fn empty_table_gives_axes() {
        let s = emit_plot(&report(0), "t", "n", &["d"], &PlotOptions::default()).unwrap();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(!s.contains("<circle"));
    }

    #[test]
    fn missing_column() {
        let r = report(3);
        assert!(matches!(emit_plot(&r, "t", "n", &["q"], &PlotOptions::default()), Err(Error::MissingColumn(_))));
        assert!(matches!(emit_plot(&r, "t", "m", &["d"], &PlotOptions::default()), Err(Error::MissingColumn(_))));
        let mut r = r;
        r.tables[0].rows[0][1] = Cell::Text("x".into());
        assert_eq!(emit_plot(&r, "t", "n", &["d"], &PlotOptions::default()).unwrap().matches("<circle").count(), 2);
    }
}
