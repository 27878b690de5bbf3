use std::fs;
use std::path::{Path, PathBuf};

use grouplab::report::{emit_plot, ExperimentReport, PlotOptions};
use grouplab::Result;

use crate::Format;

/// A chart to draw from one table of a report.
pub struct Plot {
    pub table: &'static str,
    pub x: &'static str,
    pub y: &'static [&'static str],
    pub log_x: bool,
    pub log_y: bool,
}

impl Plot {
    pub const fn new(table: &'static str, x: &'static str, y: &'static [&'static str]) -> Self {
        Self { table, x, y, log_x: false, log_y: false }
    }

    pub const fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub const fn log_x(mut self) -> Self {
        self.log_x = true;
        self
    }
}

fn safe(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Writes the report in the requested formats: `<experiment>.json`,
/// `<experiment>-<table>.csv` per table and `<experiment>-<table>-<y>.svg` per
/// plot, named after its first y column.
pub fn write_report(report: &ExperimentReport, plots: &[Plot], formats: &[Format], out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let stem = safe(&report.experiment);
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        let path = out.join(name);
        fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    for format in formats {
        match format {
            Format::Json => put(format!("{stem}.json"), report.to_json()?)?,
            Format::Csv => {
                for t in &report.tables {
                    put(format!("{stem}-{}.csv", safe(&t.name)), t.to_csv()?)?;
                }
            }
            Format::Svg => {
                for p in plots {
                    let opts = PlotOptions { log_x: p.log_x, log_y: p.log_y, title: None };
                    let name = format!("{stem}-{}-{}.svg", safe(p.table), safe(p.y.first().copied().unwrap_or("plot")));
                    put(name, emit_plot(report, p.table, p.x, p.y, &opts)?)?;
                }
            }
        }
    }
    Ok(written)
}
