//! Experiment reports: tables with config echo and verdicts, serialized to
//! JSON (lossless), CSV and SVG.

mod svg;

use std::collections::BTreeMap;
use std::fmt::Display;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use svg::{emit_plot, PlotOptions};

/// One table cell. Integers that do not fit in i64 and non-finite floats are
/// stored as text so that JSON round trips are exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Null,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Text(t) => t.parse().ok().filter(|x: &f64| x.is_finite()),
            Cell::Null => None,
        }
    }

    /// CSV field: floats with 17 significant digits, empty for null.
    pub fn csv_field(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(t) => t.clone(),
            Cell::Null => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Float(x)
        } else {
            Cell::Text(x.to_string())
        }
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        i64::try_from(x).map_or_else(|_| Cell::Text(x.to_string()), Cell::Int)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        i64::try_from(x).map_or_else(|_| Cell::Text(x.to_string()), Cell::Int)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&BigUint> for Cell {
    fn from(x: &BigUint) -> Self {
        i64::try_from(x).map_or_else(|_| Cell::Text(x.to_string()), Cell::Int)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Null, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::MissingColumn(format!("{}.{name}", self.name)))
    }

    /// Numeric values of a column (None where a cell is not a finite number).
    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field)).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// A named pass/fail judgement with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Output of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    /// Seed of every random result in the report, if any.
    pub seed: Option<u64>,
    /// Echo of the inputs (group, measure, subgroup, budgets, parameters).
    pub config: BTreeMap<String, serde_json::Value>,
    pub tables: Vec<Table>,
    pub verdicts: Vec<VerdictLine>,
    pub notes: Vec<String>,
    /// Seconds; only recorded on request so artifacts stay byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            seed: None,
            config: BTreeMap::new(),
            tables: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            wall_time: None,
        }
    }

    pub fn echo(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.config.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn verdict(&mut self, name: &str, passed: bool, detail: impl Display) {
        self.verdicts.push(VerdictLine {
            name: name.to_string(),
            passed,
            detail: detail.to_string(),
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn table(&self, name: &str) -> Result<&Table> {
        self.tables
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::MissingColumn(format!("table {name}")))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new("demo");
        r.seed = Some(7);
        r.echo("budgets", crate::walk::Budgets::default()).unwrap();
        let mut t = Table::new("rows", &["n", "x", "label", "big", "missing"]);
        t.push(vec![1usize.into(), 0.1f64.into(), "a,b".into(), (&BigUint::from(10u8).pow(30)).into(), Cell::Null]);
        t.push(vec![2usize.into(), (1.0f64 / 3.0).into(), "c".into(), f64::NAN.into(), Some(2.5f64).into()]);
        r.tables.push(t);
        r.verdict("ok", true, "fine");
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back = ExperimentReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), r.to_json().unwrap());
    }

    #[test]
    fn csv_output() {
        let csv = sample().tables[0].to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,x,label,big,missing");
        assert_eq!(lines[1], "1,1.0000000000000001e-1,\"a,b\",1000000000000000000000000000000,");
        assert!(lines[2].starts_with("2,3.3333333333333331e-1,c,NaN,2.5"));
    }

    #[test]
    fn missing_columns() {
        let r = sample();
        assert!(matches!(r.tables[0].column("y"), Err(Error::MissingColumn(_))));
        assert_eq!(r.tables[0].column("x").unwrap()[0], Some(0.1));
        assert!(r.table("nope").is_err());
    }
}
