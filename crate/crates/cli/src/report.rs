//! Report rows and their CSV/JSON encodings.
//!
//! Floats are written in shortest round-trip scientific notation, so
//! parsing an emitted file and writing it again reproduces it byte for byte.

use qnd_core::{BudgetReport, SweepRow};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub trait CsvRow: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityDemoRow {
    /// `even` or `odd`.
    pub outcome: String,
    pub count: u64,
    pub frequency: f64,
    /// Empty when the outcome never occurred.
    pub mean_fidelity: Option<f64>,
    pub alpha: f64,
    pub theta: f64,
    pub p_err: f64,
}

impl CsvRow for ParityDemoRow {
    const HEADER: &'static [&'static str] = &[
        "outcome",
        "count",
        "frequency",
        "mean_fidelity",
        "alpha",
        "theta",
        "p_err",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            self.outcome.clone(),
            self.count.to_string(),
            sci(self.frequency),
            opt(self.mean_fidelity),
            sci(self.alpha),
            sci(self.theta),
            sci(self.p_err),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnotRow {
    pub input: String,
    pub runs: u64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    /// Fidelity with misclassified branches removed before conditioning.
    pub post_selected_fidelity: f64,
    pub fidelity_bound: f64,
    pub p_err: f64,
}

impl CsvRow for CnotRow {
    const HEADER: &'static [&'static str] = &[
        "input",
        "runs",
        "mean_fidelity",
        "min_fidelity",
        "post_selected_fidelity",
        "fidelity_bound",
        "p_err",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            self.input.clone(),
            self.runs.to_string(),
            sci(self.mean_fidelity),
            sci(self.min_fidelity),
            sci(self.post_selected_fidelity),
            sci(self.fidelity_bound),
            sci(self.p_err),
        ]
    }
}

impl CsvRow for SweepRow {
    const HEADER: &'static [&'static str] = &["alpha", "theta", "x_d", "p_err"];

    fn cells(&self) -> Vec<String> {
        vec![sci(self.alpha), sci(self.theta), sci(self.x_d), sci(self.p_err)]
    }
}

impl CsvRow for BudgetReport {
    const HEADER: &'static [&'static str] = &["n", "c", "p", "trials", "failure_probability"];

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.c.to_string(),
            sci(self.p),
            self.trials.to_string(),
            sci(self.failure_probability),
        ]
    }
}

pub fn to_csv<R: CsvRow>(rows: &[R]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(R::HEADER)?;
    for r in rows {
        w.write_record(r.cells())?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Runtime(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn from_csv<R: CsvRow>(text: &str) -> Result<Vec<R>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != R::HEADER {
        return Err(CliError::Runtime(format!(
            "unexpected csv header {header:?}, wanted {:?}",
            R::HEADER
        )));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}
