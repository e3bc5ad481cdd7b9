use std::fmt;
use std::fs::File;
use std::io::Write;

use periodlab::{Error, ErrorClass};
use serde_json::Value;

use crate::args::{Format, Global};

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Config(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Config(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(Error::from(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Lib(Error::from(e))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Lib(Error::Io(e.to_string()))
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) => match e.exit_class() {
                ErrorClass::Validation => 1,
                ErrorClass::Numeric => 2,
                ErrorClass::Config => 3,
            },
            CliError::Config(_) => 3,
        }
    }

    /// Variant name, printed in error messages so scripts can match on it.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "Config",
            CliError::Lib(e) => match e {
                Error::BranchCut { .. } => "BranchCut",
                Error::Pole { .. } => "Pole",
                Error::PoleAtOne => "PoleAtOne",
                Error::ConvergenceFailure { .. } => "ConvergenceFailure",
                Error::SlowConvergence { .. } => "SlowConvergence",
                Error::DimensionMismatch { .. } => "DimensionMismatch",
                Error::RelationViolation { .. } => "RelationViolation",
                Error::HalfIntegerNu { .. } => "HalfIntegerNu",
                Error::ResonantNu { .. } => "ResonantNu",
                Error::SizeLimit { .. } => "SizeLimit",
                Error::Domain(_) => "Domain",
                Error::Parse(_) => "Parse",
                Error::Io(_) => "Io",
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Numeric table written as CSV or embedded in the JSON report.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    Value::Object(
                        self.header
                            .iter()
                            .zip(r)
                            .map(|(h, x)| (h.clone(), serde_json::json!(x)))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, w: W) -> CliResult<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for r in &self.rows {
            wr.write_record(r.iter().map(|x| fmt_f64(*x)))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Shortest round-trip representation, in exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub struct Outcome {
    pub pass: bool,
    pub summary: Vec<String>,
    pub report: Value,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn new(pass: bool, report: Value) -> Self {
        Outcome {
            pass,
            summary: Vec::new(),
            report,
            table: None,
        }
    }

    pub fn line(mut self, s: impl Into<String>) -> Self {
        self.summary.push(s.into());
        self
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }

    /// The report with the table (if any) under `rows` and the verdict.
    pub fn full_report(&self) -> Value {
        let mut r = self.report.clone();
        if let Value::Object(m) = &mut r {
            if let Some(t) = &self.table {
                m.insert("rows".into(), t.to_json());
            }
            m.insert("pass".into(), Value::Bool(self.pass));
        }
        r
    }
}

pub fn emit(o: &Outcome, g: &Global) -> CliResult<()> {
    if let Some(path) = &g.out {
        let file = File::create(path)?;
        match (&o.table, g.format) {
            (Some(t), Format::Csv) => t.write_csv(file)?,
            _ => serde_json::to_writer_pretty(file, &o.full_report())?,
        }
    }
    let mut text = String::new();
    if g.json {
        text = serde_json::to_string_pretty(&o.full_report())?;
        text.push('\n');
    } else {
        for l in &o.summary {
            text.push_str(l);
            text.push('\n');
        }
        text.push_str(if o.pass { "PASS\n" } else { "FAIL\n" });
    }
    // a closed pipe downstream is not an error of the job
    let _ = std::io::stdout().write_all(text.as_bytes());
    Ok(())
}
