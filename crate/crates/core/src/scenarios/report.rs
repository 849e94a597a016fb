use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Pass condition of a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    /// |got − expected| ≤ tolerance.
    Within { expected: f64, tolerance: f64 },
    /// got ≤ limit.
    AtMost { limit: f64 },
    /// got ≥ limit.
    AtLeast { limit: f64 },
    /// lo ≤ got ≤ hi.
    Band { lo: f64, hi: f64 },
}

impl Rule {
    pub fn within(expected: f64, tolerance: f64) -> Self {
        Rule::Within { expected, tolerance }
    }

    pub fn holds(&self, got: f64) -> bool {
        match *self {
            Rule::Within { expected, tolerance } => (got - expected).abs() <= tolerance,
            Rule::AtMost { limit } => got <= limit,
            Rule::AtLeast { limit } => got >= limit,
            Rule::Band { lo, hi } => got >= lo && got <= hi,
        }
    }

    fn describe(&self) -> String {
        match *self {
            Rule::Within { expected, tolerance } => format!("{expected:.6e} ± {tolerance:.1e}"),
            Rule::AtMost { limit } => format!("≤ {limit:.6e}"),
            Rule::AtLeast { limit } => format!("≥ {limit:.6e}"),
            Rule::Band { lo, hi } => format!("[{lo:.4e}, {hi:.4e}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Acceptance criterion this check belongs to, if any.
    pub criterion: Option<u8>,
    pub rule: Rule,
    /// NaN when the quantity could not be computed.
    pub got: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &str, criterion: Option<u8>, got: f64, rule: Rule) -> Self {
        let status = if got.is_finite() && rule.holds(got) { Status::Pass } else { Status::Fail };
        Self { name: name.into(), criterion, rule, got, status, note: None }
    }

    /// A check whose computation failed outright.
    pub fn errored(name: &str, criterion: Option<u8>, rule: Rule, err: &Error) -> Self {
        Self::new(name, criterion, f64::NAN, rule).with_note(err.to_string())
    }

    pub fn skipped(name: &str, criterion: Option<u8>, rule: Rule, reason: &str) -> Self {
        Self { name: name.into(), criterion, rule, got: f64::NAN, status: Status::Skipped, note: Some(reason.into()) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn expected_text(&self) -> String {
        self.rule.describe()
    }
}

/// Column-labelled numeric table written in the scenario CSV dialect.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|(c, u)| (c.to_string(), u.to_string())).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| num(*v)).collect());
    }

    /// Metadata lines, column names, units, rows. Only the `generated_unix`
    /// line differs between reruns of the same configuration.
    pub fn write(&self, path: &Path, meta: &BTreeMap<String, String>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for (k, v) in meta {
            writeln!(f, "# {k}: {v}")?;
        }
        let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        writeln!(f, "# generated_unix: {now}")?;
        let mut w = csv::Writer::from_writer(f);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(self.columns.iter().map(|c| c.0.as_str())).map_err(io)?;
        w.write_record(self.columns.iter().map(|c| c.1.as_str())).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip text for a float.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

/// What a scenario hands back before the runner adds timing and metadata.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOutput {
    pub checks: Vec<Check>,
    pub info: BTreeMap<String, String>,
    pub tables: Vec<Table>,
}

impl ScenarioOutput {
    pub fn check(&mut self, c: Check) {
        assert!(!self.checks.iter().any(|o| o.name == c.name), "duplicate check {}", c.name);
        self.checks.push(c);
    }

    pub fn info(&mut self, key: &str, value: impl ToString) {
        self.info.insert(key.into(), value.to_string());
    }
}

/// Machine-readable outcome of one scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub info: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
    pub code_version: String,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width table of the checks.
    pub fn render(&self) -> String {
        let mut s = format!("scenario {} ({:.2} s)\n", self.scenario, self.wall_time_s);
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            let crit = c.criterion.map(|n| format!("[{n}]")).unwrap_or_default();
            s.push_str(&format!("  {tag} {crit:<5}{:<40} got {:<14} expected {}", c.name, num_short(c.got), c.expected_text()));
            if let Some(n) = &c.note {
                s.push_str(&format!("  ({n})"));
            }
            s.push('\n');
        }
        for (k, v) in &self.info {
            s.push_str(&format!("  info {k} = {v}\n"));
        }
        s
    }
}

fn num_short(v: f64) -> String {
    if v.is_nan() {
        "-".into()
    } else {
        format!("{v:.6e}")
    }
}
