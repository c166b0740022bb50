//! Report records and their three output encodings.
//!
//! Every encoding is UTF-8 with LF line endings. Residuals print in scientific notation with
//! 12 significant digits, so a fixed seed reproduces the body byte for byte. Wall time is kept
//! on the records but never written to a report body.

use std::io::{self, Write};
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Number, Value};

use crate::config::{Format, RunConfig};

/// Which side of the tolerance a residual must fall on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `max < tol`.
    Below,
    /// Passes when `max > tol` (a check that something is detected).
    Above,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    pub tol: f64,
    pub bound: Bound,
}

impl Residual {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::Below => self.max < self.tol,
            Bound::Above => self.max > self.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassCheck {
    pub label: String,
    pub class: String,
    pub expected: String,
    pub left_residual: f64,
    pub right_residual: f64,
}

impl ClassCheck {
    pub fn passed(&self) -> bool {
        self.class == self.expected
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScenarioReport {
    pub name: String,
    pub seed: u64,
    pub residuals: Vec<Residual>,
    pub classifications: Vec<ClassCheck>,
    /// Errors raised while running; any entry fails the scenario.
    pub errors: Vec<String>,
    pub wall_time: Duration,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty()
            && self.residuals.iter().all(Residual::passed)
            && self.classifications.iter().all(ClassCheck::passed)
    }

    pub fn verdict(&self) -> &'static str {
        verdict(self.passed())
    }

    pub fn residual(&self, name: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.name == name)
    }

    pub fn classification(&self, label: &str) -> Option<&ClassCheck> {
        self.classifications.iter().find(|c| c.label == label)
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: RunConfig,
    pub scenarios: Vec<ScenarioReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.scenarios.iter().all(ScenarioReport::passed)
    }

    pub fn scenario(&self, name: &str) -> Option<&ScenarioReport> {
        self.scenarios.iter().find(|s| s.name == name)
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `{:.11e}`: 12 significant digits in scientific notation.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        format!("{v}")
    }
}

fn json_number(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(format_number(v).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn tolerance_cell(r: &Residual) -> String {
    match r.bound {
        Bound::Below => format_number(r.tol),
        Bound::Above => format!(">{}", format_number(r.tol)),
    }
}

pub const CSV_HEADER: [&str; 6] = ["scenario", "residual_name", "max", "mean", "tol", "verdict"];

pub fn emit<W: Write>(report: &Report, format: Format, out: W) -> io::Result<()> {
    match format {
        Format::JsonLines => emit_json_lines(report, out),
        Format::Csv => emit_csv(report, out),
        Format::Human => emit_human(report, out),
    }
}

fn header_value(report: &Report) -> Value {
    let c = &report.config;
    let mut config = serde_json::to_value(c).expect("config serializes");
    // where and how fast the body is produced is not part of it
    if let Value::Object(map) = &mut config {
        map.remove("out");
        map.remove("parallel");
        map.insert("fd_step".into(), json_number(c.fd_step));
        for key in ["tol_identity", "tol_classify"] {
            let v = if key == "tol_identity" { c.tol_identity } else { c.tol_classify };
            map.insert(key.into(), v.map(json_number).unwrap_or(Value::Null));
        }
    }
    json!({
        "record": "header",
        "tool": "biform",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": c.mode,
        "seed": c.seed,
        "config": config,
    })
}

fn emit_json_lines<W: Write>(report: &Report, mut out: W) -> io::Result<()> {
    let line = |v: &Value| serde_json::to_string(v).expect("JSON value serializes");
    writeln!(out, "{}", line(&header_value(report)))?;
    for s in &report.scenarios {
        let residuals: Vec<Value> = s
            .residuals
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "max": json_number(r.max),
                    "mean": json_number(r.mean),
                    "tol": json_number(r.tol),
                    "bound": r.bound,
                    "verdict": verdict(r.passed()),
                })
            })
            .collect();
        let classes: Vec<Value> = s
            .classifications
            .iter()
            .map(|c| {
                json!({
                    "label": c.label,
                    "class": c.class,
                    "expected": c.expected,
                    "left_residual": json_number(c.left_residual),
                    "right_residual": json_number(c.right_residual),
                    "verdict": verdict(c.passed()),
                })
            })
            .collect();
        let v = json!({
            "record": "scenario",
            "name": s.name,
            "seed": s.seed,
            "residuals": residuals,
            "classifications": classes,
            "errors": s.errors,
            "verdict": s.verdict(),
        });
        writeln!(out, "{}", line(&v))?;
    }
    out.flush()
}

fn emit_csv<W: Write>(report: &Report, out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for s in &report.scenarios {
        for r in &s.residuals {
            w.write_record([
                s.name.as_str(),
                r.name.as_str(),
                &format_number(r.max),
                &format_number(r.mean),
                &tolerance_cell(r),
                verdict(r.passed()),
            ])?;
        }
        for c in &s.classifications {
            let name = format!("class:{}={}", c.label, c.class);
            let max = format_number(c.left_residual.max(c.right_residual));
            w.write_record([s.name.as_str(), &name, &max, &max, &format!("={}", c.expected), verdict(c.passed())])?;
        }
        for e in &s.errors {
            w.write_record([s.name.as_str(), &format!("error:{e}"), "NaN", "NaN", "", "FAIL"])?;
        }
    }
    w.flush()
}

fn emit_human<W: Write>(report: &Report, mut out: W) -> io::Result<()> {
    let c = &report.config;
    writeln!(out, "biform report (mode {:?}, seed {})", c.mode, c.seed)?;
    for s in &report.scenarios {
        writeln!(out)?;
        writeln!(out, "{}  [{}]", s.name, s.verdict())?;
        let width = s.residuals.iter().map(|r| r.name.len()).chain(s.classifications.iter().map(|c| c.label.len())).max();
        let width = width.unwrap_or(0);
        for r in &s.residuals {
            let op = if r.bound == Bound::Below { "<" } else { ">" };
            writeln!(
                out,
                "  {:width$}  max {}  mean {}  need {op} {}  {}",
                r.name,
                format_number(r.max),
                format_number(r.mean),
                format_number(r.tol),
                verdict(r.passed())
            )?;
        }
        for k in &s.classifications {
            writeln!(out, "  {:width$}  {} (expected {})  {}", k.label, k.class, k.expected, verdict(k.passed()))?;
        }
        for e in &s.errors {
            writeln!(out, "  error: {e}")?;
        }
    }
    writeln!(out)?;
    writeln!(out, "overall: {}", verdict(report.passed()))?;
    out.flush()
}
