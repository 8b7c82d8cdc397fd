//! Named checks and their serialisation as CSV, JSON and plot data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use deepwave_core::Result;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported for reference, not judged.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// `|value - target| <= abs_tol + rel_tol |target|`
    Near,
    /// `value < target`
    Below,
    /// `value > target`
    Above,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub bound: Bound,
    pub status: Status,
}

impl Check {
    pub fn near(name: &str, value: f64, target: f64, abs_tol: f64, rel_tol: f64) -> Check {
        let ok = (value - target).abs() <= abs_tol + rel_tol * target.abs();
        Check::judged(name, value, target, abs_tol, rel_tol, Bound::Near, ok)
    }

    pub fn below(name: &str, value: f64, target: f64) -> Check {
        Check::judged(name, value, target, 0.0, 0.0, Bound::Below, value < target)
    }

    pub fn above(name: &str, value: f64, target: f64) -> Check {
        Check::judged(name, value, target, 0.0, 0.0, Bound::Above, value > target)
    }

    pub fn info(name: &str, value: f64) -> Check {
        Check {
            name: name.into(),
            value,
            target: f64::NAN,
            abs_tol: 0.0,
            rel_tol: 0.0,
            bound: Bound::Near,
            status: Status::Info,
        }
    }

    /// A check whose evaluator failed; the error code goes into the name.
    pub fn error(name: &str, code: &str) -> Check {
        Check {
            name: format!("{name}[{code}]"),
            value: f64::NAN,
            target: f64::NAN,
            abs_tol: 0.0,
            rel_tol: 0.0,
            bound: Bound::Near,
            status: Status::Fail,
        }
    }

    fn judged(
        name: &str,
        value: f64,
        target: f64,
        abs_tol: f64,
        rel_tol: f64,
        bound: Bound,
        ok: bool,
    ) -> Check {
        let status = if ok && value.is_finite() {
            Status::Pass
        } else {
            Status::Fail
        };
        Check {
            name: name.into(),
            value,
            target,
            abs_tol,
            rel_tol,
            bound,
            status,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:e}")
    }
}

/// Two-column numeric series written as a plot-data file.
#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    pub summary: BTreeMap<String, Value>,
    pub series: Vec<Series>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, key: &str, v: impl Serialize) {
        self.summary
            .insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("check_name,value,target,abs_tol,rel_tol,status\n");
        for c in &self.checks {
            let target = match c.bound {
                Bound::Near => num(c.target),
                Bound::Below => format!("<{}", num(c.target)),
                Bound::Above => format!(">{}", num(c.target)),
            };
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Info => "info",
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                c.name,
                num(c.value),
                target,
                num(c.abs_tol),
                num(c.rel_tol),
                status
            );
        }
        s
    }

    pub fn to_json(&self, command: &str, config: &impl Serialize) -> Result<String> {
        let body = serde_json::json!({
            "command": command,
            "passed": self.all_passed(),
            "config": config,
            "summary": self.summary,
            "warnings": self.warnings,
            "checks": self.checks.iter().map(|c| serde_json::json!({
                "name": c.name,
                "value": finite(c.value),
                "target": finite(c.target),
                "abs_tol": c.abs_tol,
                "rel_tol": c.rel_tol,
                "bound": c.bound,
                "status": c.status,
            })).collect::<Vec<_>>(),
        });
        Ok(serde_json::to_string_pretty(&body)? + "\n")
    }

    /// Writes `report.csv`, `summary.json` and one `.dat` file per series.
    pub fn write(&self, dir: &Path, command: &str, config: &impl Serialize) -> Result<()> {
        std::fs::write(dir.join("report.csv"), self.to_csv())?;
        std::fs::write(dir.join("summary.json"), self.to_json(command, config)?)?;
        for s in &self.series {
            let mut text = String::new();
            for (x, y) in &s.points {
                let _ = writeln!(text, "{x:e} {y:e}");
            }
            std::fs::write(dir.join(format!("{}.dat", s.name)), text)?;
        }
        Ok(())
    }
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        Value::Null
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_semantics() {
        assert!(Check::near("a", 1.01, 1.0, 0.0, 0.02).passed());
        assert!(!Check::near("a", 1.03, 1.0, 0.0, 0.02).passed());
        assert!(Check::below("b", -3.0, -2.0).passed());
        assert!(!Check::below("b", -2.0, -2.0).passed());
        assert!(!Check::above("c", f64::NAN, 0.0).passed());
        assert!(Check::info("d", 5.0).passed());
    }

    #[test]
    fn csv_layout() {
        let mut r = Report::default();
        r.push(Check::near("x", 1.0, 1.0, 1e-3, 0.0));
        r.push(Check::below("y", 0.5, 1.0));
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "check_name,value,target,abs_tol,rel_tol,status");
        assert_eq!(lines[1], "x,1e0,1e0,1e-3,0e0,pass");
        assert_eq!(lines[2], "y,5e-1,<1e0,0e0,0e0,pass");
    }
}
