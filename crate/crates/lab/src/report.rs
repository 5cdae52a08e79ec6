//! Tables, checks and the files a run leaves behind.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::fit::RateFit;

/// Numeric table written as CSV with `{:.12e}` floats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// A declared target must hold for a passing run; an advisory only fails
/// runs under `--strict`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Target,
    Advisory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: String,
    pub passed: bool,
    pub severity: Severity,
}

impl Check {
    pub fn target(name: impl Into<String>, value: f64, expected: impl Into<String>, passed: bool) -> Self {
        Self { name: name.into(), value, expected: expected.into(), passed, severity: Severity::Target }
    }

    pub fn advisory(name: impl Into<String>, value: f64, expected: impl Into<String>, passed: bool) -> Self {
        Self { name: name.into(), value, expected: expected.into(), passed, severity: Severity::Advisory }
    }

    pub fn line(&self) -> String {
        let tag = match (self.passed, self.severity) {
            (true, _) => "PASS",
            (false, Severity::Target) => "FAIL",
            (false, Severity::Advisory) => "WARN",
        };
        format!("{tag} {}: {:.6e} (expected {})", self.name, self.value, self.expected)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: RateFit,
}

/// Everything a scenario produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub eps_list: Vec<f64>,
    pub metrics: Table,
    pub diagnostics: Vec<Table>,
    pub fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self, strict: bool) -> bool {
        self.checks.iter().all(|c| c.passed || (!strict && c.severity == Severity::Advisory))
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            scenario: &'a str,
            eps_list: &'a [f64],
            fits: &'a [NamedFit],
            checks: &'a [Check],
            passed: bool,
        }
        let s = Summary {
            scenario: &self.scenario,
            eps_list: &self.eps_list,
            fits: &self.fits,
            checks: &self.checks,
            passed: self.passed(false),
        };
        serde_json::to_string_pretty(&s).expect("summary serializes") + "\n"
    }

    pub fn text(&self) -> String {
        let mut out = format!("scenario {}\n", self.scenario);
        for f in &self.fits {
            let _ = writeln!(out, "fit {}: slope {:.4} ± {:.4}", f.name, f.fit.slope, f.fit.radius);
        }
        for c in &self.checks {
            let _ = writeln!(out, "{}", c.line());
        }
        out
    }

    /// Writes metrics.csv, one CSV per diagnostics table and summary.json.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("metrics.csv"), self.metrics.to_csv())?;
        for t in &self.diagnostics {
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
        }
        std::fs::write(dir.join("summary.json"), self.summary_json())?;
        Ok(())
    }
}

/// Strictly decreasing sequence.
pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// last/first of a sequence.
pub fn last_over_first(v: &[f64]) -> f64 {
    match (v.first(), v.last()) {
        (Some(&a), Some(&b)) if a != 0.0 => b / a,
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new("m", &["eps", "x"]);
        t.push(vec![0.1, 2.0]);
        assert_eq!(t.to_csv(), "eps,x\n1.000000000000e-1,2.000000000000e0\n");
        assert_eq!(t.column("x"), Some(vec![2.0]));
    }

    #[test]
    fn advisories_only_fail_strict_runs() {
        let r = Report {
            scenario: "s".into(),
            eps_list: vec![],
            metrics: Table::new("metrics", &[]),
            diagnostics: vec![],
            fits: vec![],
            checks: vec![Check::target("a", 1.0, "≥ 0", true), Check::advisory("b", 1.0, "≤ 0", false)],
        };
        assert!(r.passed(false));
        assert!(!r.passed(true));
    }
}
