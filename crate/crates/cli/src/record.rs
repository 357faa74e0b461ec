use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `value <= tolerance`
    AtMost,
    /// `value >= tolerance`
    AtLeast,
    /// `value < tolerance`
    Below,
    /// Reported only.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Metric {
    fn new(name: impl Into<String>, value: f64, tolerance: f64, bound: Bound) -> Self {
        let pass = match bound {
            Bound::AtMost => value <= tolerance,
            Bound::AtLeast => value >= tolerance,
            Bound::Below => value < tolerance,
            Bound::Info => true,
        };
        Metric {
            name: name.into(),
            value,
            tolerance,
            bound,
            pass,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(name, value, tol, Bound::AtMost)
    }

    pub fn at_least(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(name, value, tol, Bound::AtLeast)
    }

    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(name, value, tol, Bound::Below)
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self::new(name, value, 0.0, Bound::Info)
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.0, Bound::AtMost)
    }

    pub fn with_tolerance(self, tol: f64) -> Self {
        if self.bound == Bound::AtMost && self.tolerance > 0.0 {
            Self::new(self.name, self.value, tol, self.bound)
        } else {
            self
        }
    }
}

/// A named CSV table for external plotting.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Series {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub params: serde_json::Value,
    pub metrics: Vec<Metric>,
    pub pass: bool,
    pub wall_time_s: f64,
    pub artifacts: Vec<PathBuf>,
}

impl ResultRecord {
    pub fn new(
        experiment: &str,
        params: serde_json::Value,
        metrics: Vec<Metric>,
        wall_time_s: f64,
    ) -> Self {
        let pass = metrics.iter().all(|m| m.pass);
        ResultRecord {
            experiment: experiment.into(),
            params,
            metrics,
            pass,
            wall_time_s,
            artifacts: vec![],
        }
    }

    /// Writes the series as CSV next to a JSON copy of the record and appends
    /// the record to `records.jsonl`.
    pub fn persist(&mut self, out_dir: &Path, series: &[Series]) -> Result<()> {
        std::fs::create_dir_all(out_dir)?;
        for s in series {
            let path = out_dir.join(format!("{}_{}.csv", self.experiment, s.name));
            s.write_csv(&path)?;
            self.artifacts.push(path);
        }
        let json = out_dir.join(format!("{}.json", self.experiment));
        self.artifacts.push(json.clone());
        std::fs::write(&json, serde_json::to_string_pretty(self)?)?;
        let mut log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(out_dir.join("records.jsonl"))?;
        writeln!(log, "{}", serde_json::to_string(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Metric::at_most("a", 1e-11, 1e-10).pass);
        assert!(!Metric::at_most("a", f64::NAN, 1e-10).pass);
        assert!(Metric::at_least("b", 0.2, 0.1).pass);
        assert!(!Metric::below("c", 0.0, 0.0).pass);
        assert!(Metric::info("d", 3.0).pass);
        assert!(!Metric::at_most("a", 1e-9, 1e-10).with_tolerance(1e-10).pass);
        assert!(Metric::at_most("a", 1e-9, 1e-10).with_tolerance(1e-8).pass);
    }

    #[test]
    fn persist_appends() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Series::new("trace", &["j", "residual"]);
        s.push(vec![1.0, 0.5]);
        for _ in 0..2 {
            let mut r = ResultRecord::new(
                "energy",
                serde_json::json!({}),
                vec![Metric::info("x", 1.0)],
                0.0,
            );
            r.persist(dir.path(), std::slice::from_ref(&s)).unwrap();
        }
        let lines = std::fs::read_to_string(dir.path().join("records.jsonl")).unwrap();
        assert_eq!(lines.lines().count(), 2);
        let csv = std::fs::read_to_string(dir.path().join("energy_trace.csv")).unwrap();
        assert!(csv.starts_with("j,residual"));
    }
}
