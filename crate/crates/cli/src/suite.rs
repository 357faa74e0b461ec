use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::experiments::{execute, Context};
use crate::record::{Metric, ResultRecord, Series};

pub const PRIMARY: &str = "primary-acceptance";

/// The criteria of the primary acceptance suite, each backed by experiments.
pub const CRITERIA: &[(u8, &str, &[&str])] = &[
    (1, "sl2 relations", &["sl2-commutators"]),
    (
        2,
        "semigroup law and boundary unitarity",
        &["semigroup-laws"],
    ),
    (3, "spectrum negativity and discreteness", &["spectrum"]),
    (4, "finite order", &["fka-orders"]),
    (5, "oracle ladder", &["fka-oracles"]),
    (6, "intertwining", &["intertwining"]),
    (7, "conserved quantity", &["conserve-hyperplane"]),
    (8, "conformal invariance", &["conformal"]),
    (9, "cone norm constant", &["theorem41"]),
    (10, "energy", &["energy"]),
    (11, "branching Parseval", &["branch-parseval", "ktype"]),
];

pub const DETERMINISM: (u8, &str) = (12, "determinism");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricRow {
    pub experiment: String,
    #[serde(flatten)]
    pub metric: Metric,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub pass: bool,
    pub metrics: Vec<MetricRow>,
    pub errors: Vec<String>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub criteria: Vec<CriterionResult>,
    pub wall_time_s: f64,
}

impl SuiteReport {
    pub fn summary_lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .map(|c| {
                let worst = c.metrics.iter().find(|m| !m.metric.pass);
                let detail = match (worst, c.errors.first()) {
                    (_, Some(e)) => format!("error: {e}"),
                    (Some(m), None) => format!(
                        "{} = {:e} (tol {:e})",
                        m.metric.name, m.metric.value, m.metric.tolerance
                    ),
                    (None, None) => format!("{} metrics", c.metrics.len()),
                };
                format!(
                    "[{}] criterion {:>2} {:<38} {:>7.1}s  {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.title,
                    c.wall_time_s,
                    detail
                )
            })
            .collect()
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        std::fs::create_dir_all(out_dir)?;
        let mut w = csv::Writer::from_path(out_dir.join("summary.csv"))?;
        w.write_record([
            "criterion",
            "title",
            "experiment",
            "metric",
            "value",
            "tolerance",
            "bound",
            "pass",
        ])?;
        for c in &self.criteria {
            for m in &c.metrics {
                w.write_record([
                    c.id.to_string(),
                    c.title.clone(),
                    m.experiment.clone(),
                    m.metric.name.clone(),
                    format!("{:e}", m.metric.value),
                    format!("{:e}", m.metric.tolerance),
                    serde_json::to_value(m.metric.bound)?
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    m.metric.pass.to_string(),
                ])?;
            }
            if c.metrics.is_empty() {
                w.write_record([
                    c.id.to_string(),
                    c.title.clone(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    c.pass.to_string(),
                ])?;
            }
        }
        w.flush()?;
        std::fs::write(
            out_dir.join("verdict.json"),
            serde_json::to_string_pretty(self)?,
        )?;
        Ok(())
    }
}

/// Structural check of a verdict document.
pub fn validate_verdict(v: &serde_json::Value) -> Result<()> {
    let obj = v.as_object().context("verdict is not an object")?;
    for key in ["suite", "seed", "pass", "criteria", "wall_time_s"] {
        if !obj.contains_key(key) {
            bail!("verdict misses `{key}`");
        }
    }
    let criteria = obj["criteria"]
        .as_array()
        .context("criteria is not an array")?;
    for c in criteria {
        for key in ["id", "title", "pass", "metrics", "errors", "wall_time_s"] {
            if c.get(key).is_none() {
                bail!("criterion misses `{key}`");
            }
        }
        let pass = c["pass"].as_bool().context("pass is not boolean")?;
        let metrics = c["metrics"].as_array().context("metrics is not an array")?;
        let all = metrics.iter().all(|m| m["pass"].as_bool() == Some(true));
        let errors = c["errors"].as_array().is_some_and(|e| !e.is_empty());
        if pass != (all && !errors) {
            bail!("criterion pass flag disagrees with its metrics");
        }
    }
    let overall = criteria.iter().all(|c| c["pass"].as_bool() == Some(true));
    if obj["pass"].as_bool() != Some(overall) {
        bail!("suite pass flag disagrees with its criteria");
    }
    Ok(())
}

type Runs = Vec<(ExperimentConfig, Result<(ResultRecord, Vec<Series>)>)>;

fn run_criterion(base: &ExperimentConfig, ctx: &Context, experiments: &[&str]) -> Runs {
    experiments
        .iter()
        .map(|id| {
            let mut cfg = base.clone();
            cfg.experiment = id.to_string();
            let out = execute(&cfg, ctx);
            (cfg, out)
        })
        .collect()
}

fn collect(id: u8, title: &str, runs: &Runs, wall: f64) -> CriterionResult {
    let mut metrics = Vec::new();
    let mut errors = Vec::new();
    for (cfg, out) in runs {
        match out {
            Ok((rec, _)) => metrics.extend(rec.metrics.iter().map(|m| MetricRow {
                experiment: rec.experiment.clone(),
                metric: m.clone(),
            })),
            Err(e) => errors.push(format!("{}: {e:#}", cfg.experiment)),
        }
    }
    let pass = errors.is_empty() && metrics.iter().all(|m| m.metric.pass);
    CriterionResult {
        id,
        title: title.into(),
        pass,
        metrics,
        errors,
        wall_time_s: wall,
    }
}

fn one_pass(base: &ExperimentConfig, ctx: &Context) -> Vec<(Runs, f64)> {
    let go = |(_, _, ex): &(u8, &str, &[&str])| {
        let t = Instant::now();
        let runs = run_criterion(base, ctx, ex);
        (runs, t.elapsed().as_secs_f64())
    };
    match base.jobs {
        Some(j) if j > 1 => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| CRITERIA.par_iter().map(go).collect()),
            Err(_) => CRITERIA.iter().map(go).collect(),
        },
        _ => CRITERIA.iter().map(go).collect(),
    }
}

fn fingerprint(runs: &[(Runs, f64)]) -> Vec<(String, u64)> {
    runs.iter()
        .flat_map(|(r, _)| r.iter())
        .flat_map(|(cfg, out)| match out {
            Ok((rec, _)) => rec
                .metrics
                .iter()
                .map(|m| (format!("{}/{}", rec.experiment, m.name), m.value.to_bits()))
                .collect(),
            Err(e) => vec![(format!("{}/error: {e}", cfg.experiment), 0)],
        })
        .collect()
}

/// Runs every criterion, then the whole set again for the determinism check.
pub fn run_suite(name: &str, base: &ExperimentConfig) -> Result<SuiteReport> {
    if name != PRIMARY {
        bail!("unknown suite `{name}`");
    }
    let start = Instant::now();
    let cache = base.resolved_cache_dir();
    let ctx = Context::new(cache.as_deref())?;
    let first = one_pass(base, &ctx);
    let mut criteria: Vec<CriterionResult> = CRITERIA
        .iter()
        .zip(&first)
        .map(|((id, title, _), (runs, wall))| collect(*id, title, runs, *wall))
        .collect();
    if let Some(c) = criteria.iter_mut().find(|c| c.id == 2) {
        let runtime = c.wall_time_s;
        c.metrics.push(MetricRow {
            experiment: "semigroup-laws".into(),
            metric: Metric::below("runtime_s", runtime, 60.0),
        });
        c.pass = c.pass && runtime < 60.0;
    }

    let t = Instant::now();
    let second = one_pass(base, &ctx);
    let (a, b) = (fingerprint(&first), fingerprint(&second));
    let mismatches = a.len().abs_diff(b.len()) + a.iter().zip(&b).filter(|(x, y)| x != y).count();
    let metrics = vec![
        MetricRow {
            experiment: "suite".into(),
            metric: Metric::at_most("metric_mismatches", mismatches as f64, 0.0),
        },
        MetricRow {
            experiment: "suite".into(),
            metric: Metric::info("metrics_compared", a.len() as f64),
        },
    ];
    criteria.push(CriterionResult {
        id: DETERMINISM.0,
        title: DETERMINISM.1.into(),
        pass: mismatches == 0,
        metrics,
        errors: vec![],
        wall_time_s: t.elapsed().as_secs_f64(),
    });

    if let Some(dir) = &base.out_dir {
        for (runs, _) in &first {
            for (_, out) in runs {
                if let Ok((rec, series)) = out {
                    rec.clone().persist(dir, series)?;
                }
            }
        }
    }
    let report = SuiteReport {
        suite: name.into(),
        seed: base.seed,
        pass: criteria.iter().all(|c| c.pass),
        criteria,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    if let Some(dir) = &base.out_dir {
        report.write(dir)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_checks() {
        let rep = SuiteReport {
            suite: PRIMARY.into(),
            seed: 0,
            pass: true,
            criteria: vec![CriterionResult {
                id: 1,
                title: "x".into(),
                pass: true,
                metrics: vec![MetricRow {
                    experiment: "e".into(),
                    metric: Metric::at_most("m", 0.0, 1.0),
                }],
                errors: vec![],
                wall_time_s: 0.0,
            }],
            wall_time_s: 0.0,
        };
        let mut v = serde_json::to_value(&rep).unwrap();
        validate_verdict(&v).unwrap();
        v["criteria"][0]["metrics"][0]["pass"] = false.into();
        assert!(validate_verdict(&v).is_err());
        assert!(run_suite("nope", &ExperimentConfig::default()).is_err());
    }
}
