use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, Result};
use kappa_core::dunkl::MultiplicityData;
use kappa_core::kafourier::{build_model, ModelCache, SpectralFamily};

use crate::config::ExperimentConfig;
use crate::record::{Metric, ResultRecord, Series};

mod algebra;
mod branch;
mod wave;

/// What an experiment hands back before timing and persistence.
pub struct Outcome {
    pub params: serde_json::Value,
    pub metrics: Vec<Metric>,
    pub series: Vec<Series>,
}

pub struct Context {
    pub cache: Option<ModelCache>,
}

impl Context {
    pub fn new(cache_dir: Option<&Path>) -> Result<Self> {
        Ok(Context {
            cache: cache_dir.map(ModelCache::new).transpose()?,
        })
    }

    /// Sector models `0..=m_max`, through the cache when one is configured.
    pub fn family(&self, md: &MultiplicityData, m_max: usize, n: usize) -> Result<SpectralFamily> {
        let models = (0..=m_max)
            .map(|m| {
                let model = match &self.cache {
                    Some(c) => c.get_or_build(md, m, n)?.0,
                    None => build_model(md, m, n)?,
                };
                Ok(Arc::new(model))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralFamily::from_models(md, models)?)
    }
}

pub struct ExperimentInfo {
    pub id: &'static str,
    pub summary: &'static str,
    run: fn(&ExperimentConfig, &Context) -> Result<Outcome>,
}

pub static REGISTRY: &[ExperimentInfo] = &[
    ExperimentInfo {
        id: "sl2-commutators",
        summary: "brackets of the sl2 triple on the canonical test set",
        run: algebra::sl2_commutators,
    },
    ExperimentInfo {
        id: "semigroup-laws",
        summary: "composition, boundary unitarity and trace-class decay of the semigroup",
        run: algebra::semigroup_laws,
    },
    ExperimentInfo {
        id: "spectrum",
        summary: "negativity and grid stability of the sector spectra",
        run: algebra::spectrum,
    },
    ExperimentInfo {
        id: "fka-orders",
        summary: "finite order of F_{k,a} for rational a",
        run: algebra::fka_orders,
    },
    ExperimentInfo {
        id: "fka-oracles",
        summary: "Fourier, Hankel and Mehler special cases",
        run: algebra::fka_oracles,
    },
    ExperimentInfo {
        id: "intertwining",
        summary: "F_{k,a} against E, |x|^a and Δ_{k,a}",
        run: algebra::intertwining,
    },
    ExperimentInfo {
        id: "conserve-hyperplane",
        summary: "hyperplane independence, positivity and spectral agreement of (f,f)",
        run: wave::conserve_hyperplane,
    },
    ExperimentInfo {
        id: "conformal",
        summary: "dilation weight and conformal covariance",
        run: wave::conformal,
    },
    ExperimentInfo {
        id: "theorem41",
        summary: "ratio of (f,f) to the L² norm on the cone",
        run: wave::theorem41,
    },
    ExperimentInfo {
        id: "energy",
        summary: "time-slice energy and the (f,|H|f) identity",
        run: wave::energy,
    },
    ExperimentInfo {
        id: "branch-parseval",
        summary: "Parseval sum of the pulled-back expansion against the spectral norm",
        run: branch::branch_parseval,
    },
    ExperimentInfo {
        id: "ktype",
        summary: "K-type sparsity of pulled-back solutions",
        run: branch::ktype,
    },
];

pub fn lookup(id: &str) -> Result<&'static ExperimentInfo> {
    REGISTRY
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| anyhow!("unknown experiment `{id}`"))
}

/// Runs without touching the output directory.
pub fn execute(config: &ExperimentConfig, ctx: &Context) -> Result<(ResultRecord, Vec<Series>)> {
    config.validate()?;
    let info = lookup(&config.experiment)?;
    let start = Instant::now();
    let mut out = (info.run)(config, ctx)?;
    if let Some(t) = config.tol {
        out.metrics = out
            .metrics
            .into_iter()
            .map(|m| m.with_tolerance(t))
            .collect();
    }
    let mut params = out.params;
    if let serde_json::Value::Object(map) = &mut params {
        map.insert("seed".into(), config.seed.into());
    }
    let record = ResultRecord::new(info.id, params, out.metrics, start.elapsed().as_secs_f64());
    Ok((record, out.series))
}

/// Runs one experiment and persists the record and series when an output
/// directory is configured.
pub fn run(config: &ExperimentConfig) -> Result<ResultRecord> {
    let cache = config.resolved_cache_dir();
    let ctx = Context::new(cache.as_deref())?;
    let (mut record, series) = execute(config, &ctx)?;
    if let Some(dir) = &config.out_dir {
        record.persist(dir, &series)?;
    }
    Ok(record)
}

pub(crate) fn max(it: impl IntoIterator<Item = f64>) -> f64 {
    // NaN must not disappear into a passing maximum.
    it.into_iter().fold(0.0, |a: f64, b: f64| {
        if a.is_nan() || b.is_nan() {
            f64::NAN
        } else {
            a.max(b)
        }
    })
}
