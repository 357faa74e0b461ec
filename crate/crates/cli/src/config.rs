use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::experiments::REGISTRY;

pub const CACHE_ENV: &str = "KAPPA_LAB_CACHE";

/// `a` given as `num/den` or as a decimal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u32,
    pub den: u32,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::str::FromStr for Ratio {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let (num, den) = (n.trim().parse()?, d.trim().parse()?);
            if den == 0 {
                bail!("zero denominator in {s}");
            }
            return Ok(Ratio { num, den });
        }
        let x: f64 = s.parse().with_context(|| format!("not a ratio: {s}"))?;
        for den in 1..=64u32 {
            let num = x * den as f64;
            if (num - num.round()).abs() < 1e-12 && num > 0.0 {
                return Ok(Ratio {
                    num: num.round() as u32,
                    den,
                });
            }
        }
        bail!("{s} is not a positive rational with small denominator")
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Everything an experiment may read. Unset fields fall back to the
/// experiment's own sweep.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub k: Option<f64>,
    pub a: Option<String>,
    /// Hyperplane FFT points, Laguerre modes or `S^q` cutoff, depending on the experiment.
    pub grid: Option<usize>,
    pub radius: Option<f64>,
    /// Replaces the upper tolerance of every metric.
    pub tol: Option<f64>,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        ExperimentConfig {
            experiment: experiment.to_string(),
            ..Default::default()
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set in `other` win.
    pub fn merge(mut self, other: ExperimentConfig) -> Self {
        if !other.experiment.is_empty() {
            self.experiment = other.experiment;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(p, q, k, a, grid, radius, tol, jobs, cache_dir, out_dir);
        if other.seed != 0 {
            self.seed = other.seed;
        }
        self
    }

    /// Cache directory: `KAPPA_LAB_CACHE` overrides the configured one.
    pub fn resolved_cache_dir(&self) -> Option<PathBuf> {
        std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .or_else(|| self.cache_dir.clone())
    }

    pub fn ratio(&self) -> Result<Option<Ratio>> {
        self.a.as_deref().map(str::parse).transpose()
    }

    pub fn signature(&self) -> Option<(usize, usize)> {
        match (self.p, self.q) {
            (Some(p), Some(q)) => Some((p, q)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !REGISTRY.iter().any(|e| e.id == self.experiment) {
            bail!("unknown experiment `{}`", self.experiment);
        }
        if self.p.is_some() != self.q.is_some() {
            bail!("--p and --q go together");
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                bail!("tolerance must be positive, got {t}");
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                bail!("radius must be positive, got {r}");
            }
        }
        if self.k.is_some_and(|k| !(k >= 0.0)) {
            bail!("k must be non-negative");
        }
        if self.jobs == Some(0) {
            bail!("--jobs must be at least 1");
        }
        self.ratio()?;
        Ok(())
    }
}
