use serde::{Deserialize, Serialize};

use crate::error::{KappaError, Result};

/// Ambient dimension `N`, one multiplicity per axis reflection, and the
/// deformation parameter `a > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityData {
    n: usize,
    k: Vec<f64>,
    a: f64,
}

impl MultiplicityData {
    /// Rejects data with `a + 2⟨k⟩ + N - 2 <= 0`.
    pub fn new(n: usize, k: Vec<f64>, a: f64) -> Result<Self> {
        if n == 0 || k.len() != n {
            return Err(KappaError::Domain(format!(
                "need one multiplicity per axis: N = {n}, got {}",
                k.len()
            )));
        }
        if k.iter().any(|&ki| !(ki >= 0.0) || !ki.is_finite()) {
            return Err(KappaError::Domain(format!(
                "multiplicities must be finite and >= 0: {k:?}"
            )));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(KappaError::Domain(format!("a must be positive, got {a}")));
        }
        let md = MultiplicityData { n, k, a };
        let adm = md.admissibility();
        if adm <= 0.0 {
            return Err(KappaError::NotAdmissible(adm));
        }
        Ok(md)
    }

    /// Same multiplicity on every axis.
    pub fn uniform(n: usize, k: f64, a: f64) -> Result<Self> {
        Self::new(n, vec![k; n], a)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `⟨k⟩ = Σ k_i`.
    pub fn k_sum(&self) -> f64 {
        self.k.iter().sum()
    }

    /// `2⟨k⟩ + N - 2`.
    pub fn lambda(&self) -> f64 {
        2.0 * self.k_sum() + self.n as f64 - 2.0
    }

    /// `a + 2⟨k⟩ + N - 2`.
    pub fn admissibility(&self) -> f64 {
        self.a + self.lambda()
    }

    /// Constant term `(N + 2⟨k⟩ + a - 2)/a` of `H`.
    pub fn h_shift(&self) -> f64 {
        self.admissibility() / self.a
    }
}

/// `ϑ_{k,a}(x) = |x|^{a-2} Π |x_i|^{2k_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityWeight {
    pub md: MultiplicityData,
}

impl DensityWeight {
    pub fn new(md: MultiplicityData) -> Self {
        DensityWeight { md }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let prod: f64 = x
            .iter()
            .zip(self.md.k())
            .map(|(xi, ki)| xi.abs().powf(2.0 * ki))
            .product();
        r.powf(self.md.a() - 2.0) * prod
    }

    /// Homogeneity degree `2⟨k⟩ + a - 2`.
    pub fn degree(&self) -> f64 {
        2.0 * self.md.k_sum() + self.md.a() - 2.0
    }
}
