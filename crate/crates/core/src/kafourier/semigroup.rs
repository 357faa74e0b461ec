use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use super::model::{build_model, SectorSpectralModel};
use crate::dunkl::MultiplicityData;
use crate::error::{KappaError, Result};
use crate::specfun::harmonic_dimension;

/// Energy fraction above which a truncation warning is raised.
pub const TAIL_THRESHOLD: f64 = 1e-6;

/// Radial profile of one sector, as coefficients in the model basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorVector {
    pub m: usize,
    pub coeffs: Vec<Complex64>,
}

impl SectorVector {
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ f_j conj(g_j)`.
    pub fn inner(&self, other: &SectorVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(f, g)| f * g.conj())
            .sum()
    }

    pub fn distance(&self, other: &SectorVector) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(f, g)| (f - g).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Sector models `m = 0..=m_max` sharing one [`MultiplicityData`].
#[derive(Clone, Debug)]
pub struct SpectralFamily {
    pub md: MultiplicityData,
    pub models: Vec<Arc<SectorSpectralModel>>,
}

impl SpectralFamily {
    pub fn build(md: &MultiplicityData, m_max: usize, n: usize) -> Result<Self> {
        let models = (0..=m_max)
            .map(|m| build_model(md, m, n).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralFamily {
            md: md.clone(),
            models,
        })
    }

    pub fn from_models(
        md: &MultiplicityData,
        models: Vec<Arc<SectorSpectralModel>>,
    ) -> Result<Self> {
        for (m, model) in models.iter().enumerate() {
            if model.m() != m || model.md != *md {
                return Err(KappaError::Domain(format!(
                    "model {m} does not match the family"
                )));
            }
        }
        Ok(SpectralFamily {
            md: md.clone(),
            models,
        })
    }

    pub fn sector(&self, m: usize) -> Result<&SectorSpectralModel> {
        self.models
            .get(m)
            .map(|a| a.as_ref())
            .ok_or_else(|| KappaError::Domain(format!("sector {m} not built")))
    }

    /// Projects a radial profile onto sector `m`.
    pub fn project(&self, m: usize, g: &dyn Fn(f64) -> Complex64) -> Result<SectorVector> {
        Ok(SectorVector {
            m,
            coeffs: self.sector(m)?.basis.project(g),
        })
    }

    pub fn eval(&self, f: &SectorVector, r: f64) -> Result<Complex64> {
        Ok(self.sector(f.m)?.basis.synthesize(&f.coeffs, r))
    }
}

/// Output of a semigroup application.
#[derive(Clone, Debug)]
pub struct Applied {
    pub value: SectorVector,
    /// Input energy fraction carried by unresolved modes.
    pub tail_energy: f64,
}

impl Applied {
    pub fn truncated(&self) -> bool {
        self.tail_energy > TAIL_THRESHOLD
    }
}

/// `phase · exp((z/a) Δ_{k,a})`, diagonal in each sector's eigenbasis.
#[derive(Clone, Debug)]
pub struct SemigroupOperator {
    pub z: Complex64,
    pub phase: Complex64,
    family: SpectralFamily,
    factors: Vec<Vec<Complex64>>,
}

impl SemigroupOperator {
    /// `I_{k,a}(z)` for `Re z >= 0`.
    pub fn new(family: &SpectralFamily, z: Complex64) -> Result<Self> {
        Self::with_phase(family, z, Complex64::new(1.0, 0.0))
    }

    fn with_phase(family: &SpectralFamily, z: Complex64, phase: Complex64) -> Result<Self> {
        if !(z.re >= 0.0) || !z.im.is_finite() {
            return Err(KappaError::Domain(format!(
                "semigroup needs Re z >= 0, got {z}"
            )));
        }
        let a = family.md.a();
        let factors = family
            .models
            .iter()
            .map(|model| {
                model
                    .eigenvalues
                    .iter()
                    .map(|&l| phase * (z * (l / a)).exp())
                    .collect()
            })
            .collect();
        Ok(SemigroupOperator {
            z,
            phase,
            family: family.clone(),
            factors,
        })
    }

    pub fn family(&self) -> &SpectralFamily {
        &self.family
    }

    /// Diagonal factors of sector `m`.
    pub fn factors(&self, m: usize) -> &[Complex64] {
        &self.factors[m]
    }

    pub fn apply(&self, f: &SectorVector) -> Result<Applied> {
        let model = self.family.sector(f.m)?;
        let modes = model.to_modes(&f.coeffs);
        let tail_energy = tail_energy(model, &modes);
        if tail_energy > TAIL_THRESHOLD {
            log::warn!("sector {} input has tail energy {tail_energy:e}", f.m);
        }
        let scaled: Vec<Complex64> = modes
            .iter()
            .zip(&self.factors[f.m])
            .map(|(d, s)| d * s)
            .collect();
        Ok(Applied {
            value: SectorVector {
                m: f.m,
                coeffs: model.from_modes(&scaled),
            },
            tail_energy,
        })
    }

    /// Hilbert–Schmidt norm over retained modes, counting each sector with
    /// its harmonic multiplicity.
    pub fn hs_norm(&self) -> Result<f64> {
        if !(self.z.re > 0.0) {
            return Err(KappaError::Domain(
                "Hilbert-Schmidt norm needs Re z > 0".into(),
            ));
        }
        let n_dim = self.family.md.dim();
        let mut acc = 0.0;
        for (m, model) in self.family.models.iter().enumerate() {
            let mult = harmonic_dimension(n_dim, m) as f64;
            acc += mult
                * self.factors[m][..model.retained]
                    .iter()
                    .map(|f| f.norm_sqr())
                    .sum::<f64>();
        }
        Ok(acc.sqrt())
    }
}

/// Share of `Σ|d_i|²` sitting in modes past the retained count.
pub fn tail_energy(model: &SectorSpectralModel, modes: &[Complex64]) -> f64 {
    let total: f64 = modes.iter().map(|d| d.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    modes[model.retained..]
        .iter()
        .map(|d| d.norm_sqr())
        .sum::<f64>()
        / total
}

/// `c = exp(iπ(N + 2⟨k⟩ + a - 2)/(2a))`.
pub fn phase_constant(md: &MultiplicityData) -> Complex64 {
    Complex64::from_polar(1.0, PI * md.admissibility() / (2.0 * md.a()))
}

/// `F_{k,a} = c · I_{k,a}(πi/2)`, evaluated on the imaginary axis where the
/// spectral factors are exactly unimodular.
pub fn fka_operator(family: &SpectralFamily) -> Result<SemigroupOperator> {
    SemigroupOperator::with_phase(
        family,
        Complex64::new(0.0, PI / 2.0),
        phase_constant(&family.md),
    )
}

/// Applies `F_{k,a}` to one sector.
pub fn fka_apply(family: &SpectralFamily, f: &SectorVector) -> Result<Applied> {
    fka_operator(family)?.apply(f)
}

/// Applies `I_{k,a}(z)` to one sector.
pub fn semigroup_apply(op: &SemigroupOperator, f: &SectorVector) -> Result<Applied> {
    op.apply(f)
}

/// Hilbert–Schmidt norm of `I_{k,a}(z)`.
pub fn hs_norm(op: &SemigroupOperator) -> Result<f64> {
    op.hs_norm()
}
