mod geometry;
mod profile;

pub use geometry::{cone_measure, ConeMeasure, ConeQuadrature, Hyperplane, Signature};
pub use profile::{Branch, ConeProfile, FrequencyMap, HarmonicTerm, Radial};
mod field;

pub use field::{frequency_split, from_atoms, synthesize, SolutionField, SPLIT_MARGIN};
mod hyperplane;

pub use hyperplane::{
    q_alpha_inner, spectral_inner, theorem41_ratio, Extrapolated, SliceOptions, SpectralValue,
    Theorem41Ratio,
};
mod conformal;

pub use conformal::{conformal_act, conformal_samples, covariance_residual, ConformalElement};
mod energy;

pub use energy::{energy, energy_identity, slice_energy_direct, EnergyIdentity};
