//! Spectral construction of the semigroup `exp((z/a) Δ_{k,a})` and the
//! transform `F_{k,a}`, sector by sector.
//!
//! A function `G(|x|) Y(x/|x|)` with `Y` an h-harmonic of degree `m` lives in
//! sector `m`. Each sector is handled by a [`SectorSpectralModel`]: a
//! Galerkin discretization in scaled Laguerre functions, diagonalized once.

mod cache;
mod checks;
mod model;
mod oracles;
mod semigroup;

pub use cache::{CacheOutcome, CacheSidecar, ModelCache};
pub use checks::{holomorphy_residual, intertwining_residual, order_check, OrderReport};
pub use model::{
    build_model, build_model_with, default_beta, LaguerreBasis, SectorSpectralModel, DEFAULT_MODES,
    DEFAULT_SCALE_RATIO, MAX_MODES,
};
pub use oracles::{oracle_fourier, oracle_hankel, parity_join, parity_split, MehlerOracle};
pub use semigroup::{
    fka_apply, fka_operator, hs_norm, phase_constant, semigroup_apply, tail_energy, Applied,
    SectorVector, SemigroupOperator, SpectralFamily, TAIL_THRESHOLD,
};
