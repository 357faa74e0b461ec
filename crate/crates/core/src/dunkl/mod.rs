//! Dunkl operators for the reflection group `Z₂^N` acting on a closed class
//! of functions `Σ c x^β |x|^γ exp(-s|x|^p)`.
//!
//! Everything is exact symbolic manipulation; numbers only appear when a
//! result is evaluated at a point.

mod multiplicity;
mod ops;
mod radial;
mod symbolic;

pub use multiplicity::{DensityWeight, MultiplicityData};
pub use ops::{
    canonical_test_set, commutator_residual, delta_ka, dunkl_laplacian, dunkl_t, sample_grid,
    sl2_triple, Sl2Generator, Sl2Triple,
};
pub use radial::{radial_reduce, RadialOde};
pub use symbolic::{SymbolicFunction, Term};
