#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Numerical operator calculus around the minimal representation of `O(p+1,q+1)`.
//!
//! The crate is organised in layers:
//!
//! * [`specfun`] – special functions, Gauss rules, sphere quadrature and real
//!   spherical-harmonic bases.
//! * [`dunkl`] – exact Dunkl operators, the deformed Laplacian `Δ_{k,a}` and the
//!   `sl2`-triple on a closed symbolic function class.
//! * [`kafourier`] – the holomorphic semigroup `I_{k,a}(z)` and the
//!   `(k,a)`-generalized Fourier transform, built spectrally per harmonic sector.
//! * [`ultrahyperbolic`] – solutions of `□_{p,q} f = 0` synthesized from light-cone
//!   data, the hyperplane conserved quantity, conformal actions and energy.
//! * [`branching`] – twisted pull-back to `S^p × S^q`, harmonic expansion,
//!   Parseval-type sums and K-type sparsity.

pub mod branching;
pub mod dunkl;
pub mod error;
pub mod kafourier;
pub mod specfun;
pub mod ultrahyperbolic;

pub use error::{KappaError, Result};
pub use num_complex::Complex64;
