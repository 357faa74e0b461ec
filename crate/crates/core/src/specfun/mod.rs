//! Special functions, Gauss rules and sphere harmonics.
//!
//! Everything here is evaluated by recurrences or convergent series; no
//! asymptotic expansions are used, so the accuracy statements hold on the
//! moderate argument ranges the rest of the crate needs (`|x| <= 50`).

mod bessel;
mod gamma;
mod poly;
mod quadrature;
mod sphere;

pub use bessel::bessel_j;
pub use gamma::{gamma, gamma_ln};
pub use poly::{gegenbauer, gegenbauer_all, hermite_functions, laguerre, laguerre_all};
pub use quadrature::{gauss_rule, golub_welsch, recurrence, Domain, QuadratureRule, WeightSpec};
pub use sphere::{
    harmonic_dimension, laplace_beltrami_eigenvalue, sphere_area, sphere_eigencheck,
    sphere_quadrature, yamabe_eigenvalue, EigencheckReport, SphereBasis, SphereRule,
};
