use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::multiplicity::MultiplicityData;

/// Radial part of `Δ_{k,a}` on the sector of `h`-harmonics of degree `m`:
/// `r^{2-a}(G'' + (first/r) G' - (centrifugal/r²) G) - r^a G`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialOde {
    pub m: usize,
    pub a: f64,
    /// `2⟨k⟩ + N - 1`.
    pub first: f64,
    /// `m(m + 2⟨k⟩ + N - 2)`.
    pub centrifugal: f64,
}

pub fn radial_reduce(m: usize, md: &MultiplicityData) -> RadialOde {
    let lambda = md.lambda();
    let mf = m as f64;
    RadialOde {
        m,
        a: md.a(),
        first: lambda + 1.0,
        centrifugal: mf * (mf + lambda),
    }
}

impl RadialOde {
    /// Applies the operator given `G, G', G''` at `r > 0`.
    pub fn apply(&self, r: f64, g: Complex64, dg: Complex64, d2g: Complex64) -> Complex64 {
        let inner = d2g + dg * (self.first / r) - g * (self.centrifugal / (r * r));
        inner * r.powf(2.0 - self.a) - g * r.powf(self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dunkl::{delta_ka, SymbolicFunction};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// `G(r) = r^γ e^{-s r^p}` as a one-variable symbolic function evaluated at `x = r > 0`.
    fn profile(gamma: f64, s: f64, p: f64) -> SymbolicFunction {
        SymbolicFunction::term(c(1.0), &[0], gamma, s, p).unwrap()
    }

    fn check_lift(md: &MultiplicityData, m: usize, harmonic: &SymbolicFunction) {
        let ode = radial_reduce(m, md);
        for &(gamma, s, p) in &[(0.0, 0.5, 2.0), (1.0, 1.0, 1.0), (2.0, 0.3, 1.5)] {
            let g = profile(gamma, s, p);
            let (g1, g2) = (g.partial(0), g.partial(0).partial(0));
            // f(x) = G(|x|) h(x) / |x|^m.
            let lifted = SymbolicFunction::from_terms(
                md.dim(),
                harmonic
                    .terms()
                    .iter()
                    .map(|t| crate::dunkl::Term {
                        c: t.c,
                        beta: t.beta.clone(),
                        gamma: t.gamma + gamma - m as f64,
                        s,
                        p,
                    })
                    .collect(),
            )
            .unwrap();
            let full = delta_ka(&lifted, md).unwrap();
            for i in 0..40 {
                let r = 0.1 + 9.9 * i as f64 / 39.0;
                let dir: Vec<f64> = (0..md.dim()).map(|j| 0.3 + 0.5 * j as f64).collect();
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                let x: Vec<f64> = dir.iter().map(|v| r * v / norm).collect();
                let y = harmonic.eval(&x) / r.powi(m as i32);
                let reduced = ode.apply(r, g.eval(&[r]), g1.eval(&[r]), g2.eval(&[r])) * y;
                let got = full.eval(&x);
                let scale = got.norm().max(1.0);
                assert!(
                    (got - reduced).norm() <= 1e-10 * scale,
                    "m={m} r={r}: {got} vs {reduced}"
                );
            }
        }
    }

    #[test]
    fn examples() {
        let md = MultiplicityData::uniform(1, 0.0, 2.0).unwrap();
        let ode = radial_reduce(0, &md);
        assert_eq!((ode.first, ode.centrifugal, ode.a), (0.0, 0.0, 2.0));
        let md = MultiplicityData::uniform(3, 0.0, 1.0).unwrap();
        let ode = radial_reduce(0, &md);
        assert_eq!((ode.first, ode.centrifugal, ode.a), (2.0, 0.0, 1.0));
    }

    #[test]
    fn lifts_match_full_operator_one_dimension() {
        for &(k, a) in &[(0.0, 2.0), (0.7, 1.0), (0.35, 1.5)] {
            let md = MultiplicityData::uniform(1, k, a).unwrap();
            check_lift(&md, 0, &SymbolicFunction::constant(1, c(1.0)));
            check_lift(&md, 1, &SymbolicFunction::monomial(&[1]));
        }
    }

    #[test]
    fn lifts_match_full_operator_two_dimensions() {
        for k in [vec![0.0, 0.0], vec![0.4, 0.9], vec![1.2, 0.1]] {
            let md = MultiplicityData::new(2, k.clone(), 1.5).unwrap();
            check_lift(&md, 0, &SymbolicFunction::constant(2, c(1.0)));
            check_lift(&md, 1, &SymbolicFunction::monomial(&[1, 0]));
            check_lift(&md, 2, &SymbolicFunction::monomial(&[1, 1]));
            let ratio = (1.0 + 2.0 * k[0]) / (1.0 + 2.0 * k[1]);
            let h2 = SymbolicFunction::monomial(&[2, 0])
                .sub(&SymbolicFunction::monomial(&[0, 2]).scale(c(ratio)));
            check_lift(&md, 2, &h2);
        }
    }
}
