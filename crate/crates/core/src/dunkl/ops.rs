use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::multiplicity::MultiplicityData;
use super::symbolic::SymbolicFunction;
use crate::error::{KappaError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_dim(f: &SymbolicFunction, md: &MultiplicityData) -> Result<()> {
    if f.dim() == md.dim() {
        Ok(())
    } else {
        Err(KappaError::Malformed(format!(
            "function on R^{} given to operator on R^{}",
            f.dim(),
            md.dim()
        )))
    }
}

/// Dunkl operator `T_i f = ∂_i f + k_i (f - f∘σ_i)/x_i`.
pub fn dunkl_t(i: usize, f: &SymbolicFunction, md: &MultiplicityData) -> Result<SymbolicFunction> {
    check_dim(f, md)?;
    if i >= md.dim() {
        return Err(KappaError::Domain(format!(
            "axis {i} out of range for N = {}",
            md.dim()
        )));
    }
    let d = f.partial(i);
    let ki = md.k()[i];
    if ki == 0.0 {
        return Ok(d);
    }
    Ok(d.add(&f.reflection_quotient(i).scale(Complex64::new(ki, 0.0))))
}

/// `Δ_k f = Σ T_i² f`.
pub fn dunkl_laplacian(f: &SymbolicFunction, md: &MultiplicityData) -> Result<SymbolicFunction> {
    let mut acc = SymbolicFunction::zero(md.dim());
    for i in 0..md.dim() {
        acc = acc.add(&dunkl_t(i, &dunkl_t(i, f, md)?, md)?);
    }
    Ok(acc)
}

/// `Δ_{k,a} f = |x|^{2-a} Δ_k f - |x|^a f`.
pub fn delta_ka(f: &SymbolicFunction, md: &MultiplicityData) -> Result<SymbolicFunction> {
    let a = md.a();
    Ok(dunkl_laplacian(f, md)?.mul_r(2.0 - a).sub(&f.mul_r(a)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sl2Generator {
    EPlus,
    EMinus,
    H,
}

/// `E⁺ = (i/a)|x|^a`, `E⁻ = (i/a)|x|^{2-a}Δ_k`, `H = (2/a)Σ x_i∂_i + (N+2⟨k⟩+a-2)/a`.
#[derive(Clone, Debug)]
pub struct Sl2Triple {
    md: MultiplicityData,
}

pub fn sl2_triple(md: &MultiplicityData) -> Sl2Triple {
    Sl2Triple { md: md.clone() }
}

impl Sl2Triple {
    pub fn md(&self) -> &MultiplicityData {
        &self.md
    }

    pub fn e_plus(&self, f: &SymbolicFunction) -> Result<SymbolicFunction> {
        check_dim(f, &self.md)?;
        let a = self.md.a();
        Ok(f.mul_r(a).scale(I / a))
    }

    pub fn e_minus(&self, f: &SymbolicFunction) -> Result<SymbolicFunction> {
        let a = self.md.a();
        Ok(dunkl_laplacian(f, &self.md)?.mul_r(2.0 - a).scale(I / a))
    }

    pub fn h(&self, f: &SymbolicFunction) -> Result<SymbolicFunction> {
        check_dim(f, &self.md)?;
        let a = self.md.a();
        Ok(f.euler()
            .scale(Complex64::new(2.0 / a, 0.0))
            .add(&f.scale(Complex64::new(self.md.h_shift(), 0.0))))
    }

    pub fn apply(&self, g: Sl2Generator, f: &SymbolicFunction) -> Result<SymbolicFunction> {
        match g {
            Sl2Generator::EPlus => self.e_plus(f),
            Sl2Generator::EMinus => self.e_minus(f),
            Sl2Generator::H => self.h(f),
        }
    }

    /// `Δ_{k,a} = a·i(E⁺ - E⁻)`.
    pub fn delta_ka(&self, f: &SymbolicFunction) -> Result<SymbolicFunction> {
        let a = self.md.a();
        Ok(self.e_plus(f)?.sub(&self.e_minus(f)?).scale(I * a))
    }

    /// Residual of `[A,B] = c·C` on `f`; see [`commutator_residual`].
    pub fn bracket_residual(
        &self,
        a: Sl2Generator,
        b: Sl2Generator,
        c: f64,
        expected: Sl2Generator,
        f: &SymbolicFunction,
    ) -> Result<f64> {
        commutator_residual(
            |g| self.apply(a, g),
            |g| self.apply(b, g),
            |g| Ok(self.apply(expected, g)?.scale(Complex64::new(c, 0.0))),
            f,
        )
    }
}

/// Sample points in `[-2,2]^N` with no vanishing coordinate (Halton sequence).
pub fn sample_grid(n: usize, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    assert!(n <= PRIMES.len(), "sample grid supports N <= 8");
    (1..=count as u64)
        .map(|idx| {
            PRIMES[..n]
                .iter()
                .map(|&b| {
                    let (mut i, mut f, mut v) = (idx, 1.0, 0.0);
                    while i > 0 {
                        f /= b as f64;
                        v += f * (i % b) as f64;
                        i /= b;
                    }
                    // Map (0,1) to ±[0.15, 2], away from the reflection hyperplanes.
                    let u = 2.0 * v - 1.0;
                    u.signum() * (0.15 + 1.85 * u.abs())
                })
                .collect()
        })
        .collect()
}

/// `sup |([A,B] - C) f| / max(1, sup |C f|)` over [`sample_grid`].
pub fn commutator_residual<A, B, C>(a: A, b: B, c: C, f: &SymbolicFunction) -> Result<f64>
where
    A: Fn(&SymbolicFunction) -> Result<SymbolicFunction>,
    B: Fn(&SymbolicFunction) -> Result<SymbolicFunction>,
    C: Fn(&SymbolicFunction) -> Result<SymbolicFunction>,
{
    let ab = a(&b(f)?)?;
    let ba = b(&a(f)?)?;
    let cf = c(f)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for x in sample_grid(f.dim(), 64) {
        let want = cf.eval(&x);
        worst = worst.max((ab.eval(&x) - ba.eval(&x) - want).norm());
        scale = scale.max(want.norm());
    }
    Ok(worst / scale)
}

/// Twenty polynomial-times-radial test functions on `R^n`.
pub fn canonical_test_set(n: usize) -> Vec<SymbolicFunction> {
    let one = Complex64::new(1.0, 0.0);
    let unit = |i: usize, e: u32| {
        let mut b = vec![0u32; n];
        b[i % n] += e;
        b
    };
    let mixed = |e0: u32, e1: u32| {
        let mut b = vec![0u32; n];
        b[0] += e0;
        b[1 % n] += e1;
        b
    };
    let shapes: [(Vec<u32>, f64, f64, f64); 20] = [
        (vec![0; n], 0.0, 0.0, 1.0),
        (unit(0, 1), 0.0, 0.0, 1.0),
        (unit(0, 2), 0.0, 0.0, 1.0),
        (mixed(1, 1), 0.0, 0.0, 1.0),
        (unit(1, 3), 0.0, 0.0, 1.0),
        (vec![0; n], 0.0, 0.5, 2.0),
        (unit(0, 1), 0.0, 0.5, 2.0),
        (unit(0, 2), 0.0, 0.5, 2.0),
        (mixed(2, 1), 0.0, 0.5, 2.0),
        (unit(1, 1), 0.0, 1.0, 2.0),
        (vec![0; n], 0.0, 1.0, 1.0),
        (unit(0, 1), 0.0, 1.0, 1.0),
        (mixed(1, 2), 0.0, 0.7, 1.0),
        (vec![0; n], 1.0, 0.5, 2.0),
        (unit(0, 1), 2.0, 0.5, 2.0),
        (vec![0; n], 0.5, 0.3, 1.5),
        (unit(1, 2), -0.5, 0.4, 1.5),
        (mixed(3, 1), 0.0, 0.25, 2.0),
        (unit(0, 4), 1.5, 0.6, 1.0),
        (mixed(1, 1), 0.3, 0.5, 0.5),
    ];
    shapes
        .into_iter()
        .map(|(b, g, s, p)| SymbolicFunction::term(one, &b, g, s, p).expect("well-formed"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn t1_on_x1() {
        let md = MultiplicityData::uniform(1, 0.8, 1.0).unwrap();
        let out = dunkl_t(0, &SymbolicFunction::monomial(&[1]), &md).unwrap();
        assert!(out == SymbolicFunction::constant(1, c(1.0 + 2.0 * 0.8)));
        let out = dunkl_t(0, &SymbolicFunction::monomial(&[2]), &md).unwrap();
        assert!(out == SymbolicFunction::monomial(&[1]).scale(c(2.0)));
    }

    #[test]
    fn zero_multiplicity_is_partial_derivative() {
        let md = MultiplicityData::uniform(3, 0.0, 2.0).unwrap();
        for f in canonical_test_set(3) {
            for i in 0..3 {
                assert!(dunkl_t(i, &f, &md).unwrap() == f.partial(i));
            }
            assert!(dunkl_laplacian(&f, &md).unwrap() == f.laplacian());
        }
    }

    #[test]
    fn laplacian_examples() {
        let md = MultiplicityData::uniform(2, 0.0, 2.0).unwrap();
        let f = SymbolicFunction::monomial(&[2, 0]).add(&SymbolicFunction::monomial(&[0, 2]));
        assert!(dunkl_laplacian(&f, &md).unwrap() == SymbolicFunction::constant(2, c(4.0)));
        for n in 1..=3 {
            let md = MultiplicityData::uniform(n, 0.0, 2.0).unwrap();
            let g = SymbolicFunction::term(c(1.0), &vec![0; n], 0.0, 0.5, 2.0).unwrap();
            let lap = dunkl_laplacian(&g, &md).unwrap();
            for x in sample_grid(n, 10) {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let want = (r2 - n as f64) * (-0.5 * r2).exp();
                assert_abs_diff_eq!(lap.eval(&x).re, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn one_dimensional_square_against_grid() {
        // T f(x) = f'(x) + k (f(x) - f(-x))/x evaluated with central differences.
        let k = 0.65;
        let md = MultiplicityData::uniform(1, k, 1.0).unwrap();
        let sym = dunkl_laplacian(&SymbolicFunction::monomial(&[2]), &md).unwrap();
        let t = |f: &dyn Fn(f64) -> f64, x: f64| {
            let h = 1e-4;
            (f(x + h) - f(x - h)) / (2.0 * h) + k * (f(x) - f(-x)) / x
        };
        let tf = |x: f64| t(&|y| y * y, x);
        for x in [-1.7, -0.4, 0.3, 1.1, 1.9] {
            assert_abs_diff_eq!(t(&tf, x), sym.eval(&[x]).re, epsilon = 1e-6);
            assert_abs_diff_eq!(sym.eval(&[x]).re, 2.0 + 4.0 * k, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_ka_special_cases() {
        let md = MultiplicityData::uniform(2, 0.0, 2.0).unwrap();
        let one = SymbolicFunction::constant(2, c(1.0));
        let x = [0.6, -1.2];
        let r2 = 0.36 + 1.44;
        assert_abs_diff_eq!(
            delta_ka(&one, &md).unwrap().eval(&x).re,
            -r2,
            epsilon = 1e-14
        );
        let f = SymbolicFunction::term(c(1.0), &[1, 0], 0.0, 0.5, 2.0).unwrap();
        let hermite = f.laplacian().sub(&f.mul_r(2.0));
        assert_abs_diff_eq!(
            delta_ka(&f, &md).unwrap().eval(&x).re,
            hermite.eval(&x).re,
            epsilon = 1e-13
        );
        let md1 = MultiplicityData::uniform(2, 0.0, 1.0).unwrap();
        let laguerre = f.laplacian().mul_r(1.0).sub(&f.mul_r(1.0));
        assert_abs_diff_eq!(
            delta_ka(&f, &md1).unwrap().eval(&x).re,
            laguerre.eval(&x).re,
            epsilon = 1e-13
        );
        let tri = sl2_triple(&md);
        assert_abs_diff_eq!(
            (tri.delta_ka(&f).unwrap().eval(&x) - delta_ka(&f, &md).unwrap().eval(&x)).norm(),
            0.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn h_examples() {
        let md = MultiplicityData::new(2, vec![0.3, 0.4], 1.5).unwrap();
        let tri = sl2_triple(&md);
        let h1 = tri.h(&SymbolicFunction::constant(2, c(1.0))).unwrap();
        assert_eq!(h1.terms().len(), 1);
        assert_abs_diff_eq!(
            h1.terms()[0].c.re,
            (2.0 + 1.4 + 1.5 - 2.0) / 1.5,
            epsilon = 1e-15
        );
        let md = MultiplicityData::uniform(3, 0.0, 2.0).unwrap();
        let f = SymbolicFunction::monomial(&[2, 1, 0]);
        let want = f.scale(c((2.0 * 3.0 + 3.0) / 2.0));
        assert!(sl2_triple(&md).h(&f).unwrap() == want);
        let ep = sl2_triple(&md).e_plus(&f).unwrap();
        assert_abs_diff_eq!(ep.eval(&[1.0, 1.0, 1.0]).im, 0.5 * 3.0, epsilon = 1e-14);
    }

    #[test]
    fn bracket_examples() {
        use Sl2Generator::*;
        let md = MultiplicityData::uniform(2, 0.0, 2.0).unwrap();
        let f = SymbolicFunction::term(c(1.0), &[2, 0], 0.0, 0.5, 2.0).unwrap();
        let r = sl2_triple(&md)
            .bracket_residual(H, EPlus, 2.0, EPlus, &f)
            .unwrap();
        assert!(r <= 1e-12, "{r}");
        let md = MultiplicityData::uniform(1, 0.7, 1.5).unwrap();
        let one = SymbolicFunction::constant(1, c(1.0));
        let r = sl2_triple(&md)
            .bracket_residual(EPlus, EMinus, 1.0, H, &one)
            .unwrap();
        assert!(r <= 1e-10, "{r}");
    }
}
