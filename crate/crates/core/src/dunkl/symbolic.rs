use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{KappaError, Result};

const PRUNE: f64 = 1e-14;
const KEY_TOL: f64 = 1e-12;

/// `c · x^β · |x|^γ · exp(-s |x|^p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub c: Complex64,
    pub beta: Vec<u32>,
    pub gamma: f64,
    pub s: f64,
    pub p: f64,
}

impl Term {
    fn key_cmp(&self, other: &Term) -> Ordering {
        self.beta
            .cmp(&other.beta)
            .then(self.gamma.total_cmp(&other.gamma))
            .then(self.s.total_cmp(&other.s))
            .then(self.p.total_cmp(&other.p))
    }

    fn same_key(&self, other: &Term) -> bool {
        self.beta == other.beta
            && (self.gamma - other.gamma).abs() < KEY_TOL
            && (self.s - other.s).abs() < KEY_TOL
            && (self.p - other.p).abs() < KEY_TOL
    }

    fn with(&self, c: Complex64, beta: Vec<u32>, gamma: f64) -> Term {
        Term {
            c,
            beta,
            gamma,
            s: self.s,
            p: self.p,
        }
    }

    pub fn eval(&self, x: &[f64], r: f64) -> Complex64 {
        let mono: f64 = x
            .iter()
            .zip(&self.beta)
            .map(|(xi, &b)| xi.powi(b as i32))
            .product();
        let mut v = mono;
        if self.gamma != 0.0 {
            v *= r.powf(self.gamma);
        }
        if self.s != 0.0 {
            v *= (-self.s * r.powf(self.p)).exp();
        }
        self.c * v
    }
}

/// Finite sums of [`Term`]s on `R^N`, kept sorted with duplicates merged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicFunction {
    n: usize,
    terms: Vec<Term>,
}

impl SymbolicFunction {
    pub fn zero(n: usize) -> Self {
        SymbolicFunction {
            n,
            terms: Vec::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::from_terms(
            n,
            vec![Term {
                c,
                beta: vec![0; n],
                gamma: 0.0,
                s: 0.0,
                p: 1.0,
            }],
        )
        .expect("well-formed")
    }

    /// `x^β`.
    pub fn monomial(beta: &[u32]) -> Self {
        let n = beta.len();
        Self::from_terms(
            n,
            vec![Term {
                c: Complex64::new(1.0, 0.0),
                beta: beta.to_vec(),
                gamma: 0.0,
                s: 0.0,
                p: 1.0,
            }],
        )
        .expect("well-formed")
    }

    /// `c x^β |x|^γ exp(-s|x|^p)`.
    pub fn term(c: Complex64, beta: &[u32], gamma: f64, s: f64, p: f64) -> Result<Self> {
        Self::from_terms(
            beta.len(),
            vec![Term {
                c,
                beta: beta.to_vec(),
                gamma,
                s,
                p,
            }],
        )
    }

    pub fn from_terms(n: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.beta.len() != n {
                return Err(KappaError::Malformed(format!(
                    "term has {} exponents in dimension {n}",
                    t.beta.len()
                )));
            }
            if !(t.c.re.is_finite() && t.c.im.is_finite() && t.gamma.is_finite())
                || !(t.s >= 0.0)
                || !(t.p > 0.0)
            {
                return Err(KappaError::Malformed(format!("bad term {t:?}")));
            }
        }
        let mut f = SymbolicFunction { n, terms };
        f.canonicalize();
        Ok(f)
    }

    fn canonicalize(&mut self) {
        self.terms.sort_by(Term::key_cmp);
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match out.last_mut() {
                Some(last) if last.same_key(&t) => last.c += t.c,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.c.norm() >= PRUNE);
        self.terms = out;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.terms.iter().map(|t| t.eval(x, r)).sum()
    }

    fn rebuild(&self, terms: Vec<Term>) -> Self {
        let mut f = SymbolicFunction { n: self.n, terms };
        f.canonicalize();
        f
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.rebuild(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.rebuild(
            self.terms
                .iter()
                .map(|t| Term {
                    c: t.c * c,
                    ..t.clone()
                })
                .collect(),
        )
    }

    pub fn mul_x(&self, i: usize) -> Self {
        self.rebuild(
            self.terms
                .iter()
                .map(|t| {
                    let mut b = t.beta.clone();
                    b[i] += 1;
                    t.with(t.c, b, t.gamma)
                })
                .collect(),
        )
    }

    /// Multiplication by `|x|^ρ`.
    pub fn mul_r(&self, rho: f64) -> Self {
        self.rebuild(
            self.terms
                .iter()
                .map(|t| t.with(t.c, t.beta.clone(), t.gamma + rho))
                .collect(),
        )
    }

    /// `f ∘ σ_i` with `σ_i : x_i ↦ -x_i`.
    pub fn reflect(&self, i: usize) -> Self {
        self.rebuild(
            self.terms
                .iter()
                .map(|t| {
                    let sign = if t.beta[i] % 2 == 1 { -1.0 } else { 1.0 };
                    Term {
                        c: t.c * sign,
                        ..t.clone()
                    }
                })
                .collect(),
        )
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Vec::with_capacity(3 * self.terms.len());
        for t in &self.terms {
            if t.beta[i] > 0 {
                let mut b = t.beta.clone();
                b[i] -= 1;
                out.push(t.with(t.c * t.beta[i] as f64, b, t.gamma));
            }
            let mut up = t.beta.clone();
            up[i] += 1;
            if t.gamma != 0.0 {
                out.push(t.with(t.c * t.gamma, up.clone(), t.gamma - 2.0));
            }
            if t.s != 0.0 {
                out.push(t.with(-t.c * t.s * t.p, up, t.gamma + t.p - 2.0));
            }
        }
        self.rebuild(out)
    }

    /// `(f - f∘σ_i)/x_i`, exact because only odd-in-`x_i` terms survive.
    pub fn reflection_quotient(&self, i: usize) -> Self {
        let out = self
            .terms
            .iter()
            .filter(|t| t.beta[i] % 2 == 1)
            .map(|t| {
                let mut b = t.beta.clone();
                b[i] -= 1;
                t.with(t.c * 2.0, b, t.gamma)
            })
            .collect();
        self.rebuild(out)
    }

    /// `Σ x_i ∂_i f`, kept in closed form per term.
    pub fn euler(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let deg = t.beta.iter().sum::<u32>() as f64 + t.gamma;
            out.push(Term {
                c: t.c * deg,
                ..t.clone()
            });
            if t.s != 0.0 {
                out.push(t.with(-t.c * t.s * t.p, t.beta.clone(), t.gamma + t.p));
            }
        }
        self.rebuild(out)
    }

    /// Euclidean Laplacian `Σ ∂_i²`.
    pub fn laplacian(&self) -> Self {
        (0..self.n).fold(Self::zero(self.n), |acc, i| {
            acc.add(&self.partial(i).partial(i))
        })
    }
}
