use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{KappaError, Result};
use crate::specfun::{gamma, gauss_rule, gegenbauer, sphere_area, SphereBasis, WeightSpec};
use crate::ultrahyperbolic::{Branch, ConeProfile, Radial};

const PANEL: usize = 16;

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let r = gauss_rule(WeightSpec::Legendre, PANEL).expect("legendre rule");
        (r.nodes, r.weights)
    })
}

/// Composite Gauss–Legendre rule on `[lo, hi]` with panels graded geometrically
/// towards each `(center, width)`.
pub fn graded_rule(lo: f64, hi: f64, centers: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let mut cuts = vec![lo, hi];
    for &(c, w) in centers {
        let c = c.clamp(lo, hi);
        let w = w.max(1e-14 * (hi - lo));
        cuts.push(c);
        let mut step = w;
        while step < hi - lo {
            cuts.push(c - step);
            cuts.push(c + step);
            step *= 2.0;
        }
    }
    cuts.retain(|x| *x >= lo && *x <= hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15 * (hi - lo));
    let (gx, gw) = panel_rule();
    let mut nodes = Vec::with_capacity(cuts.len() * PANEL);
    let mut weights = Vec::with_capacity(cuts.len() * PANEL);
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in gx.iter().zip(gw) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(z)` at a complex argument.
fn legendre_complex(n: usize, z: Complex64) -> Complex64 {
    let (mut p0, mut p1) = (Complex64::new(1.0, 0.0), z);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = (z * p1 * (2.0 * kf + 1.0) - p0 * kf) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Exact-radial evaluator of `f(x) = ∫_Ξ u(ξ) e^{i⟨x,ξ⟩} dμ` for profiles with a
/// `r^κ e^{-βr}` envelope: the radial integral is done in closed form and the
/// angular one by Funk–Hecke reduction, so `f` stays accurate at any `|x|`.
///
/// Supported: `p = 1` with arbitrary harmonic content, and `p = q = 2` with
/// constant angular content.
#[derive(Clone, Debug)]
pub struct LaguerreField {
    profile: ConeProfile,
    beta: f64,
    m: f64,
}

impl LaguerreField {
    pub fn new(profile: &ConeProfile) -> Result<Self> {
        let Radial::Laguerre { power, rate } = profile.radial else {
            return Err(KappaError::Unsupported(
                "closed-form synthesis needs a laguerre envelope".into(),
            ));
        };
        if !profile.walls.is_empty() || profile.map.is_some() {
            return Err(KappaError::Unsupported(
                "closed-form synthesis takes plain profiles".into(),
            ));
        }
        let (p, q) = (profile.sig.p, profile.sig.q);
        let m = power + (p + q) as f64 - 2.0;
        match (p, q) {
            (1, _) if q >= 3 => {}
            (2, 2) => {
                if profile
                    .harmonics
                    .iter()
                    .any(|h| h.omega.0 != 0 || h.eta.0 != 0)
                {
                    return Err(KappaError::Unsupported(
                        "p = q = 2 closed form needs constant angular content".into(),
                    ));
                }
                if power.fract() != 0.0 {
                    return Err(KappaError::Unsupported(
                        "p = q = 2 closed form needs an integer power".into(),
                    ));
                }
            }
            _ => {
                return Err(KappaError::Unsupported(format!(
                    "closed-form synthesis for ({p},{q})"
                )))
            }
        }
        Ok(LaguerreField {
            profile: profile.clone(),
            beta: rate,
            m,
        })
    }

    pub fn profile(&self) -> &ConeProfile {
        &self.profile
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.profile.sig.n() || x.iter().any(|c| !c.is_finite()) {
            return Err(KappaError::Domain(
                "evaluation point has wrong length or is not finite".into(),
            ));
        }
        let pre = gamma(self.m)? / 2.0;
        let val = if self.profile.sig.p == 1 {
            self.eval_p1(x)
        } else {
            self.eval_22(x)
        };
        Ok(val * pre)
    }

    fn eval_p1(&self, x: &[f64]) -> Complex64 {
        let q = self.profile.sig.q;
        let nu = 0.5 * (q as f64 - 2.0);
        let xs = &x[1..];
        let b = xs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let dir: Vec<f64> = if b > 0.0 {
            xs.iter().map(|c| c / b).collect()
        } else {
            let mut e = vec![0.0; q];
            e[0] = 1.0;
            e
        };
        let degs: Vec<usize> = {
            let mut d: Vec<usize> = self.profile.harmonics.iter().map(|h| h.eta.0).collect();
            d.sort_unstable();
            d.dedup();
            d
        };
        let basis_q = SphereBasis::new(q, 0).expect("sphere dimension");
        let y_eta: Vec<Vec<f64>> = degs.iter().map(|&l| basis_q.eval(l, &dir)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for omega in [1.0f64, -1.0] {
            match self.profile.branch {
                Branch::Forward if omega < 0.0 => continue,
                Branch::Backward if omega > 0.0 => continue,
                _ => {}
            }
            let a = Complex64::new(self.beta, -x[0] * omega);
            let lambdas = self.funk_hecke(a, b, nu, q, &degs);
            for h in &self.profile.harmonics {
                let k = degs
                    .iter()
                    .position(|&d| d == h.eta.0)
                    .expect("degree listed");
                let yo = if h.omega.0 == 0 {
                    std::f64::consts::FRAC_1_SQRT_2
                } else {
                    omega * std::f64::consts::FRAC_1_SQRT_2
                };
                total += h.coeff * lambdas[k] * (yo * y_eta[k][h.eta.1]);
            }
        }
        total
    }

    /// `Λ_l = |S^{q-2}| ∫_0^π (a - i b cos θ)^{-m} C_l^ν(cos θ)/C_l^ν(1) sin^{q-2}θ dθ`.
    fn funk_hecke(
        &self,
        a: Complex64,
        b: f64,
        nu: f64,
        q: usize,
        degs: &[usize],
    ) -> Vec<Complex64> {
        let beta = self.beta;
        let ratio = if b > 0.0 { a.im / b } else { 0.0 };
        let theta_star = ratio.clamp(-1.0, 1.0).acos();
        let scale = if b > 0.0 { beta / b } else { 1.0 };
        let width = (scale / theta_star.sin().max(scale.sqrt())).min(PI);
        let (nodes, weights) = graded_rule(0.0, PI, &[(theta_star, 0.5 * width)]);
        let norms: Vec<f64> = degs.iter().map(|&l| gegenbauer(l, nu, 1.0)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); degs.len()];
        for (th, w) in nodes.iter().zip(&weights) {
            let t = th.cos();
            let g = Complex64::new(a.re, a.im - b * t).powf(-self.m)
                * (w * th.sin().powi(q as i32 - 2));
            for (k, &l) in degs.iter().enumerate() {
                out[k] += g * (gegenbauer(l, nu, t) / norms[k]);
            }
        }
        let area = sphere_area(q - 1);
        out.iter().map(|z| z * area).collect()
    }

    fn eval_22(&self, x: &[f64]) -> Complex64 {
        let beta = self.beta;
        let a1 = x[..2].iter().map(|c| c * c).sum::<f64>().sqrt();
        let a2 = x[2..].iter().map(|c| c * c).sum::<f64>().sqrt();
        let m = self.m.round() as usize;
        // ∫_0^{2π} (c - i a cos θ)^{-m} dθ = 2π (c² + a²)^{-m/2} P_{m-1}(c / √(c² + a²))
        let inner = |c: Complex64| -> Complex64 {
            let s = (c * c + a2 * a2).sqrt();
            2.0 * PI * s.powi(-(m as i32)) * legendre_complex(m - 1, c / s)
        };
        let edge = (beta * beta + a2 * a2).sqrt();
        let mut centers = vec![(0.0, PI), (PI, PI)];
        if a1 > 0.0 {
            for sgn in [1.0, -1.0] {
                let ct = (sgn * edge / a1).clamp(-1.0, 1.0);
                let th = ct.acos();
                let w = (beta / a1) / th.sin().max((beta / a1).sqrt());
                centers.push((th, 0.5 * w.min(PI)));
            }
        }
        let (nodes, weights) = graded_rule(0.0, PI, &centers);
        let mut acc = Complex64::new(0.0, 0.0);
        for (ph, w) in nodes.iter().zip(&weights) {
            acc += inner(Complex64::new(beta, -a1 * ph.cos())) * *w;
        }
        let coeff: Complex64 = self.profile.harmonics.iter().map(|h| h.coeff).sum();
        // Both angular factors are Y_0 = 1/√(2π); the φ integral covers half the circle.
        coeff * acc * 2.0 / (2.0 * PI)
    }
}
