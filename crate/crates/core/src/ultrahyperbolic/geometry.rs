use serde::{Deserialize, Serialize};

use crate::error::{KappaError, Result};
use crate::specfun::{sphere_area, sphere_quadrature, SphereRule};

/// Signature `(p, q)` of `R^{p,q}`, with `p + q` even and greater than 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 || (p + q) % 2 == 1 || p + q <= 2 {
            return Err(KappaError::Domain(format!(
                "signature ({p},{q}) needs p, q >= 1 and p + q even and > 2"
            )));
        }
        Ok(Signature { p, q })
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// `(x, y)_{p,q} = Σ_{i<p} x_i y_i - Σ_{i>=p} x_i y_i`.
    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .enumerate()
            .map(|(i, (a, b))| if i < self.p { a * b } else { -a * b })
            .sum()
    }

    pub fn quad(&self, x: &[f64]) -> f64 {
        self.form(x, x)
    }

    /// `I x` with `I = diag(1_p, -1_q)`.
    pub fn flip(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &a)| if i < self.p { a } else { -a })
            .collect()
    }

    /// The point `(r ω, r η)` of the cone.
    pub fn cone_point(&self, r: f64, omega: &[f64], eta: &[f64]) -> Vec<f64> {
        omega.iter().chain(eta).map(|c| r * c).collect()
    }

    /// Cone coordinates `(r, ω, η)` of `ξ`, with `r` the norm of the first block.
    pub fn cone_coords(&self, xi: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let r1 = xi[..self.p].iter().map(|c| c * c).sum::<f64>().sqrt();
        let r2 = xi[self.p..].iter().map(|c| c * c).sum::<f64>().sqrt();
        let r = 0.5 * (r1 + r2);
        let unit = |v: &[f64], s: f64| -> Vec<f64> {
            if s > 0.0 {
                v.iter().map(|c| c / s).collect()
            } else {
                let mut e = vec![0.0; v.len()];
                e[0] = 1.0;
                e
            }
        };
        (r, unit(&xi[..self.p], r1), unit(&xi[self.p..], r2))
    }

    /// Total mass of `ξ ↦ g(|ξ'|)` under the cone measure, i.e.
    /// `|S^{p-1}||S^{q-1}|/2 · ∫ g(r) r^{p+q-3} dr`, given that radial integral.
    pub fn radial_mass(&self, radial_integral: f64) -> f64 {
        0.5 * sphere_area(self.p) * sphere_area(self.q) * radial_integral
    }
}

/// `dμ = (r^{p+q-3}/2) dr dω dη` on the light cone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeMeasure {
    pub sig: Signature,
    /// Exponent of `r` in the density.
    pub radial_power: usize,
    pub factor: f64,
}

pub fn cone_measure(sig: Signature) -> ConeMeasure {
    ConeMeasure {
        sig,
        radial_power: sig.n() - 3,
        factor: 0.5,
    }
}

/// Hyperplane `{x : (x, v)_{p,q} = c}` with `(v, v)_{p,q} = ±1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub v: Vec<f64>,
    pub c: f64,
}

impl Hyperplane {
    /// Normalizes `v` to `(v,v) = ±1`; characteristic normals are rejected.
    pub fn new(sig: Signature, v: &[f64], c: f64) -> Result<Self> {
        if v.len() != sig.n() {
            return Err(KappaError::Domain(format!(
                "normal has {} entries, need {}",
                v.len(),
                sig.n()
            )));
        }
        let vv = sig.quad(v);
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vv.abs() <= 1e-10 * scale * scale {
            return Err(KappaError::Domain(
                "characteristic hyperplane: (v,v) = 0".into(),
            ));
        }
        let s = vv.abs().sqrt();
        Ok(Hyperplane {
            v: v.iter().map(|x| x / s).collect(),
            c,
        })
    }

    /// `+1` when the normal is timelike in the first block's sense, `-1` otherwise.
    pub fn kind(&self, sig: Signature) -> f64 {
        sig.quad(&self.v).signum()
    }

    pub fn euclid_norm(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Tensor quadrature on the cone: angular rules times radial Gauss rules.
#[derive(Clone, Debug)]
pub struct ConeQuadrature {
    pub sig: Signature,
    /// Points of the cone.
    pub points: Vec<Vec<f64>>,
    /// Weights of `dμ`, already including `r^{p+q-3}/2`.
    pub weights: Vec<f64>,
}

impl ConeQuadrature {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Builds a rule from angular orders and a per-direction radial rule.
    pub fn build(
        sig: Signature,
        omega_order: usize,
        eta_order: usize,
        mut radial: impl FnMut(&[f64], &[f64]) -> Option<(Vec<f64>, Vec<f64>)>,
    ) -> Result<Self> {
        let om: SphereRule = sphere_quadrature(sig.p, omega_order)?;
        let et: SphereRule = sphere_quadrature(sig.q, eta_order)?;
        let power = (sig.n() - 3) as i32;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (w, &ww) in om.points.iter().zip(&om.weights) {
            for (e, &we) in et.points.iter().zip(&et.weights) {
                if let Some((rs, rw)) = radial(w, e) {
                    for (&r, &wr) in rs.iter().zip(&rw) {
                        points.push(sig.cone_point(r, w, e));
                        weights.push(0.5 * ww * we * wr * r.powi(power));
                    }
                }
            }
        }
        Ok(ConeQuadrature {
            sig,
            points,
            weights,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gauss_rule, WeightSpec};

    #[test]
    fn signature_rules() {
        assert!(Signature::new(1, 3).is_ok());
        assert!(Signature::new(2, 2).is_ok());
        assert!(Signature::new(1, 1).is_err());
        assert!(Signature::new(1, 2).is_err());
        let s = Signature::new(1, 3).unwrap();
        assert_eq!(s.quad(&[2.0, 1.0, 1.0, 1.0]), 1.0);
        let xi = s.cone_point(1.5, &[1.0], &[0.0, 0.6, 0.8]);
        assert!(s.quad(&xi).abs() < 1e-14);
    }

    #[test]
    fn hyperplanes() {
        let s = Signature::new(1, 3).unwrap();
        let h = Hyperplane::new(s, &[2.0, 0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(h.v, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(h.kind(s), 1.0);
        assert_eq!(
            Hyperplane::new(s, &[0.0, 3.0, 0.0, 0.0], 0.0)
                .unwrap()
                .kind(s),
            -1.0
        );
        assert!(Hyperplane::new(s, &[1.0, 1.0, 0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn laguerre_mass_and_homogeneity() {
        // ∫ e^{-|ξ'|/λ} dμ = λ^{n-2} |S^{p-1}||S^{q-1}| (n-3)! / 2.
        for (p, q) in [(1, 3), (2, 2), (3, 3)] {
            let s = Signature::new(p, q).unwrap();
            let rule = gauss_rule(WeightSpec::GenLaguerre { alpha: 0.0 }, 12).unwrap();
            let fact: f64 = (1..=(p + q - 3)).map(|i| i as f64).product();
            for lam in [1.0f64, 1.3] {
                let quad = ConeQuadrature::build(s, 2, 2, |_, _| {
                    Some((
                        rule.nodes.iter().map(|t| t * lam).collect(),
                        rule.nodes
                            .iter()
                            .zip(&rule.weights)
                            .map(|(t, w)| w * t.exp() * lam)
                            .collect(),
                    ))
                })
                .unwrap();
                let mass: f64 = quad
                    .points
                    .iter()
                    .zip(&quad.weights)
                    .map(|(x, w)| {
                        w * (-x[..p].iter().map(|c| c * c).sum::<f64>().sqrt() / lam).exp()
                    })
                    .sum();
                let want = s.radial_mass(fact) * lam.powi((p + q - 2) as i32);
                assert!(
                    (mass - want).abs() < 1e-10 * want,
                    "{p},{q}: {mass} vs {want}"
                );
            }
        }
    }
}
