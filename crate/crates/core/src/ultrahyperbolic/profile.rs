use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::{ConeQuadrature, Signature};
use crate::error::{KappaError, Result};
use crate::specfun::{gauss_rule, harmonic_dimension, QuadratureRule, SphereBasis, WeightSpec};

/// Which half of the cone carries the profile. The halves are only
/// separated for `p = 1`, where they are the signs of `ξ_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Both,
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Radial {
    /// `exp(1 - 1/(1 - s²))`, `s = (r - center)/width`, zero for `|s| >= 1`.
    Bump { center: f64, width: f64 },
    /// `exp(-(r - center)²/(2 sigma²))` times the bump of half-width `cutoff`.
    Gauss {
        center: f64,
        sigma: f64,
        cutoff: f64,
    },
    /// `r^power e^{-rate r}`.
    Laguerre { power: f64, rate: f64 },
}

impl Radial {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Radial::Bump { center, width } => {
                let s = (r - center) / width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            Radial::Gauss {
                center,
                sigma,
                cutoff,
            } => {
                let g = (-(r - center).powi(2) / (2.0 * sigma * sigma)).exp();
                g * Radial::Bump {
                    center,
                    width: cutoff,
                }
                .eval(r)
            }
            Radial::Laguerre { power, rate } => {
                if r <= 0.0 {
                    if power == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    r.powf(power) * (-rate * r).exp()
                }
            }
        }
    }
}

/// `coeff · Y^{(p)}_{omega}(ω) Y^{(q)}_{eta}(η)`, each index a `(degree, index)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub omega: (usize, usize),
    pub eta: (usize, usize),
    pub coeff: Complex64,
}

/// `u'(ξ) = amp · e^{-i⟨b,ξ⟩} · u(L ξ)`, with `L` row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyMap {
    pub amp: f64,
    pub l: Vec<f64>,
    pub b: Vec<f64>,
}

impl FrequencyMap {
    pub fn identity(n: usize) -> Self {
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            l[i * n + i] = 1.0;
        }
        FrequencyMap {
            amp: 1.0,
            l,
            b: vec![0.0; n],
        }
    }

    pub fn apply_linear(&self, xi: &[f64]) -> Vec<f64> {
        let n = xi.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.l[i * n + j] * xi[j]).sum())
            .collect()
    }

    /// The map `u ↦ outer(self(u))`.
    pub fn then(&self, outer: &FrequencyMap) -> FrequencyMap {
        let n = self.b.len();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                l[i * n + j] = (0..n).map(|k| self.l[i * n + k] * outer.l[k * n + j]).sum();
            }
        }
        let b = (0..n)
            .map(|j| outer.b[j] + (0..n).map(|i| outer.l[i * n + j] * self.b[i]).sum::<f64>())
            .collect();
        FrequencyMap {
            amp: self.amp * outer.amp,
            l,
            b,
        }
    }
}

/// Smooth profile on the light cone, loadable from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeProfile {
    pub sig: Signature,
    #[serde(default = "default_branch")]
    pub branch: Branch,
    pub radial: Radial,
    pub harmonics: Vec<HarmonicTerm>,
    /// Normals `v` whose split walls `⟨v,ξ⟩ = 0` are suppressed by the factor
    /// `(1 - exp(-s²/(2 w²)))⁴`, `s = ⟨v,ξ⟩/(|v||ξ|)`, `w = wall_width`.
    #[serde(default)]
    pub walls: Vec<Vec<f64>>,
    #[serde(default = "default_wall_width")]
    pub wall_width: f64,
    #[serde(default)]
    pub map: Option<FrequencyMap>,
}

fn default_branch() -> Branch {
    Branch::Both
}

fn default_wall_width() -> f64 {
    0.15
}

impl ConeProfile {
    pub fn bump(
        sig: Signature,
        center: f64,
        width: f64,
        harmonics: Vec<HarmonicTerm>,
    ) -> Result<Self> {
        Self::with_radial(sig, Radial::Bump { center, width }, harmonics)
    }

    /// Gaussian core of deviation `sigma`, cut off smoothly at `min(6.5 sigma, 0.95 center)`.
    pub fn gauss(
        sig: Signature,
        center: f64,
        sigma: f64,
        harmonics: Vec<HarmonicTerm>,
    ) -> Result<Self> {
        let cutoff = (6.5 * sigma).min(0.95 * center);
        Self::with_radial(
            sig,
            Radial::Gauss {
                center,
                sigma,
                cutoff,
            },
            harmonics,
        )
    }

    pub fn with_radial(
        sig: Signature,
        radial: Radial,
        harmonics: Vec<HarmonicTerm>,
    ) -> Result<Self> {
        let p = ConeProfile {
            sig,
            branch: Branch::Both,
            radial,
            harmonics,
            walls: Vec::new(),
            wall_width: default_wall_width(),
            map: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_branch(mut self, branch: Branch) -> Result<Self> {
        self.branch = branch;
        self.validate()?;
        Ok(self)
    }

    pub fn with_wall(mut self, v: &[f64]) -> Self {
        self.walls.push(v.to_vec());
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: ConeProfile = serde_json::from_str(text)?;
        Signature::new(p.sig.p, p.sig.q)?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.sig.n();
        match self.radial {
            Radial::Bump { center, width } => {
                if !(width > 0.0 && center - width > 0.0) {
                    return Err(KappaError::Domain(format!(
                        "bump [{}, {}] must lie in r > 0",
                        center - width,
                        center + width
                    )));
                }
            }
            Radial::Gauss {
                center,
                sigma,
                cutoff,
            } => {
                if !(sigma > 0.0 && cutoff > 0.0 && center - cutoff > 0.0) {
                    return Err(KappaError::Domain(
                        "gauss envelope needs sigma > 0 and support in r > 0".into(),
                    ));
                }
            }
            Radial::Laguerre { power, rate } => {
                if !(rate > 0.0 && power >= 0.0) {
                    return Err(KappaError::Domain(
                        "laguerre envelope needs rate > 0, power >= 0".into(),
                    ));
                }
            }
        }
        if self.branch != Branch::Both && self.sig.p != 1 {
            return Err(KappaError::Domain(
                "cone halves are only split for p = 1".into(),
            ));
        }
        for h in &self.harmonics {
            if h.omega.1 >= harmonic_dimension(self.sig.p, h.omega.0)
                || h.eta.1 >= harmonic_dimension(self.sig.q, h.eta.0)
            {
                return Err(KappaError::Domain(format!(
                    "no harmonic {:?} ⊗ {:?}",
                    h.omega, h.eta
                )));
            }
        }
        if self.walls.iter().any(|v| v.len() != n)
            || !(self.wall_width > 0.0 && self.wall_width < 0.5)
        {
            return Err(KappaError::Domain(
                "wall normals must have n entries, width in (0, 0.5)".into(),
            ));
        }
        if let Some(m) = &self.map {
            if m.l.len() != n * n || m.b.len() != n {
                return Err(KappaError::Domain("frequency map has wrong shape".into()));
            }
        }
        Ok(())
    }

    /// The profile `λ u`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        let mut p = self.clone();
        for h in &mut p.harmonics {
            h.coeff *= lambda;
        }
        p
    }

    /// Precomposes the current profile with `map`.
    pub fn mapped(&self, map: &FrequencyMap) -> Self {
        let mut p = self.clone();
        p.map = Some(match &self.map {
            None => map.clone(),
            Some(inner) => inner.then(map),
        });
        p
    }

    fn eval_base(&self, xi: &[f64]) -> Complex64 {
        let (r, omega, eta) = self.sig.cone_coords(xi);
        if r <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match self.branch {
            Branch::Forward if omega[0] < 0.0 => return Complex64::new(0.0, 0.0),
            Branch::Backward if omega[0] > 0.0 => return Complex64::new(0.0, 0.0),
            _ => {}
        }
        let env = self.radial.eval(r);
        if env == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let norm = std::f64::consts::SQRT_2 * r;
        let mut window = 1.0;
        for v in &self.walls {
            let vn = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            let s = v.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>().abs() / (vn * norm);
            window *= (-(s * s) / (2.0 * self.wall_width * self.wall_width))
                .exp_m1()
                .powi(4);
            if window == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
        }
        let bp = SphereBasis::new(self.sig.p, 0).expect("valid dimension");
        let bq = SphereBasis::new(self.sig.q, 0).expect("valid dimension");
        let mut cache_o: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut cache_e: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut acc = Complex64::new(0.0, 0.0);
        for h in &self.harmonics {
            if !cache_o.iter().any(|c| c.0 == h.omega.0) {
                cache_o.push((h.omega.0, bp.eval(h.omega.0, &omega)));
            }
            if !cache_e.iter().any(|c| c.0 == h.eta.0) {
                cache_e.push((h.eta.0, bq.eval(h.eta.0, &eta)));
            }
            let yo = cache_o.iter().find(|c| c.0 == h.omega.0).expect("cached").1[h.omega.1];
            let ye = cache_e.iter().find(|c| c.0 == h.eta.0).expect("cached").1[h.eta.1];
            acc += h.coeff * (yo * ye);
        }
        acc * (env * window)
    }

    /// `u(ξ)` for a point of the cone.
    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        match &self.map {
            None => self.eval_base(xi),
            Some(m) => {
                let inner = self.eval_base(&m.apply_linear(xi));
                let phase: f64 = m.b.iter().zip(xi).map(|(a, b)| a * b).sum();
                inner * Complex64::from_polar(m.amp, -phase)
            }
        }
    }

    /// Scale `ρ` with base radius `ρ r` at the point `r·(ω, η)`.
    fn base_scale(&self, omega: &[f64], eta: &[f64]) -> f64 {
        match &self.map {
            None => 1.0,
            Some(m) => {
                let d = self.sig.cone_point(1.0, omega, eta);
                self.sig.cone_coords(&m.apply_linear(&d)).0
            }
        }
    }

    fn base_rule(&self, points: usize) -> Result<QuadratureRule> {
        match self.radial {
            Radial::Laguerre { .. } => gauss_rule(WeightSpec::GenLaguerre { alpha: 0.0 }, points),
            _ => gauss_rule(WeightSpec::Legendre, points),
        }
    }

    fn scaled_rule(
        &self,
        omega: &[f64],
        eta: &[f64],
        rule: &QuadratureRule,
    ) -> Option<(Vec<f64>, Vec<f64>)> {
        let rho = self.base_scale(omega, eta);
        if rho <= 1e-12 {
            return None;
        }
        match self.radial {
            Radial::Bump { center, width }
            | Radial::Gauss {
                center,
                cutoff: width,
                ..
            } => {
                let (lo, hi) = ((center - width) / rho, (center + width) / rho);
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                Some((
                    rule.nodes.iter().map(|t| mid + half * t).collect(),
                    rule.weights.iter().map(|w| w * half).collect(),
                ))
            }
            Radial::Laguerre { rate, .. } => {
                let c = rate * rho;
                Some((
                    rule.nodes.iter().map(|t| t / c).collect(),
                    rule.nodes
                        .iter()
                        .zip(&rule.weights)
                        .map(|(t, w)| w * t.exp() / c)
                        .collect(),
                ))
            }
        }
    }

    /// Radial rule for `∫ g(r) dr` along the ray through `(ω, η)`, covering the support.
    pub fn radial_rule(
        &self,
        omega: &[f64],
        eta: &[f64],
        points: usize,
    ) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        Ok(self.scaled_rule(omega, eta, &self.base_rule(points)?))
    }

    /// Largest `|ξ'|` in the support along sampled directions, or the e-folding
    /// scale times 40 for Laguerre envelopes.
    pub fn radial_extent(&self, omega: &[f64], eta: &[f64]) -> f64 {
        let rho = self.base_scale(omega, eta).max(1e-12);
        match self.radial {
            Radial::Bump { center, width }
            | Radial::Gauss {
                center,
                cutoff: width,
                ..
            } => (center + width) / rho,
            Radial::Laguerre { power, rate } => (power + 40.0) / (rate * rho),
        }
    }

    /// Cone quadrature adapted to the support.
    pub fn quadrature(
        &self,
        omega_order: usize,
        eta_order: usize,
        radial_points: usize,
    ) -> Result<ConeQuadrature> {
        let rule = self.base_rule(radial_points)?;
        ConeQuadrature::build(self.sig, omega_order, eta_order, |w, e| {
            self.scaled_rule(w, e, &rule)
        })
    }

    /// Highest spherical degrees `(in ω, in η)` of the harmonic content.
    pub fn degrees(&self) -> (usize, usize) {
        self.harmonics
            .iter()
            .fold((0, 0), |(a, b), h| (a.max(h.omega.0), b.max(h.eta.0)))
    }

    /// `‖u‖²_{L²(Ξ)}` by cone quadrature.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        let (dp, dq) = self.degrees();
        let extra = if self.walls.is_empty() && self.map.is_none() {
            0
        } else {
            60
        };
        let quad = self.quadrature(2 * dp + extra + 2, 2 * dq + extra + 2, 64)?;
        Ok(quad
            .points
            .iter()
            .zip(&quad.weights)
            .map(|(x, w)| w * self.eval(x).norm_sqr())
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(o: (usize, usize), e: (usize, usize), c: f64) -> HarmonicTerm {
        HarmonicTerm {
            omega: o,
            eta: e,
            coeff: Complex64::new(c, 0.0),
        }
    }

    #[test]
    fn json_round_trip() {
        let s = Signature::new(1, 3).unwrap();
        let p = ConeProfile::bump(s, 1.0, 0.5, vec![term((0, 0), (1, 2), 2.0)])
            .unwrap()
            .with_wall(&[0.0, 1.0, 0.0, 0.0]);
        let text = p.to_json().unwrap();
        assert_eq!(ConeProfile::from_json(&text).unwrap(), p);
        let raw = r#"{"sig":{"p":2,"q":2},"radial":{"kind":"bump","center":1.2,"width":0.6},
            "harmonics":[{"omega":[1,0],"eta":[1,1],"coeff":[0.5,-1.0]}]}"#;
        let q = ConeProfile::from_json(raw).unwrap();
        assert_eq!(q.branch, Branch::Both);
        assert!(ConeProfile::from_json(&raw.replace("[1,1]", "[1,2]")).is_err());
        assert!(ConeProfile::from_json(&raw.replace("0.6", "1.5")).is_err());
    }

    #[test]
    fn orthonormal_content_norm() {
        // With orthonormal harmonics the norm factors as Σ|c|² · ∫ bump² r^{n-3}/2 dr.
        for (p, q) in [(1, 3), (2, 2)] {
            let s = Signature::new(p, q).unwrap();
            let prof = ConeProfile::bump(
                s,
                1.0,
                0.6,
                vec![term((0, 0), (0, 0), 1.0), term((1, 0), (2, 1), 2.0)],
            )
            .unwrap();
            let rule = gauss_rule(WeightSpec::Legendre, 200).unwrap();
            let radial: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(t, w)| {
                    let r = 1.0 + 0.6 * t;
                    0.6 * w * prof.radial.eval(r).powi(2) * r.powi((p + q - 3) as i32) / 2.0
                })
                .sum();
            let got = prof.l2_norm_sq().unwrap();
            assert!(
                (got - 5.0 * radial).abs() < 1e-9 * got,
                "{got} vs {}",
                5.0 * radial
            );
        }
    }

    #[test]
    fn wall_window_vanishes_near_wall() {
        let s = Signature::new(1, 3).unwrap();
        let v = [0.0, 1.0, 0.0, 0.0];
        let p = ConeProfile::bump(s, 1.0, 0.5, vec![term((0, 0), (0, 0), 1.0)])
            .unwrap()
            .with_wall(&v);
        let on_wall = s.cone_point(1.0, &[1.0], &[0.0, 0.6, 0.8]);
        assert_eq!(p.eval(&on_wall).norm(), 0.0);
        let off = s.cone_point(1.0, &[1.0], &[1.0, 0.0, 0.0]);
        assert!(p.eval(&off).norm() > 0.1);
    }

    #[test]
    fn frequency_maps_compose() {
        let s = Signature::new(2, 2).unwrap();
        let p = ConeProfile::bump(s, 1.0, 0.5, vec![term((1, 0), (1, 1), 1.0)]).unwrap();
        let mut a = FrequencyMap::identity(4);
        a.l[0] = 2.0;
        a.l[5] = 2.0;
        a.l[10] = 2.0;
        a.l[15] = 2.0;
        a.amp = 3.0;
        a.b = vec![0.1, 0.0, 0.2, 0.0];
        let mut b = FrequencyMap::identity(4);
        b.b = vec![0.0, -0.3, 0.0, 0.5];
        let twice = p.mapped(&a).mapped(&b);
        let xi = s.cone_point(0.6, &[0.6, 0.8], &[0.0, 1.0]);
        let direct = {
            let inner = p.mapped(&a).eval(&xi);
            let ph: f64 = b.b.iter().zip(&xi).map(|(x, y)| x * y).sum();
            inner * Complex64::from_polar(1.0, -ph)
        };
        assert!((twice.eval(&xi) - direct).norm() < 1e-14);
    }
}
