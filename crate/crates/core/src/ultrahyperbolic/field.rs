use num_complex::Complex64;
use rayon::prelude::*;

use super::geometry::{Hyperplane, Signature};
use super::profile::ConeProfile;
use crate::error::{KappaError, Result};
use crate::specfun::sphere_quadrature;

/// Smallest admissible `|⟨v,ξ⟩|/(|v||ξ|)` on the support for a split.
pub const SPLIT_MARGIN: f64 = 1e-3;

/// `f(x) = Σ_j c_j e^{i⟨x,ξ_j⟩}` over cone points `ξ_j`, resolved for `|x| <= x_max`.
#[derive(Clone, Debug)]
pub struct SolutionField {
    pub sig: Signature,
    pub points: Vec<Vec<f64>>,
    pub coeffs: Vec<Complex64>,
    pub profile: Option<ConeProfile>,
    pub x_max: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Superposition of plane waves `c e^{i⟨x,ξ⟩}` with each `ξ` on the cone.
pub fn from_atoms(sig: Signature, atoms: &[(Vec<f64>, Complex64)]) -> Result<SolutionField> {
    for (xi, _) in atoms {
        if xi.len() != sig.n() || sig.quad(xi).abs() > 1e-12 * (1.0 + dot(xi, xi)) {
            return Err(KappaError::Domain(format!(
                "{xi:?} is not on the light cone"
            )));
        }
    }
    Ok(SolutionField {
        sig,
        points: atoms.iter().map(|a| a.0.clone()).collect(),
        coeffs: atoms.iter().map(|a| a.1).collect(),
        profile: None,
        x_max: f64::INFINITY,
    })
}

/// Tensor-quadrature synthesis of `∫_Ξ u(ξ) e^{i⟨x,ξ⟩} dμ(ξ)` resolved on `|x| <= x_max`.
pub fn synthesize(u: &ConeProfile, x_max: f64) -> Result<SolutionField> {
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(KappaError::Domain(
            "x_max must be positive and finite".into(),
        ));
    }
    let sig = u.sig;
    let probe_p = sphere_quadrature(sig.p, 8)?;
    let probe_q = sphere_quadrature(sig.q, 8)?;
    let mut extent: f64 = 0.0;
    for w in &probe_p.points {
        for e in &probe_q.points {
            extent = extent.max(u.radial_extent(w, e));
        }
    }
    let kmax = std::f64::consts::SQRT_2 * extent * x_max;
    let (dp, dq) = u.degrees();
    let windowed = !u.walls.is_empty() || u.map.is_some();
    let extra = if windowed { 40 } else { 0 };
    let order = |d: usize| (kmax * 1.1).ceil() as usize + d + 16 + extra;
    let radial = (48.0 + 1.2 * kmax).ceil() as usize;
    if radial > 400 || order(dp.max(dq)) > 200 {
        return Err(KappaError::Resolution(format!(
            "phase |x||ξ| up to {kmax:.1} needs {radial} radial and {} angular nodes; reduce x_max",
            order(dp.max(dq))
        )));
    }
    let quad = u.quadrature(order(dp), order(dq), radial)?;
    let vals: Vec<Complex64> = quad.points.par_iter().map(|x| u.eval(x)).collect();
    let mut points = Vec::new();
    let mut coeffs = Vec::new();
    for ((x, w), c) in quad.points.into_iter().zip(quad.weights).zip(vals) {
        if c.norm() > 0.0 {
            points.push(x);
            coeffs.push(c * w);
        }
    }
    Ok(SolutionField {
        sig,
        points,
        coeffs,
        profile: Some(u.clone()),
        x_max,
    })
}

impl SolutionField {
    pub fn zero(sig: Signature) -> Self {
        SolutionField {
            sig,
            points: Vec::new(),
            coeffs: Vec::new(),
            profile: None,
            x_max: f64::INFINITY,
        }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.sig.n() {
            return Err(KappaError::Domain(format!("point has {} entries", x.len())));
        }
        if norm(x) > self.x_max * (1.0 + 1e-12) {
            return Err(KappaError::Resolution(format!(
                "|x| = {:.3} exceeds the resolved radius {:.3}",
                norm(x),
                self.x_max
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        self.check(x)?;
        Ok(self
            .points
            .iter()
            .zip(&self.coeffs)
            .map(|(xi, c)| c * Complex64::from_polar(1.0, dot(x, xi)))
            .sum())
    }

    /// Directional derivative `d·∇f(x)`.
    pub fn derivative(&self, x: &[f64], d: &[f64]) -> Result<Complex64> {
        self.check(x)?;
        Ok(self
            .points
            .iter()
            .zip(&self.coeffs)
            .map(|(xi, c)| {
                c * Complex64::new(0.0, dot(d, xi)) * Complex64::from_polar(1.0, dot(x, xi))
            })
            .sum())
    }

    /// Fourth-order finite-difference `□f(x)` and `Σ_i |∂_i² f(x)|`.
    pub fn box_fd(&self, x: &[f64], h: f64) -> Result<(Complex64, f64)> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        let f0 = self.eval(x)?;
        for i in 0..self.sig.n() {
            let at = |s: f64| {
                let mut y = x.to_vec();
                y[i] += s;
                self.eval(&y)
            };
            let d2 = (-at(2.0 * h)? + at(h)? * 16.0 - f0 * 30.0 + at(-h)? * 16.0 - at(-2.0 * h)?)
                / (12.0 * h * h);
            scale += d2.norm();
            total += if i < self.sig.p { d2 } else { -d2 };
        }
        Ok((total, scale))
    }

    /// Largest relative `|□f| / Σ|∂_i² f|` over the points.
    pub fn box_residual(&self, xs: &[Vec<f64>], h: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for x in xs {
            let (b, s) = self.box_fd(x, h)?;
            if s > 0.0 {
                worst = worst.max(b.norm() / s);
            }
        }
        Ok(worst)
    }

    pub fn sub(&self, other: &SolutionField) -> SolutionField {
        let mut out = self.clone();
        out.points.extend(other.points.iter().cloned());
        out.coeffs.extend(other.coeffs.iter().map(|c| -c));
        out.profile = None;
        out.x_max = self.x_max.min(other.x_max);
        out
    }

    /// Smallest `|⟨v,ξ⟩|/(|v||ξ|)` over frequencies carrying weight.
    pub fn split_margin(&self, v: &[f64]) -> f64 {
        let big = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let vn = norm(v);
        self.points
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| c.norm() > 1e-13 * big)
            .map(|(xi, _)| dot(v, xi).abs() / (vn * norm(xi)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `(f_+, f_-)` with `f_+` carried by `⟨v,ξ⟩ > 0`, `f_-` by `⟨v,ξ⟩ < 0` with a sign,
/// so that `f = f_+ - f_-`.
pub fn frequency_split(
    f: &SolutionField,
    alpha: &Hyperplane,
) -> Result<(SolutionField, SolutionField)> {
    let margin = f.split_margin(&alpha.v);
    if margin < SPLIT_MARGIN {
        return Err(KappaError::SplitWall {
            margin,
            required: SPLIT_MARGIN,
        });
    }
    let mut plus = SolutionField {
        profile: None,
        ..SolutionField::zero(f.sig)
    };
    let mut minus = plus.clone();
    plus.x_max = f.x_max;
    minus.x_max = f.x_max;
    for (xi, c) in f.points.iter().zip(&f.coeffs) {
        if dot(&alpha.v, xi) > 0.0 {
            plus.points.push(xi.clone());
            plus.coeffs.push(*c);
        } else {
            minus.points.push(xi.clone());
            minus.coeffs.push(-c);
        }
    }
    Ok((plus, minus))
}
