use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::SolutionField;
use super::geometry::Hyperplane;
use super::hyperplane::{ball_ladder, project, Extrapolated, SliceOptions};
use super::profile::ConeProfile;
use crate::error::{KappaError, Result};

fn require_p1(p: usize) -> Result<()> {
    if p != 1 {
        return Err(KappaError::Domain(format!(
            "energy needs one time coordinate, got p = {p}"
        )));
    }
    Ok(())
}

/// `½∫(|f_t|² + |∇f|²) dx` on the slice `t = const`, truncated to balls and extrapolated.
pub fn energy(u: &ConeProfile, t: f64, opts: &SliceOptions) -> Result<Extrapolated> {
    require_p1(u.sig.p)?;
    let mut e0 = vec![0.0; u.sig.n()];
    e0[0] = 1.0;
    let slice = Hyperplane::new(u.sig, &e0, t)?;
    let pr = project(u, &slice, opts.points)?;
    let total: Vec<Complex64> = pr
        .plus
        .iter()
        .zip(&pr.minus)
        .map(|(a, b)| a.0 + b.0)
        .collect();
    let dt: Vec<Complex64> = pr
        .plus
        .iter()
        .zip(&pr.minus)
        .map(|(a, b)| (a.0 * a.1 + b.0 * b.1) * Complex64::new(0.0, 1.0))
        .collect();
    let mut density: Vec<f64> = pr.to_space(&dt).iter().map(|z| z.norm_sqr()).collect();
    for axis in 0..pr.d {
        let g: Vec<Complex64> = total
            .iter()
            .enumerate()
            .map(|(i, z)| z * Complex64::new(0.0, pr.kappa(i)[axis]))
            .collect();
        for (d, z) in density.iter_mut().zip(pr.to_space(&g)) {
            *d += z.norm_sqr();
        }
    }
    let half: Vec<Complex64> = density
        .into_iter()
        .map(|d| Complex64::new(0.5 * d, 0.0))
        .collect();
    ball_ladder(&pr, &half, opts.r_trunc)
}

/// Energy against `(f⁺, H f⁺) - (f⁻, H f⁻)` with `H = i∂_t`, where `f^±` are the
/// positive and negative spectral parts of `H` (frequencies `ξ_0 < 0` and `ξ_0 > 0`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyIdentity {
    pub lhs: f64,
    pub lhs_error: f64,
    pub positive_part: f64,
    pub negative_part: f64,
    pub rhs: f64,
    pub residual: f64,
}

pub fn energy_identity(u: &ConeProfile, opts: &SliceOptions) -> Result<EnergyIdentity> {
    require_p1(u.sig.p)?;
    let lhs = energy(u, 0.0, opts)?;
    let (_, dq) = u.degrees();
    let extra = if u.walls.is_empty() && u.map.is_none() {
        2
    } else {
        48
    };
    let quad = u.quadrature(2, 2 * dq + extra, 40)?;
    let c = (2.0 * PI).powi(u.sig.q as i32) / 2.0;
    let (mut pos, mut neg) = (0.0, 0.0);
    for (xi, w) in quad.points.iter().zip(&quad.weights) {
        let h = -xi[0] * w * u.eval(xi).norm_sqr() * c;
        if xi[0] < 0.0 {
            pos += h;
        } else {
            neg += h;
        }
    }
    let rhs = pos - neg;
    Ok(EnergyIdentity {
        lhs: lhs.value,
        lhs_error: lhs.error,
        positive_part: pos,
        negative_part: neg,
        rhs,
        residual: (lhs.value - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE),
    })
}

/// Midpoint-rule energy of a field on the cube `[-half, half]^q` at time `t`,
/// from exact derivatives of the plane-wave sum.
pub fn slice_energy_direct(f: &SolutionField, t: f64, half: f64, points: usize) -> Result<f64> {
    require_p1(f.sig.p)?;
    let q = f.sig.q;
    let h = 2.0 * half / points as f64;
    let mut total = 0.0;
    let mut idx = vec![0usize; q];
    let n = f.sig.n();
    loop {
        let mut x = vec![t];
        x.extend(idx.iter().map(|&i| -half + (i as f64 + 0.5) * h));
        let mut dens = 0.0;
        for a in 0..n {
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            dens += f.derivative(&x, &e)?.norm_sqr();
        }
        total += 0.5 * dens * h.powi(q as i32);
        let mut k = 0;
        loop {
            if k == q {
                return Ok(total);
            }
            idx[k] += 1;
            if idx[k] < points {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
