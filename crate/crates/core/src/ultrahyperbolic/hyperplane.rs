use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::geometry::{Hyperplane, Signature};
use super::profile::ConeProfile;
use crate::error::{KappaError, Result};
use crate::specfun::sphere_quadrature;

/// Grid settings for hyperplane quadratures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceOptions {
    /// Points per axis of the frequency (and spatial) grid; even.
    pub points: usize,
    /// Smallest truncation radius `R`; the ladder is `R, 2R, 4R`. Defaults to a
    /// quarter of the spatial box.
    pub r_trunc: Option<f64>,
}

impl Default for SliceOptions {
    fn default() -> Self {
        SliceOptions {
            points: 96,
            r_trunc: None,
        }
    }
}

/// Truncated-ball ladder with its extrapolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolated {
    pub value: f64,
    pub error: f64,
    pub radii: Vec<f64>,
    pub partials: Vec<f64>,
    /// Size of the discarded imaginary part relative to the value.
    pub imag: f64,
    pub flagged: bool,
}

impl Extrapolated {
    pub fn from_ladder(radii: Vec<f64>, partials: Vec<f64>, imag: f64) -> Self {
        let (v1, v2, v3) = (partials[0], partials[1], partials[2]);
        let (d1, d2) = (v2 - v1, v3 - v2);
        let floor = 1e-12 * v3.abs();
        let value = if d2.abs() < d1.abs() && (d2 - d1).abs() > floor && d1 * d2 > 0.0 {
            v3 - d2 * d2 / (d2 - d1)
        } else {
            v3
        };
        let error = d2.abs().max((value - v3).abs()).max(floor);
        let flagged = d2.abs() > d1.abs().max(1e-10 * v3.abs());
        Extrapolated {
            value,
            error,
            radii,
            partials,
            imag,
            flagged,
        }
    }

    /// Adds a further independent error estimate to the bar.
    pub fn widen(mut self, extra: f64) -> Self {
        self.error += extra.abs();
        self
    }
}

/// Orthonormal frame `(N̂, B)` with `N̂ = I v / |v|`.
pub(crate) fn frame(sig: Signature, v: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = sig.n();
    let iv = sig.flip(v);
    let len = iv.iter().map(|x| x * x).sum::<f64>().sqrt();
    let normal: Vec<f64> = iv.iter().map(|x| x / len).collect();
    let mut basis: Vec<Vec<f64>> = vec![normal.clone()];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| normal[a].abs().total_cmp(&normal[b].abs()));
    for i in order {
        if basis.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = b.iter().zip(&e).map(|(x, y)| x * y).sum();
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let l = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if l > 1e-8 {
            basis.push(e.into_iter().map(|x| x / l).collect());
        }
    }
    let tangent = basis.split_off(1);
    (normal, tangent)
}

/// Projected densities of the two frequency halves on a hyperplane.
pub(crate) struct Projection {
    pub m: usize,
    pub d: usize,
    pub dk: f64,
    pub euclid: f64,
    /// Per grid point: `(ρ, σ)` for the `σ > 0` root, then the `σ < 0` root.
    pub plus: Vec<(Complex64, f64)>,
    pub minus: Vec<(Complex64, f64)>,
}

impl Projection {
    pub fn kappa(&self, idx: usize) -> Vec<f64> {
        let mut k = vec![0.0; self.d];
        let mut rem = idx;
        for a in (0..self.d).rev() {
            k[a] = ((rem % self.m) as f64 - (self.m / 2) as f64) * self.dk;
            rem /= self.m;
        }
        k
    }

    pub fn dy(&self) -> f64 {
        2.0 * PI / (self.m as f64 * self.dk)
    }

    pub fn y(&self, idx: usize) -> Vec<f64> {
        let dy = self.dy();
        let mut y = vec![0.0; self.d];
        let mut rem = idx;
        for a in (0..self.d).rev() {
            y[a] = ((rem % self.m) as f64 - (self.m / 2) as f64) * dy;
            rem /= self.m;
        }
        y
    }

    /// Samples of `∫ g(κ) e^{i⟨y,κ⟩} dκ` on the spatial grid.
    pub fn to_space(&self, g: &[Complex64]) -> Vec<Complex64> {
        let (m, d) = (self.m, self.d);
        let mut data: Vec<Complex64> = g
            .iter()
            .enumerate()
            .map(|(i, &z)| if parity(i, m, d) { -z } else { z })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(m);
        let total = m.pow(d as u32);
        for axis in 0..d {
            let stride = m.pow((d - 1 - axis) as u32);
            let mut line = vec![Complex64::new(0.0, 0.0); m];
            for start in 0..total {
                if (start / stride) % m != 0 {
                    continue;
                }
                for (j, z) in line.iter_mut().enumerate() {
                    *z = data[start + j * stride];
                }
                fft.process(&mut line);
                for (j, z) in line.iter().enumerate() {
                    data[start + j * stride] = *z;
                }
            }
        }
        let sign = if (m / 2 * d) % 2 == 1 { -1.0 } else { 1.0 };
        let scale = sign * self.dk.powi(d as i32);
        data.iter()
            .enumerate()
            .map(|(i, &z)| {
                if parity(i, m, d) {
                    -z * scale
                } else {
                    z * scale
                }
            })
            .collect()
    }
}

fn parity(mut idx: usize, m: usize, d: usize) -> bool {
    let mut s = 0;
    for _ in 0..d {
        s += idx % m;
        idx /= m;
    }
    s % 2 == 1
}

/// Largest `|ξ|` in the support of `u`.
pub(crate) fn frequency_extent(u: &ConeProfile) -> Result<f64> {
    let wp = sphere_quadrature(u.sig.p, 12)?;
    let wq = sphere_quadrature(u.sig.q, 12)?;
    let mut ext: f64 = 0.0;
    for w in &wp.points {
        for e in &wq.points {
            ext = ext.max(u.radial_extent(w, e));
        }
    }
    Ok(std::f64::consts::SQRT_2 * ext * 1.05)
}

pub(crate) fn project(u: &ConeProfile, alpha: &Hyperplane, m: usize) -> Result<Projection> {
    let sig = u.sig;
    let n = sig.n();
    if n > 4 {
        return Err(KappaError::Unsupported(format!(
            "hyperplane grids need p + q <= 4, got {n}"
        )));
    }
    if m < 8 || m % 2 == 1 {
        return Err(KappaError::Domain(
            "grid points per axis must be even and >= 8".into(),
        ));
    }
    let d = n - 1;
    let (normal, tangent) = frame(sig, &alpha.v);
    let euclid = alpha.euclid_norm();
    let x0: Vec<f64> = normal.iter().map(|c| alpha.c * c / euclid).collect();
    let kmax = frequency_extent(u)?;
    let dk = 2.0 * kmax / m as f64;
    let qa = sig.quad(&normal);
    let total = m.pow(d as u32);
    let proto = Projection {
        m,
        d,
        dk,
        euclid,
        plus: Vec::new(),
        minus: Vec::new(),
    };
    let zero = (Complex64::new(0.0, 0.0), 0.0);
    let pairs: Vec<((Complex64, f64), (Complex64, f64))> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let kappa = proto.kappa(idx);
            if kappa.iter().map(|k| k * k).sum::<f64>() > kmax * kmax {
                return (zero, zero);
            }
            let mut base = vec![0.0; n];
            for (k, t) in kappa.iter().zip(&tangent) {
                for (b, c) in base.iter_mut().zip(t) {
                    *b += k * c;
                }
            }
            let qb = 2.0 * sig.form(&base, &normal);
            let qc = sig.quad(&base);
            let disc = qb * qb - 4.0 * qa * qc;
            if disc <= 0.0 {
                return (zero, zero);
            }
            let sq = disc.sqrt();
            let mut out = (zero, zero);
            for tau in [(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)] {
                let xi: Vec<f64> = base.iter().zip(&normal).map(|(b, c)| b + tau * c).collect();
                let sigma: f64 = alpha.v.iter().zip(&xi).map(|(a, b)| a * b).sum();
                let val = u.eval(&xi);
                if val.norm() == 0.0 || sigma == 0.0 {
                    continue;
                }
                let jac = euclid / (2.0 * sigma.abs());
                let phase: f64 = x0.iter().zip(&xi).map(|(a, b)| a * b).sum();
                let rho = val * jac * Complex64::from_polar(1.0, phase);
                if sigma > 0.0 {
                    out.0 = (rho, sigma);
                } else {
                    out.1 = (rho, sigma);
                }
            }
            out
        })
        .collect();
    let (plus, minus) = pairs.into_iter().unzip();
    Ok(Projection {
        plus,
        minus,
        ..proto
    })
}

/// Sums `density(y)·dS` over balls of radius `R, 2R, 4R` in the hyperplane.
pub(crate) fn ball_ladder(
    pr: &Projection,
    density: &[Complex64],
    r_trunc: Option<f64>,
) -> Result<Extrapolated> {
    let half = pr.dy() * (pr.m / 2) as f64;
    let r0 = r_trunc.unwrap_or(half / 4.0);
    if 4.0 * r0 > half * (1.0 + 1e-12) {
        return Err(KappaError::Resolution(format!(
            "truncation radius 4R = {:.2} exceeds the spatial box {half:.2}",
            4.0 * r0
        )));
    }
    let radii = vec![r0, 2.0 * r0, 4.0 * r0];
    let cell = pr.dy().powi(pr.d as i32) / pr.euclid;
    let mut partials = [0.0; 3];
    let mut imag = 0.0;
    for (i, z) in density.iter().enumerate() {
        let y = pr.y(i);
        let ry = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        for (k, &r) in radii.iter().enumerate() {
            if ry <= r {
                partials[k] += z.re * cell;
                if k == 2 {
                    imag += z.im * cell;
                }
            }
        }
    }
    let scale = partials[2].abs().max(f64::MIN_POSITIVE);
    Ok(Extrapolated::from_ladder(
        radii,
        partials.to_vec(),
        imag.abs() / scale,
    ))
}

fn q_density(pr: &Projection) -> Vec<Complex64> {
    let fp = pr.to_space(&pr.plus.iter().map(|x| x.0).collect::<Vec<_>>());
    let dp = pr.to_space(
        &pr.plus
            .iter()
            .map(|x| x.0 * Complex64::new(0.0, x.1))
            .collect::<Vec<_>>(),
    );
    let fm = pr.to_space(&pr.minus.iter().map(|x| -x.0).collect::<Vec<_>>());
    let dm = pr.to_space(
        &pr.minus
            .iter()
            .map(|x| -x.0 * Complex64::new(0.0, x.1))
            .collect::<Vec<_>>(),
    );
    let i = Complex64::new(0.0, 1.0);
    (0..fp.len())
        .map(|k| (fp[k].conj() * dp[k] - fm[k].conj() * dm[k]) / i)
        .collect()
}

/// `(f, f)` as the truncated integral of `Q_α f` over the hyperplane `α`,
/// with `Q_α f = (1/i)(conj(f_+) ∂_ν f_+ - conj(f_-) ∂_ν f_-)` and `∂_ν = v·∇`.
/// The error bar adds the ladder spread and a coarser-grid comparison.
pub fn q_alpha_inner(
    u: &ConeProfile,
    alpha: &Hyperplane,
    opts: &SliceOptions,
) -> Result<Extrapolated> {
    if u.harmonics.iter().all(|h| h.coeff.norm() == 0.0) {
        return Ok(Extrapolated::from_ladder(vec![0.0; 3], vec![0.0; 3], 0.0));
    }
    let fine = project(u, alpha, opts.points)?;
    let fine_val = ball_ladder(&fine, &q_density(&fine), opts.r_trunc)?;
    let coarse_m = (opts.points * 3 / 4) & !1;
    let coarse = project(u, alpha, coarse_m)?;
    let coarse_val = ball_ladder(
        &coarse,
        &q_density(&coarse),
        Some(fine_val.radii[0].min(coarse.dy() * (coarse_m / 8) as f64)),
    )?;
    let spread = fine_val.value - coarse_val.value;
    Ok(fine_val.widen(spread))
}

/// Frequency-side value of `(f, f)`: `(2π)^{n-1}/|v| · ∫ |σ| |u|² J dμ`,
/// `σ = ⟨v,ξ⟩`, `J` the Jacobian of the projection onto the hyperplane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralValue {
    /// With `J = |v| / (2|σ|)`.
    pub value: f64,
    /// With `J` from a centered difference of `Q` along the normal.
    pub value_fd: f64,
    pub dropped: usize,
}

pub fn spectral_inner(u: &ConeProfile, alpha: &Hyperplane) -> Result<SpectralValue> {
    let sig = u.sig;
    let n = sig.n();
    let (dp, dq) = u.degrees();
    let windowed = !u.walls.is_empty() || u.map.is_some();
    let extra = if windowed { 48 } else { 2 };
    let quad = u.quadrature(2 * dp + extra, 2 * dq + extra, 40)?;
    let euclid = alpha.euclid_norm();
    let (normal, _) = frame(sig, &alpha.v);
    let vals: Vec<f64> = quad
        .points
        .par_iter()
        .map(|x| u.eval(x).norm_sqr())
        .collect();
    let mut value = 0.0;
    let mut value_fd = 0.0;
    let mut dropped = 0;
    for ((xi, w), &val) in quad.points.iter().zip(&quad.weights).zip(&vals) {
        if val == 0.0 {
            continue;
        }
        let sigma: f64 = alpha.v.iter().zip(xi).map(|(a, b)| a * b).sum();
        let xn = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
        if sigma.abs() < 1e-3 * euclid * xn {
            dropped += 1;
            continue;
        }
        let jac = euclid / (2.0 * sigma.abs());
        let h = 1e-4 * xn;
        let shifted = |s: f64| -> f64 {
            sig.quad(
                &xi.iter()
                    .zip(&normal)
                    .map(|(a, b)| a + s * b)
                    .collect::<Vec<_>>(),
            )
        };
        let jac_fd = 2.0 * h / (shifted(h) - shifted(-h)).abs();
        value += w * val * sigma.abs() * jac;
        value_fd += w * val * sigma.abs() * jac_fd;
    }
    if dropped > 0 {
        log::warn!("spectral_inner dropped {dropped} nodes near tangency");
    }
    let c = (2.0 * PI).powi((n - 1) as i32) / euclid;
    Ok(SpectralValue {
        value: c * value,
        value_fd: c * value_fd,
        dropped,
    })
}

/// Measured `‖f‖² / ‖u‖²_{L²(Ξ)}` next to the candidate scalar `2^{(n+2)/2} π^{(n+1)/2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem41Ratio {
    pub ratio: f64,
    pub scalar: f64,
    pub ratio_over_scalar: f64,
    pub ratio_over_scalar_sq: f64,
}

pub fn theorem41_ratio(u: &ConeProfile, alpha: &Hyperplane) -> Result<Theorem41Ratio> {
    let f2 = spectral_inner(u, alpha)?.value;
    let u2 = u.l2_norm_sq()?;
    if u2 == 0.0 {
        return Err(KappaError::Domain("zero profile has no ratio".into()));
    }
    let n = u.sig.n() as f64;
    let scalar = 2f64.powf((n + 2.0) / 2.0) * PI.powf((n + 1.0) / 2.0);
    let ratio = f2 / u2;
    Ok(Theorem41Ratio {
        ratio,
        scalar,
        ratio_over_scalar: ratio / scalar,
        ratio_over_scalar_sq: ratio / (scalar * scalar),
    })
}
