use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{harmonic_labels, ProductSphereGrid, PullbackSamples};
use crate::error::{KappaError, Result};
use crate::ultrahyperbolic::Signature;

/// Default tolerance on the fraction of `‖F‖²` left outside the cutoff.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// Joint spherical-harmonic coefficients of `F` on `S^p × S^q`, orthonormal
/// with respect to the surface measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HarmonicExpansion {
    pub p: usize,
    pub q: usize,
    pub labels_p: Vec<(usize, usize)>,
    pub labels_q: Vec<(usize, usize)>,
    /// `coeffs[i][j]` multiplies `Y_{labels_p[i]} ⊗ Y_{labels_q[j]}`.
    pub coeffs: Vec<Vec<Complex64>>,
    /// Quadrature value of `∫_Y |F|²`.
    pub norm_sq: f64,
    /// `1 - Σ|c|² / ∫|F|²`.
    pub tail: f64,
}

impl HarmonicExpansion {
    pub fn coefficient_norm_sq(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    pub fn resolved(&self, tol: f64) -> bool {
        self.tail.abs() <= tol
    }

    pub fn check_resolved(&self, tol: f64) -> Result<()> {
        if self.resolved(tol) {
            Ok(())
        } else {
            Err(KappaError::Truncation { tail: self.tail })
        }
    }

    /// `‖F_l‖²` where `F_l` keeps the `S^q`-degree `l` part.
    pub fn marginal_norms(&self) -> Vec<f64> {
        let lmax = self.labels_q.iter().map(|l| l.0).max().unwrap_or(0);
        let mut out = vec![0.0; lmax + 1];
        for row in &self.coeffs {
            for (c, (l, _)) in row.iter().zip(&self.labels_q) {
                out[*l] += c.norm_sqr();
            }
        }
        out
    }

    /// `‖c‖²` summed over each `(a, b)` degree block.
    pub fn block_norms(&self) -> Vec<Vec<f64>> {
        let amax = self.labels_p.iter().map(|l| l.0).max().unwrap_or(0);
        let bmax = self.labels_q.iter().map(|l| l.0).max().unwrap_or(0);
        let mut out = vec![vec![0.0; bmax + 1]; amax + 1];
        for (row, (a, _)) in self.coeffs.iter().zip(&self.labels_p) {
            for (c, (b, _)) in row.iter().zip(&self.labels_q) {
                out[*a][*b] += c.norm_sqr();
            }
        }
        out
    }

    /// Evaluate the truncated series at `(ξ, η)`.
    pub fn synthesize(&self, grid: &ProductSphereGrid, xi: &[f64], eta: &[f64]) -> Complex64 {
        let yp: Vec<f64> = (0..=grid.a_max)
            .flat_map(|l| grid.basis_p.eval(l, xi))
            .collect();
        let yq: Vec<f64> = (0..=grid.b_max)
            .flat_map(|l| grid.basis_q.eval(l, eta))
            .collect();
        self.coeffs
            .iter()
            .zip(&yp)
            .map(|(row, a)| {
                row.iter()
                    .zip(&yq)
                    .map(|(c, b)| c * (a * b))
                    .sum::<Complex64>()
            })
            .sum()
    }
}

/// Project grid samples onto the joint harmonic basis.
pub fn expand(samples: &PullbackSamples, grid: &ProductSphereGrid) -> Result<HarmonicExpansion> {
    let (np, nq) = (grid.rule_p.len(), grid.rule_q.len());
    if samples.values.len() != np || samples.values.iter().any(|r| r.len() != nq) {
        return Err(KappaError::Domain("samples do not match the grid".into()));
    }
    let tp = grid.table_p();
    let tq = grid.table_q();
    let kq = tq.first().map_or(0, |r| r.len());
    // Contract the S^q factor first, then S^p.
    let partial: Vec<Vec<Complex64>> = samples
        .values
        .par_iter()
        .map(|row| {
            let mut acc = vec![Complex64::new(0.0, 0.0); kq];
            for ((v, w), y) in row.iter().zip(&grid.rule_q.weights).zip(&tq) {
                let vw = v * w;
                for (a, yy) in acc.iter_mut().zip(y) {
                    *a += vw * yy;
                }
            }
            acc
        })
        .collect();
    let kp = tp.first().map_or(0, |r| r.len());
    let coeffs: Vec<Vec<Complex64>> = (0..kp)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![Complex64::new(0.0, 0.0); kq];
            for ((g, w), y) in partial.iter().zip(&grid.rule_p.weights).zip(&tp) {
                let s = w * y[i];
                for (a, gg) in acc.iter_mut().zip(g) {
                    *a += gg * s;
                }
            }
            acc
        })
        .collect();
    let norm_sq: f64 = samples
        .values
        .iter()
        .zip(&grid.rule_p.weights)
        .map(|(row, wp)| {
            wp * row
                .iter()
                .zip(&grid.rule_q.weights)
                .map(|(v, wq)| wq * v.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    let mut e = HarmonicExpansion {
        p: grid.sig.p,
        q: grid.sig.q,
        labels_p: harmonic_labels(&grid.basis_p, grid.a_max),
        labels_q: harmonic_labels(&grid.basis_q, grid.b_max),
        coeffs,
        norm_sq,
        tail: 0.0,
    };
    e.tail = if norm_sq > 0.0 {
        1.0 - e.coefficient_norm_sq() / norm_sq
    } else {
        0.0
    };
    Ok(e)
}

/// Fraction of `Σ|c|²` on degree pairs off the line `a + p/2 = b + q/2`.
pub fn ktype_sparsity(e: &HarmonicExpansion, sig: Signature) -> f64 {
    let total = e.coefficient_norm_sq();
    if total == 0.0 {
        return 0.0;
    }
    let off: f64 = e
        .block_norms()
        .iter()
        .enumerate()
        .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, m)| (a, b, m)))
        .filter(|(a, b, _)| 2 * a + sig.p != 2 * b + sig.q)
        .map(|(_, _, m)| m)
        .sum();
    off / total
}

/// Number of `S^p` degrees carrying more than `rel` of the mass at each `S^q` degree.
pub fn multiplicity_profile(e: &HarmonicExpansion, rel: f64) -> Vec<usize> {
    let blocks = e.block_norms();
    let total = e.coefficient_norm_sq().max(f64::MIN_POSITIVE);
    let bmax = blocks.first().map_or(0, |r| r.len());
    (0..bmax)
        .map(|b| blocks.iter().filter(|row| row[b] > rel * total).count())
        .collect()
}

/// Normalisation of `L²(Y)` relative to the surface measure.
pub const Y_MEASURE_SCALE: f64 = 1.0 / (2.0 * std::f64::consts::PI);

pub fn parseval_weight(l: usize, q2: usize) -> f64 {
    l as f64 + 0.5 * q2 as f64 - 0.5
}

/// `Σ_l (l + q/2 - 1/2) ‖F_l‖²_{L²(Y)}`.
pub fn parseval_sum(e: &HarmonicExpansion, q2: usize) -> f64 {
    e.marginal_norms()
        .iter()
        .enumerate()
        .map(|(l, m)| parseval_weight(l, q2) * m)
        .sum::<f64>()
        * Y_MEASURE_SCALE
}

/// Multiplier of `(1/4 - Δ̃)^{1/4}` on degree `l` harmonics of `S^{q}`.
pub fn quarter_power_multiplier(l: usize, q2: usize) -> f64 {
    (l as f64 + 0.5 * (q2 as f64 - 1.0)).sqrt()
}

/// `‖(1/4 - Δ̃_{S^q})^{1/4} F‖²_{L²(Y)}`, computed coefficient by coefficient.
pub fn quarter_power_norm(e: &HarmonicExpansion, q2: usize) -> f64 {
    let mut s = 0.0;
    for row in &e.coeffs {
        for (c, (l, _)) in row.iter().zip(&e.labels_q) {
            let m = quarter_power_multiplier(*l, q2);
            s += (m * c).norm_sqr();
        }
    }
    s * Y_MEASURE_SCALE
}
