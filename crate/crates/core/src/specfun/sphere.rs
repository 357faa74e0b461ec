use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::gamma::ln_gamma_pos;
use super::poly::gegenbauer;
use super::quadrature::{gauss_rule, WeightSpec};
use crate::error::{KappaError, Result};

const MAX_DIM: usize = 5;

/// Quadrature on `S^{m-1} ⊂ R^m`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphereRule {
    pub m: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, &w)| w * f(x))
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Surface area of `S^{m-1}`.
pub fn sphere_area(m: usize) -> f64 {
    let h = 0.5 * m as f64;
    2.0 * (h * PI.ln() - ln_gamma_pos(h)).exp()
}

/// Dimension of degree-`l` harmonics on `S^{m-1}`.
pub fn harmonic_dimension(m: usize, l: usize) -> usize {
    match m {
        0 => 0,
        1 => usize::from(l <= 1),
        2 => {
            if l == 0 {
                1
            } else {
                2
            }
        }
        _ => binom(l + m - 1, m - 1) - if l >= 2 { binom(l + m - 3, m - 1) } else { 0 },
    }
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `-l(l+m-2)`.
pub fn laplace_beltrami_eigenvalue(m: usize, l: usize) -> f64 {
    -(l as f64) * (l as f64 + m as f64 - 2.0)
}

/// `1/4 - (l + (m-2)/2)²`, the eigenvalue of `Δ - (m-1)(m-3)/4`.
pub fn yamabe_eigenvalue(m: usize, l: usize) -> f64 {
    let s = l as f64 + 0.5 * (m as f64 - 2.0);
    0.25 - s * s
}

/// Product rule on `S^{m-1}` exact for polynomials of total degree `<= order`.
pub fn sphere_quadrature(m: usize, order: usize) -> Result<SphereRule> {
    if m == 0 || m > MAX_DIM {
        return Err(KappaError::Unsupported(format!(
            "sphere quadrature for m = {m}"
        )));
    }
    match m {
        1 => Ok(SphereRule {
            m,
            points: vec![vec![1.0], vec![-1.0]],
            weights: vec![1.0, 1.0],
        }),
        2 => {
            let k = order + 1;
            let step = 2.0 * PI / k as f64;
            let points = (0..k)
                .map(|i| {
                    let phi = (i as f64 + 0.5) * step;
                    vec![phi.cos(), phi.sin()]
                })
                .collect();
            Ok(SphereRule {
                m,
                points,
                weights: vec![step; k],
            })
        }
        _ => {
            let lat = gauss_rule(
                WeightSpec::Gegenbauer {
                    gamma: 0.5 * (m as f64 - 3.0),
                },
                order / 2 + 1,
            )?;
            let sub = sphere_quadrature(m - 1, order)?;
            let mut points = Vec::with_capacity(lat.len() * sub.len());
            let mut weights = Vec::with_capacity(lat.len() * sub.len());
            for (&t, &wt) in lat.nodes.iter().zip(&lat.weights) {
                let rho = (1.0 - t * t).max(0.0).sqrt();
                for (y, &wy) in sub.points.iter().zip(&sub.weights) {
                    let mut p: Vec<f64> = y.iter().map(|c| rho * c).collect();
                    p.push(t);
                    points.push(p);
                    weights.push(wt * wy);
                }
            }
            Ok(SphereRule { m, points, weights })
        }
    }
}

/// Real orthonormal spherical harmonics on `S^{m-1}` of degrees `0..=lmax`,
/// built by Gegenbauer separation in the last coordinate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphereBasis {
    pub m: usize,
    pub lmax: usize,
    pub dims: Vec<usize>,
}

impl SphereBasis {
    pub fn new(m: usize, lmax: usize) -> Result<Self> {
        if m == 0 || m > MAX_DIM {
            return Err(KappaError::Unsupported(format!("sphere basis for m = {m}")));
        }
        let dims = (0..=lmax).map(|l| harmonic_dimension(m, l)).collect();
        Ok(SphereBasis { m, lmax, dims })
    }

    pub fn dim(&self, l: usize) -> usize {
        harmonic_dimension(self.m, l)
    }

    /// Degree-`l` basis at a point of the sphere.
    pub fn eval(&self, l: usize, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.m);
        homogeneous(self.m, l, x)
    }

    /// Degree-`l` basis extended as homogeneous harmonic polynomials of `x ∈ R^m`.
    pub fn eval_homogeneous(&self, l: usize, x: &[f64]) -> Vec<f64> {
        homogeneous(self.m, l, x)
    }
}

const NORM_TABLE_N: usize = 64;
const NORM_TABLE_TWO_LAMBDA: usize = 192;

fn gegenbauer_norm(n: usize, lambda: f64) -> f64 {
    static TABLE: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    let two = (2.0 * lambda).round();
    if n < NORM_TABLE_N
        && two >= 1.0
        && two < NORM_TABLE_TWO_LAMBDA as f64
        && (two - 2.0 * lambda).abs() < 1e-12
    {
        let table = TABLE.get_or_init(|| {
            let mut t = vec![0.0; NORM_TABLE_N * NORM_TABLE_TWO_LAMBDA];
            for k in 0..NORM_TABLE_N {
                for l2 in 1..NORM_TABLE_TWO_LAMBDA {
                    t[k * NORM_TABLE_TWO_LAMBDA + l2] = gegenbauer_norm_direct(k, 0.5 * l2 as f64);
                }
            }
            t
        });
        return table[n * NORM_TABLE_TWO_LAMBDA + two as usize];
    }
    gegenbauer_norm_direct(n, lambda)
}

fn gegenbauer_norm_direct(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    let ln_h = PI.ln() + (1.0 - 2.0 * lambda) * 2f64.ln() + ln_gamma_pos(nf + 2.0 * lambda)
        - ln_gamma_pos(nf + 1.0)
        - (nf + lambda).ln()
        - 2.0 * ln_gamma_pos(lambda);
    (-0.5 * ln_h).exp()
}

fn homogeneous(m: usize, l: usize, x: &[f64]) -> Vec<f64> {
    match m {
        1 => match l {
            0 => vec![std::f64::consts::FRAC_1_SQRT_2],
            1 => vec![x[0] * std::f64::consts::FRAC_1_SQRT_2],
            _ => Vec::new(),
        },
        2 => {
            if l == 0 {
                return vec![1.0 / (2.0 * PI).sqrt()];
            }
            let z = Complex64::new(x[0], x[1]).powu(l as u32) / PI.sqrt();
            vec![z.re, z.im]
        }
        _ => {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            let t = if r > 0.0 { x[m - 1] / r } else { 0.0 };
            let mut out = Vec::with_capacity(harmonic_dimension(m, l));
            for j in 0..=l {
                let n = l - j;
                let lambda = j as f64 + 0.5 * (m as f64 - 2.0);
                let radial =
                    gegenbauer_norm(n, lambda) * r.powi(n as i32) * gegenbauer(n, lambda, t);
                for h in homogeneous(m - 1, j, &x[..m - 1]) {
                    out.push(radial * h);
                }
            }
            out
        }
    }
}

/// Finite-difference check of both eigenvalue forms for degree `l`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigencheckReport {
    pub m: usize,
    pub l: usize,
    pub laplace_eigenvalue: f64,
    pub yamabe_eigenvalue: f64,
    pub laplace_residual: f64,
    pub yamabe_residual: f64,
}

impl EigencheckReport {
    pub fn residual(&self) -> f64 {
        self.laplace_residual.max(self.yamabe_residual)
    }
}

/// Applies a fourth-order difference Laplacian to `Y(x/|x|)` at sample points
/// of the sphere; for a zero-homogeneous function this is `Δ_S Y`.
pub fn sphere_eigencheck(basis: &SphereBasis, l: usize) -> EigencheckReport {
    let m = basis.m;
    let lap = laplace_beltrami_eigenvalue(m, l);
    let yam = yamabe_eigenvalue(m, l);
    let shift = 0.25 * (m as f64 - 1.0) * (m as f64 - 3.0);
    let mut report = EigencheckReport {
        m,
        l,
        laplace_eigenvalue: lap,
        yamabe_eigenvalue: yam,
        laplace_residual: 0.0,
        yamabe_residual: 0.0,
    };
    if m == 1 {
        return report;
    }
    let h = 5e-3;
    let samples = sphere_quadrature(m, 3).expect("m checked at construction");
    let radial = |y: &[f64]| -> Vec<f64> {
        let r = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        let u: Vec<f64> = y.iter().map(|c| c / r).collect();
        basis.eval(l, &u)
    };
    let scale = lap.abs().max(1.0);
    for x in &samples.points {
        let centre = radial(x);
        let mut acc = vec![0.0; centre.len()];
        for i in 0..m {
            let mut y = x.clone();
            let mut at = |d: f64| {
                y[i] = x[i] + d;
                radial(&y)
            };
            let (p2, p1, m1, m2) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
            for k in 0..acc.len() {
                acc[k] += (-p2[k] + 16.0 * p1[k] - 30.0 * centre[k] + 16.0 * m1[k] - m2[k])
                    / (12.0 * h * h);
            }
        }
        for k in 0..acc.len() {
            let rl = (acc[k] - lap * centre[k]).abs() / scale;
            let ry = (acc[k] - shift * centre[k] - yam * centre[k]).abs() / scale;
            report.laplace_residual = report.laplace_residual.max(rl);
            report.yamabe_residual = report.yamabe_residual.max(ry);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn areas() {
        assert_abs_diff_eq!(sphere_area(1), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sphere_area(2), 2.0 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(sphere_area(3), 4.0 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(sphere_area(4), 2.0 * PI * PI, epsilon = 1e-13);
        for m in 1..=5 {
            for order in [0, 3, 10] {
                let r = sphere_quadrature(m, order).unwrap();
                assert_abs_diff_eq!(r.total_weight(), sphere_area(m), epsilon = 1e-12);
            }
        }
        assert_eq!(sphere_quadrature(1, 7).unwrap().weights, vec![1.0, 1.0]);
        assert!(sphere_quadrature(6, 2).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(harmonic_dimension(3, 2), 5);
        assert_eq!(harmonic_dimension(4, 2), 9);
        assert_eq!(harmonic_dimension(5, 1), 5);
        for m in 1..=5 {
            for l in 0..8 {
                assert_eq!(
                    homogeneous(m, l, &vec![0.3; m]).len(),
                    harmonic_dimension(m, l)
                );
            }
        }
    }

    #[test]
    fn monomial_moments_exact() {
        // ∫_{S^2} x⁴ = 4π/5, ∫_{S^3} x1² x2² = π²/12.
        let r = sphere_quadrature(3, 4).unwrap();
        assert_abs_diff_eq!(
            r.integrate(|x| x[0].powi(4)),
            4.0 * PI / 5.0,
            epsilon = 1e-12
        );
        let r = sphere_quadrature(4, 4).unwrap();
        assert_abs_diff_eq!(
            r.integrate(|x| x[0] * x[0] * x[1] * x[1]),
            PI * PI / 12.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gram_is_identity() {
        for m in 1..=5 {
            let lmax = if m >= 4 { 4 } else { 6 };
            let basis = SphereBasis::new(m, lmax).unwrap();
            let rule = sphere_quadrature(m, 2 * lmax).unwrap();
            let all: Vec<Vec<f64>> = rule
                .points
                .iter()
                .map(|x| (0..=lmax).flat_map(|l| basis.eval(l, x)).collect())
                .collect();
            let d = all[0].len();
            for i in 0..d {
                for j in 0..d {
                    let g: f64 = all
                        .iter()
                        .zip(&rule.weights)
                        .map(|(v, w)| w * v[i] * v[j])
                        .sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-10, "m={m} ({i},{j}) -> {g}");
                }
            }
        }
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(laplace_beltrami_eigenvalue(3, 0), 0.0);
        assert_eq!(laplace_beltrami_eigenvalue(3, 1), -2.0);
        assert_eq!(yamabe_eigenvalue(3, 1), -2.0);
        assert_eq!(yamabe_eigenvalue(4, 2), -35.0 / 4.0);
    }

    #[test]
    fn eigenforms_agree_exactly() {
        for m in 1i64..=40 {
            for l in 0i64..=40 {
                let lhs = 1 - (2 * l + m - 2).pow(2);
                let rhs = -4 * l * (l + m - 2) - (m - 1) * (m - 3);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn finite_difference_eigencheck() {
        for m in 1..=5 {
            let basis = SphereBasis::new(m, 4).unwrap();
            for l in 0..=4 {
                let rep = sphere_eigencheck(&basis, l);
                assert!(rep.residual() < 1e-6, "m={m} l={l}: {rep:?}");
            }
        }
    }
}
