use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::gamma::{gamma_ln, ln_gamma_pos};
use crate::error::{KappaError, Result};

/// Support of a one-dimensional rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    HalfLine,
    Line,
}

/// Measures for which Gauss rules can be built.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum WeightSpec {
    /// `dt` on `[-1, 1]`.
    Legendre,
    /// `(1 - t²)^γ dt` on `[-1, 1]`, `γ > -1`.
    Gegenbauer { gamma: f64 },
    /// `x^α e^{-x} dx` on `(0, ∞)`, `α > -1`.
    GenLaguerre { alpha: f64 },
    /// `e^{-x²} dx` on the line.
    Hermite,
    /// `r^δ e^{-s r^a} dr` on `(0, ∞)`; built from moments.
    RadialPower { delta: f64, s: f64, a: f64 },
}

impl WeightSpec {
    pub fn domain(&self) -> Domain {
        match self {
            WeightSpec::Legendre | WeightSpec::Gegenbauer { .. } => {
                Domain::Interval { lo: -1.0, hi: 1.0 }
            }
            WeightSpec::GenLaguerre { .. } | WeightSpec::RadialPower { .. } => Domain::HalfLine,
            WeightSpec::Hermite => Domain::Line,
        }
    }

    /// `∫ x^j dμ`, evaluated in closed form through the gamma function.
    pub fn moment(&self, j: usize) -> Result<f64> {
        let jf = j as f64;
        match *self {
            WeightSpec::Legendre => Ok(if j.is_multiple_of(2) {
                2.0 / (jf + 1.0)
            } else {
                0.0
            }),
            WeightSpec::Gegenbauer { gamma } => {
                if j % 2 == 1 {
                    return Ok(0.0);
                }
                let h = 0.5 * jf;
                Ok(
                    (gamma_ln(h + 0.5)? + gamma_ln(gamma + 1.0)? - gamma_ln(h + gamma + 1.5)?)
                        .exp(),
                )
            }
            WeightSpec::GenLaguerre { alpha } => Ok(gamma_ln(alpha + jf + 1.0)?.exp()),
            WeightSpec::Hermite => {
                if j % 2 == 1 {
                    return Ok(0.0);
                }
                Ok(gamma_ln(0.5 * jf + 0.5)?.exp())
            }
            WeightSpec::RadialPower { delta, s, a } => {
                let e = (jf + delta + 1.0) / a;
                let v = (gamma_ln(e)? - a.ln() - e * s.ln()).exp();
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(KappaError::MomentOverflow { n: j })
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            WeightSpec::Legendre | WeightSpec::Hermite => true,
            WeightSpec::Gegenbauer { gamma } => gamma > -1.0,
            WeightSpec::GenLaguerre { alpha } => alpha > -1.0,
            WeightSpec::RadialPower { delta, s, a } => delta > -1.0 && s > 0.0 && a > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(KappaError::Domain(format!(
                "weight parameters out of range: {self:?}"
            )))
        }
    }
}

/// Nodes and positive weights of a Gauss rule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
    pub weight_spec: WeightSpec,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Eigen-decomposition of the Jacobi matrix with diagonal `diag` and
/// squared off-diagonal `beta` (`beta[k-1]` couples rows `k-1` and `k`).
///
/// Returns nodes in increasing order, weights `μ₀ v₀²`, and the orthogonal
/// eigenvector matrix whose column `q` belongs to node `q` and has a positive
/// first entry. Entry `(j, q)` equals `√w_q p_j(x_q)` for the orthonormal
/// polynomials `p_j` of the measure.
pub fn golub_welsch(
    diag: &[f64],
    beta: &[f64],
    mu0: f64,
) -> Result<(Vec<f64>, Vec<f64>, DMatrix<f64>)> {
    let n = diag.len();
    if n == 0 || beta.len() + 1 < n {
        return Err(KappaError::Domain(
            "golub_welsch needs n >= 1 and n-1 off-diagonals".into(),
        ));
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = diag[i];
        if i + 1 < n {
            if !(beta[i] > 0.0) {
                return Err(KappaError::Eigen(format!(
                    "non-positive recurrence coefficient beta_{} = {}",
                    i + 1,
                    beta[i]
                )));
            }
            let b = beta[i].sqrt();
            jac[(i, i + 1)] = b;
            jac[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut vecs = DMatrix::<f64>::zeros(n, n);
    for (col, &q) in order.iter().enumerate() {
        let sign = if eig.eigenvectors[(0, q)] < 0.0 {
            -1.0
        } else {
            1.0
        };
        for j in 0..n {
            vecs[(j, col)] = sign * eig.eigenvectors[(j, q)];
        }
        nodes.push(eig.eigenvalues[q]);
        weights.push(mu0 * vecs[(0, col)].powi(2));
    }
    Ok((nodes, weights, vecs))
}

/// Recurrence coefficients `(diag, beta, μ₀)` of the first `n` orthogonal polynomials.
pub fn recurrence(spec: WeightSpec, n: usize) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    spec.validate()?;
    let k = |i: usize| i as f64;
    Ok(match spec {
        WeightSpec::Legendre => (
            vec![0.0; n],
            (1..n)
                .map(|i| k(i) * k(i) / (4.0 * k(i) * k(i) - 1.0))
                .collect(),
            2.0,
        ),
        WeightSpec::Gegenbauer { gamma: g } => (
            vec![0.0; n],
            (1..n)
                .map(|i| {
                    if i == 1 {
                        // Cancelled form; the general one is 0/0 at γ = -1/2.
                        return 1.0 / (2.0 * g + 3.0);
                    }
                    let i = k(i);
                    i * (i + 2.0 * g) / ((2.0 * i + 2.0 * g + 1.0) * (2.0 * i + 2.0 * g - 1.0))
                })
                .collect(),
            spec.moment(0)?,
        ),
        WeightSpec::GenLaguerre { alpha } => (
            (0..n).map(|i| 2.0 * k(i) + alpha + 1.0).collect(),
            (1..n).map(|i| k(i) * (k(i) + alpha)).collect(),
            ln_gamma_pos(alpha + 1.0).exp(),
        ),
        WeightSpec::Hermite => (
            vec![0.0; n],
            (1..n).map(|i| 0.5 * k(i)).collect(),
            std::f64::consts::PI.sqrt(),
        ),
        WeightSpec::RadialPower { delta, s, a } => {
            // Work in x = r s^{1/a}, where the moments are Γ((j+δ+1)/a)/a.
            let scaled = WeightSpec::RadialPower { delta, s: 1.0, a };
            let moments = (0..2 * n)
                .map(|j| scaled.moment(j))
                .collect::<Result<Vec<_>>>()?;
            let (diag, beta) = chebyshev(&moments)?;
            let c = s.powf(-1.0 / a);
            (
                diag.iter().map(|d| d * c).collect(),
                beta.iter().map(|b| b * c * c).collect(),
                spec.moment(0)?,
            )
        }
    })
}

/// Chebyshev's algorithm: recurrence coefficients from `2n` ordinary moments.
fn chebyshev(mu: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = mu.len() / 2;
    let mut diag = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut prev = vec![0.0; 2 * n];
    let mut cur = mu.to_vec();
    diag[0] = mu[1] / mu[0];
    beta[0] = mu[0];
    for k in 1..n {
        let mut next = vec![0.0; 2 * n];
        for l in k..2 * n - k {
            next[l] = cur[l + 1] - diag[k - 1] * cur[l] - beta[k - 1] * prev[l];
        }
        diag[k] = next[k + 1] / next[k] - cur[k] / cur[k - 1];
        beta[k] = next[k] / cur[k - 1];
        if !(beta[k] > 0.0) || !diag[k].is_finite() {
            return Err(KappaError::MomentOverflow { n: k });
        }
        prev = cur;
        cur = next;
    }
    beta.remove(0);
    Ok((diag, beta))
}

/// `n`-point Gauss rule for `spec`, exact for polynomials of degree `2n - 1`.
pub fn gauss_rule(spec: WeightSpec, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(KappaError::Domain("gauss_rule needs n >= 1".into()));
    }
    let (diag, beta, mu0) = recurrence(spec, n)?;
    let (nodes, weights, _) = golub_welsch(&diag, &beta, mu0)?;
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(KappaError::Eigen("non-positive Gauss weight".into()));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: spec.domain(),
        weight_spec: spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn check_exact(spec: WeightSpec, n: usize) {
        let rule = gauss_rule(spec, n).unwrap();
        for j in 0..2 * n {
            let want = spec.moment(j).unwrap();
            let got = rule.integrate(|x| x.powi(j as i32));
            let scale = spec.moment(j + j % 2).unwrap().abs().max(1e-300);
            assert!(
                (got - want).abs() <= 1e-10 * scale,
                "{spec:?} n={n} j={j}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn legendre_two_point() {
        let r = gauss_rule(WeightSpec::Legendre, 2).unwrap();
        assert_abs_diff_eq!(r.nodes[0], -1.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(r.nodes[1], 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn laguerre_one_point() {
        let r = gauss_rule(WeightSpec::GenLaguerre { alpha: 0.0 }, 1).unwrap();
        assert_abs_diff_eq!(r.nodes[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-14);
        let r = gauss_rule(
            WeightSpec::RadialPower {
                delta: 0.0,
                s: 1.0,
                a: 1.0,
            },
            1,
        )
        .unwrap();
        assert_abs_diff_eq!(r.nodes[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn radial_two_point_matches_prony() {
        // Weight r e^{-r²}: moments μ_j = Γ((j+2)/2)/2. Solve the Hankel system
        // for the monic node polynomial, then the Vandermonde system for weights.
        let mu: Vec<f64> = (0..4)
            .map(|j| ln_gamma_pos((j as f64 + 2.0) / 2.0).exp() / 2.0)
            .collect();
        let det = mu[0] * mu[2] - mu[1] * mu[1];
        let c0 = (mu[1] * mu[3] - mu[2] * mu[2]) / det;
        let c1 = (mu[1] * mu[2] - mu[0] * mu[3]) / det;
        let disc = (c1 * c1 - 4.0 * c0).sqrt();
        let (x1, x2) = ((-c1 - disc) / 2.0, (-c1 + disc) / 2.0);
        let w2 = (mu[1] - x1 * mu[0]) / (x2 - x1);
        let w1 = mu[0] - w2;
        let r = gauss_rule(
            WeightSpec::RadialPower {
                delta: 1.0,
                s: 1.0,
                a: 2.0,
            },
            2,
        )
        .unwrap();
        assert_abs_diff_eq!(r.nodes[0], x1, epsilon = 1e-12);
        assert_abs_diff_eq!(r.nodes[1], x2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.weights[0], w1, epsilon = 1e-12);
        assert_abs_diff_eq!(r.weights[1], w2, epsilon = 1e-12);
    }

    #[test]
    fn classical_rules_exact() {
        for n in [1, 3, 8, 20] {
            check_exact(WeightSpec::Legendre, n);
            check_exact(WeightSpec::Gegenbauer { gamma: 0.5 }, n);
            check_exact(WeightSpec::Gegenbauer { gamma: -0.5 }, n);
            check_exact(WeightSpec::GenLaguerre { alpha: 1.5 }, n.min(12));
            check_exact(WeightSpec::Hermite, n);
        }
    }

    #[test]
    fn radial_rules_exact() {
        for n in [1, 2, 4, 7] {
            check_exact(
                WeightSpec::RadialPower {
                    delta: 1.0,
                    s: 1.0,
                    a: 2.0,
                },
                n,
            );
            check_exact(
                WeightSpec::RadialPower {
                    delta: 0.5,
                    s: 2.0,
                    a: 1.0,
                },
                n,
            );
            check_exact(
                WeightSpec::RadialPower {
                    delta: 2.0,
                    s: 0.5,
                    a: 1.5,
                },
                n,
            );
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_rule(WeightSpec::GenLaguerre { alpha: -1.0 }, 3).is_err());
        assert!(gauss_rule(
            WeightSpec::RadialPower {
                delta: 0.0,
                s: 0.0,
                a: 1.0
            },
            3
        )
        .is_err());
        assert!(gauss_rule(WeightSpec::Legendre, 0).is_err());
    }

    #[test]
    fn huge_moment_request_overflows() {
        let err = gauss_rule(
            WeightSpec::RadialPower {
                delta: 0.0,
                s: 1e-6,
                a: 0.05,
            },
            40,
        );
        assert!(matches!(err, Err(KappaError::MomentOverflow { .. })));
    }

    proptest! {
        #[test]
        fn weights_positive_and_sum_to_mass(g in -0.9f64..4.0, n in 1usize..30) {
            let spec = WeightSpec::Gegenbauer { gamma: g };
            let r = gauss_rule(spec, n).unwrap();
            prop_assert!(r.weights.iter().all(|w| *w > 0.0));
            let mass: f64 = r.weights.iter().sum();
            prop_assert!((mass - spec.moment(0).unwrap()).abs() < 1e-12 * mass);
        }

        #[test]
        fn laguerre_rule_exact(alpha in -0.9f64..6.0, n in 1usize..10) {
            check_exact(WeightSpec::GenLaguerre { alpha }, n);
        }
    }
}
