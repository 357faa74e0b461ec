use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::Signature;
use super::profile::{ConeProfile, FrequencyMap};
use crate::error::{KappaError, Result};

/// Conformal transformations of `R^{p,q}` acting as `x ↦ h(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConformalElement {
    Identity,
    Translation(Vec<f64>),
    /// `x ↦ g x` with `g ∈ O(p,q)`, row-major.
    Linear(Vec<f64>),
    Dilation(f64),
    /// `x ↦ x / (x,x)_{p,q}`.
    Inversion,
}

impl ConformalElement {
    /// Rotation by `angle` in the coordinate plane `(i, j)`, both in the same block.
    pub fn rotation(sig: Signature, i: usize, j: usize, angle: f64) -> Result<Self> {
        if i == j || i.max(j) >= sig.n() || ((i < sig.p) != (j < sig.p)) {
            return Err(KappaError::Domain(format!(
                "({i},{j}) is not a rotation plane"
            )));
        }
        let mut g = identity(sig.n());
        let n = sig.n();
        let (c, s) = (angle.cos(), angle.sin());
        g[i * n + i] = c;
        g[j * n + j] = c;
        g[i * n + j] = -s;
        g[j * n + i] = s;
        Ok(ConformalElement::Linear(g))
    }

    /// Boost of rapidity `beta` mixing `i < p` with `j >= p`.
    pub fn boost(sig: Signature, i: usize, j: usize, beta: f64) -> Result<Self> {
        if i >= sig.p || j < sig.p || j >= sig.n() {
            return Err(KappaError::Domain(format!(
                "({i},{j}) is not a boost plane"
            )));
        }
        let mut g = identity(sig.n());
        let n = sig.n();
        let (c, s) = (beta.cosh(), beta.sinh());
        g[i * n + i] = c;
        g[j * n + j] = c;
        g[i * n + j] = s;
        g[j * n + i] = s;
        Ok(ConformalElement::Linear(g))
    }

    fn validate(&self, sig: Signature) -> Result<()> {
        let n = sig.n();
        match self {
            ConformalElement::Translation(b) if b.len() != n => Err(KappaError::Domain(
                "translation vector has wrong length".into(),
            )),
            ConformalElement::Dilation(s) if !(*s > 0.0) => {
                Err(KappaError::Domain("dilation needs s > 0".into()))
            }
            ConformalElement::Linear(g) => {
                if g.len() != n * n {
                    return Err(KappaError::Domain("matrix has wrong shape".into()));
                }
                for a in 0..n {
                    for b in 0..n {
                        let gram: f64 = (0..n)
                            .map(|k| if k < sig.p { 1.0 } else { -1.0 } * g[k * n + a] * g[k * n + b])
                            .sum();
                        let want = if a != b {
                            0.0
                        } else if a < sig.p {
                            1.0
                        } else {
                            -1.0
                        };
                        if (gram - want).abs() > 1e-10 {
                            return Err(KappaError::Domain(
                                "matrix does not preserve the form".into(),
                            ));
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `(h⁻¹x, Ω(h⁻¹, x))` with `h*g = Ω² g`.
    pub fn pull(&self, sig: Signature, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        let n = sig.n();
        Ok(match self {
            ConformalElement::Identity => (x.to_vec(), 1.0),
            ConformalElement::Translation(b) => {
                (x.iter().zip(b).map(|(a, c)| a - c).collect(), 1.0)
            }
            ConformalElement::Linear(g) => {
                let iy: Vec<f64> = sig.flip(x);
                // g⁻¹ = I gᵀ I
                let y: Vec<f64> = (0..n)
                    .map(|a| (0..n).map(|k| g[k * n + a] * iy[k]).sum())
                    .collect();
                (sig.flip(&y), 1.0)
            }
            ConformalElement::Dilation(s) => (x.iter().map(|c| c / s).collect(), 1.0 / s),
            ConformalElement::Inversion => {
                let q = sig.quad(x);
                let scale = 1.0 + x.iter().map(|c| c * c).sum::<f64>();
                if q.abs() < 1e-6 * scale {
                    return Err(KappaError::Singular(format!(
                        "{x:?} is on the light cone of the origin"
                    )));
                }
                (x.iter().map(|c| c / q).collect(), 1.0 / q.abs())
            }
        })
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        g[i * n + i] = 1.0;
    }
    g
}

/// Transformed profile of `ϖ_λ(h) f`, where `f` is synthesized from `u`.
/// Inversions do not act on profiles; use [`conformal_samples`].
pub fn conformal_act(
    element: &ConformalElement,
    lambda: f64,
    u: &ConeProfile,
) -> Result<ConeProfile> {
    let sig = u.sig;
    let n = sig.n();
    element.validate(sig)?;
    let mut map = FrequencyMap::identity(n);
    match element {
        ConformalElement::Identity => {}
        ConformalElement::Translation(b) => map.b = b.clone(),
        ConformalElement::Linear(g) => {
            for a in 0..n {
                for b in 0..n {
                    map.l[a * n + b] = g[b * n + a];
                }
            }
        }
        ConformalElement::Dilation(s) => {
            for a in 0..n {
                map.l[a * n + a] = *s;
            }
            map.amp = s.powf(n as f64 - 2.0 - lambda);
        }
        ConformalElement::Inversion => {
            return Err(KappaError::Unsupported(
                "inversion acts on samples only".into(),
            ));
        }
    }
    Ok(u.mapped(&map))
}

/// Samples of `ϖ_λ(h) f(x) = Ω(h⁻¹,x)^λ f(h⁻¹x)`.
pub fn conformal_samples(
    element: &ConformalElement,
    lambda: f64,
    sig: Signature,
    f: &dyn Fn(&[f64]) -> Result<Complex64>,
    xs: &[Vec<f64>],
) -> Result<Vec<Complex64>> {
    element.validate(sig)?;
    xs.iter()
        .map(|x| {
            let (y, omega) = element.pull(sig, x)?;
            Ok(f(&y)? * omega.powf(lambda))
        })
        .collect()
}

fn box_fd(sig: Signature, g: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<f64> {
    let g0 = g(x)?;
    let mut total = 0.0;
    for i in 0..sig.n() {
        let at = |s: f64| {
            let mut y = x.to_vec();
            y[i] += s;
            g(&y)
        };
        let d2 = (-at(2.0 * h)? + 16.0 * at(h)? - 30.0 * g0 + 16.0 * at(-h)? - at(-2.0 * h)?)
            / (12.0 * h * h);
        total += if i < sig.p { d2 } else { -d2 };
    }
    Ok(total)
}

/// Relative sup-norm of `ϖ_{(n+2)/2}(h)(□f) - □(ϖ_{(n-2)/2}(h) f)` over `xs`,
/// both sides by fourth-order differences with step `step`.
pub fn covariance_residual(
    element: &ConformalElement,
    sig: Signature,
    f: &dyn Fn(&[f64]) -> f64,
    xs: &[Vec<f64>],
    step: f64,
) -> Result<f64> {
    element.validate(sig)?;
    let n = sig.n() as f64;
    let ok = |x: &[f64]| -> Result<f64> { Ok(f(x)) };
    let moved = |x: &[f64]| -> Result<f64> {
        let (y, omega) = element.pull(sig, x)?;
        Ok(omega.powf((n - 2.0) / 2.0) * f(&y))
    };
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for x in xs {
        let (y, omega) = element.pull(sig, x)?;
        let lhs =
            omega.powf((n + 2.0) / 2.0) * box_fd(sig, &ok, &y, step * omega.recip().min(1.0))?;
        let rhs = box_fd(sig, &moved, x, step)?;
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(x: &[f64]) -> f64 {
        let c = [0.3, -0.2, 0.1, 0.4];
        (-x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 2.0).exp()
    }

    #[test]
    fn group_elements_validate() {
        let s = Signature::new(1, 3).unwrap();
        assert!(ConformalElement::boost(s, 0, 2, 0.7)
            .unwrap()
            .validate(s)
            .is_ok());
        assert!(ConformalElement::rotation(s, 1, 3, 0.7)
            .unwrap()
            .validate(s)
            .is_ok());
        assert!(ConformalElement::rotation(s, 0, 1, 0.7).is_err());
        let bad = ConformalElement::Linear(vec![
            2.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ]);
        assert!(bad.validate(s).is_err());
        let (y, om) = ConformalElement::boost(s, 0, 1, 0.4)
            .unwrap()
            .pull(s, &[1.0, 2.0, 0.0, 1.0])
            .unwrap();
        assert!((s.quad(&y) - s.quad(&[1.0, 2.0, 0.0, 1.0])).abs() < 1e-12);
        assert_eq!(om, 1.0);
    }

    #[test]
    fn covariance_dilation_inversion_isometry() {
        for (p, q) in [(1, 3), (2, 2)] {
            let s = Signature::new(p, q).unwrap();
            let xs: Vec<Vec<f64>> = vec![
                vec![0.2, 0.5, -0.3, 0.1],
                vec![1.5, 0.2, 0.4, -0.6],
                vec![-0.4, 1.1, 0.9, 0.3],
            ];
            let id =
                covariance_residual(&ConformalElement::Identity, s, &gaussian, &xs, 1e-2).unwrap();
            assert!(id < 1e-12);
            let dil =
                covariance_residual(&ConformalElement::Dilation(2.0), s, &gaussian, &xs, 1e-2)
                    .unwrap();
            assert!(dil < 1e-5, "{dil}");
            let boost = ConformalElement::boost(s, 0, 3, 0.5).unwrap();
            assert!(covariance_residual(&boost, s, &gaussian, &xs, 1e-2).unwrap() < 1e-5);
            let far: Vec<Vec<f64>> = vec![
                vec![2.0, 0.5, 0.3, 0.1],
                vec![0.3, 2.2, 0.4, -0.6],
                vec![0.1, 0.2, 1.9, 0.3],
            ];
            let inv = covariance_residual(&ConformalElement::Inversion, s, &gaussian, &far, 1e-3)
                .unwrap();
            assert!(inv < 1e-5, "{inv}");
        }
    }

    #[test]
    fn dilation_samples_carry_conformal_factor() {
        let s = Signature::new(1, 3).unwrap();
        let f = |x: &[f64]| gaussian(x);
        let xs = vec![vec![0.2, 0.5, -0.3, 0.1]];
        let lhs = conformal_samples(
            &ConformalElement::Dilation(2.0),
            1.0,
            s,
            &|x| Ok(Complex64::new(f(x), 0.0)),
            &xs,
        )
        .unwrap();
        let want = 0.5 * f(&[0.1, 0.25, -0.15, 0.05]);
        assert!((lhs[0].re - want).abs() < 1e-14);
    }

    #[test]
    fn inversion_rejects_light_cone() {
        let s = Signature::new(1, 3).unwrap();
        assert!(ConformalElement::Inversion
            .pull(s, &[1.0, 1.0, 0.0, 0.0])
            .is_err());
        let u = ConeProfile::bump(s, 1.0, 0.5, vec![]).unwrap();
        assert!(conformal_act(&ConformalElement::Inversion, 1.0, &u).is_err());
    }
}
