use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KappaError, Result};
use crate::specfun::{sphere_area, sphere_quadrature, SphereBasis, SphereRule};
use crate::ultrahyperbolic::Signature;

/// Nodes closer than this to the wall `ξ₀ + η₀ = 0` are rejected.
pub const WALL_TOLERANCE: f64 = 1e-6;

/// `Φ(u) = (2/(ξ₀+η₀))(ξ', η')` for `u = ((ξ₀, ξ'), (η', η₀)) ∈ S^p × S^q`,
/// returned with the conformal factor `2/(ξ₀+η₀)`.
pub fn phi_map(xi: &[f64], eta: &[f64]) -> Result<(Vec<f64>, f64)> {
    let d = xi[0] + eta[eta.len() - 1];
    if d.abs() < WALL_TOLERANCE {
        return Err(KappaError::Singular(format!(
            "ξ₀ + η₀ = {d:.2e} is on the wall"
        )));
    }
    let factor = 2.0 / d;
    let x = xi[1..]
        .iter()
        .chain(&eta[..eta.len() - 1])
        .map(|c| factor * c)
        .collect();
    Ok((x, factor))
}

/// `(-1)^{(p-q)/2}`.
pub fn parity_sign(sig: Signature) -> f64 {
    if (sig.p.abs_diff(sig.q) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Tensor quadrature on `Y = S^p × S^q` with joint harmonics of degrees
/// `a <= a_max` on `S^p` and `b <= b_max` on `S^q`.
#[derive(Clone, Debug)]
pub struct ProductSphereGrid {
    pub sig: Signature,
    pub a_max: usize,
    pub b_max: usize,
    pub rule_p: SphereRule,
    pub rule_q: SphereRule,
    pub basis_p: SphereBasis,
    pub basis_q: SphereBasis,
}

fn generic_rotation(x: &mut [f64]) {
    for k in 0..x.len() - 1 {
        let t = 0.5 + 0.37 * (k as f64 + 1.0).sqrt();
        let (s, c) = t.sin_cos();
        let (a, b) = (x[k], x[k + 1]);
        x[k] = c * a - s * b;
        x[k + 1] = s * a + c * b;
    }
}

/// `(degree, index)` labels in storage order.
pub fn harmonic_labels(basis: &SphereBasis, lmax: usize) -> Vec<(usize, usize)> {
    (0..=lmax)
        .flat_map(|l| (0..basis.dim(l)).map(move |i| (l, i)))
        .collect()
}

impl ProductSphereGrid {
    /// Cutoffs `b <= b_max` and `a <= b_max + (q-p)/2`, following the K-type line.
    pub fn new(sig: Signature, b_max: usize) -> Result<Self> {
        let shift = sig.q as isize - sig.p as isize;
        let a_max = b_max as isize + shift / 2;
        if a_max < 0 {
            return Err(KappaError::Domain(format!(
                "cutoff {b_max} too small for ({},{})",
                sig.p, sig.q
            )));
        }
        Self::with_cutoffs(sig, a_max as usize, b_max)
    }

    pub fn with_cutoffs(sig: Signature, a_max: usize, b_max: usize) -> Result<Self> {
        // Odd orders keep the circle rule symmetric under u ↦ -u.
        let rule_p = sphere_quadrature(sig.p + 1, 2 * a_max + 1)?;
        let mut rule_q = sphere_quadrature(sig.q + 1, 2 * b_max + 1)?;
        // Symmetric rules put nodes exactly on ξ₀ + η₀ = 0; a generic rotation moves them off.
        for x in rule_q.points.iter_mut() {
            generic_rotation(x);
        }
        Ok(ProductSphereGrid {
            sig,
            a_max,
            b_max,
            rule_p,
            rule_q,
            basis_p: SphereBasis::new(sig.p + 1, a_max)?,
            basis_q: SphereBasis::new(sig.q + 1, b_max)?,
        })
    }

    pub fn len(&self) -> usize {
        self.rule_p.len() * self.rule_q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_weight(&self) -> f64 {
        self.rule_p.total_weight() * self.rule_q.total_weight()
    }

    pub fn expected_weight(&self) -> f64 {
        sphere_area(self.sig.p + 1) * sphere_area(self.sig.q + 1)
    }

    /// Values of all `S^p` harmonics at each `S^p` node, in label order.
    pub fn table_p(&self) -> Vec<Vec<f64>> {
        self.rule_p
            .points
            .iter()
            .map(|x| {
                (0..=self.a_max)
                    .flat_map(|l| self.basis_p.eval(l, x))
                    .collect()
            })
            .collect()
    }

    pub fn table_q(&self) -> Vec<Vec<f64>> {
        self.rule_q
            .points
            .iter()
            .map(|x| {
                (0..=self.b_max)
                    .flat_map(|l| self.basis_q.eval(l, x))
                    .collect()
            })
            .collect()
    }

    /// Largest deviation of the joint Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let defect = |rule: &SphereRule, table: &[Vec<f64>]| -> f64 {
            let k = table.first().map_or(0, |r| r.len());
            let mut worst: f64 = 0.0;
            for i in 0..k {
                for j in 0..k {
                    let g: f64 = table
                        .iter()
                        .zip(&rule.weights)
                        .map(|(row, w)| w * row[i] * row[j])
                        .sum();
                    worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
            worst
        };
        // The joint Gram is the tensor product of the two factor Grams.
        let dp = defect(&self.rule_p, &self.table_p());
        let dq = defect(&self.rule_q, &self.table_q());
        dp + dq + dp * dq
    }
}

/// Samples of `F = Φ̃*f` on the grid, stored `[p-node][q-node]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PullbackSamples {
    pub values: Vec<Vec<Complex64>>,
    /// Grid nodes `(p-node, q-node)` dropped near the wall.
    pub rejected: Vec<(usize, usize)>,
}

/// `F(u) = (2/(ξ₀+η₀))^{(p+q-2)/2} f(Φ(u))` on `ξ₀+η₀ > 0`, and
/// `F(-u) = (-1)^{(p-q)/2} F(u)` on the other sheet.
pub fn pullback_at(
    sig: Signature,
    f: &(dyn Fn(&[f64]) -> Result<Complex64> + Sync),
    xi: &[f64],
    eta: &[f64],
) -> Result<Complex64> {
    pullback_with_sign(sig, f, xi, eta, parity_sign(sig))
}

/// As [`pullback_at`] with an explicit sign on the `ξ₀+η₀ < 0` sheet.
pub fn pullback_with_sign(
    sig: Signature,
    f: &(dyn Fn(&[f64]) -> Result<Complex64> + Sync),
    xi: &[f64],
    eta: &[f64],
    sign: f64,
) -> Result<Complex64> {
    let d = xi[0] + eta[eta.len() - 1];
    let weight = 0.5 * (sig.n() as f64 - 2.0);
    if d > 0.0 {
        let (x, factor) = phi_map(xi, eta)?;
        Ok(f(&x)? * factor.powf(weight))
    } else {
        let mx: Vec<f64> = xi.iter().map(|c| -c).collect();
        let me: Vec<f64> = eta.iter().map(|c| -c).collect();
        let (x, factor) = phi_map(&mx, &me)?;
        Ok(f(&x)? * factor.powf(weight) * sign)
    }
}

pub fn twisted_pullback(
    f: &(dyn Fn(&[f64]) -> Result<Complex64> + Sync),
    grid: &ProductSphereGrid,
) -> Result<PullbackSamples> {
    type Row = (Vec<Complex64>, Vec<(usize, usize)>);
    let rows: Vec<Row> = grid
        .rule_p
        .points
        .par_iter()
        .enumerate()
        .map(|(i, xi)| {
            let mut row = Vec::with_capacity(grid.rule_q.len());
            let mut bad = Vec::new();
            for (j, eta) in grid.rule_q.points.iter().enumerate() {
                match pullback_at(grid.sig, f, xi, eta) {
                    Ok(v) if v.re.is_finite() && v.im.is_finite() => row.push(v),
                    Ok(_) | Err(KappaError::Singular(_)) => {
                        row.push(Complex64::new(0.0, 0.0));
                        bad.push((i, j));
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok((row, bad))
        })
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(rows.len());
    let mut rejected = Vec::new();
    for (row, bad) in rows {
        values.push(row);
        rejected.extend(bad);
    }
    Ok(PullbackSamples { values, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_examples() {
        let (x, f) = phi_map(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
        assert_eq!(f, 1.0);
        let xi = [0.6, 0.8];
        let eta = [0.3, 0.4, 0.0, (1.0f64 - 0.25).sqrt()];
        let (a, fa) = phi_map(&xi, &eta).unwrap();
        let (b, fb) = phi_map(&xi.map(|c| -c), &eta.map(|c| -c)).unwrap();
        assert_eq!(a, b);
        assert_eq!(fa, -fb);
        assert!(phi_map(&[0.5, 0.0], &[0.0, 0.0, 0.0, -0.5]).is_err());
    }

    #[test]
    fn phi_lands_on_light_cone_images_conformally() {
        // Φ pulls the flat form back to a multiple of the product metric:
        // |dΦ|²_{p,q} = (2/D)² (|dξ|² - |dη|²) on tangent vectors.
        let sig = Signature::new(1, 3).unwrap();
        let xi = [0.8f64, 0.6];
        let eta = [0.2, -0.4, 0.5, (1.0f64 - 0.45).sqrt()];
        let tx = [-0.6, 0.8];
        let te0 = [0.0, 0.3, 0.1, 0.0];
        let dot: f64 = te0.iter().zip(&eta).map(|(a, b)| a * b).sum();
        let te: Vec<f64> = te0.iter().zip(&eta).map(|(a, b)| a - dot * b).collect();
        let h = 1e-6;
        let (x0, f0) = phi_map(&xi, &eta).unwrap();
        let mv = |s: f64| {
            let a: Vec<f64> = xi.iter().zip(&tx).map(|(x, t)| x + s * t).collect();
            let b: Vec<f64> = eta.iter().zip(&te).map(|(x, t)| x + s * t).collect();
            phi_map(&a, &b).unwrap().0
        };
        let (xp, xm) = (mv(h), mv(-h));
        let dx: Vec<f64> = xp
            .iter()
            .zip(&xm)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        let lhs = sig.quad(&dx);
        let rhs = f0
            * f0
            * (tx.iter().map(|t| t * t).sum::<f64>() - te.iter().map(|t| t * t).sum::<f64>());
        assert!((lhs - rhs).abs() < 1e-6 * rhs.abs().max(1.0), "{lhs} {rhs}");
        let _ = x0;
    }

    #[test]
    fn grid_weight_and_gram() {
        for (p, q) in [(1, 3), (2, 2)] {
            let sig = Signature::new(p, q).unwrap();
            let g = ProductSphereGrid::new(sig, 4).unwrap();
            assert!((g.total_weight() / g.expected_weight() - 1.0).abs() < 1e-12);
            assert!(g.gram_defect() < 1e-10, "{}", g.gram_defect());
        }
    }

    #[test]
    fn constant_pullback_and_parity() {
        let sig = Signature::new(1, 3).unwrap();
        let g = ProductSphereGrid::new(sig, 2).unwrap();
        let one = |_: &[f64]| -> Result<Complex64> { Ok(Complex64::new(1.0, 0.0)) };
        let s = twisted_pullback(&one, &g).unwrap();
        for (i, xi) in g.rule_p.points.iter().enumerate() {
            for (j, eta) in g.rule_q.points.iter().enumerate() {
                let d = xi[0] + eta[3];
                let want = if d > 0.0 { 2.0 / d } else { -(2.0 / -d) };
                assert!((s.values[i][j].re - want).abs() < 1e-12 * want.abs());
            }
        }
        assert!(s.rejected.is_empty());
    }
}
