use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::semigroup::{fka_operator, SectorVector, SemigroupOperator, SpectralFamily};
use crate::error::{KappaError, Result};

/// Outcome of [`order_check`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderReport {
    /// Smallest power with `F^j = id` on the retained modes, if any.
    pub order: Option<usize>,
    /// Residual at the reported order (or the smallest one seen).
    pub residual: f64,
    /// Residual of `F^j - id` for `j = 1, 2, …`.
    pub trace: Vec<f64>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Finds the order of `F_{k,a}` for `a = num/den` by taking matrix powers in
/// every sector of `family`, up to `4·num`.
pub fn order_check(family: &SpectralFamily, num: u32, den: u32, tol: f64) -> Result<OrderReport> {
    if num == 0 || den == 0 || gcd(num, den) != 1 {
        return Err(KappaError::Domain(format!(
            "{num}/{den} is not a reduced fraction"
        )));
    }
    let a = family.md.a();
    if (a - num as f64 / den as f64).abs() > 1e-12 * a {
        return Err(KappaError::Domain(format!(
            "a = {a} differs from {num}/{den}"
        )));
    }
    let f = fka_operator(family)?;
    let mut sectors = Vec::new();
    for (m, model) in family.models.iter().enumerate() {
        let v = model.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(f.factors(m).to_vec()));
        let mat = &v * diag * v.transpose();
        let kept = v.columns(0, model.retained).into_owned();
        sectors.push((mat, kept));
    }
    let mut powers: Vec<DMatrix<Complex64>> = sectors.iter().map(|(m, _)| m.clone()).collect();
    let mut trace = Vec::new();
    for j in 1..=4 * num as usize {
        if j > 1 {
            for (p, (mat, _)) in powers.iter_mut().zip(&sectors) {
                *p = &*p * mat;
            }
        }
        let mut worst: f64 = 0.0;
        for (p, (_, kept)) in powers.iter().zip(&sectors) {
            let diff = p * kept - kept;
            for c in 0..diff.ncols() {
                worst = worst.max(diff.column(c).norm());
            }
        }
        trace.push(worst);
        if worst <= tol {
            return Ok(OrderReport {
                order: Some(j),
                residual: worst,
                trace,
            });
        }
    }
    let residual = trace.iter().copied().fold(f64::INFINITY, f64::min);
    log::warn!("no power of F reached {tol:e}; best residual {residual:e}");
    Ok(OrderReport {
        order: None,
        residual,
        trace,
    })
}

fn apply_real(mat: &DMatrix<f64>, f: &SectorVector) -> SectorVector {
    let n = f.coeffs.len();
    let coeffs = (0..n)
        .map(|i| (0..n).map(|j| f.coeffs[j] * mat[(i, j)]).sum())
        .collect();
    SectorVector { m: f.m, coeffs }
}

fn relative(lhs: &SectorVector, rhs_neg: &SectorVector, scale: &SectorVector) -> f64 {
    let n: f64 = lhs
        .coeffs
        .iter()
        .zip(&rhs_neg.coeffs)
        .map(|(a, b)| (a + b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    n / scale.norm().max(f64::MIN_POSITIVE)
}

/// Residuals `(r1, r2, r3)` of
/// `F∘H = -H∘F`, `F∘|x|^a = -|x|^{2-a}Δ_k∘F`, `F∘|x|^{2-a}Δ_k = -|x|^a∘F`
/// on one sector, relative to the norm of the operator applied to `f`.
pub fn intertwining_residual(family: &SpectralFamily, f: &SectorVector) -> Result<(f64, f64, f64)> {
    let model = family.sector(f.m)?;
    let md = &family.md;
    let a = md.a();
    let basis = &model.basis;
    let x = basis.r_power_matrix();
    let y = basis.laplacian_matrix();
    let n = basis.n;
    let h = basis.euler_matrix() * (2.0 / a) + DMatrix::identity(n, n) * md.h_shift();
    let op: SemigroupOperator = fka_operator(family)?;
    let fa = |v: &SectorVector| -> Result<SectorVector> { Ok(op.apply(v)?.value) };
    let ff = fa(f)?;
    let pair = |p: &DMatrix<f64>, q: &DMatrix<f64>| -> Result<f64> {
        let pf = apply_real(p, f);
        Ok(relative(&fa(&pf)?, &apply_real(q, &ff), &pf))
    };
    Ok((pair(&h, &h)?, pair(&x, &y)?, pair(&y, &x)?))
}

/// Cauchy–Riemann residual of `z ↦ (I(z)f, g)` at the given points,
/// relative to `|d/dz|`.
pub fn holomorphy_residual(
    family: &SpectralFamily,
    f: &SectorVector,
    g: &SectorVector,
    points: &[Complex64],
) -> Result<f64> {
    let pairing = |z: Complex64| -> Result<Complex64> {
        Ok(SemigroupOperator::new(family, z)?.apply(f)?.value.inner(g))
    };
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for &z in points {
        let dx = (pairing(z + h)? - pairing(z - h)?) / (2.0 * h);
        let dy = (pairing(z + Complex64::new(0.0, h))? - pairing(z - Complex64::new(0.0, h))?)
            / (2.0 * h);
        let cr = (dx + Complex64::i() * dy).norm();
        worst = worst.max(cr / dx.norm().max(1e-12));
    }
    Ok(worst)
}
