use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::expansion::{
    expand, ktype_sparsity, multiplicity_profile, parseval_sum, quarter_power_norm, TAIL_TOLERANCE,
};
use super::grid::{parity_sign, pullback_with_sign, twisted_pullback, ProductSphereGrid};
use super::kernel::LaguerreField;
use crate::error::{KappaError, Result};
use crate::ultrahyperbolic::{spectral_inner, theorem41_ratio, ConeProfile, Hyperplane, Signature};

pub const DEFAULT_CUTOFF: usize = 12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchingOptions {
    /// `S^q` degree cutoff `B`; the `S^p` cutoff follows the K-type line.
    pub b_cutoff: usize,
    pub profile_id: Option<String>,
}

impl Default for BranchingOptions {
    fn default() -> Self {
        BranchingOptions {
            b_cutoff: DEFAULT_CUTOFF,
            profile_id: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Deviations {
    pub parseval_vs_spectral: f64,
    pub parseval_vs_xi: f64,
    pub spectral_vs_xi: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchingReport {
    pub signature: (usize, usize),
    pub profile_id: String,
    pub inner_spectral: f64,
    pub parseval: f64,
    pub quarter_power: f64,
    pub xi_norm_scaled: f64,
    pub parseval_over_xi: f64,
    pub deviations: Deviations,
    pub ktype_mass: f64,
    pub tail: f64,
    /// Number of `S^p` degrees carrying mass at each `S^q` degree.
    pub multiplicity: Vec<usize>,
    pub cutoffs: (usize, usize),
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn profile_id(u: &ConeProfile) -> Result<String> {
    Ok(hex::encode(Sha256::digest(u.to_json()?.as_bytes()))[..12].to_string())
}

/// Compare the spectral norm, the Parseval sum of the pulled-back expansion and
/// the scaled `L²(Ξ)` norm of `u`.
pub fn branching_consistency(u: &ConeProfile, opts: &BranchingOptions) -> Result<BranchingReport> {
    let sig = u.sig;
    let field = LaguerreField::new(u)?;
    let grid = ProductSphereGrid::new(sig, opts.b_cutoff)?;
    let f = |x: &[f64]| field.eval(x);
    let samples = twisted_pullback(&f, &grid)?;
    if !samples.rejected.is_empty() {
        return Err(KappaError::Singular(format!(
            "{} grid nodes rejected near the wall",
            samples.rejected.len()
        )));
    }
    let e = expand(&samples, &grid)?;
    if !e.resolved(TAIL_TOLERANCE) {
        log::warn!(
            "branching expansion tail {:.3e} above {:.1e}",
            e.tail,
            TAIL_TOLERANCE
        );
    }
    let mut v = vec![0.0; sig.n()];
    v[0] = 1.0;
    let alpha = Hyperplane::new(sig, &v, 0.0)?;
    let inner = spectral_inner(u, &alpha)?.value;
    let t41 = theorem41_ratio(u, &alpha)?;
    let xi = t41.scalar * u.l2_norm_sq()?;
    let parseval = parseval_sum(&e, sig.q);
    Ok(BranchingReport {
        signature: (sig.p, sig.q),
        profile_id: match &opts.profile_id {
            Some(s) => s.clone(),
            None => profile_id(u)?,
        },
        inner_spectral: inner,
        parseval,
        quarter_power: quarter_power_norm(&e, sig.q),
        xi_norm_scaled: xi,
        parseval_over_xi: parseval / xi,
        deviations: Deviations {
            parseval_vs_spectral: rel(parseval, inner),
            parseval_vs_xi: rel(parseval, xi),
            spectral_vs_xi: rel(inner, xi),
        },
        ktype_mass: ktype_sparsity(&e, sig),
        tail: e.tail,
        multiplicity: multiplicity_profile(&e, 1e-6),
        cutoffs: (grid.a_max, grid.b_max),
    })
}

/// Points `(ξ, η)` with `ξ₀ + η₀ = 0`, pushed off the wall by `ξ₀ ↦ cos(a + t)`.
fn wall_point(sig: Signature, k: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let g = 0.618_033_988_749_895;
    let a = 0.3 + 2.5 * ((k as f64 + 1.0) * g).fract();
    let b = std::f64::consts::PI - a;
    let dir = |m: usize, seed: f64| -> Vec<f64> {
        let v: Vec<f64> = (0..m)
            .map(|i| ((i as f64 + 1.0) * (seed + 1.3)).sin() + 0.1)
            .collect();
        let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        v.iter().map(|c| c / r).collect()
    };
    let s = a + t;
    let mut xi = vec![s.cos()];
    xi.extend(dir(sig.p, k as f64 * 1.7).iter().map(|c| c * s.sin()));
    let mut eta: Vec<f64> = dir(sig.q, k as f64 * 2.9 + 0.4)
        .iter()
        .map(|c| c * b.sin())
        .collect();
    eta.push(b.cos());
    (xi, eta)
}

/// Jump of `F` across the wall `ξ₀ + η₀ = 0`, relative to `max |F|`, extrapolated
/// to zero offset. The parity rule with the wrong sign leaves an `O(1)` jump.
pub fn parity_wall_residual(
    sig: Signature,
    f: &(dyn Fn(&[f64]) -> Result<Complex64> + Sync),
    points: usize,
    eps: f64,
) -> Result<f64> {
    wall_residual_with_sign(sig, f, points, eps, parity_sign(sig))
}

/// [`parity_wall_residual`] with the lower-sheet sign supplied by the caller.
pub fn wall_residual_with_sign(
    sig: Signature,
    f: &(dyn Fn(&[f64]) -> Result<Complex64> + Sync),
    points: usize,
    eps: f64,
    sign: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..points {
        let mut jump = |h: f64| -> Result<Complex64> {
            let (x1, e1) = wall_point(sig, k, -h);
            let (x2, e2) = wall_point(sig, k, h);
            let (a, b) = (
                pullback_with_sign(sig, f, &x1, &e1, sign)?,
                pullback_with_sign(sig, f, &x2, &e2, sign)?,
            );
            scale = scale.max(a.norm()).max(b.norm());
            Ok(a - b)
        };
        let (j1, j2, j4) = (jump(eps)?, jump(2.0 * eps)?, jump(4.0 * eps)?);
        let j0 = (8.0 * j1 - 6.0 * j2 + j4) / 3.0;
        worst = worst.max(j0.norm());
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}
