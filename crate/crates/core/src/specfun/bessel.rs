use super::gamma::ln_gamma_pos;
use crate::error::{KappaError, Result};

// Below this argument the power series loses at most ~4 digits to cancellation.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind `J_ν(x)` for `ν >= -1/2`, `x >= 0`.
///
/// Small arguments use the power series; larger ones use Miller's backward
/// recurrence normalised by the Neumann identity
/// `(x/2)^ν = Σ_k (ν+2k) Γ(ν+k)/k! · J_{ν+2k}(x)`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(KappaError::Domain(format!(
            "bessel_j requires nu >= -1/2, got {nu}"
        )));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(KappaError::Domain(format!(
            "bessel_j requires finite x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if x <= SERIES_LIMIT || x * x < 4.0 * (nu + 1.0) {
        Ok(series(nu, x))
    } else {
        Ok(miller(nu, x))
    }
}

fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = (nu * half.ln() - ln_gamma_pos(nu + 1.0)).exp();
    let mut sum = term;
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf > half {
            break;
        }
    }
    sum
}

fn miller(nu: f64, x: f64) -> f64 {
    // Start well above the turning point so the minimal solution dominates.
    let top = (x + 60.0 + 10.0 * x.sqrt()).ceil() as usize;
    let top = if top % 2 == 1 { top + 1 } else { top };
    let mut next = 0.0; // J_{nu+top+1}
    let mut cur = 1e-300; // J_{nu+top}
    let mut norm = 0.0;
    // Coefficients (ν+2k) Γ(ν+k) / k! for the normalisation sum.
    let weight = |k: usize| -> f64 {
        if k == 0 {
            ln_gamma_pos(nu + 1.0).exp()
        } else {
            let kf = k as f64;
            (nu + 2.0 * kf) * (ln_gamma_pos(nu + kf) - ln_gamma_pos(kf + 1.0)).exp()
        }
    };
    let mut j = top;
    loop {
        if j % 2 == 0 {
            norm += weight(j / 2) * cur;
        }
        if j == 0 {
            break;
        }
        let order = nu + j as f64;
        let prev = 2.0 * order / x * cur - next;
        next = cur;
        cur = prev;
        j -= 1;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    let target = (nu * (0.5 * x).ln()).exp();
    cur * target / norm
}
