//! Direct quadrature of the classical integral transforms that the spectral
//! construction must reproduce.

use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

use crate::error::{KappaError, Result};
use crate::specfun::{bessel_j, gauss_rule, hermite_functions, WeightSpec};

const REFINE_TOL: f64 = 1e-4;

fn refined(coarse: Complex64, fine: Complex64, what: &str) -> Result<Complex64> {
    if (coarse - fine).norm() > REFINE_TOL * fine.norm().max(1.0) {
        return Err(KappaError::Resolution(format!(
            "{what}: grid refinement changed the value by {:e}",
            (coarse - fine).norm()
        )));
    }
    Ok(fine)
}

/// `(2π)^{-N/2} ∫ f(x) e^{-i⟨x,ξ⟩} dx` by the trapezoid rule on `[-L, L]^N`
/// with `points` nodes per axis, cross-checked against half the nodes.
pub fn oracle_fourier(
    f: &dyn Fn(&[f64]) -> Complex64,
    xi: &[f64],
    half_width: f64,
    points: usize,
) -> Result<Complex64> {
    let n = xi.len();
    if n == 0 || n > 3 {
        return Err(KappaError::Unsupported(format!(
            "Fourier oracle in dimension {n}"
        )));
    }
    let sum = |pts: usize| -> Complex64 {
        let h = 2.0 * half_width / (pts - 1) as f64;
        let total = pts.pow(n as u32);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut x = vec![0.0; n];
        for idx in 0..total {
            let mut rem = idx;
            let mut phase = 0.0;
            for (d, xd) in x.iter_mut().enumerate() {
                *xd = -half_width + h * (rem % pts) as f64;
                rem /= pts;
                phase += *xd * xi[d];
            }
            acc += f(&x) * Complex64::from_polar(1.0, -phase);
        }
        acc * h.powi(n as i32) / (2.0 * PI).powf(0.5 * n as f64)
    };
    let half = points / 2 + 1;
    refined(sum(half), sum(points), "Fourier oracle")
}

/// Sector transform `(-1)^m s^{-(N-2)/2} ∫_0^∞ J_{2m+N-2}(2√(rs)) r^{(N-2)/2} g(r) dr`
/// (the `k = 0`, `a = 1` case), integrated in `y = √(2r)` on `[0, y_max]`.
pub fn oracle_hankel(
    g: &dyn Fn(f64) -> Complex64,
    m: usize,
    n_dim: usize,
    s: f64,
    y_max: f64,
) -> Result<Complex64> {
    if n_dim < 2 && m > 1 {
        return Err(KappaError::Domain(format!(
            "sector {m} does not exist on R^1"
        )));
    }
    let nu = 2.0 * m as f64 + n_dim as f64 - 2.0;
    let h = 0.5 * (n_dim as f64 - 2.0);
    let rule = gauss_rule(WeightSpec::Legendre, 20)?;
    let integral = |panels: usize| -> Result<Complex64> {
        let width = y_max / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = p as f64 * width;
            for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                let y = lo + 0.5 * width * (u + 1.0);
                let r = 0.5 * y * y;
                let kernel = bessel_j(nu, y * (2.0 * s).sqrt())?;
                acc += g(r) * (kernel * r.powf(h) * y * 0.5 * width * w);
            }
        }
        Ok(acc)
    };
    let panels = (4.0 * y_max * (1.0 + (2.0 * s).sqrt())).ceil().max(8.0) as usize;
    let value = refined(integral(panels / 2)?, integral(panels)?, "Hankel oracle")?;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let pre = if s == 0.0 && h != 0.0 {
        0.0
    } else {
        s.powf(-h)
    };
    Ok(value * sign * pre)
}

/// Kernel `Σ_{n<n_max} e^{-z(2n+1)/2} h_n(x) h_n(y)` of the Hermite
/// semigroup on `R`, built from Hermite functions on a trapezoid grid.
#[derive(Clone, Debug)]
pub struct MehlerOracle {
    pub z: Complex64,
    pub n_max: usize,
    pub grid: Vec<f64>,
    pub step: f64,
    factors: Vec<Complex64>,
    // hermite[i][n] = h_n(grid[i])
    hermite: Vec<Vec<f64>>,
}

impl MehlerOracle {
    pub fn new(z: Complex64, n_max: usize, half_width: f64, step: f64) -> Result<Self> {
        if !(z.re > 0.0) {
            return Err(KappaError::Domain(format!(
                "Mehler oracle needs Re z > 0, got {z}"
            )));
        }
        let count = (2.0 * half_width / step).round() as usize + 1;
        let grid: Vec<f64> = (0..count).map(|i| -half_width + step * i as f64).collect();
        let hermite = grid.iter().map(|&x| hermite_functions(n_max, x)).collect();
        let factors = (0..n_max).map(|n| (-z * (n as f64 + 0.5)).exp()).collect();
        Ok(MehlerOracle {
            z,
            n_max,
            grid,
            step,
            factors,
            hermite,
        })
    }

    pub fn kernel(&self, x: f64, y: f64) -> Complex64 {
        let hx = hermite_functions(self.n_max, x);
        let hy = hermite_functions(self.n_max, y);
        (0..self.n_max)
            .map(|n| self.factors[n] * hx[n] * hy[n])
            .sum()
    }

    fn apply_with(&self, f: &dyn Fn(f64) -> Complex64, x: f64, stride: usize) -> Complex64 {
        let hx = hermite_functions(self.n_max, x);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &y) in self.grid.iter().enumerate().step_by(stride) {
            let k: Complex64 = (0..self.n_max)
                .map(|n| self.factors[n] * hx[n] * self.hermite[i][n])
                .sum();
            acc += k * f(y);
        }
        acc * (self.step * stride as f64)
    }

    /// `∫ K(x, y) f(y) dy`, cross-checked on the every-other-node grid.
    pub fn apply(&self, f: &dyn Fn(f64) -> Complex64, x: f64) -> Result<Complex64> {
        refined(
            self.apply_with(f, x, 2),
            self.apply_with(f, x, 1),
            "Mehler oracle",
        )
    }

    /// `(∫∫ |K|²)^{1/2}` on the grid.
    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for hx in &self.hermite {
            for hy in &self.hermite {
                let k: Complex64 = (0..self.n_max)
                    .map(|n| self.factors[n] * hx[n] * hy[n])
                    .sum();
                acc += k.norm_sqr();
            }
        }
        (acc * self.step * self.step).sqrt()
    }
}

/// Even and odd radial profiles of `f` on `R`, so that
/// `f(x) = (G₀(|x|) + sgn(x) G₁(|x|))/√2`.
pub fn parity_split(f: &dyn Fn(f64) -> Complex64, r: f64) -> (Complex64, Complex64) {
    let (p, m) = (f(r), f(-r));
    ((p + m) / SQRT_2, (p - m) / SQRT_2)
}

/// Inverse of [`parity_split`].
pub fn parity_join(g0: Complex64, g1: Complex64, x: f64) -> Complex64 {
    let s = if x < 0.0 { -1.0 } else { 1.0 };
    (g0 + g1 * s) / SQRT_2
}
