use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::dunkl::MultiplicityData;
use crate::error::{KappaError, Result};
use crate::specfun::{gamma_ln, golub_welsch, recurrence, WeightSpec};

/// Largest supported basis size.
pub const MAX_MODES: usize = 512;

/// Basis scale relative to the one that diagonalizes the operator.
pub const DEFAULT_SCALE_RATIO: f64 = 1.1;

/// Basis size used when none is requested.
pub const DEFAULT_MODES: usize = 96;

/// Orthonormal basis `φ_j(r) = C r^m p_j(t) e^{-t/2}`, `t = β r^a`, of the
/// degree-`m` sector of `L²(r^{2⟨k⟩+N+a-3} dr)`, where `p_j` are the
/// orthonormal polynomials for `t^α e^{-t}`, `α = (2m + 2⟨k⟩ + N - 2)/a`.
#[derive(Clone, Debug)]
pub struct LaguerreBasis {
    pub m: usize,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    /// Gauss nodes in `t`.
    pub t: Vec<f64>,
    /// `ln √W_q`, kept in log form since the weights underflow for large `n`.
    pub ln_sqrt_w: Vec<f64>,
    /// `Φ[q][j] = √W_q p_j(t_q)`; an orthogonal matrix.
    pub phi: DMatrix<f64>,
    /// `√W_q p_j'(t_q)`.
    pub dphi: DMatrix<f64>,
    ln_norm: f64,
}

impl LaguerreBasis {
    pub fn new(md: &MultiplicityData, m: usize, n: usize, beta: f64) -> Result<Self> {
        let a = md.a();
        let alpha = (2.0 * m as f64 + md.lambda()) / a;
        if !(alpha > -1.0) {
            return Err(KappaError::NotAdmissible(alpha));
        }
        let (diag, off, mu0) = recurrence(WeightSpec::GenLaguerre { alpha }, n)?;
        let (t, _, _) = golub_welsch(&diag, &off, mu0)?;
        let mut phi = DMatrix::zeros(n, n);
        let mut dphi = DMatrix::zeros(n, n);
        let mut ln_sqrt_w = Vec::with_capacity(n);
        let p0 = (-0.5 * gamma_ln(alpha + 1.0)?).exp();
        for (q, &tq) in t.iter().enumerate() {
            // Orthonormal recurrence with running rescaling; s tracks -p_j'.
            let mut p = vec![0.0; n];
            let mut s = vec![0.0; n];
            let mut ln_scale = 0.0;
            p[0] = p0;
            for j in 0..n - 1 {
                let jf = j as f64;
                let prev = if j > 0 {
                    (jf * (jf + alpha)).sqrt() * p[j - 1]
                } else {
                    0.0
                };
                p[j + 1] = ((tq - (2.0 * jf + alpha + 1.0)) * p[j] - prev)
                    / ((jf + 1.0) * (jf + 1.0 + alpha)).sqrt();
                s[j + 1] = -(s[j] + p[j]) * ((jf + 1.0) / (jf + 1.0 + alpha)).sqrt();
                let big = p[j + 1].abs().max(s[j + 1].abs());
                if big > 1e150 {
                    for v in p.iter_mut().chain(s.iter_mut()) {
                        *v /= big;
                    }
                    ln_scale += big.ln();
                }
            }
            let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            for j in 0..n {
                phi[(q, j)] = p[j] / norm;
                dphi[(q, j)] = -s[j] / norm;
            }
            ln_sqrt_w.push(-(norm.ln() + ln_scale));
        }
        let ln_norm = 0.5 * (a.ln() + (alpha + 1.0) * beta.ln());
        Ok(LaguerreBasis {
            m,
            a,
            alpha,
            beta,
            n,
            t,
            ln_sqrt_w,
            phi,
            dphi,
            ln_norm,
        })
    }

    /// Radial coordinate of node `q`.
    pub fn r_node(&self, q: usize) -> f64 {
        (self.t[q] / self.beta).powf(1.0 / self.a)
    }

    /// `φ_0(r), …, φ_{n-1}(r)`.
    pub fn eval(&self, r: f64) -> Vec<f64> {
        let n = self.n;
        let alpha = self.alpha;
        if r == 0.0 && self.m > 0 {
            return vec![0.0; n];
        }
        let t = self.beta * r.powf(self.a);
        let rm = if self.m == 0 {
            0.0
        } else {
            self.m as f64 * r.ln()
        };
        // Fold the envelope into the scale so large t stays finite.
        let mut ln_scale = self.ln_norm + rm - 0.5 * t - 0.5 * ln_gamma(alpha + 1.0);
        let mut p = vec![0.0; n];
        p[0] = 1.0;
        for j in 0..n - 1 {
            let jf = j as f64;
            let prev = if j > 0 {
                (jf * (jf + alpha)).sqrt() * p[j - 1]
            } else {
                0.0
            };
            p[j + 1] = ((t - (2.0 * jf + alpha + 1.0)) * p[j] - prev)
                / ((jf + 1.0) * (jf + 1.0 + alpha)).sqrt();
            let big = p[j + 1].abs();
            if big > 1e150 {
                for v in p.iter_mut() {
                    *v /= big;
                }
                ln_scale += big.ln();
            }
        }
        let f = ln_scale.exp();
        p.iter().map(|v| v * f).collect()
    }

    /// Coefficients of `g` by Gauss projection.
    pub fn project(&self, g: &dyn Fn(f64) -> Complex64) -> Vec<Complex64> {
        let y: Vec<Complex64> = (0..self.n)
            .map(|q| {
                let r = self.r_node(q);
                let ln =
                    self.ln_sqrt_w[q] + 0.5 * self.t[q] - self.ln_norm - self.m as f64 * r.ln();
                g(r) * ln.exp()
            })
            .collect();
        (0..self.n)
            .map(|j| (0..self.n).map(|q| y[q] * self.phi[(q, j)]).sum())
            .collect()
    }

    /// `Σ c_j φ_j(r)`.
    pub fn synthesize(&self, c: &[Complex64], r: f64) -> Complex64 {
        self.eval(r).iter().zip(c).map(|(b, c)| c * b).sum()
    }

    /// Galerkin matrix of multiplication by `r^a`.
    pub fn r_power_matrix(&self) -> DMatrix<f64> {
        let tphi = DMatrix::from_fn(self.n, self.n, |q, j| self.t[q] * self.phi[(q, j)]);
        self.phi.transpose() * tphi / self.beta
    }

    /// Galerkin matrix of `r^{2-a} Δ_k` restricted to the sector.
    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        let d = &self.dphi - &self.phi * 0.5;
        let td = DMatrix::from_fn(self.n, self.n, |q, j| self.t[q] * d[(q, j)]);
        -(d.transpose() * td) * (self.a * self.a * self.beta)
    }

    /// Galerkin matrix of the radial Euler operator `r d/dr`.
    pub fn euler_matrix(&self) -> DMatrix<f64> {
        let d = &self.dphi - &self.phi * 0.5;
        let td = DMatrix::from_fn(self.n, self.n, |q, j| self.t[q] * d[(q, j)]);
        self.phi.transpose() * td * self.a + DMatrix::identity(self.n, self.n) * self.m as f64
    }
}

fn ln_gamma(x: f64) -> f64 {
    gamma_ln(x).expect("positive argument")
}

/// Eigen-decomposition of the sector operator of `Δ_{k,a}` in a [`LaguerreBasis`].
#[derive(Clone, Debug)]
pub struct SectorSpectralModel {
    pub md: MultiplicityData,
    pub basis: LaguerreBasis,
    /// Descending; all negative.
    pub eigenvalues: Vec<f64>,
    /// Column `i` holds the basis coefficients of mode `i`.
    pub eigenvectors: DMatrix<f64>,
    /// Number of leading modes considered resolved.
    pub retained: usize,
}

/// Basis scale used by [`build_model`].
pub fn default_beta(md: &MultiplicityData) -> f64 {
    DEFAULT_SCALE_RATIO * 2.0 / md.a()
}

/// Sector model with `n` modes and the default basis scale.
pub fn build_model(md: &MultiplicityData, m: usize, n: usize) -> Result<SectorSpectralModel> {
    build_model_with(md, m, n, default_beta(md))
}

pub fn build_model_with(
    md: &MultiplicityData,
    m: usize,
    n: usize,
    beta: f64,
) -> Result<SectorSpectralModel> {
    check_request(md, m, n)?;
    let basis = LaguerreBasis::new(md, m, n, beta)?;
    let op = operator_matrix(&basis);
    let sym = (&op + op.transpose()) * 0.5;
    let asym = (&op - op.transpose()).abs().max();
    if asym > 1e-8 * sym.abs().max() {
        log::warn!("sector operator asymmetry {asym:e} before symmetrization");
    }
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or_else(|| {
        KappaError::Eigen(format!(
            "symmetric eigensolver did not converge (n = {n}, m = {m})"
        ))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        // Fix the sign so the leading coefficient is positive.
        let lead = v
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if acc.abs() >= x.abs() { acc } else { x });
        let sign = if v[0] < 0.0 || (v[0] == 0.0 && lead < 0.0) {
            -1.0
        } else {
            1.0
        };
        eigenvectors.set_column(col, &(v * sign));
    }
    Ok(SectorSpectralModel {
        md: md.clone(),
        basis,
        eigenvalues,
        eigenvectors,
        retained: 2 * n / 3,
    })
}

pub(crate) fn check_request(md: &MultiplicityData, m: usize, n: usize) -> Result<()> {
    if n == 0 || n > MAX_MODES {
        return Err(KappaError::Domain(format!(
            "basis size must be in 1..={MAX_MODES}, got {n}"
        )));
    }
    if md.dim() == 1 && m > 1 {
        return Err(KappaError::Domain(format!(
            "R^1 has only sectors 0 and 1, got {m}"
        )));
    }
    Ok(())
}

fn operator_matrix(basis: &LaguerreBasis) -> DMatrix<f64> {
    basis.laplacian_matrix() - basis.r_power_matrix()
}

impl SectorSpectralModel {
    pub fn m(&self) -> usize {
        self.basis.m
    }

    pub fn n(&self) -> usize {
        self.basis.n
    }

    /// Galerkin matrix of the sector operator of `Δ_{k,a}`.
    pub fn operator_matrix(&self) -> DMatrix<f64> {
        operator_matrix(&self.basis)
    }

    pub fn to_modes(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| c[j] * self.eigenvectors[(j, i)]).sum())
            .collect()
    }

    pub fn from_modes(&self, d: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .map(|j| (0..n).map(|i| d[i] * self.eigenvectors[(j, i)]).sum())
            .collect()
    }

    /// Values of mode `i` at `r`.
    pub fn mode_value(&self, i: usize, r: f64) -> f64 {
        let b = self.basis.eval(r);
        (0..self.n())
            .map(|j| b[j] * self.eigenvectors[(j, i)])
            .sum()
    }

    /// `|(Δ_{k,a} - λ_i) ψ_i|` for each retained mode, with the operator
    /// applied exactly in a basis one larger than the model's.
    pub fn eigen_residuals(&self) -> Result<Vec<f64>> {
        let n = self.n();
        let big = LaguerreBasis::new(&self.md, self.m(), n + 1, self.basis.beta)?;
        let op = operator_matrix(&big);
        // The n-term bases agree up to rounding since p_j does not depend on n.
        Ok((0..self.retained)
            .map(|i| {
                let v = self.eigenvectors.column(i);
                let mut acc: f64 = 0.0;
                for row in 0..=n {
                    let mut s = 0.0;
                    for j in 0..n {
                        s += op[(row, j)] * v[j];
                    }
                    if row < n {
                        s -= self.eigenvalues[i] * v[row];
                    }
                    acc += s * s;
                }
                acc.sqrt()
            })
            .collect())
    }
}
