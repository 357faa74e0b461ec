//! Classical orthogonal polynomials by three-term recurrence.

/// Generalized Laguerre polynomial `L_n^{(α)}(x)`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    *laguerre_all(n, alpha, x).last().unwrap()
}

/// `L_0^{(α)}(x), …, L_n^{(α)}(x)`.
pub fn laguerre_all(n: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Gegenbauer polynomial `C_n^{(λ)}(x)`.
pub fn gegenbauer(n: usize, lambda: f64, x: f64) -> f64 {
    *gegenbauer_all(n, lambda, x).last().unwrap()
}

/// `C_0^{(λ)}(x), …, C_n^{(λ)}(x)`.
pub fn gegenbauer_all(n: usize, lambda: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(2.0 * lambda * x);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 * (kf + lambda) * x * out[k] - (kf + 2.0 * lambda - 1.0) * out[k - 1])
            / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Orthonormal Hermite functions `h_0(x), …, h_{n-1}(x)` on `L²(R)`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(h0);
    if n == 1 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * h0);
    for k in 1..n - 1 {
        let kf = k as f64;
        let next = ((2.0 / (kf + 1.0)).sqrt() * x * out[k]) - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn laguerre_low_orders() {
        for &(a, x) in &[(0.0, 0.3), (1.5, 2.0), (-0.5, 7.0)] {
            assert_eq!(laguerre(0, a, x), 1.0);
            assert_abs_diff_eq!(laguerre(1, a, x), 1.0 + a - x, epsilon = 1e-15);
            let l2 = 0.5 * (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0));
            assert_abs_diff_eq!(laguerre(2, a, x), l2, epsilon = 1e-13);
        }
        for n in 0..20 {
            assert_abs_diff_eq!(laguerre(n, 0.0, 0.0), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gegenbauer_low_orders() {
        assert_eq!(gegenbauer(0, 0.7, 0.2), 1.0);
        assert_abs_diff_eq!(gegenbauer(1, 0.7, 0.2), 2.0 * 0.7 * 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(gegenbauer(2, 1.0, 0.0), -1.0, epsilon = 1e-15);
        // λ = 1/2 gives Legendre: P_3(x) = (5x³ - 3x)/2.
        let x = 0.37;
        assert_abs_diff_eq!(
            gegenbauer(3, 0.5, x),
            0.5 * (5.0 * x * x * x - 3.0 * x),
            epsilon = 1e-14
        );
    }

    #[test]
    fn hermite_functions_orthonormal() {
        // Trapezoid on a wide grid is spectrally accurate for Gaussians.
        let n = 12;
        let h = 0.02;
        let mut gram = vec![0.0; n * n];
        let mut x = -15.0;
        while x <= 15.0 {
            let v = hermite_functions(n, x);
            for i in 0..n {
                for j in 0..n {
                    gram[i * n + j] += h * v[i] * v[j];
                }
            }
            x += h;
        }
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[i * n + j], want, epsilon = 1e-10);
            }
        }
    }
}
