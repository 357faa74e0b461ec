use crate::error::{KappaError, Result};

// Lanczos coefficients, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `ln Γ(x)` for `x > 0`.
pub fn gamma_ln(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(KappaError::Domain(format!(
            "gamma_ln requires x > 0, got {x}"
        )));
    }
    Ok(ln_gamma_pos(x))
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    gamma_ln(x).map(f64::exp)
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Shift up; the Lanczos sum is accurate for x >= 1/2.
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn integer_and_half_values() {
        assert_abs_diff_eq!(gamma_ln(1.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gamma_ln(2.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gamma_ln(5.0).unwrap(), 24f64.ln(), epsilon = 1e-13);
        // Duplication formula at x = 1/2: Γ(1/2)Γ(1) = √π Γ(1).
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_abs_diff_eq!(gamma_ln(0.5).unwrap(), sqrt_pi.ln(), epsilon = 1e-14);
    }

    #[test]
    fn factorials_relative_accuracy() {
        let mut fact = 1.0f64;
        for n in 1..60 {
            fact *= n as f64;
            let got = gamma_ln(n as f64 + 1.0).unwrap();
            assert!(
                ((got - fact.ln()) / fact.ln().max(1.0)).abs() < 1e-13,
                "n = {n}"
            );
        }
    }

    #[test]
    fn rejects_non_positive() {
        assert!(gamma_ln(0.0).is_err());
        assert!(gamma_ln(-1.5).is_err());
        assert!(gamma_ln(f64::NAN).is_err());
    }

    proptest! {
        // Legendre duplication: ln Γ(x) + ln Γ(x+1/2) = (1-2x) ln 2 + ln √π + ln Γ(2x).
        #[test]
        fn duplication_formula(x in 0.05f64..40.0) {
            let lhs = gamma_ln(x).unwrap() + gamma_ln(x + 0.5).unwrap();
            let rhs = (1.0 - 2.0 * x) * 2f64.ln()
                + 0.5 * std::f64::consts::PI.ln()
                + gamma_ln(2.0 * x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }

        #[test]
        fn recurrence(x in 0.05f64..50.0) {
            let lhs = gamma_ln(x + 1.0).unwrap();
            let rhs = gamma_ln(x).unwrap() + x.ln();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }
}
