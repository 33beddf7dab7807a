use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Codeword error rate with a Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CerEstimate {
    pub trials: u64,
    pub errors: u64,
    pub cer: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
}

impl CerEstimate {
    pub fn new(trials: u64, errors: u64) -> Self {
        assert!(trials > 0 && errors <= trials, "need 0 <= errors <= trials, trials > 0");
        let n = trials as f64;
        let p = errors as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        CerEstimate {
            trials,
            errors,
            cer: p,
            ci95_lo: (center - half).max(0.0).min(p),
            ci95_hi: (center + half).min(1.0).max(p),
        }
    }

    /// Binomial standard error of the point estimate.
    pub fn std_error(&self) -> f64 {
        (self.cer * (1.0 - self.cer) / self.trials as f64).sqrt()
    }

    pub fn overlaps(&self, other: &CerEstimate) -> bool {
        self.ci95_lo <= other.ci95_hi && other.ci95_lo <= self.ci95_hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn wilson_reference_values() {
        // 10/100: textbook Wilson interval (0.0552, 0.1744)
        let e = CerEstimate::new(100, 10);
        assert_abs_diff_eq!(e.ci95_lo, 0.05522, epsilon = 1e-4);
        assert_abs_diff_eq!(e.ci95_hi, 0.17437, epsilon = 1e-4);
        // zero errors: upper bound z²/(n + z²)
        let e = CerEstimate::new(1000, 0);
        assert_eq!(e.ci95_lo, 0.0);
        assert_abs_diff_eq!(e.ci95_hi, Z95 * Z95 / (1000.0 + Z95 * Z95), epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn interval_contains_estimate(trials in 1u64..10_000_000, frac in 0.0f64..=1.0) {
            let errors = ((trials as f64) * frac).floor() as u64;
            let e = CerEstimate::new(trials, errors);
            prop_assert!(e.ci95_lo <= e.cer && e.cer <= e.ci95_hi);
            prop_assert!(e.ci95_lo >= 0.0 && e.ci95_hi <= 1.0);
        }
    }
}
