//! Binomial helpers for Monte Carlo summaries.

/// Wilson score interval for `successes` out of `trials` at `z` standard
/// deviations.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Standard deviation of a binomial proportion.
pub fn proportion_sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// `(lo, hi)` band of `z` standard deviations around `p` for a proportion
/// measured over `trials`, clipped to [0, 1].
pub fn proportion_band(p: f64, trials: usize, z: f64) -> (f64, f64) {
    let s = z * proportion_sigma(p, trials);
    ((p - s).max(0.0), (p + s).min(1.0))
}

/// Two-proportion z statistic with pooled variance.
pub fn two_proportion_z(x1: usize, n1: usize, x2: usize, n2: usize) -> f64 {
    let (p1, p2) = (x1 as f64 / n1 as f64, x2 as f64 / n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        0.0
    } else {
        (p1 - p2) / se
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100, 1.96);
        assert!(lo < 0.3 && 0.3 < hi);
        // reference values for 30/100 at z = 1.96
        assert!((lo - 0.2189).abs() < 1e-3 && (hi - 0.3958).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 10_000, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 5e-4);
    }

    #[test]
    fn band_matches_hand_computation() {
        let p = 2f64.powi(-10);
        let (lo, hi) = proportion_band(p, 1_000_000, 3.0);
        assert!((hi - p - 9.37e-5).abs() < 1e-6);
        assert!((p - lo - 9.37e-5).abs() < 1e-6);
    }

    #[test]
    fn equal_proportions_have_zero_z() {
        assert_eq!(two_proportion_z(10, 100, 10, 100), 0.0);
        assert_eq!(two_proportion_z(0, 100, 0, 100), 0.0);
    }
}
