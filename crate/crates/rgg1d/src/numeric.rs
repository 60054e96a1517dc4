//! Shared numeric plumbing: stable log-space evaluation of probability
//! products and deterministic seed derivation.

use crate::error::{Error, Result};

/// Factors below this threshold switch product accumulation to log space.
pub(crate) const UNDERFLOW_SWITCH: f64 = 1e-300;

/// Clamping a probability by more than this is treated as a bug, not rounding.
pub(crate) const CLAMP_TOLERANCE: f64 = 1e-9;

/// ln(1 - e^{-x}) for x > 0, stable in both the x -> 0 and x -> inf regimes.
pub(crate) fn ln_one_minus_exp_neg(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x > std::f64::consts::LN_2 {
        (-(-x).exp()).ln_1p()
    } else {
        (-(-x).exp_m1()).ln()
    }
}

/// Clamps a computed probability to [0, 1].
///
/// Excursions beyond `CLAMP_TOLERANCE` indicate a formula or accumulation bug
/// and are reported as a consistency error rather than silently truncated.
pub(crate) fn clamp_probability(p: f64, context: &str) -> Result<f64> {
    if !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&p) {
        return Err(Error::Consistency(format!(
            "{context}: probability {p} outside [0,1] beyond tolerance"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Product of probability factors indexed by `range`, switching to log-space
/// accumulation as soon as any factor or running product drops below
/// `UNDERFLOW_SWITCH`.
pub(crate) fn stable_product(range: impl Iterator<Item = f64> + Clone) -> f64 {
    let mut prod = 1.0_f64;
    for f in range.clone() {
        if f < UNDERFLOW_SWITCH || prod < UNDERFLOW_SWITCH {
            let log_sum: f64 = range.map(|g| g.ln()).sum();
            return log_sum.exp();
        }
        prod *= f;
    }
    prod
}

/// SplitMix64 step, used to derive independent sub-seeds from a master seed.
pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for the `index`-th cell of an experiment grid.
pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_one_minus_exp_neg_matches_naive_in_safe_range() {
        for &x in &[0.3_f64, 0.7, 1.0, 3.0, 20.0] {
            let naive = (1.0 - (-x).exp()).ln();
            assert!((ln_one_minus_exp_neg(x) - naive).abs() < 1e-14);
        }
    }

    #[test]
    fn ln_one_minus_exp_neg_tiny_argument() {
        // 1 - e^{-1e-12} ~ 1e-12; the naive form loses all digits.
        let v = ln_one_minus_exp_neg(1e-12);
        assert!((v - (1e-12_f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn stable_product_switches_to_log_space() {
        // 31 factors of 1e-10: the running product crosses the switch
        // threshold and the value lands in the subnormal range.
        let factors = std::iter::repeat_n(1e-10, 31);
        let p = stable_product(factors);
        assert!(p > 0.0);
        assert!((p.ln() - 31.0 * (1e-10_f64).ln()).abs() < 1e-6);
        // agreement with direct multiplication in the normal range
        let xs = [0.9, 0.5, 1e-3, 0.99];
        let direct: f64 = xs.iter().product();
        assert!((stable_product(xs.iter().copied()) - direct).abs() < 1e-18);
    }

    #[test]
    fn clamp_rejects_gross_violations() {
        assert!(clamp_probability(1.0 + 1e-12, "t").is_ok());
        assert!(clamp_probability(1.5, "t").is_err());
        assert!(clamp_probability(-1e-3, "t").is_err());
    }

    #[test]
    fn derive_seed_is_deterministic_and_spread() {
        assert_eq!(derive_seed(42, 0), derive_seed(42, 0));
        assert_ne!(derive_seed(42, 0), derive_seed(42, 1));
        assert_ne!(derive_seed(42, 0), derive_seed(43, 0));
    }
}
