//! Election thresholds.
//!
//! An eligible item is elected at step `t` when a uniform draw falls below its
//! threshold. With recommendation probability `p` the threshold grows over a
//! window of `ceil(1/p)` steps, from `p` at the window start to certainty at
//! its end, so that every item is elected about once per window.

use crate::error::{Error, Result};

/// Window length `ceil(1/p)`, at least one step.
pub fn window_len(p: f64) -> u64 {
    if !(p > 0.0) {
        return u64::MAX;
    }
    // Absorb rounding in 1/p so that p = 0.05 gives 20, not 21.
    let w = (1.0 / p - 1e-9).ceil();
    if w < 1.0 {
        1
    } else if w >= u64::MAX as f64 {
        u64::MAX
    } else {
        w as u64
    }
}

/// `p / (1 - p * (t mod ceil(1/p)))`, capped at 1.
///
/// The cap only binds when `1/p` is not an integer: the last step of the
/// window then has `p * (t mod w)` above `1 - p`.
pub fn election_threshold(p: f64, t: u64) -> f64 {
    if !(p > 0.0) {
        return 0.0;
    }
    let phase = (t % window_len(p)) as f64;
    (p / (1.0 - p * phase)).min(1.0)
}

pub fn threshold_basic(p: f64, t: u64, eligible: bool) -> f64 {
    if eligible {
        election_threshold(p, t)
    } else {
        0.0
    }
}

/// Maps quality from `[q_min, q_max]` onto `[0, 1]`.
pub fn normalize_quality(q: f64, q_min: f64, q_max: f64) -> Result<f64> {
    if !(q_min < q_max) {
        return Err(Error::Contract(format!("empty quality range [{q_min}, {q_max}]")));
    }
    if !(q >= q_min && q <= q_max) {
        return Err(Error::Contract(format!(
            "quality {q} outside [{q_min}, {q_max}]"
        )));
    }
    Ok((q - q_min) / (q_max - q_min))
}

pub fn threshold_priority(p: f64, t: u64, eligible: bool, q_norm: f64) -> f64 {
    threshold_basic(p, t, eligible) * q_norm
}

/// Per-pool recommendation probabilities of the heterogeneous variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeteroProbs {
    pub high: f64,
    pub low: f64,
}

/// Splits `p` between the high and low pools. `high_fraction` is the share of
/// items in the high pool; high items are favored by a factor `1 + lambda`
/// while the expected number of elections per step stays `p * M`.
pub fn hetero_probs(p: f64, lambda: f64, high_fraction: f64) -> HeteroProbs {
    let low = p / (1.0 + lambda * high_fraction);
    HeteroProbs {
        high: low * (1.0 + lambda),
        low,
    }
}

pub fn threshold_hetero(probs: HeteroProbs, t: u64, is_high: bool, eligible: bool) -> f64 {
    let p = if is_high { probs.high } else { probs.low };
    threshold_basic(p, t, eligible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn window_lengths() {
        assert_eq!(window_len(0.05), 20);
        assert_eq!(window_len(0.1), 10);
        assert_eq!(window_len(0.15), 7);
        assert_eq!(window_len(0.125), 8);
        assert_eq!(window_len(1.0), 1);
        assert_eq!(window_len(0.7), 2);
        for k in 1..=100u32 {
            let p = k as f64 / 100.0;
            assert_eq!(window_len(p), (100 + k as u64 - 1) / k as u64, "k = {k}");
        }
    }

    #[test]
    fn basic_threshold_examples() {
        assert!((threshold_basic(0.05, 20, true) - 0.05).abs() < EPS);
        assert!((threshold_basic(0.05, 0, true) - 0.05).abs() < EPS);
        assert_eq!(threshold_basic(0.05, 7, false), 0.0);
        assert!((threshold_basic(0.05, 10, true) - 0.1).abs() < EPS);
        assert!((threshold_basic(0.05, 30, true) - 0.1).abs() < EPS);
        assert!((threshold_basic(0.05, 19, true) - 1.0).abs() < EPS);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_quality(3.0, -3.0, 3.0).unwrap(), 1.0);
        assert_eq!(normalize_quality(-3.0, -3.0, 3.0).unwrap(), 0.0);
        assert_eq!(normalize_quality(0.0, -3.0, 3.0).unwrap(), 0.5);
        assert!(normalize_quality(3.1, -3.0, 3.0).is_err());
        assert!(normalize_quality(-3.5, -3.0, 3.0).is_err());
        assert!(normalize_quality(f64::NAN, -3.0, 3.0).is_err());
    }

    #[test]
    fn priority_threshold_examples() {
        let qn = |q| normalize_quality(q, -3.0, 3.0).unwrap();
        assert!((threshold_priority(0.05, 20, true, qn(3.0)) - 0.05).abs() < EPS);
        for t in 0..40 {
            assert_eq!(threshold_priority(0.05, t, true, qn(-3.0)), 0.0);
        }
        assert!((threshold_priority(0.05, 19, true, qn(0.0)) - 0.5).abs() < EPS);
    }

    #[test]
    fn hetero_prob_examples() {
        let off = hetero_probs(0.05, 0.0, 0.3);
        assert_eq!((off.high, off.low), (0.05, 0.05));

        let probs = hetero_probs(0.05, 2.0, 0.1);
        assert!((probs.low - 0.05 / 1.2).abs() < EPS);
        assert!((probs.low - 0.041_666_666_666_666_664).abs() < 1e-15);
        assert!((probs.high - 0.125).abs() < EPS);

        let all_high = hetero_probs(0.05, 3.0, 1.0);
        assert!((all_high.high - 0.05).abs() < EPS);
        assert!((all_high.low - 0.0125).abs() < EPS);
    }

    #[test]
    fn hetero_threshold_examples() {
        let probs = HeteroProbs { high: 0.125, low: 0.05 };
        assert!((threshold_hetero(probs, 8, true, true) - 0.125).abs() < EPS);
        assert!((threshold_hetero(probs, 4, true, true) - 0.25).abs() < EPS);
        assert_eq!(threshold_hetero(probs, 4, true, false), 0.0);
        assert!((threshold_hetero(probs, 10, false, true) - 0.1).abs() < EPS);
    }

    #[test]
    fn hetero_reduces_to_basic_without_heterogeneity() {
        let probs = hetero_probs(0.05, 0.0, 0.37);
        for t in 0..100 {
            for eligible in [true, false] {
                for high in [true, false] {
                    assert_eq!(
                        threshold_hetero(probs, t, high, eligible),
                        threshold_basic(0.05, t, eligible)
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn thresholds_lie_in_unit_interval(
            p in 1e-6f64..=1.0,
            t in 0u64..1_000_000,
            q in -3.0f64..=3.0,
            lambda in 0.0f64..1e6,
            f in 0.0f64..=1.0,
        ) {
            let b = threshold_basic(p, t, true);
            prop_assert!((0.0..=1.0).contains(&b));
            let qn = normalize_quality(q, -3.0, 3.0).unwrap();
            let pr = threshold_priority(p, t, true, qn);
            prop_assert!((0.0..=1.0).contains(&pr));
            let probs = hetero_probs(p, lambda, f);
            for high in [true, false] {
                let h = threshold_hetero(probs, t, high, true);
                prop_assert!((0.0..=1.0).contains(&h), "p={} t={} h={}", p, t, h);
            }
        }

        #[test]
        fn priority_is_monotone_in_quality(p in 1e-4f64..=1.0, t in 0u64..10_000, a in -3.0f64..=3.0, b in -3.0f64..=3.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let tl = threshold_priority(p, t, true, normalize_quality(lo, -3.0, 3.0).unwrap());
            let th = threshold_priority(p, t, true, normalize_quality(hi, -3.0, 3.0).unwrap());
            prop_assert!(th >= tl);
        }

        #[test]
        fn hetero_ratio_is_one_plus_lambda(p in 1e-4f64..=1.0, lambda in 0.0f64..1e4, f in 0.0f64..=1.0) {
            let probs = hetero_probs(p, lambda, f);
            prop_assert!((probs.high / probs.low - (1.0 + lambda)).abs() <= 1e-9 * (1.0 + lambda));
            // expected elections per step are preserved
            let mix = f * probs.high + (1.0 - f) * probs.low;
            prop_assert!((mix - p).abs() <= 1e-12);
        }
    }
}
