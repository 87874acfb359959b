//! Property tests for the posterior arithmetic invariants.

use cascade_core::bayes::{llr, posterior_from_net};
use proptest::prelude::*;

proptest! {
    /// posterior(q, d) + posterior(q, -d) = 1 for every accuracy and count.
    #[test]
    fn posterior_is_symmetric_under_sign_flip(
        q in 0.500001f64..0.999999,
        d in -6i32..=6,
    ) {
        let forward = posterior_from_net(q, d).unwrap();
        let backward = posterior_from_net(q, -d).unwrap();
        prop_assert!((forward + backward - 1.0).abs() < 1e-12);
    }

    /// The posterior is strictly increasing in d for fixed q...
    #[test]
    fn posterior_increases_with_net_count(q in 0.51f64..0.99, d in -5i32..=5) {
        let lower = posterior_from_net(q, d).unwrap();
        let upper = posterior_from_net(q, d + 1).unwrap();
        prop_assert!(upper > lower);
    }

    /// ...and strictly increasing in q for fixed positive d.
    #[test]
    fn posterior_increases_with_accuracy(q in 0.51f64..0.98, d in 1i32..=5) {
        let lower = posterior_from_net(q, d).unwrap();
        let upper = posterior_from_net(q + 0.01, d).unwrap();
        prop_assert!(upper > lower);
    }

    /// logit(posterior(q, d)) = d * llr(q) to within 1e-12. The identity is
    /// algebraic; in floats the logit amplifies rounding by 1/(1 - p), so it
    /// is asserted over the operating range (q <= 0.8, |d| <= 4) where
    /// 1 - p stays far from the precision floor.
    #[test]
    fn posterior_logit_is_additive_in_signals(
        q in 0.500001f64..=0.8,
        d in -4i32..=4,
    ) {
        let posterior = posterior_from_net(q, d).unwrap();
        let logit = (posterior / (1.0 - posterior)).ln();
        prop_assert!((logit - f64::from(d) * llr(q).unwrap()).abs() < 1e-12);
    }

    /// Posteriors never leave [0, 1], and stay strictly inside up to the
    /// float saturation boundary: past ~53 bits of log-odds
    /// (|d| * llr(q) > 53 ln 2) the true value sits closer to 1 than any
    /// representable double, so equality with the boundary is correct there.
    #[test]
    fn posterior_stays_in_open_unit_interval(q in 0.500001f64..0.999999, d in -6i32..=6) {
        let p = posterior_from_net(q, d).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        if f64::from(d.abs()) * llr(q).unwrap() < 36.0 {
            prop_assert!(p > 0.0 && p < 1.0);
        }
    }
}

/// The additivity identity at the three built-in accuracies, every count the
/// designs can reach.
#[test]
fn posterior_logit_is_additive_at_preset_accuracies() {
    for q in [0.55, 0.667, 0.70] {
        for d in -4i32..=4 {
            let posterior = posterior_from_net(q, d).unwrap();
            let logit = (posterior / (1.0 - posterior)).ln();
            assert!(
                (logit - f64::from(d) * llr(q).unwrap()).abs() < 1e-12,
                "q={q} d={d}"
            );
        }
    }
}
