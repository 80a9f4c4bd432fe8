use serde::Serialize;

use super::quadrature::{gaussian_expectation, HERMITE_NODES};
use crate::discretion::SignalRule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoutOutcome {
    /// Observed gap `Ĝ = G + η`.
    pub signal: f64,
    pub payout: f64,
    /// The payout falls short of the true gap.
    pub default: bool,
}

/// Realized rescue `1{Ĝ > 0}·min{β(Ĝ), b(θ̂), Ĝ}` for a true gap and one
/// noise draw; `cap` is the cap at the reported type.
pub fn simulate_payout(gap: f64, cap: f64, rule: &SignalRule, eta: f64) -> PayoutOutcome {
    let signal = gap + eta;
    let payout = if signal > 0.0 { rule.payout(signal).min(cap).min(signal) } else { 0.0 };
    PayoutOutcome { signal, payout, default: payout < gap }
}

/// `E_η[p]` under Gaussian audit noise of scale `sigma`.
pub fn expected_payout(gap: f64, cap: f64, rule: &SignalRule, sigma: f64) -> f64 {
    gaussian_expectation(sigma, HERMITE_NODES, |eta| simulate_payout(gap, cap, rule, eta).payout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{PolicyPrimitives, RescueCost};

    #[test]
    fn nonpositive_signal_pays_nothing() {
        let rule = SignalRule::single_threshold(-1.0, 0.5).unwrap();
        assert_eq!(simulate_payout(0.3, 0.8, &rule, -0.3).payout, 0.0);
        assert_eq!(simulate_payout(-0.2, 0.8, &rule, 0.0).payout, 0.0);
    }

    #[test]
    fn cap_binds_under_threshold_rule() {
        let rule = SignalRule::single_threshold(0.0, 0.5).unwrap();
        let out = simulate_payout(2.0, 0.3, &rule, 0.0);
        assert_eq!(out.payout, 0.3);
        assert!(out.default);
    }

    #[test]
    fn discretionary_rule_payout_and_default() {
        let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8).unwrap().with_discretion(0.5, 1.0).unwrap();
        let cost = RescueCost::quadratic(0.2, 1.0).unwrap();
        let rule = SignalRule::discretionary(&prim, &cost).unwrap();
        // Ĝ = 0.5 = G + η, hand value (0.5 − 0.2)/2.
        let out = simulate_payout(0.4, 0.8, &rule, 0.1);
        assert!((out.payout - 0.15).abs() < 1e-15);
        assert!(out.default);
        let covered = simulate_payout(0.1, 0.8, &rule, 0.4);
        assert!((covered.payout - 0.15).abs() < 1e-15);
        assert!(!covered.default);
    }

    #[test]
    fn expected_payout_without_noise_limit() {
        let rule = SignalRule::single_threshold(0.0, 0.5).unwrap();
        let e = expected_payout(3.0, 0.8, &rule, 1e-3);
        assert!((e - 0.5).abs() < 1e-12);
    }
}
