mod common;

use common::appendix;
use proptest::prelude::*;
use rescuecap::discretion::ThresholdStep;
use rescuecap::simulation::{
    capmin_oracle, default_density, mc_run, mc_run_cap, simulate_payout, solve_effort, welfare_bruteforce,
    RevenueParams, SignalLaw,
};
use rescuecap::{fixed_point, leader_cost, mechanism, transfer_schedule, FixedPointOptions, GridSpec, SignalRule};

#[test]
fn monte_carlo_is_reproducible_and_stable_across_seeds() {
    let (dist, prim, cost) = appendix();
    let grid = GridSpec::default();
    let cap = mechanism::solve(&dist, &prim, &cost, 1.0, &grid).unwrap();
    let a = mc_run_cap(&cap, &dist, 200_000, 1, 30).unwrap();
    let b = mc_run_cap(&cap, &dist, 200_000, 1, 30).unwrap();
    assert_eq!(a, b);
    let mins: Vec<f64> = (0..10).map(|s| mc_run_cap(&cap, &dist, 200_000, 100 + s, 30).unwrap().theta_min.unwrap()).collect();
    let spread = mins.iter().cloned().fold(f64::MIN, f64::max) - mins.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.01, "{mins:?}");
}

#[test]
fn monte_carlo_report_invariants() {
    let (dist, prim, cost) = appendix();
    let r = mc_run(&dist, &prim, &cost, 1.0, 50_000, 3, 30, &GridSpec::default()).unwrap();
    assert!((0.0..=1.0).contains(&r.p_int));
    assert_eq!(r.bins.iter().map(|b| b.count).sum::<usize>(), 50_000);
    assert!(r.bins.windows(2).all(|w| (w[0].hi - w[1].lo).abs() < 1e-12));
    let filled: Vec<_> = r.bins.iter().filter(|b| b.count > 0).collect();
    assert!(filled.windows(2).all(|w| w[1].mean_b >= w[0].mean_b - w[0].stderr.max(w[1].stderr) - 1e-12));
}

#[test]
fn discretion_row_by_sampling() {
    let (dist, prim, cost) = appendix();
    let prim = prim.with_discretion(0.5, 1.0).unwrap();
    let sol = fixed_point(&dist, &prim, &cost, &FixedPointOptions::default()).unwrap();
    let r = mc_run_cap(&sol.cap, &dist, 200_000, 11, 30).unwrap();
    assert!((r.theta_min.unwrap() - 0.112).abs() < 0.005);
    assert!((r.theta_dagger.unwrap() - 0.562).abs() < 0.005);
    assert!((r.p_int - 0.258).abs() < 0.005);
}

#[test]
fn leader_cost_quadrature_matches_sampling() {
    let (dist, prim, cost) = appendix();
    let cap = mechanism::solve(&dist, &prim, &cost, 1.0, &GridSpec::default()).unwrap();
    let tr = transfer_schedule(&cap, &prim);
    let quad = leader_cost(&cap, &tr, &dist, &cost, &prim).unwrap();
    let mc = mc_run_cap(&cap, &dist, 200_000, 17, 30).unwrap();
    assert!((quad - mc.mean_rescue_cost).abs() < 1e-3, "{quad} vs {}", mc.mean_rescue_cost);
}

#[test]
fn effort_converges_across_support() {
    let (dist, prim, _) = appendix();
    let rule = SignalRule::threshold(vec![ThresholdStep { at: 0.1, level: 0.2 }, ThresholdStep { at: 0.4, level: 0.5 }]).unwrap();
    let nodes = GridSpec::default().nodes(&dist).unwrap();
    for phi_d in [0.3, 1.0, 3.0] {
        let p = prim.clone().with_effort(1.0, phi_d).unwrap();
        for &theta in nodes.iter().step_by(64) {
            let s = solve_effort(theta, 0.8, &p, &rule, RevenueParams::default()).unwrap();
            assert!(s.iterations <= 200);
            assert!(s.foc_residual <= 1e-8, "theta {theta}: {s:?}");
            assert!(s.effort >= 0.0);
        }
    }
}

#[test]
fn welfare_enumeration_matches_kkt() {
    let (_, prim, cost) = appendix();
    let types: Vec<(f64, f64)> = [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|&t| (t, 1.0)).collect();
    let r = welfare_bruteforce(&types, &prim, &cost, 1.0, 21).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.enumerated_cost >= r.kkt_cost - 1e-6);
    assert!((r.gap_bound - 0.5 * (0.8f64 / 20.0).powi(2)).abs() < 1e-15);
}

#[test]
fn welfare_rejects_oversized_inputs() {
    let (_, prim, cost) = appendix();
    let seven: Vec<(f64, f64)> = (0..7).map(|i| (i as f64, 1.0)).collect();
    assert!(welfare_bruteforce(&seven, &prim, &cost, 1.0, 21).is_err());
    assert!(welfare_bruteforce(&seven[..2], &prim, &cost, 1.0, 22).is_err());
}

fn threshold_rule() -> impl Strategy<Value = SignalRule> {
    prop::collection::vec((0.01..0.5f64, 0.0..0.4f64), 1..4).prop_map(|raw| {
        let (mut at, mut level) = (-0.2, 0.0);
        let steps = raw
            .into_iter()
            .map(|(da, dl)| {
                at += da;
                level += dl;
                ThresholdStep { at, level }
            })
            .collect();
        SignalRule::threshold(steps).unwrap()
    })
}

proptest! {
    #[test]
    fn payout_is_bounded_and_monotone(rule in threshold_rule(), gap in -1.0..2.0f64, eta in -0.5..0.5f64, cap in 0.0..0.8f64, bump in 0.0..0.5f64) {
        let out = simulate_payout(gap, cap, &rule, eta);
        prop_assert!(out.payout >= 0.0 && out.payout <= out.signal.max(0.0));
        prop_assert!(out.payout <= cap);
        prop_assert_eq!(out.default, out.payout < gap);
        let higher = simulate_payout(gap + bump, cap, &rule, eta);
        prop_assert!(higher.payout >= out.payout);
    }

    #[test]
    fn discretionary_payout_is_bounded_and_monotone(gap in -1.0..2.0f64, eta in -0.5..0.5f64, cap in 0.0..0.8f64, bump in 0.0..0.5f64) {
        let (_, prim, cost) = appendix();
        let rule = SignalRule::discretionary(&prim.with_discretion(0.5, 1.0).unwrap(), &cost).unwrap();
        let out = simulate_payout(gap, cap, &rule, eta);
        prop_assert!(out.payout >= 0.0 && out.payout <= out.signal.max(0.0));
        prop_assert!(simulate_payout(gap + bump, cap, &rule, eta).payout >= out.payout);
    }

    #[test]
    fn default_density_positive_and_continuous(rule in threshold_rule(), gap in -1.0..2.0f64, sigma in 0.02..0.5f64) {
        let a = default_density(gap, &rule, sigma).unwrap();
        let b = default_density(gap + 1e-9, &rule, sigma).unwrap();
        // Strictly positive unless every level is so far away that f_η underflows.
        let nearest = rule.pieces().unwrap().iter().map(|p| (gap - p.2).abs()).fold(f64::INFINITY, f64::min);
        prop_assert!(a > 0.0 || nearest > 30.0 * sigma);
        prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a));
    }

    #[test]
    fn capmin_holds_for_piecewise_linear_laws(
        density in prop::collection::vec(0.05..2.0f64, 3..8),
        b in 0.02..0.98f64,
    ) {
        let nodes: Vec<f64> = (0..density.len()).map(|i| i as f64 / (density.len() - 1) as f64).collect();
        let law = SignalLaw::continuous(nodes, density).unwrap();
        let r = capmin_oracle(&law, &[b], 1e-5).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }
}
