use proptest::prelude::*;
use rescuecap::primitives::{hazard, inverse_marginal, marginal_cost, sample_types, sample_types_range};
use rescuecap::{Error, GridSpec, RescueCost, TypeDistribution};

fn bimodal() -> TypeDistribution {
    let bump = |t: f64, c: f64| (-(t - c).powi(2) / 0.005).exp();
    TypeDistribution::tabulated_from_fn(0.0, 1.0, 201, |t| 0.05 + bump(t, 0.25) + bump(t, 0.7)).unwrap()
}

fn analytic() -> Vec<TypeDistribution> {
    vec![
        TypeDistribution::weibull(2.0, 1.0).unwrap(),
        TypeDistribution::weibull(1.3, 0.7).unwrap(),
        TypeDistribution::exponential(1.7).unwrap(),
        TypeDistribution::uniform(-0.5, 2.0).unwrap(),
        TypeDistribution::truncated(TypeDistribution::weibull(2.0, 1.0).unwrap(), 0.1, 1.5).unwrap(),
    ]
}

#[test]
fn hazard_examples() {
    let w = TypeDistribution::weibull(2.0, 1.0).unwrap();
    assert!((hazard(&w, 0.5).unwrap() - 1.0).abs() < 1e-14);
    let e = TypeDistribution::exponential(1.0).unwrap();
    for t in [0.0, 0.3, 4.0] {
        assert!((hazard(&e, t).unwrap() - 1.0).abs() < 1e-14);
    }
    let u = TypeDistribution::uniform(0.0, 1.0).unwrap();
    let h = 1e-6;
    let f_numeric = (u.cdf(0.5 + h) - u.cdf(0.5 - h)) / (2.0 * h);
    assert!((f_numeric / u.survivor(0.5) - 2.0).abs() < 1e-8);
    assert!((hazard(&u, 0.5).unwrap() - 2.0).abs() < 1e-14);
}

#[test]
fn hazard_errors() {
    let u = TypeDistribution::uniform(0.0, 1.0).unwrap();
    assert!(matches!(hazard(&u, 1.5), Err(Error::Domain(_))));
    assert!(matches!(hazard(&u, 1.0), Err(Error::UpperSupport(_))));
    let e = TypeDistribution::exponential(1.0).unwrap();
    assert!(matches!(hazard(&e, -0.1), Err(Error::Domain(_))));
}

#[test]
fn invalid_parameters_rejected() {
    assert!(TypeDistribution::weibull(0.0, 1.0).is_err());
    assert!(TypeDistribution::exponential(-1.0).is_err());
    assert!(TypeDistribution::uniform(1.0, 1.0).is_err());
    assert!(TypeDistribution::tabulated(0.0, 1.0, vec![1.0, -1.0, 1.0]).is_err());
    assert!(RescueCost::quadratic(-0.1, 1.0).is_err());
    assert!(RescueCost::quadratic(0.1, 0.0).is_err());
    assert!(RescueCost::tabulated(vec![0.0, 1.0], vec![0.5, 0.1]).is_err());
    assert!(matches!(marginal_cost(&RescueCost::quadratic(0.2, 1.0).unwrap(), -1.0), Err(Error::Domain(_))));
}

#[test]
fn quadratic_cost_examples() {
    let c = RescueCost::quadratic(0.2, 1.0).unwrap();
    assert_eq!(marginal_cost(&c, 0.0).unwrap(), 0.2);
    assert!((marginal_cost(&c, 0.8).unwrap() - 1.0).abs() < 1e-15);
    assert!((inverse_marginal(&c, 1.0).unwrap().payout - 0.8).abs() < 1e-15);
    let below = inverse_marginal(&c, 0.1).unwrap();
    assert_eq!(below.payout, 0.0);
    assert!(below.below_origin);
}

#[test]
fn densities_integrate_to_one() {
    for d in analytic().into_iter().chain([bimodal()]) {
        let (lo, _) = d.support();
        let hi = d.grid_upper(1e-13);
        // Composite Simpson in s with θ = lo + s², which tames θ^(k−1) at the origin.
        let g = |s: f64| 2.0 * s * d.pdf(lo + s * s);
        let top = (hi - lo).sqrt();
        let n = 200_000;
        let h = top / n as f64;
        let mut s = g(0.0) + g(top);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        let mass = s * h / 3.0 + d.survivor(hi);
        assert!((mass - 1.0).abs() < 1e-8, "{:?}: mass {mass}", d.kind());
    }
}

#[test]
fn cdf_derivative_matches_density() {
    for d in analytic() {
        let (lo, _) = d.support();
        let hi = d.grid_upper(1e-3);
        for i in 1..=100 {
            let t = lo + (hi - lo) * i as f64 / 101.0;
            let h = 1e-6 * (1.0 + t.abs());
            let numeric = (d.cdf(t + h) - d.cdf(t - h)) / (2.0 * h);
            assert!((numeric - d.pdf(t)).abs() < 1e-5, "{:?} at {t}", d.kind());
        }
    }
}

#[test]
fn cdf_endpoints_and_monotonicity() {
    for d in analytic().into_iter().chain([bimodal()]) {
        let (lo, hi) = d.support();
        assert_eq!(d.cdf(lo), 0.0);
        if hi.is_finite() {
            assert!((d.cdf(hi) - 1.0).abs() < 1e-12);
        }
        let top = d.grid_upper(1e-10);
        let grid: Vec<f64> = (0..=1000).map(|i| lo + (top - lo) * i as f64 / 1000.0).collect();
        assert!(grid.windows(2).all(|w| d.cdf(w[1]) >= d.cdf(w[0])));
        assert!(grid[..1000].iter().all(|&t| d.hazard(t).unwrap().is_finite()));
    }
}

#[test]
fn ifr_flag_matches_hazard_shape() {
    for d in analytic() {
        assert!(d.is_ifr());
        let nodes = GridSpec::default().nodes(&d).unwrap();
        let h: Vec<f64> = nodes[..nodes.len() - 1].iter().map(|&t| d.hazard(t).unwrap()).collect();
        assert!(h.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)), "{:?}", d.kind());
    }
    let b = bimodal();
    assert!(!b.is_ifr());
    let nodes = GridSpec::with_size(401).nodes(&b).unwrap();
    let h: Vec<f64> = nodes[..nodes.len() - 1].iter().map(|&t| b.hazard(t).unwrap()).collect();
    assert!(h.windows(2).any(|w| w[1] < w[0]));
}

#[test]
fn weibull_sample_mean() {
    let d = TypeDistribution::weibull(2.0, 1.0).unwrap();
    let xs = sample_types(&d, 200_000, 42).unwrap();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!((mean - 0.886_226_925_452_758).abs() < 0.01);
}

#[test]
fn small_uniform_sample_stays_in_support() {
    let d = TypeDistribution::uniform(0.0, 1.0).unwrap();
    let xs = sample_types(&d, 4, 9).unwrap();
    assert_eq!(xs.len(), 4);
    assert!(xs.iter().all(|x| (0.0..=1.0).contains(x)));
    assert!(sample_types(&d, 0, 9).is_err());
}

#[test]
fn sampling_is_deterministic_and_partition_invariant() {
    let d = TypeDistribution::weibull(2.0, 1.0).unwrap();
    let a = sample_types(&d, 100_000, 5).unwrap();
    assert_eq!(a, sample_types(&d, 100_000, 5).unwrap());
    assert_ne!(a, sample_types(&d, 100_000, 6).unwrap());
    let mut pieces = Vec::new();
    for (start, len) in [(0u64, 1usize), (1, 40_000), (40_001, 59_999)] {
        pieces.extend(sample_types_range(&d, 5, start, len));
    }
    assert_eq!(a, pieces);
}

#[test]
fn kolmogorov_smirnov_against_cdf() {
    let n = 200_000;
    for (k, d) in analytic().into_iter().chain([bimodal()]).enumerate() {
        let mut xs = sample_types(&d, n, 7 + k as u64).unwrap();
        xs.sort_by(f64::total_cmp);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = d.cdf(x);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 1.5 / (n as f64).sqrt(), "{:?}: KS {ks}", d.kind());
    }
}

fn tabulated_cost() -> impl Strategy<Value = RescueCost> {
    (0.0..1.0f64, prop::collection::vec((0.05..1.0f64, 0.0..2.0f64), 1..6)).prop_map(|(m0, segs)| {
        let mut x = vec![0.0];
        let mut marginal = vec![m0];
        for (dx, dm) in segs {
            x.push(x.last().unwrap() + dx);
            marginal.push(marginal.last().unwrap() + dm);
        }
        RescueCost::tabulated(x, marginal).unwrap()
    })
}

proptest! {
    #[test]
    fn quadratic_inverse_is_identity(alpha in 0.0..2.0f64, kappa in 0.1..5.0f64, b_bar in 0.1..2.0f64, u in 0.0..1.0f64) {
        let c = RescueCost::quadratic(alpha, kappa).unwrap();
        let x = u * b_bar;
        let back = inverse_marginal(&c, marginal_cost(&c, x).unwrap()).unwrap().payout;
        prop_assert!((back - x).abs() <= 1e-9);
    }

    #[test]
    fn tabulated_inverse_is_identity_on_strict_segments(c in tabulated_cost(), u in 0.0..1.0f64) {
        let rescuecap::primitives::CostKind::Tabulated { x, marginal } = c.kind().clone() else { unreachable!() };
        let top = *x.last().unwrap();
        let t = u * top;
        let y = marginal_cost(&c, t).unwrap();
        let inv = inverse_marginal(&c, y).unwrap();
        prop_assert!((marginal_cost(&c, inv.payout).unwrap() - y).abs() <= 1e-10 * y.max(1.0));
        // Unique preimage when the marginal strictly increases around t.
        let i = x.partition_point(|v| *v <= t).clamp(1, x.len() - 1);
        if marginal[i] > marginal[i - 1] && marginal[..i].windows(2).all(|w| w[1] > w[0]) {
            prop_assert!((inv.payout - t).abs() <= 1e-6);
        }
    }

    #[test]
    fn tabulated_cost_is_convex_and_starts_at_zero(c in tabulated_cost(), a in 0.0..3.0f64, b in 0.0..3.0f64) {
        prop_assert_eq!(c.cost(0.0).unwrap(), 0.0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(c.cost(hi).unwrap() >= c.cost(lo).unwrap());
        prop_assert!(c.marginal(hi).unwrap() >= c.marginal(lo).unwrap());
        let mid = 0.5 * (lo + hi);
        prop_assert!(c.cost(mid).unwrap() <= 0.5 * (c.cost(lo).unwrap() + c.cost(hi).unwrap()) + 1e-12);
    }

    #[test]
    fn weibull_quantile_inverts_cdf(shape in 1.0..5.0f64, scale in 0.2..3.0f64, u in 0.001..0.999f64) {
        let d = TypeDistribution::weibull(shape, scale).unwrap();
        let t = d.quantile(u);
        prop_assert!((d.cdf(t) - u).abs() < 1e-12);
        prop_assert!((d.hazard(t).unwrap() - d.pdf(t) / d.survivor(t)).abs() <= 1e-10 * d.hazard(t).unwrap().max(1.0));
    }

    #[test]
    fn tabulated_quantile_inverts_cdf(u in 0.001..0.999f64) {
        let d = bimodal();
        prop_assert!((d.cdf(d.quantile(u)) - u).abs() < 1e-10);
    }
}
