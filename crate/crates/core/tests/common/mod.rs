#![allow(dead_code)]

use rescuecap::{PolicyPrimitives, RescueCost, TypeDistribution};

/// Weibull(2, 1) types with the standard policy weights and quadratic cost.
pub fn appendix() -> (TypeDistribution, PolicyPrimitives, RescueCost) {
    (
        TypeDistribution::weibull(2.0, 1.0).unwrap(),
        PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8).unwrap(),
        RescueCost::quadratic(0.2, 1.0).unwrap(),
    )
}

fn bump(t: f64, c: f64, w: f64) -> f64 {
    (-(t - c).powi(2) / w).exp()
}

/// Tabulated densities whose hazard falls somewhere on the support.
pub fn non_ifr_fixtures() -> Vec<(&'static str, TypeDistribution)> {
    vec![
        (
            "bimodal",
            TypeDistribution::tabulated_from_fn(0.0, 1.0, 201, |t| 0.05 + bump(t, 0.25, 0.005) + bump(t, 0.7, 0.005)).unwrap(),
        ),
        (
            "trimodal",
            TypeDistribution::tabulated_from_fn(0.0, 2.0, 301, |t| {
                0.02 + bump(t, 0.3, 0.01) + 0.6 * bump(t, 0.9, 0.01) + 1.3 * bump(t, 1.6, 0.02)
            })
            .unwrap(),
        ),
        (
            "early_mass",
            TypeDistribution::tabulated_from_fn(0.0, 1.5, 151, |t| if t < 0.3 { 3.0 - 5.0 * t } else { 1.5 + 0.2 * t }).unwrap(),
        ),
    ]
}

/// Left derivative of the greatest convex minorant of the cumulative
/// weighted sums `(Σ w, Σ w·v)`, read off a lower convex hull.
pub fn convex_minorant_slopes(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut pts = vec![(0.0f64, 0.0f64)];
    for (v, w) in values.iter().zip(weights) {
        let (x, y) = *pts.last().unwrap();
        pts.push((x + w, y + w * v));
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        while hull.len() >= 2 && cross(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) <= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(values.len());
    let mut seg = 0;
    for i in 1..pts.len() {
        while hull[seg + 1] < i {
            seg += 1;
        }
        let (a, b) = (pts[hull[seg]], pts[hull[seg + 1]]);
        out.push(if hull[seg + 1] == hull[seg] + 1 { values[i - 1] } else { (b.1 - a.1) / (b.0 - a.0) });
    }
    out
}
