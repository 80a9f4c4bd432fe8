//! Discretionary rescue and the effective grant weight.
//!
//! Without commitment, the leader picks the payout after seeing the gap
//! signal, which yields a threshold–linear–cap rule. Its interior slope `m`
//! crowds out grants: `λ_T = ω_T − ω_b·m·P(0 < b*(θ) < b̄)`, with the
//! probability itself depending on `λ_T` through the cap schedule. The
//! fixed point is found by (optionally damped) iteration from `λ_T = ω_T`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::mechanism::{self, CapSchedule};
use crate::primitives::{GridSpec, PolicyPrimitives, RescueCost, TypeDistribution};

/// One step of a threshold payout rule: pay `level` once `Ĝ ≥ at`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdStep {
    pub at: f64,
    pub level: f64,
}

/// Signal-based payout rule `β(Ĝ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalRule {
    /// Piecewise constant: zero below the first step, then the level of
    /// the last step reached.
    Threshold { steps: Vec<ThresholdStep> },
    /// `clip(slope·(Ĝ − kink), 0, cap)`.
    ThresholdLinearCap { kink: f64, slope: f64, cap: f64 },
}

impl SignalRule {
    pub fn threshold(steps: Vec<ThresholdStep>) -> Result<Self> {
        if steps.iter().any(|s| !s.at.is_finite() || !s.level.is_finite()) {
            return Err(param("threshold steps must be finite"));
        }
        if steps.windows(2).any(|w| w[1].at <= w[0].at) {
            return Err(param("threshold locations must be strictly increasing"));
        }
        let mut prev = 0.0;
        for s in &steps {
            if s.level < prev {
                return Err(param("threshold levels must be nonnegative and nondecreasing"));
            }
            prev = s.level;
        }
        Ok(SignalRule::Threshold { steps })
    }

    /// One step at `at` paying `level`.
    pub fn single_threshold(at: f64, level: f64) -> Result<Self> {
        Self::threshold(vec![ThresholdStep { at, level }])
    }

    pub fn threshold_linear_cap(kink: f64, slope: f64, cap: f64) -> Result<Self> {
        if !kink.is_finite() || !(0.0..1.0).contains(&slope) || !(cap >= 0.0 && cap.is_finite()) {
            return Err(param(format!(
                "threshold-linear-cap needs finite kink, slope in [0,1) and cap >= 0, got ({kink}, {slope}, {cap})"
            )));
        }
        Ok(SignalRule::ThresholdLinearCap { kink, slope, cap })
    }

    /// The rule a discretionary leader with quadratic rescue cost follows:
    /// kink `α/χ`, slope `χ/(κ+χ)`, cap `b̄`.
    pub fn discretionary(prim: &PolicyPrimitives, cost: &RescueCost) -> Result<Self> {
        let (alpha, kappa) = quadratic(cost)?;
        Self::threshold_linear_cap(alpha / prim.chi, prim.chi / (kappa + prim.chi), prim.b_bar)
    }

    pub fn payout(&self, signal: f64) -> f64 {
        match self {
            SignalRule::Threshold { steps } => steps
                .iter()
                .take_while(|s| signal >= s.at)
                .last()
                .map_or(0.0, |s| s.level),
            SignalRule::ThresholdLinearCap { kink, slope, cap } => {
                (slope * (signal - kink)).clamp(0.0, *cap)
            }
        }
    }

    /// Slope on the interior branch (zero for threshold rules).
    pub fn slope(&self) -> f64 {
        match self {
            SignalRule::Threshold { .. } => 0.0,
            SignalRule::ThresholdLinearCap { slope, .. } => *slope,
        }
    }

    pub fn is_threshold(&self) -> bool {
        matches!(self, SignalRule::Threshold { .. })
    }

    /// Constant pieces `[from, to) ↦ level` of a threshold rule.
    pub fn pieces(&self) -> Option<Vec<(f64, f64, f64)>> {
        let SignalRule::Threshold { steps } = self else {
            return None;
        };
        let mut out = Vec::with_capacity(steps.len() + 1);
        let mut from = f64::NEG_INFINITY;
        let mut level = 0.0;
        for s in steps {
            out.push((from, s.at, level));
            from = s.at;
            level = s.level;
        }
        out.push((from, f64::INFINITY, level));
        Some(out)
    }
}

fn quadratic(cost: &RescueCost) -> Result<(f64, f64)> {
    cost.quadratic_params().ok_or_else(|| {
        Error::Unsupported("the discretionary rule is derived for quadratic rescue cost only".into())
    })
}

/// `β^disc(Ĝ) = clip((χĜ − α)/(κ + χ), 0, b̄)`.
pub fn beta_discretionary(signal: f64, prim: &PolicyPrimitives, cost: &RescueCost) -> Result<f64> {
    let (alpha, kappa) = quadratic(cost)?;
    Ok(((prim.chi * signal - alpha) / (kappa + prim.chi)).clamp(0.0, prim.b_bar))
}

/// `λ_T = ω_T − ω_b·m·p_int`.
pub fn effective_lambda(prim: &PolicyPrimitives, p_int: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_int) {
        return Err(param(format!("p_int must lie in [0, 1], got {p_int}")));
    }
    let omega_b = prim
        .omega_b
        .constant()
        .ok_or_else(|| Error::Unsupported("grant crowd-out needs a constant omega_b".into()))?;
    Ok(prim.omega_t - omega_b * prim.m * p_int)
}

/// `P(0 < b*(θ) < b̄) = F(θ^†) − F(θ^min)` from the analytic CDF.
pub fn interior_probability(dist: &TypeDistribution, cap: &CapSchedule) -> f64 {
    if dist.is_point_mass() {
        let b = cap.b_star()[0];
        return if b > 0.0 && b < cap.b_bar() { 1.0 } else { 0.0 };
    }
    let Some(lo) = cap.theta_min() else {
        return 0.0;
    };
    let upper = cap.theta_dagger().map_or(1.0, |t| dist.cdf(t));
    (upper - dist.cdf(lo)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    /// Weight on the new iterate, in `(0, 1]`.
    pub damping: f64,
    /// Stop once `|Δλ| ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub grid: GridSpec,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self { damping: 1.0, tol: 1e-8, max_iter: 1000, grid: GridSpec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceStep {
    pub lambda: f64,
    pub p_int: f64,
}

/// Converged (or last) iterate of the `λ_T` fixed point.
#[derive(Debug, Clone)]
pub struct DiscretionSolution {
    pub lambda_t: f64,
    /// Interior probability at `lambda_t`.
    pub p_int: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `(λ, p_int)` for the starting point and every iterate.
    pub trace: Vec<TraceStep>,
    /// Cap schedule solved at `lambda_t`.
    pub cap: CapSchedule,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscretionReport {
    #[serde(rename = "lambda_T")]
    pub lambda_t: f64,
    pub p_int: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceStep>,
}

impl DiscretionSolution {
    pub fn report(&self) -> DiscretionReport {
        DiscretionReport {
            lambda_t: self.lambda_t,
            p_int: self.p_int,
            iterations: self.iterations,
            converged: self.converged,
            trace: self.trace.clone(),
        }
    }

    /// `|λ_T − (ω_T − ω_b·m·p_int)|` at the returned iterate.
    pub fn residual(&self, prim: &PolicyPrimitives) -> Result<f64> {
        Ok((self.lambda_t - effective_lambda(prim, self.p_int)?).abs())
    }
}

/// Iterates `λ ← (1−d)λ + d·(ω_T − ω_b·m·p_int(λ))` from `λ = ω_T`.
///
/// Exceeding `max_iter` is not an error; the last iterate is returned with
/// `converged = false`.
pub fn fixed_point(
    dist: &TypeDistribution,
    prim: &PolicyPrimitives,
    cost: &RescueCost,
    opts: &FixedPointOptions,
) -> Result<DiscretionSolution> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(param(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    if !(opts.tol > 0.0) {
        return Err(param(format!("tolerance must be > 0, got {}", opts.tol)));
    }
    // Validate the weight shape before the first solve.
    effective_lambda(prim, 0.0)?;

    let mut lambda = prim.omega_t;
    let mut cap = mechanism::solve(dist, prim, cost, lambda, &opts.grid)?;
    let mut p_int = interior_probability(dist, &cap);
    let mut trace = vec![TraceStep { lambda, p_int }];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let target = effective_lambda(prim, p_int)?;
        let next = (1.0 - opts.damping) * lambda + opts.damping * target;
        let step = (next - lambda).abs();
        lambda = next;
        cap = mechanism::solve(dist, prim, cost, lambda, &opts.grid)?;
        p_int = interior_probability(dist, &cap);
        trace.push(TraceStep { lambda, p_int });
        if step <= opts.tol {
            converged = true;
            break;
        }
    }
    Ok(DiscretionSolution { lambda_t: lambda, p_int, iterations, converged, trace, cap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(m: f64) -> (TypeDistribution, PolicyPrimitives, RescueCost) {
        (
            TypeDistribution::weibull(2.0, 1.0).unwrap(),
            PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8).unwrap().with_discretion(m, 1.0).unwrap(),
            RescueCost::quadratic(0.2, 1.0).unwrap(),
        )
    }

    #[test]
    fn beta_disc_examples() {
        let (_, p, c) = setup(0.5);
        assert_eq!(beta_discretionary(0.2, &p, &c).unwrap(), 0.0);
        assert!((beta_discretionary(1.0, &p, &c).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(beta_discretionary(10.0, &p, &c).unwrap(), 0.8);
        let tab = RescueCost::tabulated(vec![0.0, 1.0], vec![0.2, 1.2]).unwrap();
        assert!(matches!(beta_discretionary(1.0, &p, &tab), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rule_matches_direct_formula() {
        let (_, p, c) = setup(0.5);
        let rule = SignalRule::discretionary(&p, &c).unwrap();
        for i in 0..200 {
            let g = -1.0 + 0.02 * i as f64;
            let direct = beta_discretionary(g, &p, &c).unwrap();
            assert!((rule.payout(g) - direct).abs() < 1e-15, "g={g}");
        }
        assert_eq!(rule.slope(), 0.5);
    }

    #[test]
    fn threshold_rule_payout() {
        let rule = SignalRule::threshold(vec![
            ThresholdStep { at: 0.2, level: 0.3 },
            ThresholdStep { at: 1.0, level: 0.5 },
        ])
        .unwrap();
        assert_eq!(rule.payout(0.1), 0.0);
        assert_eq!(rule.payout(0.2), 0.3);
        assert_eq!(rule.payout(5.0), 0.5);
        assert_eq!(rule.pieces().unwrap().len(), 3);
        assert!(SignalRule::single_threshold(0.0, -0.1).is_err());
    }

    #[test]
    fn effective_lambda_examples() {
        let (_, p, _) = setup(0.5);
        assert!((effective_lambda(&p, 0.258).unwrap() - 0.8968).abs() < 1e-12);
        assert_eq!(effective_lambda(&p, 0.0).unwrap(), 1.0);
        assert!((effective_lambda(&p, 1.0).unwrap() - 0.6).abs() < 1e-15);
        assert!(effective_lambda(&p, 1.5).is_err());
    }

    #[test]
    fn interior_probability_commitment() {
        let (d, p, c) = setup(0.5);
        let cap = mechanism::solve(&d, &p, &c, 1.0, &GridSpec::default()).unwrap();
        let exact = (-0.125f64 * 0.125).exp() - (-0.625f64 * 0.625).exp();
        assert!((interior_probability(&d, &cap) - exact).abs() < 1e-12);
        assert!((interior_probability(&d, &cap) - 0.308).abs() < 5e-4);
    }

    #[test]
    fn interior_probability_edge_cases() {
        let d = TypeDistribution::exponential(1.0).unwrap();
        let p = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8).unwrap();
        let none = mechanism::solve(&d, &p, &RescueCost::quadratic(2.0, 1.0).unwrap(), 1.0, &GridSpec::default())
            .unwrap();
        assert_eq!(interior_probability(&d, &none), 0.0);
        // ψ ≡ 0.8 sits strictly inside (α, α + κ b̄): the whole support is interior.
        let all = mechanism::solve(&d, &p, &RescueCost::quadratic(0.5, 1.0).unwrap(), 1.0, &GridSpec::default())
            .unwrap();
        assert_eq!(interior_probability(&d, &all), 1.0);
    }

    #[test]
    fn degenerate_slope_converges_immediately() {
        let (d, p, c) = setup(0.0);
        let sol = fixed_point(&d, &p, &c, &FixedPointOptions::default()).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.lambda_t, 1.0);
        assert!((sol.cap.theta_min().unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn zero_payout_weight_keeps_omega_t() {
        let d = TypeDistribution::weibull(2.0, 1.0).unwrap();
        let p = PolicyPrimitives::new(1.0, 0.0, 1.0, 0.8).unwrap().with_discretion(0.5, 1.0).unwrap();
        let c = RescueCost::quadratic(0.2, 1.0).unwrap();
        let sol = fixed_point(&d, &p, &c, &FixedPointOptions::default()).unwrap();
        assert_eq!(sol.lambda_t, 1.0);
        assert!(sol.converged);
    }

    #[test]
    fn iteration_cap_flags_nonconvergence() {
        let (d, p, c) = setup(0.5);
        let opts = FixedPointOptions { max_iter: 2, tol: 1e-15, ..Default::default() };
        let sol = fixed_point(&d, &p, &c, &opts).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 2);
        assert_eq!(sol.trace.len(), 3);
    }

    #[test]
    fn damping_is_validated() {
        let (d, p, c) = setup(0.5);
        for damping in [0.0, 1.5] {
            let opts = FixedPointOptions { damping, ..Default::default() };
            assert!(fixed_point(&d, &p, &c, &opts).is_err());
        }
    }
}
