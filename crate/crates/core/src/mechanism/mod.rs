//! The leader's reduced-form program.
//!
//! At almost every type the optimal cap solves
//! `𝒞′(b*(θ)) = γ·ω_b(θ)/λ_T · h(θ)`, projected onto `[0, b̄]` after the
//! right-hand side (the virtual weight) has been ironed into a
//! nondecreasing curve. Grants follow from the index differential
//! `dT = −(ω_b/ω_T)·db̃` anchored at `T(θ^min) = 0` and clipped at zero.
//!
//! Only a constant `λ_T` is supported. The expected payout under the cap
//! is taken at the cap-binding benchmark `b̃(θ) = b*(θ)`.

pub mod ironing;
mod transfer;

use serde::Serialize;

use crate::error::{param, Result};
use crate::primitives::{GridSpec, PolicyPrimitives, RescueCost, TypeDistribution};

pub use transfer::{leader_cost, transfer_schedule, transfer_schedule_from, TransferSchedule};

/// Raw and ironed virtual weight on the solver grid.
#[derive(Debug, Clone)]
pub struct VirtualWeightCurve {
    theta: Vec<f64>,
    psi: Vec<f64>,
    ironed_psi: Vec<f64>,
    ironed: Vec<bool>,
    block: Vec<usize>,
    weights: Vec<f64>,
    dist: TypeDistribution,
    prim: PolicyPrimitives,
    lambda_t: f64,
    truncated: bool,
}

impl VirtualWeightCurve {
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Raw `ψ(θᵢ) = γ·ω_b(θᵢ)/λ_T · h(θᵢ)`.
    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn ironed_psi(&self) -> &[f64] {
        &self.ironed_psi
    }

    pub fn ironed(&self) -> &[bool] {
        &self.ironed
    }

    /// Pooling weights: density times the trapezoid cell width.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lambda_t(&self) -> f64 {
        self.lambda_t
    }

    pub fn dist(&self) -> &TypeDistribution {
        &self.dist
    }

    /// The grid stops short of the support's upper end.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Raw virtual weight at an arbitrary type in the support.
    pub fn raw_at(&self, theta: f64) -> Result<f64> {
        Ok(self.prim.virtual_scale(theta, self.lambda_t) * self.dist.hazard(theta)?)
    }

    /// Ironed virtual weight between grid nodes.
    ///
    /// Cells with no pooled endpoint follow the raw curve exactly; cells
    /// inside one pooled block are constant; mixed cells interpolate.
    pub fn ironed_at(&self, theta: f64) -> f64 {
        let n = self.theta.len();
        if n == 1 || theta <= self.theta[0] {
            return self.ironed_psi[0];
        }
        if theta >= self.theta[n - 1] {
            return self.ironed_psi[n - 1];
        }
        let i = self.theta.partition_point(|t| *t <= theta) - 1;
        if theta == self.theta[i] {
            return self.ironed_psi[i];
        }
        if !self.ironed[i] && !self.ironed[i + 1] {
            if let Ok(v) = self.raw_at(theta) {
                return v;
            }
        }
        if self.ironed[i] && self.ironed[i + 1] && self.block[i] == self.block[i + 1] {
            return self.ironed_psi[i];
        }
        let w = (theta - self.theta[i]) / (self.theta[i + 1] - self.theta[i]);
        self.ironed_psi[i] + w * (self.ironed_psi[i + 1] - self.ironed_psi[i])
    }
}

/// Computes the virtual weight on the grid and irons it.
pub fn virtual_weight(
    dist: &TypeDistribution,
    prim: &PolicyPrimitives,
    lambda_t: f64,
    grid: &GridSpec,
) -> Result<VirtualWeightCurve> {
    if !(lambda_t > 0.0 && lambda_t.is_finite()) {
        return Err(param(format!("lambda_T must be finite and > 0, got {lambda_t}")));
    }
    let theta = grid.nodes(dist)?;
    let psi = theta
        .iter()
        .map(|&t| Ok(prim.virtual_scale(t, lambda_t) * dist.hazard(t)?))
        .collect::<Result<Vec<f64>>>()?;
    let weights = if theta.len() == 1 {
        vec![1.0]
    } else {
        let n = theta.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { theta[i] - theta[i - 1] } else { 0.0 };
                let right = if i + 1 < n { theta[i + 1] - theta[i] } else { 0.0 };
                dist.pdf(theta[i]) * 0.5 * (left + right)
            })
            .collect()
    };
    let ironed = ironing::iron(&psi, &weights);
    let truncated = theta[theta.len() - 1] < dist.support().1;
    Ok(VirtualWeightCurve {
        theta,
        psi,
        ironed_psi: ironed.values,
        ironed: ironed.pooled,
        block: ironed.block,
        weights,
        dist: dist.clone(),
        prim: prim.clone(),
        lambda_t,
        truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `b* ≡ 0`.
    NoRescue,
    /// `0 < b* < b̄` at every grid point.
    Interior,
    /// Positive rescues with at least one projection bound active.
    Mixed,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::NoRescue => "no-rescue",
            Regime::Interior => "interior",
            Regime::Mixed => "mixed",
        }
    }
}

/// The solved cap schedule `b*(θ)` with its cutoffs.
#[derive(Debug, Clone)]
pub struct CapSchedule {
    theta: Vec<f64>,
    b_star: Vec<f64>,
    ironed: Vec<bool>,
    theta_min: Option<f64>,
    theta_dagger: Option<f64>,
    regime: Regime,
    b_bar: f64,
    top_marginal: f64,
    curve: VirtualWeightCurve,
    cost: RescueCost,
}

impl CapSchedule {
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn b_star(&self) -> &[f64] {
        &self.b_star
    }

    pub fn ironed(&self) -> &[bool] {
        &self.ironed
    }

    /// `inf{θ : b*(θ) > 0}`; `None` in the no-rescue regime.
    pub fn theta_min(&self) -> Option<f64> {
        self.theta_min
    }

    /// `inf{θ : b*(θ) = b̄}`; `None` if the cap never binds on the grid.
    pub fn theta_dagger(&self) -> Option<f64> {
        self.theta_dagger
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn lambda_t(&self) -> f64 {
        self.curve.lambda_t
    }

    pub fn b_bar(&self) -> f64 {
        self.b_bar
    }

    pub fn curve(&self) -> &VirtualWeightCurve {
        &self.curve
    }

    pub fn cost(&self) -> &RescueCost {
        &self.cost
    }

    /// `b*(θ)` at an arbitrary type, clamped to the grid range.
    pub fn eval(&self, theta: f64) -> f64 {
        cap_for(&self.cost, self.b_bar, self.top_marginal, self.curve.ironed_at(theta))
    }

    /// `|𝒞′(b*) − ψ̄|` at the grid points strictly inside `(0, b̄)`.
    pub fn kkt_residuals(&self) -> Vec<(f64, f64)> {
        self.b_star
            .iter()
            .zip(&self.curve.ironed_psi)
            .filter(|(b, _)| **b > 0.0 && **b < self.b_bar)
            .map(|(&b, &psi)| (self.cost.marginal(b).map(|m| (m - psi).abs()).unwrap_or(f64::NAN), psi))
            .collect()
    }
}

fn cap_for(cost: &RescueCost, b_bar: f64, top_marginal: f64, psi: f64) -> f64 {
    if psi <= cost.marginal_at_origin() {
        0.0
    } else if psi >= top_marginal {
        b_bar
    } else {
        cost.inverse_marginal(psi).map(|inv| inv.payout.min(b_bar)).unwrap_or(b_bar)
    }
}

/// Smallest type in `[lo, hi]` where `pred` switches from false to true,
/// assuming `pred(lo)` is false and `pred(hi)` is true.
fn bisect_switch(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `b*(θ) = clip(𝒞′⁻¹(ψ̄(θ)), 0, b̄)` with cutoffs located by bisection.
pub fn solve_cap(curve: VirtualWeightCurve, cost: &RescueCost, b_bar: f64) -> Result<CapSchedule> {
    if !(b_bar > 0.0 && b_bar.is_finite()) {
        return Err(param(format!("b_bar must be finite and > 0, got {b_bar}")));
    }
    let top_marginal = cost.marginal(b_bar)?;
    let origin = cost.marginal_at_origin();
    let b_star: Vec<f64> = curve
        .ironed_psi
        .iter()
        .map(|&psi| cap_for(cost, b_bar, top_marginal, psi))
        .collect();
    let theta = curve.theta.clone();

    let cutoff = |binds: &dyn Fn(f64) -> bool| -> Option<f64> {
        let first = curve.ironed_psi.iter().position(|&p| binds(p))?;
        if first == 0 {
            return Some(theta[0]);
        }
        Some(bisect_switch(theta[first - 1], theta[first], |t| binds(curve.ironed_at(t))))
    };
    let theta_min = cutoff(&|psi| psi > origin);
    let theta_dagger = cutoff(&|psi| psi >= top_marginal);

    let regime = if b_star.iter().all(|&b| b == 0.0) {
        Regime::NoRescue
    } else if b_star.iter().all(|&b| b > 0.0 && b < b_bar) {
        Regime::Interior
    } else {
        Regime::Mixed
    };
    Ok(CapSchedule {
        theta,
        b_star,
        ironed: curve.ironed.clone(),
        theta_min,
        theta_dagger,
        regime,
        b_bar,
        top_marginal,
        curve,
        cost: cost.clone(),
    })
}

/// Convenience pipeline: virtual weight, then cap.
pub fn solve(
    dist: &TypeDistribution,
    prim: &PolicyPrimitives,
    cost: &RescueCost,
    lambda_t: f64,
    grid: &GridSpec,
) -> Result<CapSchedule> {
    solve_cap(virtual_weight(dist, prim, lambda_t, grid)?, cost, prim.b_bar)
}

/// Outcome of the no-rescue test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnifeEdgeReport {
    /// `𝒞′(0⁺) ≥ sup ψ`: bailouts vanish.
    pub holds: bool,
    /// `𝒞′(0⁺) − sup ψ`.
    pub margin: f64,
    pub sup_psi: f64,
    pub sup_theta: f64,
    /// The supremum was taken over a grid that stops short of the support.
    pub truncated: bool,
}

/// Checks `𝒞′(0⁺) ≥ sup_θ γ·ω_b(θ)/λ_T · h(θ)` on the solver grid.
pub fn knife_edge(
    dist: &TypeDistribution,
    prim: &PolicyPrimitives,
    cost: &RescueCost,
    lambda_t: f64,
    grid: &GridSpec,
) -> Result<KnifeEdgeReport> {
    let curve = virtual_weight(dist, prim, lambda_t, grid)?;
    let (idx, sup_psi) = curve
        .psi
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p > acc.1 { (i, p) } else { acc });
    let origin = cost.marginal_at_origin();
    Ok(KnifeEdgeReport {
        holds: origin >= sup_psi,
        margin: origin - sup_psi,
        sup_psi,
        sup_theta: curve.theta[idx],
        truncated: curve.truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn appendix() -> (TypeDistribution, PolicyPrimitives, RescueCost) {
        (
            TypeDistribution::weibull(2.0, 1.0).unwrap(),
            PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8).unwrap(),
            RescueCost::quadratic(0.2, 1.0).unwrap(),
        )
    }

    #[test]
    fn virtual_weight_hand_value() {
        let (d, p, _) = appendix();
        let curve = virtual_weight(&d, &p, 1.0, &GridSpec::default()).unwrap();
        assert!((curve.raw_at(0.5).unwrap() - 0.8).abs() < 1e-15);
        assert!(curve.ironed().iter().all(|f| !f));
    }

    #[test]
    fn exponential_weight_is_flat() {
        let d = TypeDistribution::exponential(1.0).unwrap();
        let p = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8).unwrap();
        let curve = virtual_weight(&d, &p, 1.0, &GridSpec::default()).unwrap();
        assert!(curve.psi().iter().all(|&v| (v - 0.8).abs() < 1e-15));
        assert!(curve.ironed().iter().all(|f| !f));
    }

    #[test]
    fn nonpositive_lambda_rejected() {
        let (d, p, _) = appendix();
        assert!(virtual_weight(&d, &p, 0.0, &GridSpec::default()).is_err());
        assert!(virtual_weight(&d, &p, -1.0, &GridSpec::default()).is_err());
    }

    #[test]
    fn commitment_cutoffs_and_hand_value() {
        let (d, p, c) = appendix();
        let cap = solve(&d, &p, &c, 1.0, &GridSpec::default()).unwrap();
        assert!((cap.theta_min().unwrap() - 0.125).abs() < 1e-12);
        assert!((cap.theta_dagger().unwrap() - 0.625).abs() < 1e-12);
        assert!((cap.eval(0.3) - 0.28).abs() < 1e-12);
        assert_eq!(cap.regime(), Regime::Mixed);
    }

    #[test]
    fn expensive_rescue_is_no_rescue() {
        let d = TypeDistribution::exponential(1.0).unwrap();
        let p = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8).unwrap();
        let c = RescueCost::quadratic(2.0, 1.0).unwrap();
        let cap = solve(&d, &p, &c, 1.0, &GridSpec::default()).unwrap();
        assert!(cap.b_star().iter().all(|&b| b == 0.0));
        assert_eq!(cap.regime(), Regime::NoRescue);
        assert_eq!(cap.theta_min(), None);
        assert_eq!(cap.theta_dagger(), None);
    }

    #[test]
    fn uniform_starts_positive_at_lower_end() {
        let d = TypeDistribution::uniform(0.0, 1.0).unwrap();
        let (_, p, c) = appendix();
        let cap = solve(&d, &p, &c, 1.0, &GridSpec::default()).unwrap();
        assert_eq!(cap.theta_min(), Some(0.0));
        assert!((cap.b_star()[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn knife_edge_examples() {
        let d = TypeDistribution::exponential(1.0).unwrap();
        let p = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8).unwrap();
        let g = GridSpec::default();
        let r = knife_edge(&d, &p, &RescueCost::quadratic(1.0, 1.0).unwrap(), 1.0, &g).unwrap();
        assert!(r.holds && (r.margin - 0.2).abs() < 1e-12 && r.truncated);
        let r = knife_edge(&d, &p, &RescueCost::quadratic(0.5, 1.0).unwrap(), 1.0, &g).unwrap();
        assert!(!r.holds && (r.margin + 0.3).abs() < 1e-12);
        let (w, p, _) = appendix();
        let r = knife_edge(&w, &p, &RescueCost::quadratic(5.0, 1.0).unwrap(), 1.0, &g).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn point_mass_uses_supplied_hazard() {
        let d = TypeDistribution::point_mass(0.5, 1.0).unwrap();
        let (_, p, c) = appendix();
        let cap = solve(&d, &p, &c, 1.0, &GridSpec::default()).unwrap();
        assert_eq!(cap.theta(), &[0.5]);
        assert!((cap.b_star()[0] - 0.6).abs() < 1e-15);
    }
}
