use super::{CapSchedule, Regime};
use crate::error::{param, Result};
use crate::primitives::{PolicyPrimitives, RescueCost, TypeDistribution};

/// Grants implied by the cap schedule, before and after limited liability.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferSchedule {
    pub theta: Vec<f64>,
    pub pre_clip: Vec<f64>,
    /// `max(0, pre_clip)`.
    pub t_star: Vec<f64>,
    /// `T ≥ 0` binds (the unconstrained grant would be negative).
    pub ll_binding: Vec<bool>,
}

/// Integrates `dT = −(ω_b/ω_T)·db̃` along the grid with `b̃ = b*`.
///
/// In the no-rescue regime the grant schedule is left at zero with every
/// point slack: the index differential carries no information there.
pub fn transfer_schedule(cap: &CapSchedule, prim: &PolicyPrimitives) -> TransferSchedule {
    if cap.regime() == Regime::NoRescue {
        let n = cap.theta().len();
        return TransferSchedule {
            theta: cap.theta().to_vec(),
            pre_clip: vec![0.0; n],
            t_star: vec![0.0; n],
            ll_binding: vec![false; n],
        };
    }
    integrate(cap.theta(), cap.b_star(), prim)
}

/// Same integration for an arbitrary expected-payout index `b̃` on `theta`.
///
/// The anchor is the first grid point: `b̃` is zero below `θ^min`, so this
/// is equivalent to starting at `T(θ^min) = 0`.
pub fn transfer_schedule_from(
    theta: &[f64],
    b_tilde: &[f64],
    prim: &PolicyPrimitives,
) -> Result<TransferSchedule> {
    if theta.is_empty() || theta.len() != b_tilde.len() {
        return Err(param("theta and b_tilde must be nonempty and of equal length"));
    }
    Ok(integrate(theta, b_tilde, prim))
}

fn integrate(theta: &[f64], b: &[f64], prim: &PolicyPrimitives) -> TransferSchedule {
    let ratio = |t: f64| prim.omega_b.at(t) / prim.omega_t;
    let mut pre_clip = Vec::with_capacity(theta.len());
    pre_clip.push(0.0);
    for i in 1..theta.len() {
        let r = 0.5 * (ratio(theta[i - 1]) + ratio(theta[i]));
        pre_clip.push(pre_clip[i - 1] - r * (b[i] - b[i - 1]));
    }
    let t_star = pre_clip.iter().map(|t| t.max(0.0)).collect();
    let ll_binding = pre_clip.iter().map(|t| *t < 0.0).collect();
    TransferSchedule { theta: theta.to_vec(), pre_clip, t_star, ll_binding }
}

/// `E_θ[𝒞(b*(θ)) + γ·T*(θ)]` by Stieltjes trapezoid quadrature in `F`.
///
/// Survivor mass above a truncated grid is charged at the last grid value.
pub fn leader_cost(
    cap: &CapSchedule,
    transfers: &TransferSchedule,
    dist: &TypeDistribution,
    cost: &RescueCost,
    prim: &PolicyPrimitives,
) -> Result<f64> {
    if cap.theta() != transfers.theta.as_slice() {
        return Err(param("cap and transfer schedules are on different grids"));
    }
    let g = cap
        .b_star()
        .iter()
        .zip(&transfers.t_star)
        .map(|(&b, &t)| Ok(cost.cost(b)? + prim.gamma * t))
        .collect::<Result<Vec<f64>>>()?;
    if dist.is_point_mass() || g.len() == 1 {
        return Ok(g[0]);
    }
    let theta = cap.theta();
    let mut total = g[0] * dist.cdf(theta[0]);
    let mut f_prev = dist.cdf(theta[0]);
    for i in 1..theta.len() {
        let f = dist.cdf(theta[i]);
        total += 0.5 * (g[i - 1] + g[i]) * (f - f_prev);
        f_prev = f;
    }
    total += g[g.len() - 1] * dist.survivor(theta[theta.len() - 1]);
    Ok(total)
}
