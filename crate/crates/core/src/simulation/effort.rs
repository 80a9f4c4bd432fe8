use serde::Serialize;
use statrs::function::erf::erfc;
use std::f64::consts::{PI, SQRT_2};

use crate::discretion::SignalRule;
use crate::error::{param, Error, Result};
use crate::primitives::PolicyPrimitives;

const MAX_ITER: usize = 200;
const RESIDUAL_TOL: f64 = 1e-12;

/// Revenue family `R(e, θ) = ρ₀·ln(1 + e)/(1 + θ)` and the base gap `G₀`
/// in `G(e) = G₀ − R(e, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevenueParams {
    pub rho0: f64,
    pub base_gap: f64,
}

impl Default for RevenueParams {
    fn default() -> Self {
        RevenueParams { rho0: 2.0, base_gap: 1.0 }
    }
}

impl RevenueParams {
    pub fn rho(&self, theta: f64) -> f64 {
        self.rho0 / (1.0 + theta)
    }

    pub fn gap(&self, effort: f64, theta: f64) -> f64 {
        self.base_gap - self.rho(theta) * effort.ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffortSolution {
    pub theta: f64,
    pub effort: f64,
    /// `|R′_e·(1 + φ_d·Λ) − φ_e|` at the returned effort; zero-floored at a corner.
    pub foc_residual: f64,
    pub bracket: (f64, f64),
    /// No positive root: effort is zero and the FOC holds as an inequality.
    pub corner: bool,
    /// `Λ(e*)`.
    pub lambda: f64,
    pub iterations: usize,
    /// `P(β(Ĝ) ≥ b(θ̂))` at the solution; the cap set by the report only
    /// enters here.
    pub cap_binding_probability: f64,
    pub revenue: RevenueParams,
}

fn std_normal_cdf(z: f64) -> f64 {
    if z == f64::INFINITY {
        1.0
    } else if z == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * erfc(-z / SQRT_2)
    }
}

fn normal_pdf(x: f64, sd: f64) -> f64 {
    (-0.5 * (x / sd).powi(2)).exp() / (sd * (2.0 * PI).sqrt())
}

fn threshold_pieces(rule: &SignalRule) -> Result<Vec<(f64, f64, f64)>> {
    rule.pieces().ok_or_else(|| {
        Error::Unsupported("the effort condition is solved for threshold payout rules only".into())
    })
}

/// `Λ = E_η[f_η(Ĝ − β(Ĝ))]` for `Ĝ = gap + η`, `η ~ N(0, σ²)`.
///
/// On each constant piece `[a, b) ↦ l` the product of the two Gaussian
/// densities is again Gaussian in `Ĝ`, so the expectation is a finite sum
/// of normal probabilities. The result is continuous in `gap` even though
/// `β` jumps.
pub fn default_density(gap: f64, rule: &SignalRule, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(param(format!("noise scale must be positive, got {sigma}")));
    }
    let pieces = threshold_pieces(rule)?;
    let sd = sigma / SQRT_2;
    Ok(pieces
        .iter()
        .map(|&(a, b, l)| {
            let mu = 0.5 * (gap + l);
            normal_pdf(gap - l, SQRT_2 * sigma)
                * (std_normal_cdf((b - mu) / sd) - std_normal_cdf((a - mu) / sd))
        })
        .sum())
}

fn binding_probability(gap: f64, rule: &SignalRule, sigma: f64, cap: f64) -> Result<f64> {
    Ok(threshold_pieces(rule)?
        .iter()
        .filter(|p| p.2 >= cap)
        .map(|&(a, b, _)| std_normal_cdf((b - gap) / sigma) - std_normal_cdf((a - gap) / sigma))
        .sum::<f64>()
        .clamp(0.0, 1.0))
}

/// Effort solving `R′_e(e, θ)·{1 + φ_d·Λ(e)} = φ_e` under a threshold rule.
///
/// Iterates `e ← e + ½(ρ(1 + φ_dΛ(e))/φ_e − 1 − e)` inside a sign-change
/// bracket; a step that leaves the bracket or fails to halve the residual
/// is replaced by bisection. `cap` is the cap at the reported type.
pub fn solve_effort(
    theta: f64,
    cap: f64,
    prim: &PolicyPrimitives,
    rule: &SignalRule,
    revenue: RevenueParams,
) -> Result<EffortSolution> {
    threshold_pieces(rule)?;
    if !(theta > -1.0 && theta.is_finite()) {
        return Err(param(format!("type must exceed -1, got {theta}")));
    }
    if !(revenue.rho0 > 0.0 && revenue.base_gap.is_finite()) {
        return Err(param("revenue scale must be positive and the base gap finite"));
    }
    let (phi_e, phi_d, sigma) = (prim.phi_e, prim.phi_d, prim.eta_scale);
    let rho = revenue.rho(theta);
    let lambda = |e: f64| default_density(revenue.gap(e, theta), rule, sigma);
    let residual = |e: f64| -> Result<f64> { Ok(rho * (1.0 + phi_d * lambda(e)?) / (1.0 + e) - phi_e) };
    let proposal = |e: f64| -> Result<f64> { Ok(rho * (1.0 + phi_d * lambda(e)?) / phi_e - 1.0) };
    let binding = |e: f64| binding_probability(revenue.gap(e, theta), rule, sigma, cap);
    let solution = |effort: f64, res: f64, bracket, corner, iterations| -> Result<EffortSolution> {
        Ok(EffortSolution {
            theta,
            effort,
            foc_residual: res,
            bracket,
            corner,
            lambda: lambda(effort)?,
            iterations,
            cap_binding_probability: binding(effort)?,
            revenue,
        })
    };

    let r0 = residual(0.0)?;
    // Λ ≤ sup f_η, so the residual is negative beyond this effort.
    let lambda_sup = 1.0 / (sigma * (2.0 * PI).sqrt());
    let e_hi = rho * (1.0 + phi_d * lambda_sup) / phi_e;
    if r0 <= 0.0 {
        return solution(0.0, r0.max(0.0), (0.0, e_hi), r0 < 0.0, 0);
    }
    let (mut lo, mut hi) = (0.0, e_hi);
    let mut e = (rho / phi_e - 1.0).clamp(lo, hi);
    let mut r = residual(e)?;
    let damping = if phi_d == 0.0 { 1.0 } else { 0.5 };
    for it in 1..=MAX_ITER {
        if r.abs() <= RESIDUAL_TOL * phi_e.max(1.0) {
            return solution(e, r.abs(), (lo, hi), false, it - 1);
        }
        if r > 0.0 {
            lo = e;
        } else {
            hi = e;
        }
        let mut next = e + damping * (proposal(e)? - e);
        let bisected = !(next > lo && next < hi);
        if bisected {
            next = 0.5 * (lo + hi);
        }
        let mut r_next = residual(next)?;
        if !bisected && r_next.abs() > 0.5 * r.abs() {
            if r_next > 0.0 {
                lo = next;
            } else {
                hi = next;
            }
            next = 0.5 * (lo + hi);
            r_next = residual(next)?;
        }
        e = next;
        r = r_next;
        if hi - lo <= 4.0 * f64::EPSILON * hi.max(1.0) {
            return solution(e, r.abs(), (lo, hi), false, it);
        }
    }
    Err(Error::IllPosed(format!(
        "effort condition did not converge in {MAX_ITER} iterations (residual {r:e})"
    )))
}
