//! Comparative statics of the cutoff `θ^min` and the interior cap
//! `b_max = (γω_b/λ_T − α)/κ` under quadratic cost and constant `ω_b`.
//!
//! The closed forms come from differentiating `h(θ^min) = αλ_T/(γω_b)`.
//! [`fd_certify`] checks each one against central differences of the full
//! solver (grid, ironing, bisection cutoffs), and
//! [`discretion_sensitivity`] differentiates through the `λ_T` fixed point
//! with respect to the discretionary slope `m`.

use serde::Serialize;

use crate::discretion::{fixed_point, FixedPointOptions};
use crate::error::{param, Error, Result};
use crate::mechanism;
use crate::primitives::{GridSpec, PayoutWeight, PolicyPrimitives, RescueCost, TypeDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Partial {
    ThetaMinAlpha,
    ThetaMinOmegaB,
    ThetaMinLambdaT,
    ThetaMinGamma,
    BMaxKappa,
    BMaxLambdaT,
    BMaxGamma,
    ThetaMinM,
    BMaxM,
    LambdaTM,
}

impl Partial {
    pub fn name(&self) -> &'static str {
        match self {
            Partial::ThetaMinAlpha => "dtheta_min/dalpha",
            Partial::ThetaMinOmegaB => "dtheta_min/domega_b",
            Partial::ThetaMinLambdaT => "dtheta_min/dlambda_T",
            Partial::ThetaMinGamma => "dtheta_min/dgamma",
            Partial::BMaxKappa => "db_max/dkappa",
            Partial::BMaxLambdaT => "db_max/dlambda_T",
            Partial::BMaxGamma => "db_max/dgamma",
            Partial::ThetaMinM => "dtheta_min/dm",
            Partial::BMaxM => "db_max/dm",
            Partial::LambdaTM => "dlambda_T/dm",
        }
    }

    /// Sign the partial must carry (given `γω_b/λ_T > α`).
    pub fn expected_sign(&self) -> i8 {
        match self {
            Partial::ThetaMinAlpha | Partial::ThetaMinLambdaT | Partial::BMaxGamma | Partial::BMaxM => 1,
            _ => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdValue {
    Value(f64),
    /// The perturbation moved the solution across a regime boundary.
    RegimeBoundary,
    NotComputed,
}

impl FdValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            FdValue::Value(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialEntry {
    pub partial: Partial,
    pub analytic: Option<f64>,
    pub finite_difference: FdValue,
    pub rel_error: Option<f64>,
    pub sign_ok: bool,
}

impl PartialEntry {
    fn new(partial: Partial, analytic: Option<f64>, finite_difference: FdValue) -> Self {
        let rel_error = match (analytic, finite_difference.value()) {
            (Some(a), Some(fd)) if a != 0.0 => Some(((fd - a) / a).abs()),
            _ => None,
        };
        let sign = partial.expected_sign() as f64;
        let sign_ok = match (analytic, finite_difference.value()) {
            (None, None) => false,
            (a, fd) => a.is_none_or(|v| v * sign > 0.0) && fd.is_none_or(|v| v * sign > 0.0),
        };
        Self { partial, analytic, finite_difference, rel_error, sign_ok }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticsReport {
    pub lambda_t: f64,
    pub theta_min: f64,
    pub b_max: f64,
    /// `h′(θ^min)`.
    pub hazard_slope: f64,
    pub entries: Vec<PartialEntry>,
}

impl StaticsReport {
    pub fn entry(&self, partial: Partial) -> Option<&PartialEntry> {
        self.entries.iter().find(|e| e.partial == partial)
    }

    pub fn all_signs_ok(&self) -> bool {
        self.entries.iter().all(|e| e.sign_ok)
    }

    pub fn max_rel_error(&self) -> Option<f64> {
        self.entries.iter().filter_map(|e| e.rel_error).reduce(f64::max)
    }
}

fn inputs(cost: &RescueCost, prim: &PolicyPrimitives) -> Result<(f64, f64, f64)> {
    let (alpha, kappa) = cost.quadratic_params().ok_or_else(|| {
        Error::Unsupported("comparative statics are derived for quadratic cost only".into())
    })?;
    let omega_b = prim.omega_b.constant().ok_or_else(|| {
        Error::Unsupported("comparative statics need a constant omega_b".into())
    })?;
    Ok((alpha, kappa, omega_b))
}

/// Solver `θ^min`, provided it lies strictly inside the support.
fn interior_theta_min(
    dist: &TypeDistribution,
    prim: &PolicyPrimitives,
    cost: &RescueCost,
    lambda_t: f64,
    grid: &GridSpec,
) -> Result<Option<f64>> {
    let cap = mechanism::solve(dist, prim, cost, lambda_t, grid)?;
    let lo = dist.support().0;
    Ok(cap.theta_min().filter(|t| *t > lo))
}

/// The type with unit hazard, where the solved cap equals `b_max`.
fn unit_hazard_type(dist: &TypeDistribution, grid: &GridSpec) -> Result<Option<f64>> {
    let nodes = grid.nodes(dist)?;
    let Some(first) = nodes.iter().position(|&t| dist.hazard(t).is_ok_and(|h| h >= 1.0)) else {
        return Ok(None);
    };
    if first == 0 {
        return Ok((dist.hazard(nodes[0])? == 1.0).then_some(nodes[0]));
    }
    let (mut lo, mut hi) = (nodes[first - 1], nodes[first]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dist.hazard(mid)? >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn interior_b_max(
    dist: &TypeDistribution,
    prim: &PolicyPrimitives,
    cost: &RescueCost,
    lambda_t: f64,
    grid: &GridSpec,
    at: f64,
) -> Result<Option<f64>> {
    let cap = mechanism::solve(dist, prim, cost, lambda_t, grid)?;
    let b = cap.eval(at);
    Ok((b > 0.0 && b < prim.b_bar).then_some(b))
}

/// Evaluates the seven closed-form partials at the solver's `θ^min`.
pub fn analytic_partials(
    dist: &TypeDistribution,
    prim: &PolicyPrimitives,
    cost: &RescueCost,
    lambda_t: f64,
    grid: &GridSpec,
) -> Result<StaticsReport> {
    let (alpha, kappa, omega_b) = inputs(cost, prim)?;
    let theta_min = interior_theta_min(dist, prim, cost, lambda_t, grid)?
        .ok_or_else(|| Error::NotApplicable("no interior theta_min".into()))?;
    let hp = dist.hazard_derivative(theta_min)?;
    if !(hp > 1e-12) {
        return Err(Error::IllPosed(format!(
            "hazard slope {hp} at theta_min = {theta_min} is not positive"
        )));
    }
    let (g, l) = (prim.gamma, lambda_t);
    let scale = g * omega_b / l;
    let analytic = [
        (Partial::ThetaMinAlpha, l / (g * omega_b) / hp),
        (Partial::ThetaMinOmegaB, -alpha * l / (g * omega_b * omega_b) / hp),
        (Partial::ThetaMinLambdaT, alpha / (g * omega_b) / hp),
        (Partial::ThetaMinGamma, -alpha * l / (g * g * omega_b) / hp),
        (Partial::BMaxKappa, -(scale - alpha) / (kappa * kappa)),
        (Partial::BMaxLambdaT, -g * omega_b / (kappa * l * l)),
        (Partial::BMaxGamma, omega_b / (kappa * l)),
    ];
    Ok(StaticsReport {
        lambda_t,
        theta_min,
        b_max: (scale - alpha) / kappa,
        hazard_slope: hp,
        entries: analytic
            .iter()
            .map(|&(p, v)| PartialEntry::new(p, Some(v), FdValue::NotComputed))
            .collect(),
    })
}

fn central(
    base: f64,
    step: f64,
    eval: impl Fn(f64) -> Result<Option<f64>>,
) -> Result<FdValue> {
    let h = if base != 0.0 { step * base.abs() } else { step };
    Ok(match (eval(base + h)?, eval(base - h)?) {
        (Some(up), Some(down)) => FdValue::Value((up - down) / (2.0 * h)),
        _ => FdValue::RegimeBoundary,
    })
}

/// Closed-form partials alongside central differences of the solver.
///
/// `step` is relative to each parameter's magnitude.
pub fn fd_certify(
    dist: &TypeDistribution,
    prim: &PolicyPrimitives,
    cost: &RescueCost,
    lambda_t: f64,
    step: f64,
    grid: &GridSpec,
) -> Result<StaticsReport> {
    if !(step > 0.0 && step < 0.5) {
        return Err(param(format!("finite-difference step must lie in (0, 0.5), got {step}")));
    }
    let mut report = analytic_partials(dist, prim, cost, lambda_t, grid)?;
    let (alpha, kappa, omega_b) = inputs(cost, prim)?;
    let unit = unit_hazard_type(dist, grid)?;

    let with_omega_b = |w: f64| PolicyPrimitives { omega_b: PayoutWeight::Constant(w), ..prim.clone() };
    let with_gamma = |g: f64| PolicyPrimitives { gamma: g, ..prim.clone() };
    let theta_min = |p: &PolicyPrimitives, c: &RescueCost, l: f64| interior_theta_min(dist, p, c, l, grid);
    let b_max = |p: &PolicyPrimitives, c: &RescueCost, l: f64| match unit {
        Some(at) => interior_b_max(dist, p, c, l, grid, at),
        None => Ok(None),
    };

    for entry in report.entries.iter_mut() {
        let fd = match entry.partial {
            Partial::ThetaMinAlpha => central(alpha, step, |a| {
                theta_min(prim, &RescueCost::quadratic(a, kappa)?, lambda_t)
            })?,
            Partial::ThetaMinOmegaB => {
                central(omega_b, step, |w| theta_min(&with_omega_b(w), cost, lambda_t))?
            }
            Partial::ThetaMinLambdaT => central(lambda_t, step, |l| theta_min(prim, cost, l))?,
            Partial::ThetaMinGamma => {
                central(prim.gamma, step, |g| theta_min(&with_gamma(g), cost, lambda_t))?
            }
            Partial::BMaxKappa if unit.is_some() => central(kappa, step, |k| {
                b_max(prim, &RescueCost::quadratic(alpha, k)?, lambda_t)
            })?,
            Partial::BMaxLambdaT if unit.is_some() => central(lambda_t, step, |l| b_max(prim, cost, l))?,
            Partial::BMaxGamma if unit.is_some() => {
                central(prim.gamma, step, |g| b_max(&with_gamma(g), cost, lambda_t))?
            }
            _ => FdValue::NotComputed,
        };
        *entry = PartialEntry::new(entry.partial, entry.analytic, fd);
    }
    Ok(report)
}

/// Sensitivities to the discretionary slope `m`, through the fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretionSensitivity {
    pub m: f64,
    pub lambda_t: f64,
    /// `dθ^min/dm`, `db_max/dm` and `dλ_T/dm`. The analytic column of the
    /// first two holds the chain-rule product `(∂q/∂λ_T)·(dλ_T/dm)`.
    pub entries: Vec<PartialEntry>,
}

/// Fixed-point tolerance used when differencing through the fixed point.
const FD_FIXED_POINT_TOL: f64 = 1e-14;

pub fn discretion_sensitivity(
    dist: &TypeDistribution,
    prim: &PolicyPrimitives,
    cost: &RescueCost,
    step: f64,
    opts: &FixedPointOptions,
) -> Result<DiscretionSensitivity> {
    if !(prim.m > 0.0) {
        return Err(param("discretion sensitivity needs m > 0"));
    }
    if !(step > 0.0 && step < 0.5) {
        return Err(param(format!("finite-difference step must lie in (0, 0.5), got {step}")));
    }
    let opts = FixedPointOptions { tol: opts.tol.min(FD_FIXED_POINT_TOL), ..*opts };
    let grid = opts.grid;
    let unit = unit_hazard_type(dist, &grid)?;
    let lo = dist.support().0;

    struct Point {
        lambda: f64,
        theta_min: Option<f64>,
        b_max: Option<f64>,
    }
    let at = |m: f64| -> Result<Point> {
        let p = PolicyPrimitives { m, ..prim.clone() };
        let sol = fixed_point(dist, &p, cost, &opts)?;
        let b_max = unit.map(|u| sol.cap.eval(u)).filter(|b| *b > 0.0 && *b < prim.b_bar);
        Ok(Point { lambda: sol.lambda_t, theta_min: sol.cap.theta_min().filter(|t| *t > lo), b_max })
    };

    let base = at(prim.m)?;
    let h = step * prim.m;
    let (up, down) = (at(prim.m + h)?, at(prim.m - h)?);
    let diff = |u: Option<f64>, d: Option<f64>| match (u, d) {
        (Some(u), Some(d)) => FdValue::Value((u - d) / (2.0 * h)),
        _ => FdValue::RegimeBoundary,
    };
    let d_lambda = diff(Some(up.lambda), Some(down.lambda));

    let base_partials = analytic_partials(dist, prim, cost, base.lambda, &grid).ok();
    let chain = |p: Partial| {
        let dl = d_lambda.value()?;
        Some(base_partials.as_ref()?.entry(p)?.analytic? * dl)
    };
    Ok(DiscretionSensitivity {
        m: prim.m,
        lambda_t: base.lambda,
        entries: vec![
            PartialEntry::new(
                Partial::ThetaMinM,
                chain(Partial::ThetaMinLambdaT),
                diff(up.theta_min, down.theta_min),
            ),
            PartialEntry::new(Partial::BMaxM, chain(Partial::BMaxLambdaT), diff(up.b_max, down.b_max)),
            PartialEntry::new(Partial::LambdaTM, None, d_lambda),
        ],
    })
}
