use serde::Serialize;

use super::quadrature::gauss_legendre5;
use crate::discretion::SignalRule;
use crate::error::{param, Result};
use crate::mechanism::ironing::iron;
use crate::primitives::{PolicyPrimitives, RescueCost};

/// Tolerance shared by both cap–min identities.
pub const CAPMIN_TOL: f64 = 5e-5;
const WELFARE_SLACK: f64 = 1e-6;

/// Distribution of the rule output `β(Ĝ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalLaw {
    /// `(value, probability)` atoms; probabilities are normalized.
    Discrete(Vec<(f64, f64)>),
    /// Piecewise-linear density on increasing `nodes`, normalized.
    Continuous { nodes: Vec<f64>, density: Vec<f64> },
}

impl SignalLaw {
    pub fn discrete(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() || atoms.iter().any(|a| !a.0.is_finite() || !(a.1 >= 0.0)) {
            return Err(param("atoms need finite values and nonnegative probabilities"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if !(total > 0.0) {
            return Err(param("atom probabilities must not all be zero"));
        }
        atoms.iter_mut().for_each(|a| a.1 /= total);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(SignalLaw::Discrete(atoms))
    }

    pub fn continuous(nodes: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != density.len() {
            return Err(param("continuous law needs at least two nodes and one density per node"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || density.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(param("nodes must increase and densities be finite and nonnegative"));
        }
        let mass: f64 = nodes.windows(2).zip(density.windows(2)).map(|(x, f)| 0.5 * (f[0] + f[1]) * (x[1] - x[0])).sum();
        if !(mass > 0.0) {
            return Err(param("density integrates to zero"));
        }
        Ok(SignalLaw::Continuous { nodes, density: density.into_iter().map(|d| d / mass).collect() })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::continuous(vec![lo, hi], vec![1.0, 1.0])
    }

    /// Law of `β(Ĝ)` when the signal itself takes the given atoms.
    pub fn from_rule(rule: &SignalRule, signal_atoms: &[(f64, f64)]) -> Result<Self> {
        Self::discrete(signal_atoms.iter().map(|&(s, p)| (rule.payout(s), p)).collect())
    }

    fn atoms(&self) -> &[(f64, f64)] {
        match self {
            SignalLaw::Discrete(a) => a,
            SignalLaw::Continuous { .. } => &[],
        }
    }

    /// `∫_lo^hi g(x) f(x) dx`, exact for polynomial `g` of degree ≤ 8.
    fn integrate(nodes: &[f64], density: &[f64], lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (x, f) in nodes.windows(2).zip(density.windows(2)) {
            let (a, b) = (x[0].max(lo), x[1].min(hi));
            if b <= a {
                continue;
            }
            let slope = (f[1] - f[0]) / (x[1] - x[0]);
            total += gauss_legendre5(a, b, |t| g(t) * (f[0] + slope * (t - x[0])));
        }
        total
    }

    /// `E[min(β, b)^power]`.
    pub fn capped_moment(&self, b: f64, power: i32) -> f64 {
        match self {
            SignalLaw::Discrete(atoms) => atoms.iter().map(|&(v, p)| p * v.min(b).powi(power)).sum(),
            SignalLaw::Continuous { nodes, density } => {
                let below = Self::integrate(nodes, density, f64::NEG_INFINITY, b, |x| x.powi(power));
                below + b.powi(power) * self.tail(b)
            }
        }
    }

    /// `P(β ≥ b)`.
    pub fn tail(&self, b: f64) -> f64 {
        match self {
            SignalLaw::Discrete(atoms) => atoms.iter().filter(|a| a.0 >= b).map(|a| a.1).sum(),
            SignalLaw::Continuous { nodes, density } => Self::integrate(nodes, density, b, f64::INFINITY, |_| 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapMinPoint {
    pub b: f64,
    pub d_first: f64,
    pub tail: f64,
    pub d_second: f64,
    pub two_b_tail: f64,
    pub deviation: f64,
    /// `b` sits on an atom and a backward difference was used.
    pub at_atom: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapMinReport {
    pub step: f64,
    pub tolerance: f64,
    pub points: Vec<CapMinPoint>,
    /// Over points away from atoms.
    pub max_deviation: f64,
    pub pass: bool,
}

/// Checks `∂_b E[min(β,b)] = P(β ≥ b)` and `∂_b E[min(β,b)²] = 2b·P(β ≥ b)`
/// by finite differences.
pub fn capmin_oracle(law: &SignalLaw, caps: &[f64], step: f64) -> Result<CapMinReport> {
    if !(step > 0.0) || caps.is_empty() || caps.iter().any(|b| !b.is_finite()) {
        return Err(param("cap-min oracle needs finite caps and a positive step"));
    }
    let points: Vec<CapMinPoint> = caps
        .iter()
        .map(|&b| {
            let at_atom = law.atoms().iter().any(|a| (a.0 - b).abs() <= step);
            let diff = |power| {
                if at_atom {
                    (law.capped_moment(b, power) - law.capped_moment(b - step, power)) / step
                } else {
                    (law.capped_moment(b + step, power) - law.capped_moment(b - step, power)) / (2.0 * step)
                }
            };
            let (d_first, d_second) = (diff(1), diff(2));
            let tail = law.tail(b);
            let deviation = (d_first - tail).abs().max((d_second - 2.0 * b * tail).abs());
            CapMinPoint { b, d_first, tail, d_second, two_b_tail: 2.0 * b * tail, deviation, at_atom }
        })
        .collect();
    let max_deviation = points.iter().filter(|p| !p.at_atom).map(|p| p.deviation).fold(0.0, f64::max);
    Ok(CapMinReport { step, tolerance: CAPMIN_TOL, pass: max_deviation <= CAPMIN_TOL, points, max_deviation })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WelfareReport {
    pub types: Vec<f64>,
    pub weights: Vec<f64>,
    pub levels: usize,
    pub schedules_checked: usize,
    pub feasible: usize,
    pub enumerated_cost: f64,
    pub enumerated_caps: Vec<f64>,
    pub kkt_cost: f64,
    pub kkt_caps: Vec<f64>,
    /// `(κ_max/2)·(b̄/(levels − 1))²`.
    pub gap_bound: f64,
    pub pass: bool,
}

/// Exhaustive search over nondecreasing step caps on a discrete type space.
///
/// The objective is the virtual leader cost
/// `Σ wᵢ [C(bᵢ) + γTᵢ − (γ/λ_T)·ω_b(θᵢ)·hᵢ·bᵢ]` with discrete hazard
/// `hᵢ = wᵢ / Σ_{j≥i} wⱼ`; transfers follow the discrete limited-liability
/// recursion. The KKT schedule irons the discrete virtual weights.
pub fn welfare_bruteforce(
    types: &[(f64, f64)],
    prim: &PolicyPrimitives,
    cost: &RescueCost,
    lambda_t: f64,
    levels: usize,
) -> Result<WelfareReport> {
    if types.is_empty() || types.len() > 6 {
        return Err(param(format!("brute force handles 1 to 6 types, got {}", types.len())));
    }
    if !(2..=21).contains(&levels) {
        return Err(param(format!("cap levels must be between 2 and 21, got {levels}")));
    }
    if !(lambda_t > 0.0) || types.iter().any(|t| !t.0.is_finite() || !(t.1 > 0.0)) {
        return Err(param("types need finite locations, positive weights and lambda_T > 0"));
    }
    let mut sorted = types.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = sorted.iter().map(|t| t.1).sum();
    let theta: Vec<f64> = sorted.iter().map(|t| t.0).collect();
    let w: Vec<f64> = sorted.iter().map(|t| t.1 / total).collect();
    let k = theta.len();
    let psi: Vec<f64> = (0..k)
        .map(|i| prim.virtual_scale(theta[i], lambda_t) * w[i] / w[i..].iter().sum::<f64>())
        .collect();

    let transfers = |b: &[f64]| -> Vec<f64> {
        let mut pre = 0.0;
        let mut out = vec![0.0; k];
        for i in 1..k {
            let ratio = 0.5 * (prim.omega_b.at(theta[i]) + prim.omega_b.at(theta[i - 1])) / prim.omega_t;
            pre -= ratio * (b[i] - b[i - 1]);
            out[i] = pre.max(0.0);
        }
        out
    };
    let objective = |b: &[f64]| -> Result<f64> {
        let t = transfers(b);
        let mut v = 0.0;
        for i in 0..k {
            v += w[i] * (cost.cost(b[i])? + prim.gamma * t[i] - psi[i] * b[i]);
        }
        Ok(v)
    };
    let feasible = |b: &[f64]| {
        let t = transfers(b);
        let x: Vec<f64> = (0..k).map(|i| prim.omega_t * t[i] + prim.omega_b.at(theta[i]) * b[i]).collect();
        x.iter().all(|&v| v >= 0.0) && x.windows(2).all(|p| p[1] >= p[0] - 1e-15)
    };

    let grid: Vec<f64> = (0..levels).map(|j| prim.b_bar * j as f64 / (levels - 1) as f64).collect();
    let mut idx = vec![0usize; k];
    let mut caps = vec![0.0; k];
    let mut best = (f64::INFINITY, vec![0.0; k]);
    let (mut checked, mut n_feasible) = (0usize, 0usize);
    loop {
        for i in 0..k {
            caps[i] = grid[idx[i]];
        }
        checked += 1;
        if feasible(&caps) {
            n_feasible += 1;
            let v = objective(&caps)?;
            if v < best.0 {
                best = (v, caps.clone());
            }
        }
        // Next nondecreasing index tuple.
        let Some(pos) = (0..k).rev().find(|&i| idx[i] + 1 < levels) else { break };
        let next = idx[pos] + 1;
        idx[pos..].iter_mut().for_each(|v| *v = next);
    }

    let ironed = iron(&psi, &w);
    let kkt_caps: Vec<f64> = ironed
        .values
        .iter()
        .map(|&y| {
            if y <= cost.marginal_at_origin() {
                Ok(0.0)
            } else {
                Ok(cost.inverse_marginal(y)?.payout.clamp(0.0, prim.b_bar))
            }
        })
        .collect::<Result<_>>()?;
    let kkt_cost = objective(&kkt_caps)?;
    let gap_bound = 0.5 * cost.max_curvature() * (prim.b_bar / (levels - 1) as f64).powi(2);
    let pass = best.0 >= kkt_cost - WELFARE_SLACK && best.0 <= kkt_cost + gap_bound + WELFARE_SLACK;
    Ok(WelfareReport {
        types: theta,
        weights: w,
        levels,
        schedules_checked: checked,
        feasible: n_feasible,
        enumerated_cost: best.0,
        enumerated_caps: best.1,
        kkt_cost,
        kkt_caps,
        gap_bound,
        pass,
    })
}
