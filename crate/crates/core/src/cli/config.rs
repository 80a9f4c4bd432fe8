//! Run configuration: a single strict JSON document.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::discretion::{FixedPointOptions, ThresholdStep};
use crate::primitives::{GridSpec, PayoutWeight, PolicyPrimitives, RescueCost, TypeDistribution};
use crate::simulation::RevenueParams;
use crate::SignalRule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionConfig {
    Weibull { shape: f64, scale: f64 },
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    Truncated { base: Box<DistributionConfig>, lo: f64, hi: f64 },
    /// Density values on an equally spaced grid over `[lo, hi]`.
    Tabulated { lo: f64, hi: f64, density: Vec<f64> },
    PointMass { theta: f64, hazard: f64 },
}

impl DistributionConfig {
    pub fn build(&self) -> crate::Result<TypeDistribution> {
        match self {
            DistributionConfig::Weibull { shape, scale } => TypeDistribution::weibull(*shape, *scale),
            DistributionConfig::Exponential { rate } => TypeDistribution::exponential(*rate),
            DistributionConfig::Uniform { lo, hi } => TypeDistribution::uniform(*lo, *hi),
            DistributionConfig::Truncated { base, lo, hi } => TypeDistribution::truncated(base.build()?, *lo, *hi),
            DistributionConfig::Tabulated { lo, hi, density } => TypeDistribution::tabulated(*lo, *hi, density.clone()),
            DistributionConfig::PointMass { theta, hazard } => TypeDistribution::point_mass(*theta, *hazard),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostConfig {
    Quadratic { alpha: f64, kappa: f64 },
    /// Piecewise-linear marginal through `(x[i], marginal[i])`.
    Tabulated { x: Vec<f64>, marginal: Vec<f64> },
}

impl CostConfig {
    pub fn build(&self) -> crate::Result<RescueCost> {
        match self {
            CostConfig::Quadratic { alpha, kappa } => RescueCost::quadratic(*alpha, *kappa),
            CostConfig::Tabulated { x, marginal } => RescueCost::tabulated(x.clone(), marginal.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaBConfig {
    Constant(f64),
    Table(OmegaBTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaBTable {
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub omega_t: f64,
    pub omega_b: OmegaBConfig,
    pub gamma: f64,
    pub b_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretionConfig {
    pub enabled: bool,
    pub m: f64,
    pub chi: f64,
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DiscretionConfig {
    fn default() -> Self {
        let o = FixedPointOptions::default();
        DiscretionConfig { enabled: false, m: 0.0, chi: 1.0, damping: o.damping, tol: o.tol, max_iter: o.max_iter }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EffortConfig {
    pub rho0: f64,
    pub phi_e: f64,
    pub phi_d: f64,
    pub base_gap: f64,
    /// Steps of the threshold payout rule.
    pub steps: Vec<ThresholdStep>,
    /// True types at which the condition is solved.
    pub theta: Vec<f64>,
}

impl Default for EffortConfig {
    fn default() -> Self {
        let r = RevenueParams::default();
        EffortConfig {
            rho0: r.rho0,
            phi_e: 1.0,
            phi_d: 0.0,
            base_gap: r.base_gap,
            steps: vec![ThresholdStep { at: 0.2, level: 0.4 }],
            theta: vec![0.1, 0.3, 0.5, 0.7, 0.9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub n: usize,
    pub seed: u64,
    pub bins: usize,
    pub eta_scale: f64,
    pub effort: EffortConfig,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig { n: 200_000, seed: 20_240_601, bins: 30, eta_scale: 0.1, effort: EffortConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub size: usize,
    /// Upper-tail mass cut from unbounded supports.
    pub truncation_quantile: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        GridConfig { size: g.size, truncation_quantile: g.tail_mass }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: PathBuf::from("out"), formats: vec![Format::Csv, Format::Json] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub distribution: DistributionConfig,
    pub cost: CostConfig,
    pub weights: WeightsConfig,
    #[serde(default)]
    pub discretion: DiscretionConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Validated domain objects built from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub dist: TypeDistribution,
    pub cost: RescueCost,
    pub prim: PolicyPrimitives,
    /// Present when the discretion block is enabled.
    pub discretion: Option<FixedPointOptions>,
    pub fixed_point: FixedPointOptions,
    pub grid: GridSpec,
    pub n: usize,
    pub seed: u64,
    pub bins: usize,
    pub revenue: RevenueParams,
    pub effort_rule: SignalRule,
    pub effort_types: Vec<f64>,
    pub formats: Vec<Format>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid run config: {e}"))
    }

    /// Builds every domain object, collecting all violations into one list.
    pub fn scenario(&self) -> std::result::Result<Scenario, Vec<String>> {
        let mut problems = Vec::new();
        let dist = keep(&mut problems, "distribution", self.distribution.build());
        let cost = keep(&mut problems, "cost", self.cost.build());
        let steps = self.simulation.effort.steps.clone();
        let effort_rule = keep(&mut problems, "simulation.effort.steps", SignalRule::threshold(steps));

        let w = &self.weights;
        let omega_b = match &w.omega_b {
            OmegaBConfig::Constant(v) => PayoutWeight::Constant(*v),
            OmegaBConfig::Table(t) => PayoutWeight::Tabulated { theta: t.theta.clone(), values: t.values.clone() },
        };
        let d = &self.discretion;
        let s = &self.simulation;
        let e = &s.effort;
        let prim = PolicyPrimitives {
            omega_t: w.omega_t,
            omega_b,
            gamma: w.gamma,
            b_bar: w.b_bar,
            m: d.m,
            chi: d.chi,
            phi_e: e.phi_e,
            phi_d: e.phi_d,
            eta_scale: s.eta_scale,
        };
        problems.extend(prim.problems().into_iter().map(|p| {
            let block = match p.split_whitespace().next().unwrap_or("") {
                "m" | "chi" => "discretion",
                "phi_e" | "phi_d" => "simulation.effort",
                "eta_scale" => "simulation",
                _ => "weights",
            };
            format!("{block}.{p}")
        }));

        let mut check = |ok: bool, msg: String| {
            if !ok {
                problems.push(msg);
            }
        };
        check(d.damping > 0.0 && d.damping <= 1.0, format!("discretion.damping must lie in (0, 1], got {}", d.damping));
        check(d.tol > 0.0, format!("discretion.tol must be positive, got {}", d.tol));
        check(d.max_iter >= 1, "discretion.max_iter must be at least 1".into());
        check(s.n >= 1000, format!("simulation.n must be at least 1000, got {}", s.n));
        check(s.bins >= 2, format!("simulation.bins must be at least 2, got {}", s.bins));
        check(e.rho0 > 0.0, format!("simulation.effort.rho0 must be positive, got {}", e.rho0));
        check(e.base_gap.is_finite(), "simulation.effort.base_gap must be finite".into());
        check(e.theta.iter().all(|t| t.is_finite() && *t > -1.0), "simulation.effort.theta entries must exceed -1".into());
        check(self.grid.size >= 3, format!("grid.size must be at least 3, got {}", self.grid.size));
        check(
            self.grid.truncation_quantile > 0.0 && self.grid.truncation_quantile < 0.5,
            format!("grid.truncation_quantile must lie in (0, 0.5), got {}", self.grid.truncation_quantile),
        );

        if !problems.is_empty() {
            return Err(problems);
        }
        let grid = GridSpec { size: self.grid.size, tail_mass: self.grid.truncation_quantile };
        let fixed_point = FixedPointOptions { damping: d.damping, tol: d.tol, max_iter: d.max_iter, grid };
        Ok(Scenario {
            dist: dist.expect("validated"),
            cost: cost.expect("validated"),
            prim,
            discretion: d.enabled.then_some(fixed_point),
            fixed_point,
            grid,
            n: s.n,
            seed: s.seed,
            bins: s.bins,
            revenue: RevenueParams { rho0: e.rho0, base_gap: e.base_gap },
            effort_rule: effort_rule.expect("validated"),
            effort_types: e.theta.clone(),
            formats: self.output.formats.clone(),
        })
    }
}

fn keep<T>(problems: &mut Vec<String>, block: &str, r: crate::Result<T>) -> Option<T> {
    r.map_err(|e| problems.push(format!("{block}: {e}"))).ok()
}
