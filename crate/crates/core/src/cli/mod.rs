//! Configuration-driven runs and their file outputs.
//!
//! Each command validates a [`RunConfig`], runs one pipeline, writes its
//! artifacts atomically into the output directory and finishes with
//! `summary.json`. Outputs contain no timestamps, so equal inputs give
//! byte-identical files.

mod config;
mod output;

pub use config::{
    CostConfig, DiscretionConfig, DistributionConfig, EffortConfig, Format, GridConfig, OmegaBConfig,
    OmegaBTable, OutputConfig, RunConfig, Scenario, SimulationConfig, WeightsConfig,
};
pub use output::{fmt_float, round_sig, to_json, write_atomic, Csv};

use serde::Serialize;
use std::path::{Path, PathBuf};

use crate::discretion::{fixed_point, DiscretionSolution};
use crate::mechanism::{self, knife_edge, leader_cost, transfer_schedule, CapSchedule, Regime};
use crate::simulation::{
    capmin_oracle, mc_run_cap, solve_effort, welfare_bruteforce, CapMinReport, SignalLaw, WelfareReport,
};
use crate::statics::{discretion_sensitivity, fd_certify, FdValue, PartialEntry};
use crate::Error;

/// Relative finite-difference step for the statics command.
pub const STATICS_STEP: f64 = 1e-5;
/// Certification bound on the relative error of each partial.
pub const STATICS_TOL: f64 = 1e-4;
const KKT_TOL: f64 = 1e-8;
const CAPMIN_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    KnifeEdge,
    Discretion,
    Statics,
    Simulate,
    Oracle,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::KnifeEdge => "knife-edge",
            Command::Discretion => "discretion",
            Command::Statics => "statics",
            Command::Simulate => "simulate",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Domain(_) | Error::Unsupported(_) | Error::NotApplicable(_) => {
                CliError::Validation(vec![e.to_string()])
            }
            Error::IllPosed(_) | Error::UpperSupport(_) => CliError::Numerical(e.to_string()),
        }
    }
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

/// Command-line values that take precedence over the config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(out) = &self.out {
            cfg.output.directory = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.simulation.seed = seed;
        }
        if let Some(size) = self.grid {
            cfg.grid.size = size;
        }
    }
}

/// An invariant verified during a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check { name: name.into(), pass, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub regime: Option<Regime>,
    pub lambda_t: Option<f64>,
    pub theta_min: Option<f64>,
    pub theta_dagger: Option<f64>,
    pub p_int: Option<f64>,
    pub leader_cost: Option<f64>,
    pub knife_edge_margin: Option<f64>,
    /// Artifact names relative to the output directory.
    pub files: Vec<String>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl RunSummary {
    fn new(command: Command) -> Self {
        RunSummary {
            command: command.name().into(),
            regime: None,
            lambda_t: None,
            theta_min: None,
            theta_dagger: None,
            p_int: None,
            leader_cost: None,
            knife_edge_margin: None,
            files: Vec::new(),
            checks: Vec::new(),
            pass: true,
        }
    }

    fn describe(&mut self, cap: &CapSchedule, dist: &crate::TypeDistribution) {
        self.regime = Some(cap.regime());
        self.lambda_t = Some(cap.lambda_t());
        self.theta_min = cap.theta_min();
        self.theta_dagger = cap.theta_dagger();
        self.p_int = Some(crate::discretion::interior_probability(dist, cap));
    }

    /// Exit status under the documented contract.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            2
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    RunConfig::from_json(&text).map_err(|e| CliError::Validation(vec![e]))
}

/// Validates `cfg`, runs `command` and writes its outputs.
pub fn run(command: Command, cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let sc = cfg.scenario().map_err(CliError::Validation)?;
    let out = Emitter::new(&cfg.output.directory, &sc.formats);
    match command {
        Command::Solve => cmd_solve(&sc, out),
        Command::KnifeEdge => cmd_knife_edge(&sc, out),
        Command::Discretion => cmd_discretion(&sc, out),
        Command::Statics => cmd_statics(&sc, out),
        Command::Simulate => cmd_simulate(&sc, out),
        Command::Oracle => cmd_oracle(&sc, out),
    }
}

/// Collects artifacts written into one directory.
pub struct Emitter {
    dir: PathBuf,
    csv: bool,
    json: bool,
    files: Vec<String>,
}

impl Emitter {
    pub fn new(dir: &Path, formats: &[Format]) -> Self {
        Emitter {
            dir: dir.to_path_buf(),
            csv: formats.contains(&Format::Csv),
            json: formats.contains(&Format::Json),
            files: Vec::new(),
        }
    }

    fn put(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        write_atomic(&self.dir, name, text).map_err(|e| CliError::Io(format!("{}: {e}", self.dir.join(name).display())))?;
        self.files.push(name.into());
        Ok(())
    }

    fn csv(&mut self, name: &str, csv: Csv) -> Result<(), CliError> {
        if self.csv {
            self.put(name, &csv.into_string())?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if self.json {
            self.put(name, &to_json(value).map_err(io)?)?;
        }
        Ok(())
    }

    fn finish(mut self, mut summary: RunSummary) -> Result<RunSummary, CliError> {
        summary.pass = summary.checks.iter().all(|c| c.pass);
        summary.files = std::mem::take(&mut self.files);
        summary.files.push("summary.json".into());
        self.put("summary.json", &to_json(&summary).map_err(io)?)?;
        Ok(summary)
    }
}

/// Effective grant weight: the fixed point when discretion is enabled.
fn grant_weight(sc: &Scenario) -> Result<(f64, Option<DiscretionSolution>), CliError> {
    match &sc.discretion {
        Some(opts) => {
            let sol = fixed_point(&sc.dist, &sc.prim, &sc.cost, opts)?;
            Ok((sol.lambda_t, Some(sol)))
        }
        None => Ok((sc.prim.omega_t, None)),
    }
}

fn converged_check(sol: &DiscretionSolution) -> Check {
    Check::new(
        "fixed_point_converged",
        sol.converged,
        format!("{} iterations, lambda_T {}", sol.iterations, fmt_float(sol.lambda_t)),
    )
}

fn cap_checks(cap: &CapSchedule) -> Vec<Check> {
    let worst = cap
        .kkt_residuals()
        .iter()
        .map(|(r, psi)| r.abs() / psi.abs().max(1.0))
        .fold(0.0, f64::max);
    let monotone = cap.b_star().windows(2).all(|w| w[1] >= w[0]);
    vec![
        Check::new("kkt_residual", worst <= KKT_TOL, format!("max scaled residual {worst:e}")),
        Check::new("cap_monotone", monotone, String::new()),
    ]
}

fn bool_cell(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn cmd_solve(sc: &Scenario, mut out: Emitter) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::new(Command::Solve);
    let (lambda, disc) = grant_weight(sc)?;
    let cap = match &disc {
        Some(sol) => sol.cap.clone(),
        None => mechanism::solve(&sc.dist, &sc.prim, &sc.cost, lambda, &sc.grid)?,
    };
    let transfers = transfer_schedule(&cap, &sc.prim);
    let cost = leader_cost(&cap, &transfers, &sc.dist, &sc.cost, &sc.prim)?;
    let edge = knife_edge(&sc.dist, &sc.prim, &sc.cost, lambda, &sc.grid)?;
    summary.describe(&cap, &sc.dist);
    summary.leader_cost = Some(cost);
    summary.knife_edge_margin = Some(edge.margin);
    summary.checks.extend(cap_checks(&cap));
    summary.checks.push(Check::new(
        "transfers_nonnegative",
        transfers.t_star.iter().all(|t| *t >= 0.0),
        String::new(),
    ));
    if let Some(sol) = &disc {
        summary.checks.push(converged_check(sol));
        out.json("discretion.json", &sol.report())?;
    }

    let mut sched = Csv::new(&["theta", "b_star", "ironed", "t_star", "ll_binding"]);
    for i in 0..cap.theta().len() {
        sched.row([
            fmt_float(cap.theta()[i]),
            fmt_float(cap.b_star()[i]),
            bool_cell(cap.ironed()[i]).into(),
            fmt_float(transfers.t_star[i]),
            bool_cell(transfers.ll_binding[i]).into(),
        ]);
    }
    out.csv("cap_schedule.csv", sched)?;
    let mut tr = Csv::new(&["theta", "pre_clip", "t_star", "ll_binding"]);
    for i in 0..transfers.theta.len() {
        tr.row([
            fmt_float(transfers.theta[i]),
            fmt_float(transfers.pre_clip[i]),
            fmt_float(transfers.t_star[i]),
            bool_cell(transfers.ll_binding[i]).into(),
        ]);
    }
    out.csv("transfers.csv", tr)?;
    out.finish(summary)
}

pub fn cmd_knife_edge(sc: &Scenario, mut out: Emitter) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::new(Command::KnifeEdge);
    let (lambda, _) = grant_weight(sc)?;
    let edge = knife_edge(&sc.dist, &sc.prim, &sc.cost, lambda, &sc.grid)?;
    let cap = mechanism::solve(&sc.dist, &sc.prim, &sc.cost, lambda, &sc.grid)?;
    summary.describe(&cap, &sc.dist);
    summary.knife_edge_margin = Some(edge.margin);
    let zero = cap.b_star().iter().all(|b| *b == 0.0);
    summary.checks.push(Check::new(
        "knife_edge_consistent",
        !edge.holds || zero,
        format!("holds {}, cap identically zero {zero}", edge.holds),
    ));
    out.json("knife_edge.json", &edge)?;
    out.finish(summary)
}

pub fn cmd_discretion(sc: &Scenario, mut out: Emitter) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::new(Command::Discretion);
    let sol = fixed_point(&sc.dist, &sc.prim, &sc.cost, &sc.fixed_point)?;
    summary.describe(&sol.cap, &sc.dist);
    summary.p_int = Some(sol.p_int);
    summary.checks.push(converged_check(&sol));
    out.json("discretion.json", &sol.report())?;
    out.finish(summary)
}

fn statics_row(csv: &mut Csv, e: &PartialEntry) {
    let fd = match e.finite_difference {
        FdValue::Value(v) => fmt_float(v),
        FdValue::RegimeBoundary => "regime_boundary".into(),
        FdValue::NotComputed => String::new(),
    };
    csv.row([
        e.partial.name().to_string(),
        output::fmt_opt(e.analytic),
        fd,
        output::fmt_opt(e.rel_error),
        e.partial.expected_sign().to_string(),
        bool_cell(e.sign_ok).into(),
    ]);
}

pub fn cmd_statics(sc: &Scenario, mut out: Emitter) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::new(Command::Statics);
    let (lambda, disc) = grant_weight(sc)?;
    let report = fd_certify(&sc.dist, &sc.prim, &sc.cost, lambda, STATICS_STEP, &sc.grid)?;
    let cap = mechanism::solve(&sc.dist, &sc.prim, &sc.cost, lambda, &sc.grid)?;
    summary.describe(&cap, &sc.dist);
    let mut csv = Csv::new(&["partial", "analytic", "finite_difference", "rel_error", "sign_expected", "sign_ok"]);
    report.entries.iter().for_each(|e| statics_row(&mut csv, e));
    let worst = report.max_rel_error().unwrap_or(f64::NAN);
    summary.checks.push(Check::new("signs", report.all_signs_ok(), String::new()));
    summary.checks.push(Check::new(
        "finite_difference_agreement",
        worst < STATICS_TOL,
        format!("max relative error {worst:e}"),
    ));
    if let Some(opts) = sc.discretion.as_ref().filter(|_| sc.prim.m > 0.0) {
        let sens = discretion_sensitivity(&sc.dist, &sc.prim, &sc.cost, STATICS_STEP, opts)?;
        sens.entries.iter().for_each(|e| statics_row(&mut csv, e));
        summary.checks.push(Check::new(
            "discretion_signs",
            sens.entries.iter().all(|e| e.sign_ok),
            String::new(),
        ));
    }
    if let Some(sol) = &disc {
        summary.checks.push(converged_check(sol));
    }
    out.csv("statics.csv", csv)?;
    out.finish(summary)
}

#[derive(Debug, Clone, Serialize)]
struct EffortRow {
    theta: f64,
    effort: f64,
    foc_residual: f64,
    corner: bool,
    lambda: f64,
    iterations: usize,
    cap_binding_probability: f64,
}

pub fn cmd_simulate(sc: &Scenario, mut out: Emitter) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::new(Command::Simulate);
    let (lambda, disc) = grant_weight(sc)?;
    let cap = match &disc {
        Some(sol) => sol.cap.clone(),
        None => mechanism::solve(&sc.dist, &sc.prim, &sc.cost, lambda, &sc.grid)?,
    };
    let mc = mc_run_cap(&cap, &sc.dist, sc.n, sc.seed, sc.bins)?;
    summary.describe(&cap, &sc.dist);
    if let Some(sol) = &disc {
        summary.checks.push(converged_check(sol));
    }
    let p_gap = (mc.p_int - mc.closed_form.p_int).abs();
    summary.checks.push(Check::new(
        "p_int_agreement",
        p_gap <= 4.0 * mc.p_int_stderr + 1e-3,
        format!("|mc - exact| = {p_gap:e}, stderr {:e}", mc.p_int_stderr),
    ));
    let filled: Vec<_> = mc.bins.iter().filter(|b| b.count > 0).collect();
    let monotone = filled
        .windows(2)
        .all(|w| w[1].mean_b >= w[0].mean_b - w[0].stderr.max(w[1].stderr) - 1e-12);
    summary.checks.push(Check::new("binned_means_monotone", monotone, String::new()));

    let mut efforts = Vec::new();
    for &theta in &sc.effort_types {
        let report_cap = cap.eval(theta);
        let s = solve_effort(theta, report_cap, &sc.prim, &sc.effort_rule, sc.revenue)?;
        efforts.push(EffortRow {
            theta,
            effort: s.effort,
            foc_residual: s.foc_residual,
            corner: s.corner,
            lambda: s.lambda,
            iterations: s.iterations,
            cap_binding_probability: s.cap_binding_probability,
        });
    }
    let worst = efforts.iter().map(|e| e.foc_residual).fold(0.0, f64::max);
    summary.checks.push(Check::new("effort_residual", worst <= 1e-8, format!("max residual {worst:e}")));

    out.json("mc_report.json", &mc)?;
    let mut bins = Csv::new(&["bin_lo", "bin_hi", "bin_center", "mean_b", "count", "stderr", "b_star_closed"]);
    for b in &mc.bins {
        bins.row([
            fmt_float(b.lo),
            fmt_float(b.hi),
            fmt_float(b.center),
            fmt_float(b.mean_b),
            b.count.to_string(),
            fmt_float(b.stderr),
            fmt_float(b.b_star_closed),
        ]);
    }
    out.csv("binned_means.csv", bins)?;
    out.json("effort.json", &efforts)?;
    out.finish(summary)
}

#[derive(Debug, Clone, Serialize)]
struct EffortInvariance {
    /// Largest change in effort across reports, per true type.
    max_spread: f64,
    pass: bool,
}

#[derive(Debug, Clone, Serialize)]
struct OracleReport {
    capmin_continuous: CapMinReport,
    capmin_discrete: CapMinReport,
    welfare: WelfareReport,
    effort_invariance: EffortInvariance,
    pass: bool,
}

pub fn cmd_oracle(sc: &Scenario, mut out: Emitter) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::new(Command::Oracle);
    let caps: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let capmin_continuous = capmin_oracle(&SignalLaw::uniform(0.0, 1.0)?, &caps, CAPMIN_STEP)?;
    let atoms = SignalLaw::discrete(vec![(0.0, 0.2), (0.25, 0.3), (0.5, 0.3), (0.75, 0.2)])?;
    let capmin_discrete = capmin_oracle(&atoms, &caps, CAPMIN_STEP)?;

    let types: Vec<(f64, f64)> = [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|&t| (t, 1.0)).collect();
    let welfare = welfare_bruteforce(&types, &sc.prim, &sc.cost, sc.prim.omega_t, 21)?;

    let mut max_spread: f64 = 0.0;
    for &theta in &sc.effort_types {
        let mut efforts = Vec::new();
        for report in [0.0, 0.5 * sc.prim.b_bar, sc.prim.b_bar] {
            efforts.push(solve_effort(theta, report, &sc.prim, &sc.effort_rule, sc.revenue)?.effort);
        }
        let (lo, hi) = efforts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, e| (a.0.min(*e), a.1.max(*e)));
        max_spread = max_spread.max(hi - lo);
    }
    let effort_invariance = EffortInvariance { max_spread, pass: max_spread <= 1e-10 };

    summary.checks.push(Check::new(
        "capmin_continuous",
        capmin_continuous.pass,
        format!("max deviation {:e}", capmin_continuous.max_deviation),
    ));
    summary.checks.push(Check::new(
        "capmin_discrete",
        capmin_discrete.pass,
        format!("max deviation {:e}", capmin_discrete.max_deviation),
    ));
    summary.checks.push(Check::new(
        "welfare_bruteforce",
        welfare.pass,
        format!("enumerated {} vs kkt {}", fmt_float(welfare.enumerated_cost), fmt_float(welfare.kkt_cost)),
    ));
    summary.checks.push(Check::new("effort_invariance", effort_invariance.pass, format!("max spread {max_spread:e}")));
    let pass = summary.checks.iter().all(|c| c.pass);
    out.json(
        "oracle_report.json",
        &OracleReport { capmin_continuous, capmin_discrete, welfare, effort_invariance, pass },
    )?;
    out.finish(summary)
}
