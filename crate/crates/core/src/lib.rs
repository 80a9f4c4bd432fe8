//! Optimal two-instrument screening for fiscal rescue policy.
//!
//! A leader (province, federal government) screens lower-tier governments
//! that privately know their fiscal-need type `θ`. It has two instruments:
//! ex-ante grants `T(θ)` and a type-indexed cap `b(θ)` on the realized
//! ex-post rescue. This crate solves the reduced-form program:
//!
//! * [`primitives`]: type distributions with hazard rates, convex rescue
//!   costs, and the policy weights.
//! * [`mechanism`]: virtual weights with ironing, the optimal cap schedule
//!   with its cutoffs, the no-rescue test and the transfer schedule under
//!   limited liability.
//! * [`discretion`]: the discretionary (no-commitment) payout rule and the
//!   fixed point for the effective grant weight `λ_T`.
//! * [`statics`]: closed-form comparative statics certified by finite
//!   differences of the full solver.
//! * [`simulation`]: Monte Carlo verification, payout simulation, the
//!   effort first-order condition and brute-force oracles.
//! * [`cli`]: run configuration, command orchestration and file output.
//!
//! The `examples/` directory contains one runnable program per capability.

// `!(x > 0.0)` guards are meant to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod discretion;
mod error;
pub mod mechanism;
pub mod primitives;
pub mod simulation;
pub mod statics;

pub use error::{Error, Result};

pub use discretion::{fixed_point, DiscretionSolution, FixedPointOptions, SignalRule};
pub use mechanism::{
    knife_edge, leader_cost, solve_cap, transfer_schedule, virtual_weight, CapSchedule, Regime,
    TransferSchedule, VirtualWeightCurve,
};
pub use primitives::{GridSpec, PayoutWeight, PolicyPrimitives, RescueCost, TypeDistribution};
