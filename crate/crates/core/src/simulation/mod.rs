//! Monte Carlo verification and numerical oracles.

mod effort;
mod mc;
mod oracle;
mod payout;
pub mod quadrature;

pub use effort::{default_density, solve_effort, EffortSolution, RevenueParams};
pub use mc::{mc_run, mc_run_cap, ClosedForm, McBin, McReport};
pub use oracle::{capmin_oracle, welfare_bruteforce, CapMinPoint, CapMinReport, SignalLaw, WelfareReport};
pub use payout::{expected_payout, simulate_payout, PayoutOutcome};
