//! Type distributions, rescue costs and policy weights.
//!
//! Everything here is immutable after construction. Constructors validate
//! their parameters, so the solver modules can assume well-formed inputs.

mod cost;
mod distribution;
mod policy;
mod rng;

pub use cost::{CostKind, InverseMarginal, RescueCost};
pub use distribution::{DistributionKind, TabulatedDensity, TypeDistribution};
pub use policy::{GridSpec, PayoutWeight, PolicyPrimitives};
pub use rng::{sample_types, sample_types_range, UniformStream};

use crate::Result;

/// `h(θ) = f(θ) / (1 − F(θ))`.
pub fn hazard(dist: &TypeDistribution, theta: f64) -> Result<f64> {
    dist.hazard(theta)
}

/// `𝒞′(x)`.
pub fn marginal_cost(cost: &RescueCost, x: f64) -> Result<f64> {
    cost.marginal(x)
}

/// Smallest payout whose marginal cost equals `y`.
pub fn inverse_marginal(cost: &RescueCost, y: f64) -> Result<InverseMarginal> {
    cost.inverse_marginal(y)
}
