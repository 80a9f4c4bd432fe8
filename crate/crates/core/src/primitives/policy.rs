use super::TypeDistribution;
use crate::error::{param, Result};

/// Marginal utility of a realized bailout, `ω_b`.
///
/// Non-constant weights are tabulated on strictly increasing types and
/// interpolated linearly; values must be nondecreasing so the cap schedule
/// stays monotone. Outside the table the end values are held.
#[derive(Debug, Clone, PartialEq)]
pub enum PayoutWeight {
    Constant(f64),
    Tabulated { theta: Vec<f64>, values: Vec<f64> },
}

impl From<f64> for PayoutWeight {
    fn from(v: f64) -> Self {
        PayoutWeight::Constant(v)
    }
}

impl PayoutWeight {
    pub fn at(&self, theta: f64) -> f64 {
        match self {
            PayoutWeight::Constant(v) => *v,
            PayoutWeight::Tabulated { theta: ts, values } => {
                if theta <= ts[0] {
                    return values[0];
                }
                let n = ts.len();
                if theta >= ts[n - 1] {
                    return values[n - 1];
                }
                let i = ts.partition_point(|t| *t <= theta) - 1;
                let w = (theta - ts[i]) / (ts[i + 1] - ts[i]);
                values[i] + w * (values[i + 1] - values[i])
            }
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            PayoutWeight::Constant(v) => Some(*v),
            PayoutWeight::Tabulated { .. } => None,
        }
    }

    fn problems(&self, out: &mut Vec<String>) {
        match self {
            PayoutWeight::Constant(v) => {
                if !(v.is_finite() && *v >= 0.0) {
                    out.push(format!("omega_b must be finite and >= 0, got {v}"));
                }
            }
            PayoutWeight::Tabulated { theta, values } => {
                if theta.is_empty() || theta.len() != values.len() {
                    out.push("omega_b table needs equal, nonzero numbers of theta and values".into());
                    return;
                }
                if theta.iter().chain(values).any(|v| !v.is_finite()) {
                    out.push("omega_b table entries must be finite".into());
                }
                if theta.windows(2).any(|w| w[1] <= w[0]) {
                    out.push("omega_b table theta must be strictly increasing".into());
                }
                if values.iter().any(|v| *v < 0.0) || values.windows(2).any(|w| w[1] < w[0]) {
                    out.push("omega_b table values must be nonnegative and nondecreasing".into());
                }
            }
        }
    }
}

/// Leader weights, statutory cap, discretion and effort parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyPrimitives {
    /// Local weight on grants, `ω_T`.
    pub omega_t: f64,
    pub omega_b: PayoutWeight,
    /// Leader's marginal cost of grant funds.
    pub gamma: f64,
    /// Statutory cap on any realized rescue.
    pub b_bar: f64,
    /// Interior slope of the discretionary payout rule, in `[0, 1)`.
    pub m: f64,
    /// Curvature of the residual-gap loss under discretion.
    pub chi: f64,
    /// Disutility per unit of tax effort.
    pub phi_e: f64,
    /// Welfare loss of a default.
    pub phi_d: f64,
    /// Standard deviation of the Gaussian audit noise on the gap signal.
    pub eta_scale: f64,
}

impl PolicyPrimitives {
    /// Weights and cap, with `m = 0`, `χ = 1`, `φ_e = 1`, `φ_d = 0` and
    /// noise scale 0.1.
    pub fn new(omega_t: f64, omega_b: impl Into<PayoutWeight>, gamma: f64, b_bar: f64) -> Result<Self> {
        Self {
            omega_t,
            omega_b: omega_b.into(),
            gamma,
            b_bar,
            m: 0.0,
            chi: 1.0,
            phi_e: 1.0,
            phi_d: 0.0,
            eta_scale: 0.1,
        }
        .checked()
    }

    pub fn with_discretion(mut self, m: f64, chi: f64) -> Result<Self> {
        self.m = m;
        self.chi = chi;
        self.checked()
    }

    pub fn with_effort(mut self, phi_e: f64, phi_d: f64) -> Result<Self> {
        self.phi_e = phi_e;
        self.phi_d = phi_d;
        self.checked()
    }

    pub fn with_noise_scale(mut self, eta_scale: f64) -> Result<Self> {
        self.eta_scale = eta_scale;
        self.checked()
    }

    /// Every violated constraint, one message each.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let positive = |name: &str, v: f64, out: &mut Vec<String>| {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("{name} must be finite and > 0, got {v}"));
            }
        };
        positive("omega_t", self.omega_t, &mut out);
        self.omega_b.problems(&mut out);
        positive("gamma", self.gamma, &mut out);
        positive("b_bar", self.b_bar, &mut out);
        if !(self.m >= 0.0 && self.m < 1.0) {
            out.push(format!("m must lie in [0, 1), got {}", self.m));
        }
        positive("chi", self.chi, &mut out);
        positive("phi_e", self.phi_e, &mut out);
        if !(self.phi_d >= 0.0 && self.phi_d.is_finite()) {
            out.push(format!("phi_d must be finite and >= 0, got {}", self.phi_d));
        }
        positive("eta_scale", self.eta_scale, &mut out);
        out
    }

    pub fn checked(self) -> Result<Self> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(self)
        } else {
            Err(param(problems.join("; ")))
        }
    }

    /// `γ·ω_b(θ)/λ_T`, the factor multiplying the hazard in the virtual weight.
    pub fn virtual_scale(&self, theta: f64, lambda_t: f64) -> f64 {
        self.gamma * self.omega_b.at(theta) / lambda_t
    }
}

/// Uniform solver grid over the (truncated) type support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub size: usize,
    /// Survivor mass cut off above the grid for unbounded or steep tails.
    pub tail_mass: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { size: 4097, tail_mass: 1e-10 }
    }
}

impl GridSpec {
    pub fn with_size(size: usize) -> Self {
        Self { size, ..Self::default() }
    }

    /// Grid nodes for `dist`; a point mass yields its single atom.
    pub fn nodes(&self, dist: &TypeDistribution) -> Result<Vec<f64>> {
        if dist.is_point_mass() {
            return Ok(vec![dist.support().0]);
        }
        if self.size < 2 {
            return Err(param(format!("grid size must be >= 2, got {}", self.size)));
        }
        if !(self.tail_mass > 0.0 && self.tail_mass < 0.5) {
            return Err(param(format!("tail mass must lie in (0, 0.5), got {}", self.tail_mass)));
        }
        let lo = dist.support().0;
        let hi = dist.grid_upper(self.tail_mass);
        let step = (hi - lo) / (self.size - 1) as f64;
        let mut nodes: Vec<f64> = (0..self.size).map(|i| lo + step * i as f64).collect();
        nodes[self.size - 1] = hi;
        Ok(nodes)
    }
}
