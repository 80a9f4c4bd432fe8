use crate::error::{param, Error, Result};

/// Fiscal-need type distribution on a closed support `[θ_lo, θ_hi]`.
///
/// `θ_hi` is infinite for the Weibull and exponential kinds. Grid-based
/// solvers truncate such supports at a small tail mass (see
/// [`GridSpec`](super::GridSpec)); sampling uses the untruncated law.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeDistribution {
    kind: DistributionKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionKind {
    Weibull { shape: f64, scale: f64 },
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `base` conditioned on `[lo, hi]`; `hi` may be infinite.
    Truncated { base: Box<TypeDistribution>, lo: f64, hi: f64 },
    Tabulated(TabulatedDensity),
    /// Degenerate type space used by oracle tests. The hazard is not
    /// defined for a point mass, so the caller supplies the value that
    /// enters the virtual weight.
    PointMass { theta: f64, hazard: f64 },
}

/// Density given on a uniform grid, linearly interpolated between nodes.
///
/// The CDF at the nodes is the trapezoid cumulation of the density,
/// renormalized so the last node carries `F = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    lo: f64,
    step: f64,
    density: Vec<f64>,
    cdf: Vec<f64>,
    ifr: bool,
}

impl TabulatedDensity {
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.density.len()).map(move |i| self.node(i))
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn cdf_nodes(&self) -> &[f64] {
        &self.cdf
    }

    fn node(&self, i: usize) -> f64 {
        if i + 1 == self.density.len() {
            self.hi()
        } else {
            self.lo + self.step * i as f64
        }
    }

    fn hi(&self) -> f64 {
        self.lo + self.step * (self.density.len() - 1) as f64
    }

    /// Cell index `i` with `node(i) <= θ <= node(i + 1)` and offset into it.
    fn locate(&self, theta: f64) -> (usize, f64) {
        let last = self.density.len() - 2;
        let i = (((theta - self.lo) / self.step).floor().max(0.0) as usize).min(last);
        (i, theta - self.node(i))
    }

    fn pdf(&self, theta: f64) -> f64 {
        if theta < self.lo || theta > self.hi() {
            return 0.0;
        }
        let (i, t) = self.locate(theta);
        let (f0, f1) = (self.density[i], self.density[i + 1]);
        f0 + (f1 - f0) * t / self.step
    }

    fn cdf(&self, theta: f64) -> f64 {
        if theta <= self.lo {
            return 0.0;
        }
        if theta >= self.hi() {
            return 1.0;
        }
        let (i, t) = self.locate(theta);
        let (f0, f1) = (self.density[i], self.density[i + 1]);
        (self.cdf[i] + f0 * t + (f1 - f0) * t * t / (2.0 * self.step)).min(1.0)
    }

    fn quantile(&self, u: f64) -> f64 {
        let i = match self.cdf.binary_search_by(|c| c.total_cmp(&u)) {
            Ok(i) => return self.node(i),
            Err(i) => i.clamp(1, self.cdf.len() - 1) - 1,
        };
        let (mut a, mut b) = (self.node(i), self.node(i + 1));
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.cdf(mid) < u {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }
}

/// Relative slack when checking hazard monotonicity on a grid.
const IFR_SLACK: f64 = 1e-12;

impl TypeDistribution {
    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && scale > 0.0 && scale.is_finite()) {
            return Err(param(format!(
                "weibull needs shape > 0 and scale > 0, got shape={shape}, scale={scale}"
            )));
        }
        Ok(Self { kind: DistributionKind::Weibull { shape, scale } })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(param(format!("exponential needs rate > 0, got {rate}")));
        }
        Ok(Self { kind: DistributionKind::Exponential { rate } })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(param(format!("uniform needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { kind: DistributionKind::Uniform { lo, hi } })
    }

    /// Conditions `base` on `[lo, hi]`.
    pub fn truncated(base: TypeDistribution, lo: f64, hi: f64) -> Result<Self> {
        if matches!(base.kind, DistributionKind::PointMass { .. }) {
            return Err(param("cannot truncate a point mass"));
        }
        let (blo, bhi) = base.support();
        if !(lo.is_finite() && lo < hi && lo >= blo && hi <= bhi) {
            return Err(param(format!(
                "truncation [{lo}, {hi}] must be a nonempty subinterval of [{blo}, {bhi}]"
            )));
        }
        let mass = base.survivor(lo) - base.survivor(hi);
        if !(mass > 0.0) {
            return Err(param(format!("truncation [{lo}, {hi}] carries no probability mass")));
        }
        Ok(Self { kind: DistributionKind::Truncated { base: Box::new(base), lo, hi } })
    }

    /// Density values on `density.len()` uniform nodes spanning `[lo, hi]`.
    pub fn tabulated(lo: f64, hi: f64, density: Vec<f64>) -> Result<Self> {
        let n = density.len();
        if n < 2 {
            return Err(param("tabulated density needs at least two nodes"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(param(format!("tabulated support needs finite lo < hi, got [{lo}, {hi}]")));
        }
        if density.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(param("tabulated density values must be finite and nonnegative"));
        }
        if density[1..n - 1].iter().any(|f| *f <= 0.0) {
            return Err(param("tabulated density must be positive at interior nodes"));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        for w in density.windows(2) {
            let last = *cdf.last().unwrap();
            cdf.push(last + 0.5 * (w[0] + w[1]) * step);
        }
        let total = cdf[n - 1];
        if !(total > 0.0) {
            return Err(param("tabulated density has zero mass"));
        }
        let density: Vec<f64> = density.iter().map(|f| f / total).collect();
        for c in cdf.iter_mut() {
            *c /= total;
        }
        cdf[n - 1] = 1.0;

        let hazards: Vec<f64> = (0..n - 1).map(|i| density[i] / (1.0 - cdf[i])).collect();
        let ifr = hazards.windows(2).all(|w| w[1] >= w[0] * (1.0 - IFR_SLACK));
        Ok(Self {
            kind: DistributionKind::Tabulated(TabulatedDensity { lo, step, density, cdf, ifr }),
        })
    }

    /// Tabulates `density` at `nodes` uniform points on `[lo, hi]`.
    pub fn tabulated_from_fn(
        lo: f64,
        hi: f64,
        nodes: usize,
        density: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if nodes < 2 {
            return Err(param("tabulated density needs at least two nodes"));
        }
        let step = (hi - lo) / (nodes - 1) as f64;
        Self::tabulated(lo, hi, (0..nodes).map(|i| density(lo + step * i as f64)).collect())
    }

    pub fn point_mass(theta: f64, hazard: f64) -> Result<Self> {
        if !(theta.is_finite() && hazard.is_finite() && hazard >= 0.0) {
            return Err(param(format!(
                "point mass needs finite theta and hazard >= 0, got theta={theta}, hazard={hazard}"
            )));
        }
        Ok(Self { kind: DistributionKind::PointMass { theta, hazard } })
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn is_point_mass(&self) -> bool {
        matches!(self.kind, DistributionKind::PointMass { .. })
    }

    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            DistributionKind::Weibull { .. } | DistributionKind::Exponential { .. } => {
                (0.0, f64::INFINITY)
            }
            DistributionKind::Uniform { lo, hi } | DistributionKind::Truncated { lo, hi, .. } => {
                (*lo, *hi)
            }
            DistributionKind::Tabulated(t) => (t.lo, t.hi()),
            DistributionKind::PointMass { theta, .. } => (*theta, *theta),
        }
    }

    /// Whether the hazard rate is nondecreasing on the support.
    ///
    /// Tabulated densities are checked on their nodes at construction.
    pub fn is_ifr(&self) -> bool {
        match &self.kind {
            DistributionKind::Weibull { shape, .. } => *shape >= 1.0,
            DistributionKind::Exponential { .. }
            | DistributionKind::Uniform { .. }
            | DistributionKind::PointMass { .. } => true,
            // Conditioning on an interval preserves an increasing hazard.
            DistributionKind::Truncated { base, .. } => base.is_ifr(),
            DistributionKind::Tabulated(t) => t.ifr,
        }
    }

    pub fn pdf(&self, theta: f64) -> f64 {
        let (lo, hi) = self.support();
        if theta < lo || theta > hi {
            return 0.0;
        }
        match &self.kind {
            DistributionKind::Weibull { shape: k, scale: s } => {
                let z = theta / s;
                (k / s) * z.powf(k - 1.0) * (-z.powf(*k)).exp()
            }
            DistributionKind::Exponential { rate } => rate * (-rate * theta).exp(),
            DistributionKind::Uniform { lo, hi } => 1.0 / (hi - lo),
            DistributionKind::Truncated { base, lo, hi } => {
                base.pdf(theta) / (base.survivor(*lo) - base.survivor(*hi))
            }
            DistributionKind::Tabulated(t) => t.pdf(theta),
            // No density; the point mass is handled explicitly by callers.
            DistributionKind::PointMass { .. } => f64::INFINITY,
        }
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        match &self.kind {
            DistributionKind::Tabulated(t) => t.cdf(theta),
            DistributionKind::PointMass { theta: t0, .. } => {
                if theta >= *t0 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => 1.0 - self.survivor(theta),
        }
    }

    /// `1 − F(θ)`, computed directly where a closed form exists.
    pub fn survivor(&self, theta: f64) -> f64 {
        let (lo, hi) = self.support();
        if theta <= lo && !self.is_point_mass() {
            return 1.0;
        }
        if theta >= hi && !self.is_point_mass() {
            return 0.0;
        }
        match &self.kind {
            DistributionKind::Weibull { shape, scale } => (-(theta / scale).powf(*shape)).exp(),
            DistributionKind::Exponential { rate } => (-rate * theta).exp(),
            DistributionKind::Uniform { lo, hi } => (hi - theta) / (hi - lo),
            DistributionKind::Truncated { base, lo, hi } => {
                let tail = base.survivor(*hi);
                (base.survivor(theta) - tail) / (base.survivor(*lo) - tail)
            }
            DistributionKind::Tabulated(t) => 1.0 - t.cdf(theta),
            DistributionKind::PointMass { .. } => 1.0 - self.cdf(theta),
        }
    }

    fn check_support(&self, theta: f64) -> Result<()> {
        let (lo, hi) = self.support();
        if !(theta >= lo && theta <= hi) {
            return Err(Error::Domain(format!("theta = {theta} outside support [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// Hazard rate `f(θ) / (1 − F(θ))`.
    pub fn hazard(&self, theta: f64) -> Result<f64> {
        self.check_support(theta)?;
        if let DistributionKind::PointMass { hazard, .. } = self.kind {
            return Ok(hazard);
        }
        let survivor = self.survivor(theta);
        if survivor <= f64::EPSILON {
            return Err(Error::UpperSupport(theta));
        }
        Ok(match &self.kind {
            DistributionKind::Weibull { shape: k, scale: s } => (k / s) * (theta / s).powf(k - 1.0),
            DistributionKind::Exponential { rate } => *rate,
            DistributionKind::Uniform { hi, .. } => 1.0 / (hi - theta),
            _ => self.pdf(theta) / survivor,
        })
    }

    /// `h′(θ)`: analytic where available, otherwise a five-point stencil.
    pub fn hazard_derivative(&self, theta: f64) -> Result<f64> {
        self.check_support(theta)?;
        match &self.kind {
            DistributionKind::Weibull { shape: k, scale: s } => {
                Ok(k * (k - 1.0) / (s * s) * (theta / s).powf(k - 2.0))
            }
            DistributionKind::Exponential { .. } => Ok(0.0),
            DistributionKind::Uniform { hi, .. } => Ok(1.0 / ((hi - theta) * (hi - theta))),
            DistributionKind::PointMass { .. } => {
                Err(Error::Unsupported("hazard derivative of a point mass".into()))
            }
            _ => {
                let (lo, hi) = self.support();
                let h = 1e-4 * theta.abs().max(1.0);
                if theta - 2.0 * h < lo || theta + 2.0 * h > hi {
                    return Err(Error::Domain(format!(
                        "theta = {theta} too close to the support edge for a stencil"
                    )));
                }
                let hz = |x: f64| self.hazard(x);
                Ok((hz(theta - 2.0 * h)? - 8.0 * hz(theta - h)? + 8.0 * hz(theta + h)?
                    - hz(theta + 2.0 * h)?)
                    / (12.0 * h))
            }
        }
    }

    /// Inverse CDF for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match &self.kind {
            DistributionKind::Weibull { shape, scale } => {
                scale * (-(-u).ln_1p()).powf(1.0 / shape)
            }
            DistributionKind::Exponential { rate } => -(-u).ln_1p() / rate,
            DistributionKind::Uniform { lo, hi } => lo + u * (hi - lo),
            DistributionKind::Truncated { base, lo, hi } => {
                let (s_lo, s_hi) = (base.survivor(*lo), base.survivor(*hi));
                base.inverse_survivor(s_lo - u * (s_lo - s_hi)).clamp(*lo, *hi)
            }
            DistributionKind::Tabulated(t) => t.quantile(u),
            DistributionKind::PointMass { theta, .. } => *theta,
        }
    }

    /// The type whose survivor probability is `tail`.
    pub fn inverse_survivor(&self, tail: f64) -> f64 {
        match &self.kind {
            DistributionKind::Weibull { shape, scale } => scale * (-tail.ln()).powf(1.0 / shape),
            DistributionKind::Exponential { rate } => -tail.ln() / rate,
            _ => self.quantile(1.0 - tail),
        }
    }

    /// Upper end of the grid used by the solvers: the support's upper end,
    /// or the type leaving survivor mass `tail_mass`, whichever is lower.
    pub fn grid_upper(&self, tail_mass: f64) -> f64 {
        let (_, hi) = self.support();
        if self.is_point_mass() {
            return hi;
        }
        hi.min(self.inverse_survivor(tail_mass))
    }
}
