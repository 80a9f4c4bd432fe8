use crate::error::{param, Error, Result};

/// Convex, increasing resource cost `𝒞(x)` of paying out a rescue `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescueCost {
    kind: CostKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostKind {
    /// `𝒞(x) = αx + (κ/2)x²`.
    Quadratic { alpha: f64, kappa: f64 },
    /// Piecewise-linear marginal cost through `(x[i], marginal[i])`, with
    /// `x[0] = 0`. Beyond the last node the final segment's slope continues.
    Tabulated { x: Vec<f64>, marginal: Vec<f64> },
}

/// Result of inverting the marginal cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseMarginal {
    pub payout: f64,
    /// The target lay below `𝒞′(0⁺)`; `payout` is then zero.
    pub below_origin: bool,
}

impl RescueCost {
    pub fn quadratic(alpha: f64, kappa: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(param(format!("cost alpha must be finite and >= 0, got {alpha}")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(param(format!("cost kappa must be finite and > 0, got {kappa}")));
        }
        Ok(Self { kind: CostKind::Quadratic { alpha, kappa } })
    }

    pub fn tabulated(x: Vec<f64>, marginal: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != marginal.len() {
            return Err(param("tabulated cost needs at least two (x, marginal) pairs of equal length"));
        }
        if x[0] != 0.0 {
            return Err(param("tabulated cost must start at x = 0"));
        }
        if x.iter().chain(&marginal).any(|v| !v.is_finite()) {
            return Err(param("tabulated cost values must be finite"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(param("tabulated cost nodes must be strictly increasing"));
        }
        if marginal[0] < 0.0 || marginal.windows(2).any(|w| w[1] < w[0]) {
            return Err(param("tabulated marginal cost must be nonnegative and nondecreasing"));
        }
        Ok(Self { kind: CostKind::Tabulated { x, marginal } })
    }

    pub fn kind(&self) -> &CostKind {
        &self.kind
    }

    /// `(α, κ)` for the quadratic kind.
    pub fn quadratic_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            CostKind::Quadratic { alpha, kappa } => Some((alpha, kappa)),
            CostKind::Tabulated { .. } => None,
        }
    }

    /// `𝒞′(0⁺)`.
    pub fn marginal_at_origin(&self) -> f64 {
        match &self.kind {
            CostKind::Quadratic { alpha, .. } => *alpha,
            CostKind::Tabulated { marginal, .. } => marginal[0],
        }
    }

    /// Largest slope of the marginal cost (`κ` for the quadratic kind).
    pub fn max_curvature(&self) -> f64 {
        match &self.kind {
            CostKind::Quadratic { kappa, .. } => *kappa,
            CostKind::Tabulated { x, marginal } => x
                .windows(2)
                .zip(marginal.windows(2))
                .map(|(xs, ms)| (ms[1] - ms[0]) / (xs[1] - xs[0]))
                .fold(0.0, f64::max),
        }
    }

    fn check_payout(x: f64) -> Result<()> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("payout must be >= 0, got {x}")));
        }
        Ok(())
    }

    pub fn marginal(&self, x: f64) -> Result<f64> {
        Self::check_payout(x)?;
        Ok(self.marginal_unchecked(x))
    }

    fn marginal_unchecked(&self, x: f64) -> f64 {
        match &self.kind {
            CostKind::Quadratic { alpha, kappa } => alpha + kappa * x,
            CostKind::Tabulated { x: xs, marginal } => {
                let i = segment(xs, x);
                let slope = (marginal[i + 1] - marginal[i]) / (xs[i + 1] - xs[i]);
                marginal[i] + slope * (x - xs[i])
            }
        }
    }

    pub fn cost(&self, x: f64) -> Result<f64> {
        Self::check_payout(x)?;
        Ok(match &self.kind {
            CostKind::Quadratic { alpha, kappa } => alpha * x + 0.5 * kappa * x * x,
            CostKind::Tabulated { x: xs, marginal } => {
                // Exact integral of the piecewise-linear marginal.
                let mut total = 0.0;
                let mut left = 0.0;
                let mut m_left = marginal[0];
                for (j, &node) in xs.iter().enumerate().skip(1) {
                    let right = if j + 1 == xs.len() { x } else { node.min(x) };
                    if right <= left {
                        break;
                    }
                    let m_right = self.marginal_unchecked(right);
                    total += 0.5 * (m_left + m_right) * (right - left);
                    left = right;
                    m_left = m_right;
                }
                total
            }
        })
    }

    /// Smallest `x ≥ 0` with `𝒞′(x) = y`.
    ///
    /// Targets below `𝒞′(0⁺)` return zero with `below_origin` set. The
    /// tabulated kind is inverted by bisection.
    pub fn inverse_marginal(&self, y: f64) -> Result<InverseMarginal> {
        if y.is_nan() {
            return Err(Error::Domain("marginal target is NaN".into()));
        }
        if y < self.marginal_at_origin() {
            return Ok(InverseMarginal { payout: 0.0, below_origin: true });
        }
        let payout = match &self.kind {
            CostKind::Quadratic { alpha, kappa } => (y - alpha) / kappa,
            CostKind::Tabulated { x, marginal } => {
                let n = x.len();
                let mut hi = x[n - 1];
                if y > marginal[n - 1] {
                    let slope = (marginal[n - 1] - marginal[n - 2]) / (x[n - 1] - x[n - 2]);
                    if !(slope > 0.0) {
                        return Err(Error::Domain(format!(
                            "marginal cost {y} is never reached by the tabulated cost"
                        )));
                    }
                    hi += 2.0 * (y - marginal[n - 1]) / slope;
                }
                let mut lo = 0.0;
                if self.marginal_unchecked(lo) >= y {
                    0.0
                } else {
                    // Invariant: 𝒞′(lo) < y <= 𝒞′(hi).
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if self.marginal_unchecked(mid) < y {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    hi
                }
            }
        };
        Ok(InverseMarginal { payout, below_origin: false })
    }
}

/// Index `i` of the segment `[xs[i], xs[i + 1]]` used to evaluate at `x`;
/// the last segment extends to the right.
fn segment(xs: &[f64], x: f64) -> usize {
    match xs.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => i.min(xs.len() - 2),
        Err(i) => i.saturating_sub(1).min(xs.len() - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> RescueCost {
        RescueCost::tabulated(vec![0.0, 1.0], vec![0.1, 0.5]).unwrap()
    }

    #[test]
    fn quadratic_marginal_values() {
        let c = RescueCost::quadratic(0.2, 1.0).unwrap();
        assert_eq!(c.marginal(0.0).unwrap(), 0.2);
        assert!((c.marginal(0.8).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(c.marginal(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn tabulated_marginal_interpolates() {
        assert!((table().marginal(0.5).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn quadratic_inverse() {
        let c = RescueCost::quadratic(0.2, 1.0).unwrap();
        let inv = c.inverse_marginal(1.0).unwrap();
        assert!((inv.payout - 0.8).abs() < 1e-15 && !inv.below_origin);
        let below = c.inverse_marginal(0.1).unwrap();
        assert_eq!(below, InverseMarginal { payout: 0.0, below_origin: true });
    }

    #[test]
    fn tabulated_inverse_matches_interpolation() {
        let inv = table().inverse_marginal(0.3).unwrap();
        // Interpolation oracle: 0.1 + 0.4 x = 0.3.
        let oracle = (0.3 - 0.1) / 0.4;
        assert!((inv.payout - oracle).abs() < 1e-12);
        assert!((table().marginal(inv.payout).unwrap() - 0.3).abs() <= 1e-10);
    }

    #[test]
    fn tabulated_inverse_takes_smallest_point_on_flat_segment() {
        let c = RescueCost::tabulated(vec![0.0, 1.0, 2.0, 3.0], vec![0.1, 0.5, 0.5, 0.9]).unwrap();
        let inv = c.inverse_marginal(0.5).unwrap();
        assert!((inv.payout - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tabulated_cost_integrates_marginal() {
        // ∫₀^x (0.1 + 0.4t) dt = 0.1x + 0.2x².
        let c = table();
        for &x in &[0.0, 0.25, 1.0, 1.5] {
            assert!((c.cost(x).unwrap() - (0.1 * x + 0.2 * x * x)).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn flat_tail_target_is_unreachable() {
        let c = RescueCost::tabulated(vec![0.0, 1.0, 2.0], vec![0.1, 0.5, 0.5]).unwrap();
        assert!(c.inverse_marginal(0.7).is_err());
        assert!(RescueCost::tabulated(vec![0.0, 1.0], vec![0.5, 0.1]).is_err());
    }
}
