//! Weighted pool-adjacent-violators.

/// Nondecreasing, weight-preserving envelope of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Ironed {
    pub values: Vec<f64>,
    /// Index of the pooled block each point belongs to.
    pub block: Vec<usize>,
    /// Whether the point sits in a block of two or more points.
    pub pooled: Vec<bool>,
}

/// Weighted isotonic (nondecreasing) regression by pool-adjacent-violators.
///
/// Each block's value is the weighted mean of the raw values it covers, so
/// `Σ wᵢ·valueᵢ` is preserved on every block. The result equals the slope
/// of the greatest convex minorant of the cumulative sums `(Σw, Σw·v)`.
/// Weights must be nonnegative and `values.len() == weights.len()`.
pub fn iron(values: &[f64], weights: &[f64]) -> Ironed {
    assert_eq!(values.len(), weights.len(), "values and weights differ in length");
    // Stack of blocks: (weighted sum, weight, plain sum, count).
    let mut blocks: Vec<(f64, f64, f64, usize)> = Vec::with_capacity(values.len());
    let mean = |b: &(f64, f64, f64, usize)| {
        if b.3 == 1 {
            b.2
        } else if b.1 > 0.0 {
            b.0 / b.1
        } else {
            b.2 / b.3 as f64
        }
    };
    for (&v, &w) in values.iter().zip(weights) {
        let mut cur = (w * v, w, v, 1usize);
        while let Some(prev) = blocks.last() {
            if mean(prev) > mean(&cur) {
                let prev = blocks.pop().unwrap();
                cur = (prev.0 + cur.0, prev.1 + cur.1, prev.2 + cur.2, prev.3 + cur.3);
            } else {
                break;
            }
        }
        blocks.push(cur);
    }
    let mut out = Ironed {
        values: Vec::with_capacity(values.len()),
        block: Vec::with_capacity(values.len()),
        pooled: Vec::with_capacity(values.len()),
    };
    for (id, b) in blocks.iter().enumerate() {
        let m = mean(b);
        for _ in 0..b.3 {
            out.values.push(m);
            out.block.push(id);
            out.pooled.push(b.3 > 1);
        }
    }
    out
}
