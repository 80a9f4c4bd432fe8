//! Gauss–Hermite and Gauss–Legendre rules.

use std::f64::consts::PI;

/// Nodes used for expectations over the Gaussian audit noise.
pub const HERMITE_NODES: usize = 41;

/// Physicists' Gauss–Hermite rule: `∫ e^{−x²} g(x) dx ≈ Σ wᵢ g(xᵢ)`.
///
/// Roots of the orthonormal Hermite recurrence are refined by Newton's
/// method from the usual asymptotic starting guesses.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `E[g(η)]` for `η ~ N(0, σ²)` with an `n`-node Gauss–Hermite rule.
pub fn gaussian_expectation(sigma: f64, n: usize, g: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_hermite(n);
    let s = std::f64::consts::SQRT_2 * sigma;
    x.iter().zip(&w).map(|(xi, wi)| wi * g(s * xi)).sum::<f64>() / PI.sqrt()
}

/// Five-point Gauss–Legendre on `[a, b]`; exact for polynomials of degree 9.
pub fn gauss_legendre5(a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * X.iter().zip(&W).map(|(x, w)| w * g(mid + half * x)).sum::<f64>()
}
