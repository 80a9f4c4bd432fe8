//! Ironing a nonmonotone virtual weight from a bimodal type density.

use rescuecap::{mechanism, virtual_weight, GridSpec, PolicyPrimitives, RescueCost, TypeDistribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let bump = |t: f64, c: f64| (-(t - c).powi(2) / 0.005).exp();
    let dist = TypeDistribution::tabulated_from_fn(0.0, 1.0, 201, |t| 0.05 + bump(t, 0.25) + bump(t, 0.7))?;
    println!("increasing failure rate: {}", dist.is_ifr());

    let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8)?;
    let grid = GridSpec::with_size(801);
    let curve = virtual_weight(&dist, &prim, prim.omega_t, &grid)?;
    let pooled = curve.ironed().iter().filter(|p| **p).count();
    println!("pooled grid points: {pooled} of {}", curve.theta().len());
    for theta in [0.1, 0.25, 0.35, 0.45, 0.6, 0.7, 0.8] {
        println!("  theta {theta:.2}: raw psi {:8.4}  ironed {:8.4}", curve.raw_at(theta)?, curve.ironed_at(theta));
    }

    let cost = RescueCost::quadratic(0.2, 1.0)?;
    let cap = mechanism::solve_cap(curve, &cost, prim.b_bar)?;
    let monotone = cap.b_star().windows(2).all(|w| w[1] >= w[0]);
    println!("cap nondecreasing: {monotone}, regime {}", cap.regime().as_str());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
