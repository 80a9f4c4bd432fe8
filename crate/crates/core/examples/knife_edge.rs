//! The no-rescue test on exponential types, where the hazard is flat.

use rescuecap::{knife_edge, mechanism, GridSpec, PolicyPrimitives, RescueCost, TypeDistribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8)?;
    let grid = GridSpec::default();
    println!("   alpha  rate  threshold  holds  margin    regime");
    for rate in [0.5, 1.0, 2.0] {
        let dist = TypeDistribution::exponential(rate)?;
        let threshold = prim.gamma * 0.8 * rate / prim.omega_t;
        for alpha in [0.2, 0.8, 1.6] {
            let cost = RescueCost::quadratic(alpha, 1.0)?;
            let edge = knife_edge(&dist, &prim, &cost, prim.omega_t, &grid)?;
            let cap = mechanism::solve(&dist, &prim, &cost, prim.omega_t, &grid)?;
            println!(
                "  {alpha:6.2} {rate:5.2} {threshold:10.3}  {:5}  {:+.4}  {}",
                edge.holds,
                edge.margin,
                cap.regime().as_str()
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
