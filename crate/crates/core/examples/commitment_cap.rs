//! Optimal cap schedule, transfers and leader cost under commitment.

use rescuecap::{leader_cost, mechanism, transfer_schedule, GridSpec, PolicyPrimitives, RescueCost, TypeDistribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dist = TypeDistribution::weibull(2.0, 1.0)?;
    let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8)?;
    let cost = RescueCost::quadratic(0.2, 1.0)?;

    let cap = mechanism::solve(&dist, &prim, &cost, prim.omega_t, &GridSpec::default())?;
    let transfers = transfer_schedule(&cap, &prim);
    let total = leader_cost(&cap, &transfers, &dist, &cost, &prim)?;

    println!("regime        {}", cap.regime().as_str());
    println!("theta_min     {:.6}", cap.theta_min().unwrap_or(f64::NAN));
    println!("theta_dagger  {:.6}", cap.theta_dagger().unwrap_or(f64::NAN));
    println!("leader cost   {total:.6}");
    for theta in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7] {
        println!("  b*({theta:.1}) = {:.4}", cap.eval(theta));
    }
    let binding = transfers.ll_binding.iter().filter(|b| **b).count();
    println!("limited liability binds at {binding} of {} grid points", transfers.theta.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
