//! Effective grant weight when the leader cannot commit to the payout rule.

use rescuecap::discretion::interior_probability;
use rescuecap::{fixed_point, FixedPointOptions, PolicyPrimitives, RescueCost, SignalRule, TypeDistribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dist = TypeDistribution::weibull(2.0, 1.0)?;
    let cost = RescueCost::quadratic(0.2, 1.0)?;
    let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8)?.with_discretion(0.5, 1.0)?;

    let rule = SignalRule::discretionary(&prim, &cost)?;
    for signal in [0.1, 0.5, 1.0, 2.0] {
        println!("beta({signal:.1}) = {:.4}", rule.payout(signal));
    }

    let sol = fixed_point(&dist, &prim, &cost, &FixedPointOptions { tol: 1e-12, ..Default::default() })?;
    for (k, step) in sol.trace.iter().enumerate().take(5) {
        println!("iter {k:2}: lambda_T {:.6}  p_int {:.6}", step.lambda, step.p_int);
    }
    println!("converged {} after {} iterations", sol.converged, sol.iterations);
    println!("lambda_T      {:.6}", sol.lambda_t);
    println!("theta_min     {:.6}", sol.cap.theta_min().unwrap_or(f64::NAN));
    println!("theta_dagger  {:.6}", sol.cap.theta_dagger().unwrap_or(f64::NAN));
    println!("p_int         {:.6}", interior_probability(&dist, &sol.cap));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
