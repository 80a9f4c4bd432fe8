//! Monte Carlo cutoffs and binned cap means against the solved schedule.

use rescuecap::simulation::mc_run;
use rescuecap::{GridSpec, PolicyPrimitives, RescueCost, TypeDistribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dist = TypeDistribution::weibull(2.0, 1.0)?;
    let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8)?;
    let cost = RescueCost::quadratic(0.2, 1.0)?;

    let report = mc_run(&dist, &prim, &cost, prim.omega_t, 200_000, 7, 12, &GridSpec::default())?;
    let show = |x: Option<f64>| x.map_or("none".to_string(), |v| format!("{v:.4}"));
    println!("              sampled   exact");
    println!("theta_min     {}    {}", show(report.theta_min), show(report.closed_form.theta_min));
    println!("theta_dagger  {}    {}", show(report.theta_dagger), show(report.closed_form.theta_dagger));
    println!("p_int         {:.4}    {:.4}", report.p_int, report.closed_form.p_int);
    println!("  center   mean_b   b*(center)  count");
    for b in report.bins.iter().filter(|b| b.count > 0) {
        println!("  {:6.3}   {:6.4}   {:6.4}     {}", b.center, b.mean_b, b.b_star_closed, b.count);
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
