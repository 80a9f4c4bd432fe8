//! Closed-form comparative statics checked against the full solver.

use rescuecap::statics::{discretion_sensitivity, fd_certify, FdValue};
use rescuecap::{FixedPointOptions, GridSpec, PolicyPrimitives, RescueCost, TypeDistribution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dist = TypeDistribution::weibull(2.0, 1.0)?;
    let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8)?;
    let cost = RescueCost::quadratic(0.2, 1.0)?;

    let report = fd_certify(&dist, &prim, &cost, prim.omega_t, 1e-5, &GridSpec::default())?;
    println!("theta_min {:.6}, b_max {:.6}, h'(theta_min) {:.6}", report.theta_min, report.b_max, report.hazard_slope);
    for e in &report.entries {
        let fd = match e.finite_difference {
            FdValue::Value(v) => format!("{v:+.8}"),
            other => format!("{other:?}"),
        };
        println!(
            "  {:20} analytic {:+.8}  fd {fd}  rel {:.1e}  sign ok {}",
            e.partial.name(),
            e.analytic.unwrap_or(f64::NAN),
            e.rel_error.unwrap_or(f64::NAN),
            e.sign_ok
        );
    }

    let disc = prim.clone().with_discretion(0.5, 1.0)?;
    let sens = discretion_sensitivity(&dist, &disc, &cost, 1e-4, &FixedPointOptions::default())?;
    println!("through the fixed point at m = {} (lambda_T {:.6}):", sens.m, sens.lambda_t);
    for e in &sens.entries {
        println!("  {:20} fd {:+.6}  sign ok {}", e.partial.name(), e.finite_difference.value().unwrap_or(f64::NAN), e.sign_ok);
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
