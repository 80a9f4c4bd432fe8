//! Local fiscal effort under a threshold payout rule with noisy audits.

use rescuecap::simulation::{simulate_payout, solve_effort, RevenueParams};
use rescuecap::{PolicyPrimitives, SignalRule};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rule = SignalRule::single_threshold(0.2, 0.4)?;
    let revenue = RevenueParams::default();

    println!("phi_d   effort(0.3)  Lambda    iterations");
    for phi_d in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8)?.with_effort(1.0, phi_d)?;
        let s = solve_effort(0.3, 0.8, &prim, &rule, revenue)?;
        println!("{phi_d:5.2}   {:.8}   {:.5}   {}", s.effort, s.lambda, s.iterations);
    }

    let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8)?.with_effort(1.0, 0.5)?;
    for cap in [0.1, 0.4, 0.8] {
        let s = solve_effort(0.3, cap, &prim, &rule, revenue)?;
        println!("cap at report {cap:.1}: effort {:.10}, P(cap binds) {:.4}", s.effort, s.cap_binding_probability);
    }

    let out = simulate_payout(0.5, 0.3, &rule, 0.05);
    println!("gap 0.5, noise 0.05: payout {:.2}, default {}", out.payout, out.default);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
