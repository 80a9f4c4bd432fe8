//! Brute-force oracles: the cap–min identities and second-best enumeration.

use rescuecap::simulation::{capmin_oracle, welfare_bruteforce, SignalLaw};
use rescuecap::{PolicyPrimitives, RescueCost};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let caps: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let uniform = capmin_oracle(&SignalLaw::uniform(0.0, 1.0)?, &caps, 1e-5)?;
    println!("cap-min, uniform payout: max deviation {:.2e}, pass {}", uniform.max_deviation, uniform.pass);
    let atoms = SignalLaw::discrete(vec![(0.0, 0.2), (0.3, 0.5), (0.6, 0.3)])?;
    let discrete = capmin_oracle(&atoms, &caps, 1e-5)?;
    let kinks: Vec<f64> = discrete.points.iter().filter(|p| p.at_atom).map(|p| p.b).collect();
    println!("cap-min, atoms: max deviation {:.2e}, one-sided at {kinks:?}", discrete.max_deviation);

    let prim = PolicyPrimitives::new(1.0, 0.8, 1.0, 0.8)?;
    let cost = RescueCost::quadratic(0.2, 1.0)?;
    let types: Vec<(f64, f64)> = [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|&t| (t, 1.0)).collect();
    let w = welfare_bruteforce(&types, &prim, &cost, prim.omega_t, 21)?;
    println!("enumerated {} schedules ({} feasible)", w.schedules_checked, w.feasible);
    println!("  best   {:.6} at {:?}", w.enumerated_cost, w.enumerated_caps);
    println!("  kkt    {:.6} at {:.3?}", w.kkt_cost, w.kkt_caps);
    println!("  gap bound {:.6}, pass {}", w.gap_bound, w.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
