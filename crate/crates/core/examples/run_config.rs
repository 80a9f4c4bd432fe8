//! Driving the solver from a JSON run configuration.

use rescuecap::cli::{run, Command, RunConfig};

const CONFIG: &str = r#"{
  "distribution": { "kind": "weibull", "shape": 2.0, "scale": 1.0 },
  "cost": { "kind": "quadratic", "alpha": 0.2, "kappa": 1.0 },
  "weights": { "omega_t": 1.0, "omega_b": 0.8, "gamma": 1.0, "b_bar": 0.8 },
  "discretion": { "enabled": true, "m": 0.5, "chi": 1.0 },
  "simulation": { "n": 20000, "seed": 3 }
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut cfg = RunConfig::from_json(CONFIG)?;
    cfg.output.directory = dir.path().to_path_buf();

    for command in [Command::Solve, Command::Simulate] {
        let summary = run(command, &cfg)?;
        println!(
            "{}: lambda_T {:.4}, pass {}, files {:?}",
            summary.command,
            summary.lambda_t.unwrap_or(f64::NAN),
            summary.pass,
            summary.files
        );
    }
    let head: String = std::fs::read_to_string(dir.path().join("binned_means.csv"))?.lines().take(3).collect::<Vec<_>>().join("\n");
    println!("{head}");

    let bad = r#"{ "distribution": { "kind": "weibull", "shape": -1, "scale": 1 },
                   "cost": { "kind": "quadratic", "alpha": -0.1, "kappa": 1 },
                   "weights": { "omega_t": 1, "omega_b": 0.8, "gamma": 0, "b_bar": 0.8 } }"#;
    if let Err(problems) = RunConfig::from_json(bad)?.scenario() {
        println!("rejected config:");
        problems.iter().for_each(|p| println!("  {p}"));
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
