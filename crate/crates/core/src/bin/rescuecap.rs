use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rescuecap::cli::{load_config, run, Command, Overrides};

#[derive(Parser)]
#[command(name = "rescuecap", version, about = "Optimal rescue-cap screening solver")]
struct Args {
    #[command(subcommand)]
    command: Sub,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of type-grid nodes, overriding the config.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Cap schedule, transfers and leader cost.
    Solve,
    /// No-rescue test.
    KnifeEdge,
    /// Fixed point for the effective grant weight.
    Discretion,
    /// Comparative statics certified by finite differences.
    Statics,
    /// Monte Carlo verification and the effort condition.
    Simulate,
    /// Brute-force oracles.
    Oracle,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Sub::Solve => Command::Solve,
        Sub::KnifeEdge => Command::KnifeEdge,
        Sub::Discretion => Command::Discretion,
        Sub::Statics => Command::Statics,
        Sub::Simulate => Command::Simulate,
        Sub::Oracle => Command::Oracle,
    };
    let Some(path) = args.config.as_deref() else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(1);
    };
    let start = Instant::now();
    let result = load_config(path).and_then(|mut cfg| {
        Overrides { out: args.out.clone(), seed: args.seed, grid: args.grid }.apply(&mut cfg);
        let dir = cfg.output.directory.clone();
        run(command, &cfg).map(|s| (s, dir))
    });
    match result {
        Ok((summary, dir)) => {
            if !args.quiet {
                for c in &summary.checks {
                    let mark = if c.pass { "ok  " } else { "FAIL" };
                    println!("{mark} {} {}", c.name, c.detail);
                }
                println!("wrote {} files to {}", summary.files.len(), dir.display());
                eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
