use std::path::PathBuf;
use std::process::ExitCode;

use bel_cli::config::Scenario;
use bel_cli::{run_file, RunOptions};
use clap::{Parser, Subcommand};

/// Checks for Lane-Emden equations on radial weighted manifolds.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configuration in a scenario file.
    Run {
        config: PathBuf,
        /// Output directory (default: config `out_dir`, then $BEL_OUT_DIR, then ./bel-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Solver tolerance, overriding the file.
        #[arg(long)]
        tol: Option<f64>,
        /// Parallel runs (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print the scenarios with their keys.
    ListScenarios,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<24}{}", s.name(), s.summary());
                println!("{:<24}required: {}", "", list(s.required()));
                println!("{:<24}optional: {}", "", list(s.optional()));
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            out,
            tol,
            jobs,
        } => {
            if let Some(t) = tol.filter(|t| t.is_nan() || *t <= 0.0) {
                eprintln!("error: --tol must be positive, got {t}");
                return ExitCode::from(2);
            }
            let opts = RunOptions { out, tol, jobs };
            match run_file(&config, &opts) {
                Ok(runs) => {
                    let mut ok = true;
                    for r in &runs {
                        let failed: Vec<&str> = r
                            .report
                            .checks
                            .iter()
                            .filter(|c| c.verdict != "pass")
                            .map(|c| c.name.as_str())
                            .collect();
                        let verdict = if r.passed() { "PASS" } else { "FAIL" };
                        println!("{verdict} {} -> {}", r.run, r.dir.display());
                        if !failed.is_empty() {
                            println!("     failed: {}", failed.join(", "));
                        }
                        ok &= r.passed();
                    }
                    if ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}

fn list(keys: &[&str]) -> String {
    if keys.is_empty() {
        "-".into()
    } else {
        keys.join(", ")
    }
}
