//! Command line front end: `run`, `sweep` and `check`.

use std::path::PathBuf;
use std::process::ExitCode;

use adaptive_llg::driver::{check, run, sweep, Config, SweepParam};
use adaptive_llg::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "llg-adapt", version, about = "Adaptive tangent-plane BDF solver for the LLG equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration, writing the CSV trace and VTK snapshots it names.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Repeat a configuration over several tolerances and print a convergence table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma separated tolerances.
        #[arg(long, value_delimiter = ',', required = true)]
        tols: Vec<f64>,
        /// Which tolerance to vary: tol_t or tol_s.
        #[arg(long, default_value = "tol_t")]
        param: SweepParam,
    },
    /// Run the built-in invariant suite on small cases.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_CONFIG })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run { config } => {
            let cfg = match Config::from_file(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match run(&cfg) {
                Ok(trace) => {
                    let last = trace.last().expect("a run has at least one row");
                    println!(
                        "{} steps to t = {}, max dofs {}, err_T {}, final energy {:e}",
                        trace.steps(),
                        last.t,
                        trace.max_dofs(),
                        if trace.err_t().is_nan() { "n/a".to_string() } else { format!("{:e}", trace.err_t()) },
                        last.energy
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Sweep { config, tols, param } => {
            let cfg = match Config::from_file(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match sweep(&cfg, param, &tols) {
                Ok(table) => {
                    print!("{table}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Check { seed } => {
            let items = check(seed);
            let mut ok = true;
            for it in &items {
                println!("[{}] {}: {}", if it.passed { "PASS" } else { "FAIL" }, it.name, it.detail);
                ok &= it.passed;
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NUMERICAL)
            }
        }
    }
}
