//! Runs adaptive BDF-2 and then a uniform-step run with the same number of
//! steps, comparing the final errors.
//!
//! `cargo run --release --example adaptive_vs_uniform`

use adaptive_llg::diagnostics::ExampleId;
use adaptive_llg::driver::{run, Config};

fn main() -> adaptive_llg::Result<()> {
    let base = Config {
        degree: 2,
        nx: 16,
        ny: 16,
        ..Config::for_example(ExampleId::Example1)
    };
    println!("{:>10} {:>6} {:>14} {:>14}", "tol_t", "steps", "adaptive", "uniform");
    for tol_t in [1e-3, 2.154e-4, 4.642e-5] {
        let adaptive = run(&Config { tol_t, ..base.clone() })?;
        let n = adaptive.steps();
        let uniform = run(&Config {
            uniform_steps: Some(n),
            ..base.clone()
        })?;
        println!("{tol_t:>10.3e} {n:>6} {:>14.6e} {:>14.6e}", adaptive.err_t(), uniform.err_t());
    }
    Ok(())
}
