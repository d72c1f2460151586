//! Adaptive time stepping on the smooth manufactured solution: sweeps the
//! temporal tolerance for BDF-1 and BDF-2 on a fixed mesh and prints the
//! convergence tables.
//!
//! `cargo run --release --example time_adaptivity [nx]`

use adaptive_llg::diagnostics::ExampleId;
use adaptive_llg::driver::{sweep, Config, SweepParam};

fn main() -> adaptive_llg::Result<()> {
    let nx: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    let base = Config {
        degree: 2,
        nx,
        ny: nx,
        ..Config::for_example(ExampleId::Example1)
    };
    for (k, tols) in [(1, [4e-3, 1e-3, 2.5e-4]), (2, [1e-3, 2.154e-4, 4.642e-5])] {
        let cfg = Config { k_min: k, k_max: k, ..base.clone() };
        let table = sweep(&cfg, SweepParam::TolT, &tols)?;
        println!("BDF-{k}, h = 1/{nx}, expected slope {:.3}", k as f64 / (k as f64 + 1.0));
        println!("{table}");
    }
    Ok(())
}
