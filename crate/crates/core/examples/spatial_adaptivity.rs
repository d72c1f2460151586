//! Mesh adaptivity for the sharp rotating profile with constant steps T/20:
//! sweeps the spatial tolerance for P1 and P2 elements.
//!
//! `cargo run --release --example spatial_adaptivity`

use adaptive_llg::diagnostics::ExampleId;
use adaptive_llg::driver::{sweep, Config, SweepParam};

fn main() -> adaptive_llg::Result<()> {
    let base = Config {
        t_final: 0.01,
        tau_max: 1e-3,
        uniform_steps: Some(20),
        nx: 4,
        ny: 4,
        ..Config::for_example(ExampleId::Example2)
    };
    for (p, tols) in [(1, [1.0, 0.5, 0.25]), (2, [0.4, 0.2, 0.1])] {
        let table = sweep(&Config { degree: p, ..base.clone() }, SweepParam::TolS, &tols)?;
        println!("P{p}, expected slope 1");
        println!("{table}");
    }
    Ok(())
}
