//! Relaxation of a bubble without applied field. With implicit Euler and
//! no renormalization the exchange energy never increases.
//!
//! `cargo run --release --example energy_decay`

use adaptive_llg::diagnostics::{energy_report, EnergyMode, ExampleId};
use adaptive_llg::driver::{run, Config};

fn main() -> adaptive_llg::Result<()> {
    let cfg = Config {
        k_min: 1,
        k_max: 1,
        uniform_steps: Some(50),
        ..Config::for_example(ExampleId::Example3)
    };
    let trace = run(&cfg)?;
    for (n, r) in trace.rows.iter().enumerate().step_by(5) {
        println!("n = {n:>3}  t = {:.4}  Ce|grad m|^2 = {:.6e}  tau|v|^2 = {:.3e}", r.t, r.energy, r.dissipation);
    }
    let report = energy_report(&trace, cfg.alpha, cfg.ce, EnergyMode::Decay);
    println!("energy increases: {:?}", report.violations);
    Ok(())
}
