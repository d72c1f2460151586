//! Builds a run from configuration text, steps it by hand and round-trips
//! the trace through CSV.
//!
//! `cargo run --release --example config_file`

use adaptive_llg::diagnostics::{export_csv, import_csv};
use adaptive_llg::driver::{Config, Simulation};

const TEXT: &str = "
example = 1
T = 0.02
p = 1
nx = 8
ny = 8
tol_t = 1e-3
k_min = 1
k_max = 2   ; let the controller choose the order
";

fn main() -> adaptive_llg::Result<()> {
    let cfg = Config::parse(TEXT)?;
    let mut sim = Simulation::new(cfg)?;
    while !sim.done() {
        sim.step()?;
        let r = sim.trace().last().copied().expect("row after step");
        println!("t = {:.5}  tau = {:.3e}  k = {}  errT = {:.4e}", r.t, r.tau, r.k, r.err_t);
    }
    let path = std::env::temp_dir().join("config_file_example.csv");
    export_csv(sim.trace(), &path)?;
    let back = import_csv(&path)?;
    println!("{} rows written to {}, identical after reading back: {}", back.len(), path.display(), &back == sim.trace());
    Ok(())
}
