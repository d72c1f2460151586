//! A domain wall pushed by a constant applied field. The mesh is adapted in
//! every step; the example follows the wall position and the location of the
//! finest elements, and writes VTK snapshots to the given directory.
//!
//! `cargo run --release --example domain_wall [outdir]`

use std::path::PathBuf;

use adaptive_llg::diagnostics::ExampleId;
use adaptive_llg::driver::{Config, Simulation};

/// First `x` along the centre line where `m_z` changes sign.
fn wall_position(sim: &Simulation) -> Option<f64> {
    let m = &sim.history().newest().m;
    let dom = sim.config().domain();
    let y = 0.5 * (dom.y0 + dom.y1);
    let n = 400;
    let mz = |i: usize| m.eval_at([dom.x0 + (dom.x1 - dom.x0) * i as f64 / n as f64, y]).map(|v| v[2]);
    (0..n).find_map(|i| {
        let (a, b) = (mz(i)?, mz(i + 1)?);
        (a * b <= 0.0).then(|| dom.x0 + (dom.x1 - dom.x0) * (i as f64 + a / (a - b)) / n as f64)
    })
}

/// Area-weighted mean `x` of the finest-level elements.
fn finest_region(sim: &Simulation) -> f64 {
    let mesh = sim.history().space().mesh().clone();
    let top = (0..mesh.num_elements()).map(|e| mesh.level(e)).max().unwrap_or(0);
    let (mut sx, mut sa) = (0.0, 0.0);
    for e in (0..mesh.num_elements()).filter(|&e| mesh.level(e) == top) {
        sx += mesh.area(e) * mesh.centroid(e)[0];
        sa += mesh.area(e);
    }
    sx / sa
}

fn main() -> adaptive_llg::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out).map_err(|e| adaptive_llg::Error::Config(format!("{}: {e}", out.display())))?;
    let cfg = Config {
        tol_s: 0.2,
        tol_t: 1e-2,
        theta_c: 0.5,
        out_vtk_prefix: Some(out.join("wall")),
        out_csv: Some(out.join("wall.csv")),
        vtk_every: 5,
        ..Config::for_example(ExampleId::Example4)
    };
    let mut sim = Simulation::new(cfg)?;
    println!("{:>8} {:>8} {:>8} {:>8}", "t", "dofs", "wall", "finest");
    while !sim.done() {
        sim.step()?;
        let row = sim.trace().last().copied().expect("row after step");
        if sim.steps_taken() % 4 == 0 || sim.done() {
            let wall = wall_position(&sim).map_or("-".into(), |x| format!("{x:.4}"));
            println!("{:>8.4} {:>8} {:>8} {:>8.4}", row.t, row.dofs, wall, finest_region(&sim));
        }
    }
    println!("snapshots: {}", sim.vtk_files().len());
    Ok(())
}
