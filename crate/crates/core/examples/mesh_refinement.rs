//! Gradient-recovery indicators, Doerfler marking, bisection and coarsening
//! on a fixed field with a steep interior layer.
//!
//! `cargo run --release --example mesh_refinement`

use adaptive_llg::adapt_space::{indicators, mark_coarsen, mark_refine};
use adaptive_llg::fem::{interpolate, FeSpace};
use adaptive_llg::mesh::{Mesh, Rect};
use std::sync::Arc;

fn layer(x: [f64; 2]) -> [f64; 3] {
    let phi = std::f64::consts::PI * (1.0 + ((x[0] - 0.5) / 0.05).tanh()) / 2.0;
    [phi.sin(), 0.0, phi.cos()]
}

fn main() -> adaptive_llg::Result<()> {
    let mut mesh = Mesh::rectangle(Rect::unit_square(), 4, 4)?;
    for pass in 0..8 {
        let space = FeSpace::new(Arc::new(mesh.clone()), 1);
        let eta = indicators(&interpolate(&space, layer))?;
        let marked = mark_refine(&eta, 0.5);
        println!(
            "pass {pass}: {:>5} elements, eta = {:.4e}, refining {}",
            mesh.num_elements(),
            eta.total(),
            marked.len()
        );
        mesh = mesh.bisect(&marked, 1);
    }
    // Move the layer and coarsen where it left.
    let moved = |x: [f64; 2]| layer([x[0] + 0.3, x[1]]);
    let space = FeSpace::new(Arc::new(mesh.clone()), 1);
    let eta = indicators(&interpolate(&space, moved))?;
    let coarse = mesh.coarsen(&mark_coarsen(&eta, 0.5));
    println!(
        "after the layer moves: {} -> {} elements, {} hanging nodes",
        mesh.num_elements(),
        coarse.num_elements(),
        coarse.hanging_nodes()
    );
    Ok(())
}
