//! Manufactured problems, error norms, energy monitors and output.

pub mod energy;
pub mod jet;
pub mod output;
pub mod problems;

pub use energy::{energy_report, stability_constants, EnergyMode, EnergyReport, EnergyTrace, StabilityConstants, TraceRow};
pub use jet::Jet;
pub use output::{export_csv, export_vtk, import_csv};
pub use problems::{derive_forcing, strong_residual, ExactProblem, ExampleId};

use crate::fem::quadrature::TriangleQuadrature;
use crate::fem::Field;

/// `|grad(m(t) - m_h)|_{L^2}` by quadrature of degree `2p + 2`, with the exact
/// gradient supplied pointwise.
pub fn gradient_error<G>(m_h: &Field, exact_grad: G) -> f64
where
    G: Fn([f64; 2]) -> [[f64; 2]; 3],
{
    let space = m_h.space();
    let quad = TriangleQuadrature::of_degree(2 * space.degree() + 2);
    let tab = space.basis().tabulate(&quad);
    let n = space.ndofs();
    let mut acc = 0.0;
    for e in 0..space.num_elements() {
        let g = space.geometry(e);
        let dofs = space.elem_dofs(e);
        for (q, (&r, &w)) in quad.points.iter().zip(&quad.weights).enumerate() {
            let ex = exact_grad(g.map(r));
            for (c, exc) in ex.iter().enumerate() {
                let mut rg = [0.0; 2];
                for (k, dphi) in tab.grads(q).iter().enumerate() {
                    let u = m_h.values()[c * n + dofs[k]];
                    rg[0] += u * dphi[0];
                    rg[1] += u * dphi[1];
                }
                let gh = g.push_grad(rg);
                let (dx, dy) = (exc[0] - gh[0], exc[1] - gh[1]);
                acc += w * g.det * (dx * dx + dy * dy);
            }
        }
    }
    acc.sqrt()
}

/// Running maximum of the gradient error at time `t`.
pub fn err_update(running: f64, problem: &ExactProblem, m_h: &Field, t: f64) -> f64 {
    if !problem.has_exact() {
        return running;
    }
    let e = gradient_error(m_h, |x| problem.exact_grad(t, x).unwrap());
    if running.is_nan() {
        e
    } else {
        running.max(e)
    }
}

/// Exchange energy `C_e |grad m|^2`.
pub fn exchange_energy(m: &Field, ce: f64) -> f64 {
    let k = m.space().stiffness();
    ce * (0..m.ncomp()).map(|c| k.bilinear(m.comp(c), m.comp(c))).sum::<f64>()
}

/// `|f|^2_{L^2}` of a vector function on the mesh of `space`.
pub fn l2_squared_of<F: Fn([f64; 2]) -> [f64; 3]>(space: &crate::fem::FeSpace, f: F) -> f64 {
    let quad = TriangleQuadrature::of_degree(2 * space.degree() + 2);
    let mut acc = 0.0;
    for e in 0..space.num_elements() {
        let g = space.geometry(e);
        for (&r, &w) in quad.points.iter().zip(&quad.weights) {
            let v = f(g.map(r));
            acc += w * g.det * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fem::{interpolate, FeSpace};
    use crate::mesh::{Mesh, Rect};

    #[test]
    fn polynomial_fields_have_zero_error() {
        let space = FeSpace::new(Arc::new(Mesh::rectangle(Rect::unit_square(), 2, 2).unwrap()), 2);
        let m = interpolate(&space, |x| [x[0] * x[1], x[1] * x[1], 1.0]);
        let e = gradient_error(&m, |x| [[x[1], x[0]], [0.0, 2.0 * x[1]], [0.0, 0.0]]);
        assert!(e < 1e-13);
    }

    #[test]
    fn interpolation_error_is_second_order_for_p2() {
        let p = ExactProblem::new(ExampleId::Example1);
        let err = |n: usize| {
            let space = FeSpace::new(Arc::new(Mesh::rectangle(Rect::unit_square(), n, n).unwrap()), 2);
            let m = interpolate(&space, |x| p.exact(0.0, x).unwrap());
            err_update(f64::NAN, &p, &m, 0.0)
        };
        let rate = (err(8) / err(16)).log2();
        assert!((rate - 2.0).abs() < 0.2, "{rate}");
        assert_eq!(err_update(1.0, &p, &interpolate(&FeSpace::new(Arc::new(Mesh::rectangle(Rect::unit_square(), 4, 4).unwrap()), 2), |x| p.initial(x)), 0.0), 1.0);
    }
}
