//! `L^2` projection of broken gradients back into the Lagrange space.

use std::sync::Arc;

use super::field::Field;
use super::quadrature::TriangleQuadrature;
use super::space::FeSpace;
use crate::error::Result;
use crate::linsolve::iterative::{conjugate_gradient, KrylovConfig};

/// Tolerance of the mass-matrix solves. The mass matrix is well conditioned
/// under Jacobi scaling, so this costs a few dozen iterations.
const RECOVERY_TOL: f64 = 1e-14;

/// Right-hand sides `b_a[i] = \int d_a u phi_i` for a scalar coefficient
/// vector `u`.
fn gradient_moments(space: &FeSpace, u: &[f64]) -> [Vec<f64>; 2] {
    let quad = TriangleQuadrature::of_degree(2 * space.degree());
    let tab = space.basis().tabulate(&quad);
    let n = space.ndofs();
    let mut b = [vec![0.0; n], vec![0.0; n]];
    for e in 0..space.num_elements() {
        let g = space.geometry(e);
        let dofs = space.elem_dofs(e);
        let grad = element_gradient_at(space, e, u, &tab, &quad);
        for (q, w) in quad.weights.iter().enumerate() {
            let phi = tab.values(q);
            for (k, &d) in dofs.iter().enumerate() {
                let s = w * g.det * phi[k];
                b[0][d] += s * grad[q][0];
                b[1][d] += s * grad[q][1];
            }
        }
    }
    b
}

pub(crate) fn element_gradient_at(
    space: &FeSpace,
    e: usize,
    u: &[f64],
    tab: &super::basis::Tabulation,
    quad: &TriangleQuadrature,
) -> Vec<[f64; 2]> {
    let g = space.geometry(e);
    let dofs = space.elem_dofs(e);
    (0..quad.len())
        .map(|q| {
            let mut r = [0.0; 2];
            for (k, dphi) in tab.grads(q).iter().enumerate() {
                let c = u[dofs[k]];
                r[0] += c * dphi[0];
                r[1] += c * dphi[1];
            }
            g.push_grad(r)
        })
        .collect()
}

/// Recovered gradient `G u` of a scalar field, returned as a 2-component
/// field on the same space.
pub fn gradient_recovery(u: &Field) -> Result<Field> {
    assert_eq!(u.ncomp(), 1, "gradient recovery expects a scalar field");
    let space = u.space();
    let vals = recover_component(space, u.values())?;
    Ok(Field::from_values(space, 2, vals))
}

/// Recovery of one scalar coefficient vector; result is `[d_x | d_y]`.
pub(crate) fn recover_component(space: &Arc<FeSpace>, u: &[f64]) -> Result<Vec<f64>> {
    let b = gradient_moments(space, u);
    let cfg = KrylovConfig {
        tol: RECOVERY_TOL,
        max_iter: 10 * space.ndofs() + 100,
    };
    let mut out = Vec::with_capacity(2 * space.ndofs());
    for rhs in &b {
        let (x, _) = conjugate_gradient(space.mass(), rhs, None, &cfg)?;
        out.extend(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assembly::interpolate_scalar;
    use crate::mesh::{Mesh, Rect};

    fn unit(nx: usize, p: usize) -> Arc<FeSpace> {
        FeSpace::new(Arc::new(Mesh::rectangle(Rect::unit_square(), nx, nx).unwrap()), p)
    }

    #[test]
    fn linear_fields_recovered_exactly() {
        for p in 1..=3 {
            let space = unit(3, p);
            let u = interpolate_scalar(&space, |x| 2.0 * x[0] - 3.0 * x[1] + 0.5);
            let g = gradient_recovery(&u).unwrap();
            assert!(g.comp(0).iter().all(|v| (v - 2.0).abs() < 1e-12));
            assert!(g.comp(1).iter().all(|v| (v + 3.0).abs() < 1e-12));
            let c = interpolate_scalar(&space, |_| 4.0);
            let g = gradient_recovery(&c).unwrap();
            assert!(g.values().iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn quadratic_on_p1_is_close_inside() {
        let space = unit(4, 1);
        let u = interpolate_scalar(&space, |x| x[0] * x[0]);
        let g = gradient_recovery(&u).unwrap();
        let (d, x) = space
            .dof_coords()
            .iter()
            .enumerate()
            .find(|(_, x)| (x[0] - 0.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12)
            .unwrap();
        assert!((g.comp(0)[d] - 2.0 * x[0]).abs() < 0.05);
    }
}
