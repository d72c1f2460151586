//! Matrix and vector assembly. Elements are affine, so every bilinear form
//! below is a fixed reference tensor scaled by the element geometry, which
//! makes the integration exact.

use std::sync::Arc;

use super::field::Field;
use super::quadrature::TriangleQuadrature;
use super::space::FeSpace;
use crate::linsolve::sparse::CsrMatrix;

/// `M[i][j] = \int phi_i phi_j`.
pub fn assemble_mass(space: &FeSpace) -> CsrMatrix {
    let (pattern, pos) = space.pattern();
    let t = space.tensors();
    let nn = t.n * t.n;
    let mut values = vec![0.0; pattern.nnz()];
    for e in 0..space.num_elements() {
        let det = space.geometry(e).det;
        for (k, &p) in pos[e * nn..(e + 1) * nn].iter().enumerate() {
            values[p] += det * t.mass[k];
        }
    }
    CsrMatrix::new(pattern.clone(), values)
}

/// `K[i][j] = \int grad phi_i . grad phi_j`.
pub fn assemble_stiffness(space: &FeSpace) -> CsrMatrix {
    let (pattern, pos) = space.pattern();
    let t = space.tensors();
    let nn = t.n * t.n;
    let mut values = vec![0.0; pattern.nnz()];
    for e in 0..space.num_elements() {
        let g = space.geometry(e);
        let metric = g.metric();
        for (k, &p) in pos[e * nn..(e + 1) * nn].iter().enumerate() {
            let mut s = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    s += metric[a][b] * t.stiff[a][b][k];
                }
            }
            values[p] += g.det * s;
        }
    }
    CsrMatrix::new(pattern.clone(), values)
}

/// `T[i][j] = \int c phi_i phi_j` for the finite element coefficient `c`
/// (one component of a field, given by its dof values).
pub fn assemble_weighted_mass(space: &FeSpace, coeff: &[f64]) -> CsrMatrix {
    let (pattern, pos) = space.pattern();
    CsrMatrix::new(pattern.clone(), weighted_mass_values(space, coeff, pos, pattern.nnz()))
}

pub(crate) fn weighted_mass_values(space: &FeSpace, coeff: &[f64], pos: &[usize], nnz: usize) -> Vec<f64> {
    assert_eq!(coeff.len(), space.ndofs());
    let t = space.tensors();
    let n = t.n;
    let nn = n * n;
    let mut values = vec![0.0; nnz];
    let mut local = vec![0.0; nn];
    for e in 0..space.num_elements() {
        let det = space.geometry(e).det;
        let dofs = space.elem_dofs(e);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (k, &d) in dofs.iter().enumerate() {
            let c = coeff[d];
            if c == 0.0 {
                continue;
            }
            let slab = &t.triple[k * nn..(k + 1) * nn];
            for (l, s) in local.iter_mut().zip(slab) {
                *l += c * s;
            }
        }
        for (l, &p) in local.iter().zip(&pos[e * nn..(e + 1) * nn]) {
            values[p] += det * l;
        }
    }
    values
}

/// The three weighted mass matrices `T_c = \int mhat_c phi_i phi_j`, which
/// make up both the cross-product and the constraint blocks.
pub fn predictor_blocks(space: &FeSpace, mhat: &Field) -> [CsrMatrix; 3] {
    assert_eq!(mhat.ncomp(), 3);
    [0, 1, 2].map(|c| assemble_weighted_mass(space, mhat.comp(c)))
}

/// Levi-Civita symbol.
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Block matrix acting on stacked 3-component coefficients with
/// `(C v) . phi = \int (mhat x v) . phi`.
pub fn assemble_cross(space: &FeSpace, mhat: &Field) -> CsrMatrix {
    let blocks = predictor_blocks(space, mhat);
    cross_from_blocks(space.ndofs(), &blocks)
}

pub(crate) fn cross_from_blocks(n: usize, blocks: &[CsrMatrix; 3]) -> CsrMatrix {
    let mut trip = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let eps = levi_civita(a, c, b);
                if eps == 0.0 {
                    continue;
                }
                for (i, j, v) in blocks[c].triplets() {
                    trip.push((a * n + i, b * n + j, eps * v));
                }
            }
        }
    }
    CsrMatrix::from_triplets(3 * n, 3 * n, &trip)
}

/// Rectangular constraint matrix `B[i][c*n + j] = \int mhat_c phi_j psi_i`.
pub fn assemble_constraint(space: &FeSpace, mhat: &Field) -> CsrMatrix {
    let blocks = predictor_blocks(space, mhat);
    constraint_from_blocks(space.ndofs(), &blocks)
}

pub(crate) fn constraint_from_blocks(n: usize, blocks: &[CsrMatrix; 3]) -> CsrMatrix {
    let mut trip = Vec::new();
    for (c, block) in blocks.iter().enumerate() {
        for (i, j, v) in block.triplets() {
            trip.push((i, c * n + j, v));
        }
    }
    CsrMatrix::from_triplets(n, 3 * n, &trip)
}

/// Default quadrature degree for non-polynomial integrands.
pub fn default_load_degree(space: &FeSpace) -> usize {
    2 * space.degree() + 4
}

/// `b[c*n + i] = \int f_c phi_i` for a vector function `f`.
pub fn load_vector<F>(space: &FeSpace, f: F, quad_degree: usize) -> Vec<f64>
where
    F: Fn([f64; 2]) -> [f64; 3],
{
    let quad = TriangleQuadrature::of_degree(quad_degree);
    let tab = space.basis().tabulate(&quad);
    let n = space.ndofs();
    let mut b = vec![0.0; 3 * n];
    for e in 0..space.num_elements() {
        let g = space.geometry(e);
        let dofs = space.elem_dofs(e);
        for (q, (&r, &w)) in quad.points.iter().zip(&quad.weights).enumerate() {
            let val = f(g.map(r));
            let phi = tab.values(q);
            for (k, &d) in dofs.iter().enumerate() {
                let s = w * g.det * phi[k];
                for c in 0..3 {
                    b[c * n + d] += s * val[c];
                }
            }
        }
    }
    b
}

/// Nodal interpolant of a scalar function.
pub fn interpolate_scalar<F: Fn([f64; 2]) -> f64>(space: &Arc<FeSpace>, f: F) -> Field {
    let values = space.dof_coords().iter().map(|&x| f(x)).collect();
    Field::from_values(space, 1, values)
}

/// Nodal interpolant of a vector function.
pub fn interpolate<F: Fn([f64; 2]) -> [f64; 3]>(space: &Arc<FeSpace>, f: F) -> Field {
    let mut out = Field::zeros(space, 3);
    for (i, &x) in space.dof_coords().iter().enumerate() {
        out.set_nodal(i, f(x));
    }
    out
}

/// `L^2` norm and `H^1` seminorm of a field, summed over components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub h1_semi: f64,
}

/// Exact for finite element functions (the quadrature integrates degree 2p).
pub fn norms(u: &Field) -> Norms {
    let space = u.space();
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for c in 0..u.ncomp() {
        let x = u.comp(c);
        l2 += space.mass().bilinear(x, x);
        h1 += space.stiffness().bilinear(x, x);
    }
    Norms {
        l2: l2.max(0.0).sqrt(),
        h1_semi: h1.max(0.0).sqrt(),
    }
}

pub fn l2_norm(u: &Field) -> f64 {
    norms(u).l2
}
