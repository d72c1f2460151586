use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use super::basis::LagrangeBasis;
use super::quadrature::TriangleQuadrature;
use crate::linsolve::sparse::{CsrMatrix, Pattern};
use crate::mesh::Mesh;

/// Affine map from the reference triangle onto one element.
#[derive(Debug, Clone, Copy)]
pub struct Geometry {
    pub origin: [f64; 2],
    /// Columns are the edge vectors `x1 - x0` and `x2 - x0`.
    pub jac: [[f64; 2]; 2],
    pub inv_jac: [[f64; 2]; 2],
    /// Twice the element area.
    pub det: f64,
}

impl Geometry {
    pub fn new(x: [[f64; 2]; 3]) -> Self {
        let jac = [[x[1][0] - x[0][0], x[2][0] - x[0][0]], [x[1][1] - x[0][1], x[2][1] - x[0][1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_jac = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        Geometry {
            origin: x[0],
            jac,
            inv_jac,
            det,
        }
    }

    pub fn map(&self, r: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            self.origin[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    pub fn inverse_map(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        [
            self.inv_jac[0][0] * d[0] + self.inv_jac[0][1] * d[1],
            self.inv_jac[1][0] * d[0] + self.inv_jac[1][1] * d[1],
        ]
    }

    /// Physical gradient from a reference gradient: `J^{-T} g`.
    pub fn push_grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_jac[0][0] * g[0] + self.inv_jac[1][0] * g[1],
            self.inv_jac[0][1] * g[0] + self.inv_jac[1][1] * g[1],
        ]
    }

    /// `J^{-1} J^{-T}`, the metric turning reference gradient products into
    /// physical ones.
    pub fn metric(&self) -> [[f64; 2]; 2] {
        let k = self.inv_jac;
        let mut g = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                g[a][b] = k[a][0] * k[b][0] + k[a][1] * k[b][1];
            }
        }
        g
    }
}

/// Exact reference-element integrals of basis products.
#[derive(Debug)]
pub struct ReferenceTensors {
    pub n: usize,
    /// `mass[i*n + j] = \int phi_i phi_j`
    pub mass: Vec<f64>,
    /// `triple[(k*n + i)*n + j] = \int phi_k phi_i phi_j`
    pub triple: Vec<f64>,
    /// `stiff[a][b][i*n + j] = \int d_a phi_i d_b phi_j`
    pub stiff: [[Vec<f64>; 2]; 2],
    /// `moment[i] = \int phi_i`
    pub moment: Vec<f64>,
}

impl ReferenceTensors {
    pub fn new(basis: &LagrangeBasis, quad_degree: usize) -> Self {
        let quad = TriangleQuadrature::of_degree(quad_degree);
        let tab = basis.tabulate(&quad);
        let n = basis.len();
        let mut mass = vec![0.0; n * n];
        let mut triple = vec![0.0; n * n * n];
        let mut stiff: [[Vec<f64>; 2]; 2] = Default::default();
        for row in stiff.iter_mut() {
            for s in row.iter_mut() {
                *s = vec![0.0; n * n];
            }
        }
        let mut moment = vec![0.0; n];
        for (q, &w) in quad.weights.iter().enumerate() {
            let phi = tab.values(q);
            let dphi = tab.grads(q);
            for i in 0..n {
                moment[i] += w * phi[i];
                for j in 0..n {
                    mass[i * n + j] += w * phi[i] * phi[j];
                    for a in 0..2 {
                        for b in 0..2 {
                            stiff[a][b][i * n + j] += w * dphi[i][a] * dphi[j][b];
                        }
                    }
                    for k in 0..n {
                        triple[(k * n + i) * n + j] += w * phi[k] * phi[i] * phi[j];
                    }
                }
            }
        }
        ReferenceTensors {
            n,
            mass,
            triple,
            stiff,
            moment,
        }
    }
}

/// Scalar Lagrange space of degree `p` on an active mesh. Vector fields use
/// three stacked copies.
#[derive(Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    basis: Arc<LagrangeBasis>,
    tensors: Arc<ReferenceTensors>,
    elem_dofs: Vec<usize>,
    dof_coords: Vec<[f64; 2]>,
    vertex_dofs: Vec<(usize, usize)>,
    geometry: Vec<Geometry>,
    pattern: OnceLock<(Arc<Pattern>, Vec<usize>)>,
    mass: OnceLock<CsrMatrix>,
    stiffness: OnceLock<CsrMatrix>,
}

type DofKey = [(usize, u32); 3];

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize) -> Arc<FeSpace> {
        let basis = Arc::new(LagrangeBasis::new(degree));
        let tensors = Arc::new(ReferenceTensors::new(&basis, 3 * degree));
        FeSpace::with_basis(mesh, basis, tensors)
    }

    /// Reuses the basis and reference tensors of `like` on another mesh.
    pub fn new_like(mesh: Arc<Mesh>, like: &FeSpace) -> Arc<FeSpace> {
        FeSpace::with_basis(mesh, like.basis.clone(), like.tensors.clone())
    }

    fn with_basis(mesh: Arc<Mesh>, basis: Arc<LagrangeBasis>, tensors: Arc<ReferenceTensors>) -> Arc<FeSpace> {
        let nloc = basis.len();
        let p = basis.degree() as f64;
        let ne = mesh.num_elements();
        let mut keys: HashMap<DofKey, usize> = HashMap::with_capacity(ne * nloc / 2);
        let mut elem_dofs = Vec::with_capacity(ne * nloc);
        let mut dof_coords = Vec::new();
        let mut vertex_dofs = Vec::new();
        let mut geometry = Vec::with_capacity(ne);
        for e in 0..ne {
            let verts = mesh.element(e);
            let coords = mesh.element_coords(e);
            geometry.push(Geometry::new(coords));
            for node in basis.lattice() {
                let mut key: DofKey = [(usize::MAX, 0); 3];
                let mut n = 0;
                for k in 0..3 {
                    if node[k] > 0 {
                        key[n] = (verts[k], node[k]);
                        n += 1;
                    }
                }
                key[..n].sort_unstable();
                let next = dof_coords.len();
                let dof = *keys.entry(key).or_insert(next);
                if dof == next {
                    let mut x = [0.0; 2];
                    for k in 0..3 {
                        let w = node[k] as f64 / p;
                        x[0] += w * coords[k][0];
                        x[1] += w * coords[k][1];
                    }
                    dof_coords.push(x);
                    if n == 1 {
                        vertex_dofs.push((key[0].0, dof));
                    }
                }
                elem_dofs.push(dof);
            }
        }
        vertex_dofs.sort_unstable();
        Arc::new(FeSpace {
            mesh,
            basis,
            tensors,
            elem_dofs,
            dof_coords,
            vertex_dofs,
            geometry,
            pattern: OnceLock::new(),
            mass: OnceLock::new(),
            stiffness: OnceLock::new(),
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    pub fn tensors(&self) -> &ReferenceTensors {
        &self.tensors
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn ndofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn num_elements(&self) -> usize {
        self.geometry.len()
    }

    pub fn dofs_per_element(&self) -> usize {
        self.basis.len()
    }

    pub fn elem_dofs(&self, e: usize) -> &[usize] {
        let n = self.basis.len();
        &self.elem_dofs[e * n..(e + 1) * n]
    }

    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.dof_coords
    }

    /// `(vertex id, dof)` pairs for the mesh vertices, sorted by vertex id.
    pub fn vertex_dofs(&self) -> &[(usize, usize)] {
        &self.vertex_dofs
    }

    pub fn geometry(&self, e: usize) -> &Geometry {
        &self.geometry[e]
    }

    /// Scalar sparsity pattern plus, per element, the value positions of its
    /// local matrix entries (row-major).
    pub fn pattern(&self) -> &(Arc<Pattern>, Vec<usize>) {
        self.pattern.get_or_init(|| self.build_pattern())
    }

    fn build_pattern(&self) -> (Arc<Pattern>, Vec<usize>) {
        let n = self.ndofs();
        let nloc = self.basis.len();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in 0..self.num_elements() {
            let dofs = self.elem_dofs(e);
            for &i in dofs {
                rows[i].extend_from_slice(dofs);
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for r in rows.iter_mut() {
            r.sort_unstable();
            r.dedup();
            col_idx.extend_from_slice(r);
            row_ptr.push(col_idx.len());
        }
        let pattern = Pattern {
            nrows: n,
            ncols: n,
            row_ptr,
            col_idx,
        };
        let mut positions = Vec::with_capacity(self.num_elements() * nloc * nloc);
        for e in 0..self.num_elements() {
            let dofs = self.elem_dofs(e);
            for &i in dofs {
                for &j in dofs {
                    positions.push(pattern.find(i, j).expect("structural entry"));
                }
            }
        }
        (Arc::new(pattern), positions)
    }

    /// Consistent mass matrix, cached.
    pub fn mass(&self) -> &CsrMatrix {
        self.mass.get_or_init(|| super::assembly::assemble_mass(self))
    }

    /// Stiffness matrix of the Laplacian without coefficient, cached.
    pub fn stiffness(&self) -> &CsrMatrix {
        self.stiffness.get_or_init(|| super::assembly::assemble_stiffness(self))
    }

    /// Locates the element containing `x` by brute force. Only used where no
    /// forest information is available.
    pub fn locate(&self, x: [f64; 2]) -> Option<(usize, [f64; 2])> {
        let mut best: Option<(usize, [f64; 2], f64)> = None;
        for (e, g) in self.geometry.iter().enumerate() {
            let r = g.inverse_map(x);
            let s = r[0].min(r[1]).min(1.0 - r[0] - r[1]);
            if best.is_none_or(|b| s > b.2) {
                best = Some((e, r, s));
            }
            if s >= 0.0 {
                return Some((e, r));
            }
        }
        best.filter(|b| b.2 > -1e-10).map(|b| (b.0, b.1))
    }
}
