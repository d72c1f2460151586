//! Nodal Lagrange basis of degree `p` on the reference triangle.

use nalgebra::DMatrix;

use super::quadrature::TriangleQuadrature;

#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    degree: usize,
    /// Barycentric lattice index `(i0, i1, i2)`, summing to `degree`, of each
    /// node. `i0` belongs to reference vertex (0,0), `i1` to (1,0), `i2` to (0,1).
    lattice: Vec<[u32; 3]>,
    monomials: Vec<(i32, i32)>,
    /// `coeffs[(m, i)]`: coefficient of monomial `m` in basis function `i`.
    coeffs: DMatrix<f64>,
}

impl LagrangeBasis {
    pub fn new(degree: usize) -> Self {
        assert!((1..=6).contains(&degree), "unsupported degree {degree}");
        let p = degree as u32;
        let mut lattice = vec![[p, 0, 0], [0, p, 0], [0, 0, p]];
        for i1 in 0..=p {
            for i2 in 0..=(p - i1) {
                let i0 = p - i1 - i2;
                let node = [i0, i1, i2];
                if !lattice.contains(&node) {
                    lattice.push(node);
                }
            }
        }
        let mut monomials = Vec::new();
        for total in 0..=degree as i32 {
            for a in (0..=total).rev() {
                monomials.push((a, total - a));
            }
        }
        let n = lattice.len();
        debug_assert_eq!(n, monomials.len());
        let vandermonde = DMatrix::from_fn(n, n, |i, m| {
            let x = lattice[i][1] as f64 / p as f64;
            let y = lattice[i][2] as f64 / p as f64;
            let (a, b) = monomials[m];
            x.powi(a) * y.powi(b)
        });
        let coeffs = vandermonde.try_inverse().expect("Lagrange nodes are unisolvent");
        LagrangeBasis {
            degree,
            lattice,
            monomials,
            coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn lattice(&self) -> &[[u32; 3]] {
        &self.lattice
    }

    /// Reference coordinates of node `i`.
    pub fn node(&self, i: usize) -> [f64; 2] {
        let p = self.degree as f64;
        [self.lattice[i][1] as f64 / p, self.lattice[i][2] as f64 / p]
    }

    pub fn eval(&self, x: [f64; 2], out: &mut [f64]) {
        let mono: Vec<f64> = self
            .monomials
            .iter()
            .map(|&(a, b)| x[0].powi(a) * x[1].powi(b))
            .collect();
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..mono.len()).map(|m| self.coeffs[(m, i)] * mono[m]).sum();
        }
    }

    /// Reference gradients `(d/dxi, d/deta)` of every basis function at `x`.
    pub fn eval_grad(&self, x: [f64; 2], out: &mut [[f64; 2]]) {
        let dm: Vec<[f64; 2]> = self
            .monomials
            .iter()
            .map(|&(a, b)| {
                let dx = if a > 0 { a as f64 * x[0].powi(a - 1) * x[1].powi(b) } else { 0.0 };
                let dy = if b > 0 { b as f64 * x[0].powi(a) * x[1].powi(b - 1) } else { 0.0 };
                [dx, dy]
            })
            .collect();
        for (i, o) in out.iter_mut().enumerate() {
            let mut g = [0.0; 2];
            for (m, d) in dm.iter().enumerate() {
                let c = self.coeffs[(m, i)];
                g[0] += c * d[0];
                g[1] += c * d[1];
            }
            *o = g;
        }
    }

    pub fn tabulate(&self, quad: &TriangleQuadrature) -> Tabulation {
        let n = self.len();
        let mut values = vec![0.0; quad.len() * n];
        let mut grads = vec![[0.0; 2]; quad.len() * n];
        for (q, &x) in quad.points.iter().enumerate() {
            self.eval(x, &mut values[q * n..(q + 1) * n]);
            self.eval_grad(x, &mut grads[q * n..(q + 1) * n]);
        }
        Tabulation {
            nbasis: n,
            values,
            grads,
        }
    }
}

/// Basis values and reference gradients at the points of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub nbasis: usize,
    values: Vec<f64>,
    grads: Vec<[f64; 2]>,
}

impl Tabulation {
    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.nbasis..(q + 1) * self.nbasis]
    }

    pub fn grads(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.nbasis..(q + 1) * self.nbasis]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_property_and_partition_of_unity() {
        for p in 1..=4 {
            let basis = LagrangeBasis::new(p);
            assert_eq!(basis.len(), (p + 1) * (p + 2) / 2);
            let mut vals = vec![0.0; basis.len()];
            for j in 0..basis.len() {
                basis.eval(basis.node(j), &mut vals);
                for (i, v) in vals.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expect).abs() < 1e-12);
                }
            }
            basis.eval([0.21, 0.33], &mut vals);
            assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let mut grads = vec![[0.0; 2]; basis.len()];
            basis.eval_grad([0.21, 0.33], &mut grads);
            let s: [f64; 2] = grads.iter().fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
            assert!(s[0].abs() < 1e-11 && s[1].abs() < 1e-11);
        }
    }
}
