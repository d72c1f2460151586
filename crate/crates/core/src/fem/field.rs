use std::sync::Arc;

use super::space::FeSpace;
use crate::error::{Error, Result};

/// Coefficients of a scalar or vector finite element function. Components
/// are stored one after another: `values[c * ndofs + i]`.
#[derive(Debug, Clone)]
pub struct Field {
    space: Arc<FeSpace>,
    ncomp: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(space: &Arc<FeSpace>, ncomp: usize) -> Self {
        let n = space.ndofs() * ncomp;
        Field {
            space: space.clone(),
            ncomp,
            values: vec![0.0; n],
        }
    }

    pub fn from_values(space: &Arc<FeSpace>, ncomp: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), space.ndofs() * ncomp, "coefficient length mismatch");
        Field {
            space: space.clone(),
            ncomp,
            values,
        }
    }

    /// Constant vector field.
    pub fn constant(space: &Arc<FeSpace>, value: &[f64]) -> Self {
        let n = space.ndofs();
        let mut values = Vec::with_capacity(n * value.len());
        for &v in value {
            values.extend(std::iter::repeat_n(v, n));
        }
        Field::from_values(space, value.len(), values)
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn ndofs(&self) -> usize {
        self.space.ndofs()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        let n = self.ndofs();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.ndofs();
        &mut self.values[c * n..(c + 1) * n]
    }

    /// The 3-vector stored at dof `i` of a vector field.
    pub fn nodal(&self, i: usize) -> [f64; 3] {
        let n = self.ndofs();
        [self.values[i], self.values[n + i], self.values[2 * n + i]]
    }

    pub fn set_nodal(&mut self, i: usize, v: [f64; 3]) {
        let n = self.ndofs();
        self.values[i] = v[0];
        self.values[n + i] = v[1];
        self.values[2 * n + i] = v[2];
    }

    pub fn same_space(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.space, &other.space)
    }

    /// Rescales every nodal 3-vector to unit length.
    pub fn normalize_nodal(&mut self) -> Result<()> {
        assert_eq!(self.ncomp, 3);
        for i in 0..self.ndofs() {
            let v = self.nodal(i);
            let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if !(len >= 1e-12) {
                return Err(Error::StepFailure(format!(
                    "cannot normalize nodal vector of length {len:e} at dof {i}"
                )));
            }
            self.set_nodal(i, [v[0] / len, v[1] / len, v[2] / len]);
        }
        Ok(())
    }

    /// Largest deviation of nodal lengths from one.
    pub fn max_length_defect(&self) -> f64 {
        (0..self.ndofs())
            .map(|i| {
                let v = self.nodal(i);
                ((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Field) {
        assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    pub fn scaled(&self, s: f64) -> Field {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Linear combination `sum_j w_j f_j` of fields on one space.
    pub fn combination(weights: &[f64], fields: &[&Field]) -> Field {
        assert_eq!(weights.len(), fields.len());
        assert!(!fields.is_empty());
        let mut out = Field::zeros(fields[0].space(), fields[0].ncomp);
        for (&w, f) in weights.iter().zip(fields) {
            out.axpy(w, f);
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Value of component `c` at reference point `r` of element `e`.
    pub fn eval_in_element(&self, e: usize, r: [f64; 2], out: &mut [f64]) {
        let basis = self.space.basis();
        let mut phi = vec![0.0; basis.len()];
        basis.eval(r, &mut phi);
        let dofs = self.space.elem_dofs(e);
        let n = self.ndofs();
        for (c, o) in out.iter_mut().enumerate().take(self.ncomp) {
            *o = dofs.iter().zip(&phi).map(|(&d, p)| self.values[c * n + d] * p).sum();
        }
    }

    /// Point evaluation anywhere in the domain (brute-force location).
    pub fn eval_at(&self, x: [f64; 2]) -> Option<Vec<f64>> {
        let (e, r) = self.space.locate(x)?;
        let mut out = vec![0.0; self.ncomp];
        self.eval_in_element(e, r, &mut out);
        Some(out)
    }
}
