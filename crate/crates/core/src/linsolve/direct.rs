//! Sparse LU via faer.

use std::sync::Arc;
use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::MatMut;

use super::sparse::{CsrMatrix, Pattern};
use super::iterative::{bicgstab, KrylovConfig, Preconditioner};
use super::{split, Method, SaddleSolution, SaddleSystem};
use crate::error::{Error, Result};

/// Residual below which no refinement sweep is attempted.
const TARGET_RESIDUAL: f64 = 1e-12;
const MAX_REFINEMENT: usize = 3;

/// Iterations allowed before stale factors are replaced.
const REUSE_MAX_ITER: usize = 10;
/// Factors that needed more iterations than this are refreshed next time.
const REFRESH_ITER: usize = 6;

/// Sparse LU that caches the symbolic analysis for a fixed pattern. With
/// `reuse`, the last numeric factors precondition BiCGStab on the next
/// matrix with the same pattern and are only recomputed when that fails to
/// converge quickly; the result still meets the direct residual target.
#[derive(Default)]
pub struct DirectSolver {
    symbolic: Option<(Arc<Pattern>, SymbolicLu<usize>)>,
    numeric: Option<(Arc<Pattern>, Lu<usize, f64>)>,
    reuse: bool,
    factorizations: usize,
}

impl std::fmt::Debug for DirectSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirectSolver")
            .field("reuse", &self.reuse)
            .field("factorizations", &self.factorizations)
            .finish()
    }
}

struct Factors<'a>(&'a Lu<usize, f64>);

impl Preconditioner for Factors<'_> {
    fn apply(&self, b: &[f64], x: &mut [f64]) {
        x.copy_from_slice(b);
        let n = x.len();
        self.0.solve_transpose_in_place(MatMut::from_column_major_slice_mut(x, n, 1));
    }
}

impl DirectSolver {
    pub fn new(reuse: bool) -> Self {
        DirectSolver {
            reuse,
            ..Default::default()
        }
    }

    fn factor(&mut self, m: &CsrMatrix) -> Result<Lu<usize, f64>> {
        let p = m.pattern();
        // The CSR arrays of `m` are the CSC arrays of its transpose, so we
        // factor `m^T` and solve with the transposed factors.
        let sym = SymbolicSparseColMatRef::new_checked(p.ncols, p.nrows, &p.row_ptr, None, &p.col_idx);
        let reuse = matches!(&self.symbolic, Some((q, _)) if Arc::ptr_eq(q, p) || **q == **p);
        if !reuse {
            let s = SymbolicLu::try_new(sym).map_err(|e| Error::DirectSolver(format!("symbolic analysis failed: {e:?}")))?;
            self.symbolic = Some((p.clone(), s));
        }
        let symbolic = self.symbolic.as_ref().unwrap().1.clone();
        let mat = SparseColMatRef::new(sym, m.values());
        Lu::try_new_with_symbolic(symbolic, mat).map_err(|e| match e {
            LuError::SymbolicSingular { index } => {
                Error::DirectSolver(format!("singular matrix: no pivot found at elimination step {index}"))
            }
            LuError::Generic(g) => Error::DirectSolver(format!("factorization failed: {g:?}")),
        })
    }

    pub fn solve(&mut self, sys: &SaddleSystem) -> Result<SaddleSolution> {
        let start = Instant::now();
        let n = sys.unknowns();
        if n == 0 {
            return Ok(split(sys, Vec::new(), Method::Direct, 0, 0.0, start));
        }
        if let Some(sol) = self.try_reuse(sys, start) {
            return Ok(sol);
        }
        let lu = self.factor(sys.matrix())?;
        let mut x = sys.rhs().to_vec();
        lu.solve_transpose_in_place(MatMut::from_column_major_slice_mut(&mut x, n, 1));
        let mut residual = sys.residual(&x);
        let mut sweeps = 0;
        while residual > TARGET_RESIDUAL && sweeps < MAX_REFINEMENT && residual.is_finite() {
            let kx = sys.matrix().mul_vec(&x);
            let mut r: Vec<f64> = sys.rhs().iter().zip(&kx).map(|(b, a)| b - a).collect();
            lu.solve_transpose_in_place(MatMut::from_column_major_slice_mut(&mut r, n, 1));
            let cand: Vec<f64> = x.iter().zip(&r).map(|(a, b)| a + b).collect();
            let res = sys.residual(&cand);
            sweeps += 1;
            if res < residual {
                x = cand;
                residual = res;
            } else {
                break;
            }
        }
        if !residual.is_finite() {
            return Err(Error::DirectSolver(format!("non-finite residual after factorization ({n} unknowns)")));
        }
        if self.reuse {
            self.numeric = Some((sys.matrix().pattern().clone(), lu));
        }
        self.factorizations += 1;
        Ok(split(sys, x, Method::Direct, sweeps, residual, start))
    }

    /// BiCGStab preconditioned with the factors of an earlier matrix on the
    /// same pattern. `None` means a fresh factorization is needed.
    fn try_reuse(&mut self, sys: &SaddleSystem, start: Instant) -> Option<SaddleSolution> {
        let (p, lu) = self.numeric.as_ref()?;
        if !Arc::ptr_eq(p, sys.matrix().pattern()) && **p != **sys.matrix().pattern() {
            self.numeric = None;
            return None;
        }
        let cfg = KrylovConfig {
            tol: TARGET_RESIDUAL,
            max_iter: REUSE_MAX_ITER,
        };
        match bicgstab(sys.matrix(), sys.rhs(), &Factors(lu), &cfg) {
            Ok((x, iterations)) => {
                if iterations > REFRESH_ITER {
                    self.numeric = None;
                }
                let residual = sys.residual(&x);
                Some(split(sys, x, Method::Direct, iterations, residual, start))
            }
            Err(_) => {
                self.numeric = None;
                None
            }
        }
    }

    /// Number of numeric factorizations so far.
    pub fn factorizations(&self) -> usize {
        self.factorizations
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonsymmetric_system() {
        let a = CsrMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, -2.0), (1, 1, 3.0), (1, 2, 1.0), (2, 1, 5.0), (2, 2, 2.0)],
        );
        let b = CsrMatrix::from_triplets(0, 3, &[]);
        let sys = SaddleSystem::new(&a, &b, vec![5.0, 2.0, 7.0], None).unwrap();
        let mut s = DirectSolver::default();
        let sol = s.solve(&sys).unwrap();
        for v in &sol.v {
            assert!((v - 1.0).abs() < 1e-14);
        }
        // second solve reuses the analysis
        let sol2 = s.solve(&sys).unwrap();
        assert_eq!(sol.v, sol2.v);
    }

    #[test]
    fn stale_factors_precondition_nearby_matrices() {
        let n = 50;
        let mk = |shift: f64| {
            let mut t = Vec::new();
            for i in 0..n {
                t.push((i, i, 4.0 + shift * (i as f64).sin()));
                if i + 1 < n {
                    t.push((i, i + 1, -1.0));
                    t.push((i + 1, i, -1.5));
                }
            }
            CsrMatrix::from_triplets(n, n, &t)
        };
        let b = CsrMatrix::from_triplets(0, n, &[]);
        let mut s = DirectSolver::new(true);
        let rhs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        s.solve(&SaddleSystem::new(&mk(0.0), &b, rhs.clone(), None).unwrap()).unwrap();
        let sys = SaddleSystem::new(&mk(0.01), &b, rhs, None).unwrap();
        let sol = s.solve(&sys).unwrap();
        assert_eq!(s.factorizations(), 1);
        assert!(sol.report.residual <= 1e-12);
        let sys = SaddleSystem::new(&mk(3.0), &b, vec![1.0; n], None).unwrap();
        let sol = s.solve(&sys).unwrap();
        assert!(sol.report.residual <= 1e-12);
    }

    #[test]
    fn singular_reports_pivot() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        let b = CsrMatrix::from_triplets(0, 2, &[]);
        let sys = SaddleSystem::new(&a, &b, vec![1.0, 2.0], None).unwrap();
        match DirectSolver::default().solve(&sys) {
            Err(Error::DirectSolver(_)) => {}
            other => panic!("expected a solver failure, got {other:?}"),
        }
    }
}
