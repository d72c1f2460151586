//! Krylov methods: preconditioned CG for the mass matrix and BiCGStab with
//! ILU(0) for the saddle systems.

use super::sparse::{dot, norm2, CsrMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    pub tol: f64,
    pub max_iter: usize,
}

/// Pivot magnitude below which ILU(0) substitutes a small regular value.
const PIVOT_FLOOR: f64 = 1e-300;

/// Incomplete LU factorization without fill. `L` (unit diagonal) and `U` are
/// stored together in the pattern of the input matrix.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    lu: CsrMatrix,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        let p = a.pattern().clone();
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            diag.push(p.find(i, i).ok_or_else(|| {
                Error::IterativeSolver {
                    reason: format!("ILU(0) needs a structural diagonal, row {i} has none"),
                    iterations: 0,
                    residual: f64::NAN,
                    trace: Vec::new(),
                }
            })?);
        }
        let mut vals = a.values().to_vec();
        let rp = &p.row_ptr;
        let ci = &p.col_idx;
        // Scatter map of the current row: column -> position, or usize::MAX.
        let mut where_: Vec<usize> = vec![usize::MAX; n];
        for i in 0..n {
            for k in rp[i]..rp[i + 1] {
                where_[ci[k]] = k;
            }
            for k in rp[i]..diag[i] {
                let j = ci[k];
                let piv = vals[diag[j]];
                let l = vals[k] / piv;
                vals[k] = l;
                for m in (diag[j] + 1)..rp[j + 1] {
                    let w = where_[ci[m]];
                    if w != usize::MAX {
                        vals[w] -= l * vals[m];
                    }
                }
            }
            let d = vals[diag[i]];
            if !(d.abs() > PIVOT_FLOOR) || !d.is_finite() {
                let scale = (rp[i]..rp[i + 1]).map(|k| vals[k].abs()).fold(0.0, f64::max);
                vals[diag[i]] = if scale > 0.0 { 1e-8 * scale } else { 1.0 };
            }
            for k in rp[i]..rp[i + 1] {
                where_[ci[k]] = usize::MAX;
            }
        }
        Ok(Ilu0 {
            lu: CsrMatrix::new(p, vals),
            diag,
        })
    }

    /// `x = (LU)^{-1} b`.
    pub fn apply(&self, b: &[f64], x: &mut [f64]) {
        let p = self.lu.pattern();
        let v = self.lu.values();
        let n = b.len();
        for i in 0..n {
            let mut s = b[i];
            for k in p.row_ptr[i]..self.diag[i] {
                s -= v[k] * x[p.col_idx[k]];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (self.diag[i] + 1)..p.row_ptr[i + 1] {
                s -= v[k] * x[p.col_idx[k]];
            }
            x[i] = s / v[self.diag[i]];
        }
    }
}

fn failure(reason: impl Into<String>, iterations: usize, residual: f64, trace: Vec<f64>) -> Error {
    Error::IterativeSolver {
        reason: reason.into(),
        iterations,
        residual,
        trace,
    }
}

/// Right-preconditioned BiCGStab. Convergence is declared on the true
/// relative residual `|b - A x| / |b|`. Returns the solution and the number
/// of iterations.
/// Approximate inverse applied by the Krylov solvers.
pub trait Preconditioner {
    fn apply(&self, b: &[f64], x: &mut [f64]);
}

impl Preconditioner for Ilu0 {
    fn apply(&self, b: &[f64], x: &mut [f64]) {
        Ilu0::apply(self, b, x)
    }
}

/// Right-preconditioned BiCGStab; convergence is judged on the true residual.
pub fn bicgstab<P: Preconditioner + ?Sized>(a: &CsrMatrix, b: &[f64], prec: &P, cfg: &KrylovConfig) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut trace = Vec::new();
    let mut r = b.to_vec();
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ph = vec![0.0; n];
    let mut sh = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut s = vec![0.0; n];
    for it in 1..=cfg.max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            return Err(failure("breakdown: <r0, r> vanished", it - 1, norm2(&r) / bnorm, trace));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        prec.apply(&p, &mut ph);
        a.mul_vec_into(&ph, &mut v);
        let rv = dot(&r0, &v);
        if rv == 0.0 {
            return Err(failure("breakdown: <r0, A p> vanished", it, norm2(&r) / bnorm, trace));
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm2(&s) / bnorm <= cfg.tol {
            for i in 0..n {
                x[i] += alpha * ph[i];
            }
            if true_residual(a, b, &x) / bnorm <= cfg.tol {
                return Ok((x, it));
            }
            for i in 0..n {
                x[i] -= alpha * ph[i];
            }
        }
        prec.apply(&s, &mut sh);
        a.mul_vec_into(&sh, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        let rel = norm2(&r) / bnorm;
        trace.push(rel);
        if !rel.is_finite() {
            return Err(failure("residual became non-finite", it, rel, trace));
        }
        if rel <= cfg.tol {
            let tr = true_residual(a, b, &x) / bnorm;
            if tr <= cfg.tol {
                return Ok((x, it));
            }
            // recurrence drifted; restart from the true residual
            r = b.iter().zip(a.mul_vec(&x)).map(|(bi, ax)| bi - ax).collect();
        }
        if omega == 0.0 {
            return Err(failure("breakdown: stabilization parameter vanished", it, rel, trace));
        }
    }
    let rel = true_residual(a, b, &x) / bnorm;
    Err(failure(format!("no convergence within {} iterations", cfg.max_iter), cfg.max_iter, rel, trace))
}

fn true_residual(a: &CsrMatrix, b: &[f64], x: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    b.iter().zip(&ax).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Jacobi-preconditioned conjugate gradients for SPD matrices.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>, cfg: &KrylovConfig) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = x0.map_or_else(|| vec![0.0; n], |v| v.to_vec());
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let dinv: Vec<f64> = a.diagonal().iter().map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let ax = a.mul_vec(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(p, q)| p * q).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut trace = Vec::new();
    for it in 0..=cfg.max_iter {
        let rel = norm2(&r) / bnorm;
        if rel <= cfg.tol {
            return Ok((x, it));
        }
        if it == cfg.max_iter {
            break;
        }
        trace.push(rel);
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(failure("matrix is not positive definite along a search direction", it, rel, trace));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rel = norm2(&r) / bnorm;
    Err(failure(format!("no convergence within {} iterations", cfg.max_iter), cfg.max_iter, rel, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn ilu_of_tridiagonal_is_exact() {
        let a = laplace_1d(6);
        let ilu = Ilu0::new(&a).unwrap();
        let b = vec![1.0; 6];
        let mut x = vec![0.0; 6];
        ilu.apply(&b, &mut x);
        let r = a.mul_vec(&x);
        for v in r {
            assert!((v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn cg_and_bicgstab_converge() {
        let a = laplace_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let cfg = KrylovConfig { tol: 1e-12, max_iter: 200 };
        let (x, _) = conjugate_gradient(&a, &b, None, &cfg).unwrap();
        assert!(true_residual(&a, &b, &x) / norm2(&b) < 1e-12);
        let mut t = a.triplets();
        t.push((0, 3, 0.3));
        t.push((7, 2, -0.4));
        let ns = CsrMatrix::from_triplets(50, 50, &t);
        let ilu = Ilu0::new(&ns).unwrap();
        let (y, _) = bicgstab(&ns, &b, &ilu, &cfg).unwrap();
        assert!(true_residual(&ns, &b, &y) / norm2(&b) < 1e-12);
    }

    #[test]
    fn max_iter_exhaustion_reports_trace() {
        let a = laplace_1d(30);
        let b = vec![1.0; 30];
        let cfg = KrylovConfig { tol: 1e-14, max_iter: 2 };
        match conjugate_gradient(&a, &b, None, &cfg) {
            Err(Error::IterativeSolver { iterations, trace, .. }) => {
                assert_eq!(iterations, 2);
                assert_eq!(trace.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
