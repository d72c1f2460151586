//! Linear algebra for the saddle-point systems of the time stepper.
//!
//! Systems are solved monolithically: `[[A, B^T], [B, 0]] [v; l] = [f; g]`.
//! The multiplier block carries an explicit zero diagonal so that ILU(0)
//! sees a structurally complete diagonal.

pub mod direct;
pub mod iterative;
pub mod sparse;

use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
pub use direct::DirectSolver;
pub use iterative::{bicgstab, conjugate_gradient, Ilu0, KrylovConfig};
pub use sparse::{CsrMatrix, Pattern};

/// Above this many unknowns the automatic method switches to BiCGStab.
pub const DIRECT_LIMIT: usize = 600_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Iterative,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Iterative => "iterative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Direct,
    Iterative,
}

impl std::str::FromStr for MethodChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(MethodChoice::Auto),
            "direct" => Ok(MethodChoice::Direct),
            "iterative" | "bicgstab" => Ok(MethodChoice::Iterative),
            other => Err(Error::Config(format!("unknown solver '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: MethodChoice,
    /// Relative residual target of the iterative method.
    pub tol: f64,
    pub max_iter: usize,
    /// Let the direct method precondition with stale factors.
    pub reuse_factors: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: MethodChoice::Auto,
            tol: 1e-12,
            max_iter: 2000,
            reuse_factors: true,
        }
    }
}

impl SolverConfig {
    pub fn method_for(&self, unknowns: usize) -> Method {
        match self.method {
            MethodChoice::Direct => Method::Direct,
            MethodChoice::Iterative => Method::Iterative,
            MethodChoice::Auto if unknowns <= DIRECT_LIMIT => Method::Direct,
            MethodChoice::Auto => Method::Iterative,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: Method,
    pub iterations: usize,
    /// `|K x - b| / |b|` of the monolithic system, recomputed after the solve.
    pub residual: f64,
    pub wall_time: f64,
}

/// Monolithic saddle-point system with `nv` primal and `ns` multiplier
/// unknowns (multipliers last).
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    matrix: CsrMatrix,
    rhs: Vec<f64>,
    nv: usize,
    ns: usize,
}

impl SaddleSystem {
    /// Builds the monolithic matrix from its blocks. `g` defaults to zero.
    pub fn new(a: &CsrMatrix, b: &CsrMatrix, f: Vec<f64>, g: Option<Vec<f64>>) -> Result<Self> {
        let nv = a.nrows();
        let ns = b.nrows();
        if a.ncols() != nv || b.ncols() != nv || f.len() != nv {
            return Err(Error::DirectSolver(format!(
                "inconsistent saddle blocks: A {}x{}, B {}x{}, f {}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                f.len()
            )));
        }
        let mut trip = a.triplets();
        for (i, j, v) in b.triplets() {
            trip.push((nv + i, j, v));
            trip.push((j, nv + i, v));
        }
        for i in 0..ns {
            trip.push((nv + i, nv + i, 0.0));
        }
        let matrix = CsrMatrix::from_triplets(nv + ns, nv + ns, &trip);
        let mut rhs = f;
        rhs.extend(g.unwrap_or_else(|| vec![0.0; ns]));
        assert_eq!(rhs.len(), nv + ns);
        Ok(SaddleSystem { matrix, rhs, nv, ns })
    }

    /// Wraps an already assembled monolithic matrix.
    pub fn from_monolithic(matrix: CsrMatrix, rhs: Vec<f64>, nv: usize) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols());
        assert_eq!(matrix.nrows(), rhs.len());
        let ns = matrix.nrows() - nv;
        SaddleSystem { matrix, rhs, nv, ns }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn unknowns(&self) -> usize {
        self.nv + self.ns
    }

    pub fn pattern(&self) -> &Arc<Pattern> {
        self.matrix.pattern()
    }

    /// Relative monolithic residual of a candidate solution.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let r = self.matrix.mul_vec(x);
        let num: f64 = r.iter().zip(&self.rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let den = sparse::norm2(&self.rhs);
        if den > 0.0 {
            num / den
        } else {
            num
        }
    }

    /// Primal block of `x` applied to the constraint rows: `B v`.
    pub fn constraint_action(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ns];
        for (i, o) in out.iter_mut().enumerate() {
            let (cols, vals) = self.matrix.row(self.nv + i);
            *o = cols
                .iter()
                .zip(vals)
                .filter(|(&j, _)| j < self.nv)
                .map(|(&j, &a)| a * v[j])
                .sum();
        }
        out
    }
}

/// Solution split into primal and multiplier parts.
#[derive(Debug, Clone)]
pub struct SaddleSolution {
    pub v: Vec<f64>,
    pub lambda: Vec<f64>,
    pub report: SolveReport,
}

/// Stateful front end choosing between the direct and iterative paths. The
/// direct path keeps its symbolic factorization while the pattern is
/// unchanged.
#[derive(Debug, Default)]
pub struct SaddleSolver {
    pub config: SolverConfig,
    direct: DirectSolver,
}

impl SaddleSolver {
    pub fn new(config: SolverConfig) -> Self {
        SaddleSolver {
            config,
            direct: DirectSolver::new(config.reuse_factors),
        }
    }

    pub fn solve(&mut self, sys: &SaddleSystem) -> Result<SaddleSolution> {
        match self.config.method_for(sys.unknowns()) {
            Method::Direct => self.direct.solve(sys),
            Method::Iterative => solve_iterative(sys, self.config.tol, self.config.max_iter),
        }
    }
}

pub fn solve_direct(sys: &SaddleSystem) -> Result<SaddleSolution> {
    DirectSolver::default().solve(sys)
}

/// BiCGStab with ILU(0) on the monolithic matrix.
pub fn solve_iterative(sys: &SaddleSystem, tol: f64, max_iter: usize) -> Result<SaddleSolution> {
    let start = Instant::now();
    let ilu = Ilu0::new(sys.matrix())?;
    let cfg = KrylovConfig { tol, max_iter };
    let (x, iterations) = bicgstab(sys.matrix(), sys.rhs(), &ilu, &cfg)?;
    let residual = sys.residual(&x);
    Ok(split(sys, x, Method::Iterative, iterations, residual, start))
}

fn split(sys: &SaddleSystem, mut x: Vec<f64>, method: Method, iterations: usize, residual: f64, start: Instant) -> SaddleSolution {
    let lambda = x.split_off(sys.nv);
    SaddleSolution {
        v: x,
        lambda,
        report: SolveReport {
            method,
            iterations,
            residual,
            wall_time: start.elapsed().as_secs_f64(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_saddle_by_hand() {
        // [[2, 1], [1, 0]] x = (3, 1)
        let a = CsrMatrix::from_triplets(1, 1, &[(0, 0, 2.0)]);
        let b = CsrMatrix::from_triplets(1, 1, &[(0, 0, 1.0)]);
        let sys = SaddleSystem::new(&a, &b, vec![3.0], Some(vec![1.0])).unwrap();
        let d = solve_direct(&sys).unwrap();
        assert!((d.v[0] - 1.0).abs() < 1e-14 && (d.lambda[0] - 1.0).abs() < 1e-14);
        let it = solve_iterative(&sys, 1e-12, 10).unwrap();
        assert!((it.v[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_without_constraints() {
        let a = CsrMatrix::identity(3);
        let b = CsrMatrix::from_triplets(0, 3, &[]);
        let sys = SaddleSystem::new(&a, &b, vec![1.0, 0.0, 0.0], None).unwrap();
        let d = solve_direct(&sys).unwrap();
        assert_eq!(d.v, vec![1.0, 0.0, 0.0]);
        assert!(d.lambda.is_empty());
        assert!(d.report.residual < 1e-15);
    }

    #[test]
    fn zero_iterations_is_an_error() {
        let a = CsrMatrix::identity(2);
        let b = CsrMatrix::from_triplets(0, 2, &[]);
        let sys = SaddleSystem::new(&a, &b, vec![1.0, 2.0], None).unwrap();
        assert!(matches!(solve_iterative(&sys, 1e-10, 0), Err(Error::IterativeSolver { .. })));
    }

    #[test]
    fn method_selection() {
        let cfg = SolverConfig::default();
        assert_eq!(cfg.method_for(10), Method::Direct);
        assert_eq!(cfg.method_for(DIRECT_LIMIT + 1), Method::Iterative);
        assert_eq!("bicgstab".parse::<MethodChoice>().unwrap(), MethodChoice::Iterative);
        assert!("mumps".parse::<MethodChoice>().is_err());
    }
}
