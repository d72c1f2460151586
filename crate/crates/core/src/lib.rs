//! Space- and time-adaptive finite elements for the Landau-Lifshitz-Gilbert
//! equation in two dimensions.
//!
//! The solver advances the magnetization with a variable-step BDF tangent
//! plane scheme: each step solves a linear saddle-point problem for the time
//! derivative `v`, with a Lagrange multiplier enforcing orthogonality to an
//! extrapolated predictor. Step sizes follow local truncation error estimates
//! built from finite differences of the history, and meshes follow a
//! gradient-recovery error indicator with newest-vertex bisection and
//! forest-based coarsening.
//!
//! Module map:
//!
//! - [`mesh`]: triangulations, bisection, coarsening
//! - [`fem`]: Lagrange spaces, quadrature, assembly, transfer, recovery
//! - [`linsolve`]: sparse matrices, direct and BiCGStab/ILU(0) saddle solvers
//! - [`step`]: BDF coefficients, history, predictor, the tangent plane step
//! - [`adapt_time`]: derivative estimators and step/order control
//! - [`adapt_space`]: indicators, marking, refine/coarsen orchestration
//! - [`diagnostics`]: manufactured problems, energies, error norms, CSV/VTK
//! - [`driver`]: configuration and the full adaptive algorithm

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adapt_space;
pub mod adapt_time;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod fem;
pub mod linsolve;
pub mod mesh;
pub mod step;

pub use error::{Error, Result};
