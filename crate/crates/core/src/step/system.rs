//! Assembly and solution of the linearized tangent-plane system.

use std::sync::Arc;

use super::bdf::BdfScheme;
use super::history::{Record, TimeHistory};
use crate::error::{Error, Result};
use crate::fem::assembly::{default_load_degree, load_vector, weighted_mass_values};
use crate::fem::{FeSpace, Field};
use crate::linsolve::{CsrMatrix, Pattern, SaddleSolver, SaddleSystem, SolveReport, SolverConfig};

/// External field at the current time, as a function of position.
pub type FieldFn<'a> = &'a dyn Fn([f64; 2]) -> [f64; 3];

/// Monolithic `4N x 4N` pattern for one space: the scalar pattern repeated in
/// every block except the multiplier-multiplier block, which only holds its
/// (zero) diagonal.
#[derive(Debug)]
struct Layout {
    space: Arc<FeSpace>,
    pattern: Arc<Pattern>,
}

impl Layout {
    fn new(space: &Arc<FeSpace>) -> Self {
        let p = &space.pattern().0;
        let n = p.nrows;
        let mut row_ptr = Vec::with_capacity(4 * n + 1);
        let mut col_idx = Vec::with_capacity(16 * p.nnz());
        row_ptr.push(0);
        for a in 0..4 {
            for i in 0..n {
                let cols = &p.col_idx[p.row_ptr[i]..p.row_ptr[i + 1]];
                let nb = if a < 3 { 4 } else { 3 };
                for b in 0..nb {
                    col_idx.extend(cols.iter().map(|&j| b * n + j));
                }
                if a == 3 {
                    col_idx.push(3 * n + i);
                }
                row_ptr.push(col_idx.len());
            }
        }
        Layout {
            space: space.clone(),
            pattern: Arc::new(Pattern {
                nrows: 4 * n,
                ncols: 4 * n,
                row_ptr,
                col_idx,
            }),
        }
    }

    fn fill(&self, mass: &[f64], stiff: &[f64], t: &[Vec<f64>; 3], alpha: f64, bt: f64) -> CsrMatrix {
        let p = &self.space.pattern().0;
        let n = p.nrows;
        let mut values = vec![0.0; self.pattern.nnz()];
        for a in 0..4 {
            for i in 0..n {
                let r0 = p.row_ptr[i];
                let len = p.row_ptr[i + 1] - r0;
                let base = self.pattern.row_ptr[a * n + i];
                for b in 0..4 {
                    if a == 3 && b == 3 {
                        continue;
                    }
                    let dst = &mut values[base + b * len..base + (b + 1) * len];
                    let src = r0..r0 + len;
                    match (a, b) {
                        (3, c) | (c, 3) => dst.copy_from_slice(&t[c][src]),
                        (a, b) if a == b => {
                            for (d, k) in dst.iter_mut().zip(src) {
                                *d = alpha * mass[k] + bt * stiff[k];
                            }
                        }
                        (a, b) => {
                            // (m x v)_a = eps_{a c b} m_c v_b with c the third index
                            let c = 3 - a - b;
                            let eps = crate::fem::assembly::levi_civita(a, c, b);
                            for (d, k) in dst.iter_mut().zip(src) {
                                *d = eps * t[c][k];
                            }
                        }
                    }
                }
            }
        }
        CsrMatrix::new(self.pattern.clone(), values)
    }
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub m: Field,
    pub v: Field,
    pub lambda: Field,
    pub solve: SolveReport,
    /// `max_psi |(mhat . v, psi)|` over the scalar basis.
    pub constraint_residual: f64,
}

/// Physical and algorithmic constants of the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub alpha: f64,
    pub ce: f64,
    pub normalize: bool,
}

/// Performs tangent-plane steps, caching the monolithic layout and the
/// solver's symbolic analysis while the space stays the same.
#[derive(Debug)]
pub struct Stepper {
    pub params: StepParams,
    solver: SaddleSolver,
    layout: Option<Layout>,
}

impl Stepper {
    pub fn new(params: StepParams, solver: SolverConfig) -> Self {
        Stepper {
            params,
            solver: SaddleSolver::new(solver),
            layout: None,
        }
    }

    pub fn solver_config(&self) -> &SolverConfig {
        &self.solver.config
    }

    fn layout(&mut self, space: &Arc<FeSpace>) -> &Layout {
        if !self.layout.as_ref().is_some_and(|l| Arc::ptr_eq(&l.space, space)) {
            self.layout = Some(Layout::new(space));
        }
        self.layout.as_ref().unwrap()
    }

    /// Assembles the system with an explicit `tau`; `tau = 0` gives the
    /// semidiscrete velocity at `phi` (used to initialize `v^0`).
    pub fn assemble(
        &mut self,
        scheme: &BdfScheme,
        phi: &Field,
        mhat: &Field,
        tau: f64,
        h_ext: Option<FieldFn<'_>>,
    ) -> Result<SaddleSystem> {
        let space = mhat.space().clone();
        if !phi.same_space(mhat) {
            return Err(Error::StepFailure("predictor and history live on different spaces".into()));
        }
        let StepParams { alpha, ce, .. } = self.params;
        let beta = scheme.beta(ce);
        let n = space.ndofs();
        let (sp, pos) = space.pattern();
        let t = [0, 1, 2].map(|c| weighted_mass_values(&space, mhat.comp(c), pos, sp.nnz()));
        let matrix = {
            let mass = space.mass().values().to_vec();
            let stiff = space.stiffness().values().to_vec();
            self.layout(&space).fill(&mass, &stiff, &t, alpha, beta * tau)
        };
        let mut rhs = match h_ext {
            Some(h) => load_vector(&space, h, default_load_degree(&space)),
            None => vec![0.0; 3 * n],
        };
        let k = space.stiffness();
        for c in 0..3 {
            let kphi = k.mul_vec(phi.comp(c));
            for (r, kp) in rhs[c * n..(c + 1) * n].iter_mut().zip(kphi) {
                *r -= beta * kp;
            }
        }
        rhs.extend(std::iter::repeat_n(0.0, n));
        Ok(SaddleSystem::from_monolithic(matrix, rhs, 3 * n))
    }

    /// Solves an assembled system and splits the result into fields.
    pub fn solve(&mut self, space: &Arc<FeSpace>, sys: &SaddleSystem) -> Result<(Field, Field, SolveReport, f64)> {
        let sol = self.solver.solve(sys)?;
        let residual = sys
            .constraint_action(&sol.v)
            .iter()
            .fold(0.0_f64, |a, b| a.max(b.abs()));
        let v = Field::from_values(space, 3, sol.v);
        let lambda = Field::from_values(space, 1, sol.lambda);
        if !v.is_finite() {
            return Err(Error::NonFinite("step velocity".into()));
        }
        Ok((v, lambda, sol.report, residual))
    }

    /// One BDF step of size `scheme.tau()` from the newest history records.
    pub fn do_step(
        &mut self,
        history: &TimeHistory,
        scheme: &BdfScheme,
        mhat: &Field,
        h_ext: Option<FieldFn<'_>>,
    ) -> Result<StepResult> {
        if history.len() < scheme.k {
            return Err(Error::StepFailure(format!(
                "BDF-{} needs {} history records, have {}",
                scheme.k,
                scheme.k,
                history.len()
            )));
        }
        let tau = scheme.tau();
        let phi = history_combination(history, scheme);
        let sys = self.assemble(scheme, &phi, mhat, tau, h_ext)?;
        let space = mhat.space().clone();
        let (v, lambda, solve, constraint_residual) = self.solve(&space, &sys)?;
        let mut m = phi;
        m.axpy(tau, &v);
        m.values_mut().iter_mut().for_each(|x| *x /= scheme.xi);
        if self.params.normalize {
            m.normalize_nodal()?;
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("magnetization".into()));
        }
        Ok(StepResult {
            m,
            v,
            lambda,
            solve,
            constraint_residual,
        })
    }

    /// Semidiscrete velocity at `m` (the `tau -> 0` limit of a BDF-1 step).
    pub fn initial_velocity(&mut self, m: &Field, h_ext: Option<FieldFn<'_>>) -> Result<StepResult> {
        let scheme = BdfScheme::new(&[1.0], 1)?;
        let mut mhat = m.clone();
        mhat.normalize_nodal()?;
        let sys = self.assemble(&scheme, m, &mhat, 0.0, h_ext)?;
        let space = m.space().clone();
        let (v, lambda, solve, constraint_residual) = self.solve(&space, &sys)?;
        Ok(StepResult {
            m: m.clone(),
            v,
            lambda,
            solve,
            constraint_residual,
        })
    }
}

/// `sum_j w_j m^{n-j}`.
pub fn history_combination(history: &TimeHistory, scheme: &BdfScheme) -> Field {
    let fields: Vec<&Field> = (0..scheme.k).map(|j| &history.back(j).m).collect();
    Field::combination(&scheme.weights, &fields)
}

/// Stand-alone assembly with default solver settings.
#[allow(clippy::too_many_arguments)]
pub fn assemble_step_system(
    scheme: &BdfScheme,
    history: &TimeHistory,
    mhat: &Field,
    tau: f64,
    h_ext: Option<FieldFn<'_>>,
    alpha: f64,
    ce: f64,
) -> Result<SaddleSystem> {
    let mut s = Stepper::new(
        StepParams {
            alpha,
            ce,
            normalize: false,
        },
        SolverConfig::default(),
    );
    let phi = history_combination(history, scheme);
    s.assemble(scheme, &phi, mhat, tau, h_ext)
}

/// Record for the history from a step result at time `t`.
pub fn record(t: f64, tau: f64, r: &StepResult) -> Record {
    Record {
        t,
        tau,
        m: r.m.clone(),
        v: r.v.clone(),
    }
}
