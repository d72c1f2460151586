//! The complete adaptive algorithm: initial mesh, implicit Euler startup and
//! the BDF main loop with step, order and mesh control.

pub mod check;
pub mod config;
pub mod sweep;

use std::path::PathBuf;
use std::sync::Arc;

pub use check::{check, CheckItem};
pub use config::{Config, PredictorOrder};
pub use sweep::{loglog_slope, sweep, SweepParam, SweepRow, SweepTable};

use crate::adapt_space::{adapt_initial, adapt_mesh, indicators, AdaptParams};
use crate::adapt_time::{propose_tau, select_order, DerivativeEstimates, StepController};
use crate::diagnostics::{
    err_update, exchange_energy, export_csv, export_vtk, l2_squared_of, EnergyTrace, ExactProblem, TraceRow,
};
use crate::error::{Error, Result};
use crate::fem::{assembly::l2_norm, interpolate, FeSpace, Field};
use crate::mesh::Mesh;
use crate::step::{predictor, record, BdfScheme, Record, StepParams, StepResult, Stepper, TimeHistory};

/// Retries with halved steps after a degenerate predictor.
const PREDICTOR_RETRIES: usize = 8;

/// State of a run between steps.
pub struct Simulation {
    cfg: Config,
    problem: ExactProblem,
    stepper: Stepper,
    ctrl: StepController,
    history: TimeHistory,
    trace: EnergyTrace,
    err_t: f64,
    /// Order of the last accepted step.
    k: usize,
    steps_taken: usize,
    vtk_written: Vec<PathBuf>,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("t", &self.time())
            .field("steps", &self.steps_taken)
            .field("dofs", &self.history.space().ndofs())
            .finish()
    }
}

/// Initial mesh adapted to `m(0)` and the history after the two implicit
/// Euler startup steps (records at `t_0 < t_1 < t_2`).
pub fn precompute(cfg: &Config) -> Result<(Arc<FeSpace>, TimeHistory)> {
    let sim = Simulation::new(cfg.clone())?;
    Ok((sim.history.space().clone(), sim.history))
}

/// Runs to the final time and writes the configured outputs. On failure the
/// trace up to the failing step is still written to `out_csv`.
pub fn run(cfg: &Config) -> Result<EnergyTrace> {
    let mut sim = Simulation::new(cfg.clone())?;
    let result = sim.run_to_end();
    if let Some(path) = &cfg.out_csv {
        export_csv(&sim.trace, path)?;
    }
    result?;
    sim.write_vtk(true)?;
    Ok(sim.trace)
}

impl Simulation {
    /// Validates the configuration and performs the precomputation.
    pub fn new(cfg: Config) -> Result<Self> {
        cfg.validate()?;
        let problem = cfg.problem();
        let mut ctrl = StepController::new(cfg.tol_t, cfg.tau_min, cfg.tau_max, cfg.k_min, cfg.k_max)?;
        ctrl.current_k = 1;
        let mesh = Arc::new(Mesh::rectangle(problem.domain, cfg.nx, cfg.ny)?);
        let space = FeSpace::new(mesh, cfg.degree);
        let initial = |x: [f64; 2]| problem.initial(x);
        let m0 = if cfg.tol_s.is_finite() {
            let (space, m, passes) = adapt_initial(&space, initial, &adapt_params(&cfg))?;
            log::info!("initial mesh: {passes} refinement passes, {} elements", space.num_elements());
            m
        } else {
            interpolate(&space, initial)
        };
        let mut stepper = Stepper::new(
            StepParams {
                alpha: cfg.alpha,
                ce: cfg.ce,
                normalize: cfg.normalize,
            },
            cfg.solver_config(),
        );
        let h0 = |x: [f64; 2]| problem.h_ext(0.0, x);
        let v0 = stepper.initial_velocity(&m0, forcing(&problem, &h0))?;
        let history = TimeHistory::new(cfg.k_max + 2, Record {
            t: 0.0,
            tau: 0.0,
            m: m0,
            v: v0.v.clone(),
        });
        let mut sim = Simulation {
            cfg,
            problem,
            stepper,
            ctrl,
            history,
            trace: EnergyTrace::default(),
            err_t: f64::NAN,
            k: 1,
            steps_taken: 0,
            vtk_written: Vec::new(),
        };
        sim.push_row(0.0, 0, &v0)?;
        sim.write_vtk(false)?;
        sim.startup()?;
        Ok(sim)
    }

    /// Two implicit Euler steps. The first step is a quarter of the order-1
    /// proposal from the exact (or linearized) second time derivative, the
    /// second uses `|v^1 - v^0| / tau_1`.
    fn startup(&mut self) -> Result<()> {
        for _ in 0..2 {
            if self.done() {
                break;
            }
            let tau = match self.cfg.uniform_steps {
                Some(n) => self.cfg.t_final / n as f64,
                None if self.history.len() == 1 => {
                    let d2 = self.initial_second_derivative()?;
                    let star = propose_tau(1, self.cfg.tol_t, d2, &[]);
                    self.cfg.tau_min.max((0.25 * star).min(self.cfg.tau_max))
                }
                None => {
                    let (r0, r1) = (self.history.back(1), self.history.back(0));
                    let d2 = l2_norm(&difference(&r1.v, &r0.v)) / r1.tau;
                    self.ctrl.clamp(r1.tau, propose_tau(1, self.cfg.tol_t, d2, &[]))
                }
            };
            self.advance(tau, 1)?;
        }
        Ok(())
    }

    /// `|d_tt m(0)|`: from the exact solution where known, otherwise by
    /// differentiating the velocity map along `v^0`.
    fn initial_second_derivative(&mut self) -> Result<f64> {
        if let Some(d) = self.problem.second_time_derivative_norm(0.0) {
            return Ok(d);
        }
        let r = self.history.newest();
        let vnorm = l2_norm(&r.v);
        if vnorm == 0.0 {
            return Ok(0.0);
        }
        let eps = 1e-7 / vnorm.max(1.0);
        let mut m = r.m.clone();
        m.axpy(eps, &r.v);
        let problem = self.problem;
        let h = |x: [f64; 2]| problem.h_ext(0.0, x);
        let v1 = self.stepper.initial_velocity(&m, forcing(&problem, &h))?;
        Ok(l2_norm(&difference(&v1.v, &r.v)) / eps)
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    pub fn problem(&self) -> &ExactProblem {
        &self.problem
    }

    pub fn history(&self) -> &TimeHistory {
        &self.history
    }

    pub fn trace(&self) -> &EnergyTrace {
        &self.trace
    }

    pub fn into_trace(self) -> EnergyTrace {
        self.trace
    }

    pub fn time(&self) -> f64 {
        self.history.newest().t
    }

    pub fn err_t(&self) -> f64 {
        self.err_t
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn vtk_files(&self) -> &[PathBuf] {
        &self.vtk_written
    }

    pub fn done(&self) -> bool {
        self.time() >= self.cfg.t_final
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        while !self.done() {
            self.step()?;
        }
        Ok(())
    }

    /// One step of the main loop: propose, adapt the mesh, predict, solve.
    pub fn step(&mut self) -> Result<()> {
        let (tau, k) = self.next_step();
        let params = adapt_params(&self.cfg);
        let skip = !params.tol_s.is_finite()
            && (params.theta_c >= 1.0 || self.history.space().mesh().num_elements() == self.history.space().mesh().num_roots());
        if !skip {
            let before = self.history.space().ndofs();
            let report = adapt_mesh(&mut self.history, &params)?;
            if self.history.space().ndofs() != before {
                log::debug!(
                    "t = {:.6}: {} refinement passes, {} elements coarsened, {} elements",
                    self.time(),
                    report.refinement_passes,
                    report.coarsened,
                    report.elements
                );
            }
        }
        self.advance(tau, k)
    }

    /// Step size and order for the next step, before truncation.
    fn next_step(&mut self) -> (f64, usize) {
        let len = self.history.len();
        // BDF-k needs k records; its estimate needs k + 1.
        let k_avail = (len - 1).clamp(1, self.cfg.k_max);
        if let Some(n) = self.cfg.uniform_steps {
            return (self.cfg.t_final / n as f64, self.cfg.k_max.min(len));
        }
        let est = DerivativeEstimates::from_history(&self.history);
        let recent = self.history.steps(3);
        let tau_prev = self.history.newest().tau;
        let mut ctrl = self.ctrl;
        ctrl.k_max = ctrl.k_max.min(k_avail);
        ctrl.k_min = ctrl.k_min.min(ctrl.k_max);
        let (star, k) = if ctrl.k_min == ctrl.k_max {
            let k = ctrl.k_max;
            let d = est.for_order(k).unwrap_or(0.0);
            (propose_tau(k, self.cfg.tol_t, d, &recent), k)
        } else {
            match ctrl.best_proposal(&est, &recent) {
                Some((star, kstar)) => (star, select_order(self.k, kstar, &ctrl)),
                None => (f64::INFINITY, ctrl.k_min),
            }
        };
        (self.ctrl.clamp(tau_prev, star), k)
    }

    /// Takes one step of order `k` (reduced while the history is short),
    /// truncated to end exactly at the final time.
    fn advance(&mut self, tau: f64, k: usize) -> Result<()> {
        let t = self.time();
        let k = k.min(self.history.len());
        let mut tau = tau;
        let mut tries = 0;
        let (t_next, tau, result) = loop {
            let (t_next, tau_eff) = if t + tau >= self.cfg.t_final * (1.0 - 1e-12) {
                (self.cfg.t_final, self.cfg.t_final - t)
            } else {
                (t + tau, tau)
            };
            if !(tau_eff > 0.0) {
                return Err(Error::InvalidStep(tau_eff));
            }
            match self.try_step(t_next, tau_eff, k) {
                Err(Error::DegeneratePredictor { .. }) if tries < PREDICTOR_RETRIES && tau > self.cfg.tau_min => {
                    tries += 1;
                    tau = (0.5 * tau).max(self.cfg.tau_min);
                    log::warn!("degenerate predictor at t = {t}, retrying with tau = {tau:e}");
                }
                other => break (t_next, tau_eff, other?),
            }
        };
        self.history.push(record(t_next, tau, &result))?;
        self.k = k;
        self.ctrl.current_k = k;
        self.steps_taken += 1;
        self.push_row(tau, k, &result)?;
        self.write_vtk(false)?;
        Ok(())
    }

    fn try_step(&mut self, t_next: f64, tau: f64, k: usize) -> Result<StepResult> {
        let len = self.history.len();
        let order = self.cfg.predictor_order.degree(k).min(len - 1);
        let mhat = predictor(&self.history, t_next, order)?;
        let mut steps = self.history.steps(k - 1);
        steps.push(tau);
        let scheme = BdfScheme::new(&steps, k)?;
        let problem = self.problem;
        let h = |x: [f64; 2]| problem.h_ext(t_next, x);
        self.stepper.do_step(&self.history, &scheme, &mhat, forcing(&problem, &h))
    }

    fn push_row(&mut self, tau: f64, k: usize, r: &StepResult) -> Result<()> {
        let rec = self.history.newest();
        let (t, m, v) = (rec.t, &rec.m, &rec.v);
        self.err_t = err_update(self.err_t, &self.problem, m, t);
        let space = m.space();
        let field = if self.problem.field_free() || tau == 0.0 {
            0.0
        } else {
            let problem = self.problem;
            tau * l2_squared_of(space, |x| problem.h_ext(t, x))
        };
        let vn = l2_norm(v);
        let row = TraceRow {
            t,
            tau,
            k,
            dofs: space.ndofs(),
            energy: exchange_energy(m, self.cfg.ce),
            dissipation: tau * vn * vn,
            err_t: self.err_t,
            iterations: r.solve.iterations,
            field,
            solver_residual: r.solve.residual,
            constraint_residual: r.constraint_residual,
        };
        let finite = [row.t, row.tau, row.energy, row.dissipation, row.field, row.solver_residual, row.constraint_residual]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::NonFinite(format!("trace row at t = {t}")));
        }
        self.trace.push(row);
        Ok(())
    }

    /// Writes a snapshot every `vtk_every` steps, or unconditionally.
    fn write_vtk(&mut self, force: bool) -> Result<()> {
        let Some(prefix) = &self.cfg.out_vtk_prefix else {
            return Ok(());
        };
        let n = self.steps_taken;
        if !force && !n.is_multiple_of(self.cfg.vtk_every) {
            return Ok(());
        }
        let path = PathBuf::from(format!("{}_{n:05}.vtk", prefix.display()));
        if self.vtk_written.last() == Some(&path) {
            return Ok(());
        }
        let rec = self.history.newest();
        let eta = indicators(&rec.m)?;
        export_vtk(&rec.m, Some(&rec.v), Some(&eta.eta), &path)?;
        self.vtk_written.push(path);
        Ok(())
    }
}

fn adapt_params(cfg: &Config) -> AdaptParams {
    AdaptParams {
        tol_s: cfg.tol_s,
        theta_r: cfg.theta_r,
        theta_c: cfg.theta_c,
        max_passes: cfg.max_passes,
    }
}

fn forcing<'a>(
    problem: &ExactProblem,
    h: &'a dyn Fn([f64; 2]) -> [f64; 3],
) -> Option<&'a dyn Fn([f64; 2]) -> [f64; 3]> {
    (!problem.field_free()).then_some(h)
}

fn difference(a: &Field, b: &Field) -> Field {
    Field::combination(&[1.0, -1.0], &[a, b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::ExampleId;

    fn small(example: ExampleId) -> Config {
        Config {
            nx: 4,
            ny: 4,
            t_final: 0.01,
            tau_max: 1e-3,
            ..Config::for_example(example)
        }
    }

    #[test]
    fn startup_times_increase() {
        let cfg = Config {
            tol_s: 10.0,
            ..small(ExampleId::Example1)
        };
        let (space, h) = precompute(&cfg).unwrap();
        assert_eq!(space.num_elements(), 32);
        let t: Vec<f64> = h.records().map(|r| r.t).collect();
        assert_eq!(t.len(), 3);
        assert!(t[0] == 0.0 && t[0] < t[1] && t[1] < t[2]);
    }

    #[test]
    fn reaches_final_time_exactly() {
        let cfg = small(ExampleId::Example1);
        let trace = run(&cfg).unwrap();
        assert_eq!(trace.last().unwrap().t, cfg.t_final);
        for w in trace.rows.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        assert!(trace.rows.iter().all(|r| r.constraint_residual <= 1e-9));
    }

    #[test]
    fn uniform_mode_takes_n_steps() {
        let cfg = Config {
            uniform_steps: Some(7),
            ..small(ExampleId::Example1)
        };
        let trace = run(&cfg).unwrap();
        assert_eq!(trace.steps(), 7);
        assert!((trace.last().unwrap().t - 0.01).abs() < 1e-15);
        let ks: Vec<usize> = trace.rows.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![0, 1, 1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn stationary_state_clamps_steps() {
        let cfg = Config {
            tol_s: 1e-3,
            theta_c: 0.5,
            ..small(ExampleId::Constant)
        };
        let sim = Simulation::new(cfg).unwrap();
        assert_eq!(sim.history().space().num_elements(), 32);
        let recs: Vec<&Record> = sim.history().records().collect();
        assert!(recs.iter().all(|r| r.v.values().iter().all(|x| x.abs() < 1e-14)));
        assert_eq!(recs[1].tau, 1e-3);
        assert_eq!(recs[2].tau, (std::f64::consts::SQRT_2 * recs[1].tau).min(1e-3));
    }
}
