//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::diagnostics::{ExactProblem, ExampleId};
use crate::error::{Error, Result};
use crate::linsolve::{MethodChoice, SolverConfig};
use crate::mesh::Rect;

/// Extrapolation degree of the predictor relative to the BDF order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PredictorOrder {
    #[default]
    K,
    KMinus1,
}

impl PredictorOrder {
    pub fn degree(self, k: usize) -> usize {
        match self {
            PredictorOrder::K => k,
            PredictorOrder::KMinus1 => k.saturating_sub(1),
        }
    }
}

impl FromStr for PredictorOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('\u{2212}', "-").as_str() {
            "k" => Ok(PredictorOrder::K),
            "k-1" => Ok(PredictorOrder::KMinus1),
            other => Err(Error::Config(format!("predictor_order must be 'k' or 'k-1', got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub example: ExampleId,
    pub alpha: f64,
    pub ce: f64,
    /// Final time.
    pub t_final: f64,
    pub degree: usize,
    pub tol_s: f64,
    pub tol_t: f64,
    pub theta_r: f64,
    pub theta_c: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub normalize: bool,
    pub predictor_order: PredictorOrder,
    pub solver: MethodChoice,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    /// Precondition with the previous step's LU instead of refactoring.
    pub reuse_factors: bool,
    pub nx: usize,
    pub ny: usize,
    pub out_csv: Option<PathBuf>,
    pub out_vtk_prefix: Option<PathBuf>,
    /// Write every n-th step to VTK (the final state is always written).
    pub vtk_every: usize,
    /// Seeds the randomized checks; the solver itself is deterministic.
    pub seed: u64,
    /// Constant steps `T / N` instead of adaptive control.
    pub uniform_steps: Option<usize>,
    pub max_passes: usize,
}

impl Config {
    /// Defaults taken from the benchmark problem.
    pub fn for_example(example: ExampleId) -> Self {
        let p = ExactProblem::new(example);
        let (nx, ny) = match example {
            ExampleId::Example4 => (20, 4),
            _ => (8, 8),
        };
        let t_final = p.t_final;
        Config {
            example,
            alpha: p.alpha,
            ce: p.ce,
            t_final,
            degree: 1,
            tol_s: f64::INFINITY,
            tol_t: 1e-3,
            theta_r: 0.5,
            theta_c: 1.0,
            tau_min: 1e-10,
            tau_max: t_final / 10.0,
            k_min: 2,
            k_max: 2,
            normalize: false,
            predictor_order: PredictorOrder::K,
            solver: MethodChoice::Auto,
            solver_tol: 1e-12,
            solver_max_iter: 2000,
            reuse_factors: true,
            nx,
            ny,
            out_csv: None,
            out_vtk_prefix: None,
            vtk_every: 10,
            seed: 0,
            uniform_steps: None,
            max_passes: crate::adapt_space::DEFAULT_MAX_PASSES,
        }
    }

    /// The benchmark problem with this configuration's material constants.
    pub fn problem(&self) -> ExactProblem {
        ExactProblem {
            alpha: self.alpha,
            ce: self.ce,
            ..ExactProblem::new(self.example)
        }
    }

    pub fn domain(&self) -> Rect {
        self.problem().domain
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            method: self.solver,
            tol: self.solver_tol,
            max_iter: self.solver_max_iter,
            reuse_factors: self.reuse_factors,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.alpha > 0.0) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.ce > 0.0) {
            return bad(format!("Ce must be positive, got {}", self.ce));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("T must be positive and finite, got {}", self.t_final));
        }
        if !(1..=4).contains(&self.degree) {
            return bad(format!("p must be in 1..=4, got {}", self.degree));
        }
        if !(self.tol_s > 0.0) {
            return bad(format!("tol_s must be positive, got {}", self.tol_s));
        }
        if !(self.theta_r > 0.0 && self.theta_r < 1.0) {
            return bad(format!("theta_r must lie in (0,1), got {}", self.theta_r));
        }
        if !(self.theta_c > 0.0 && self.theta_c <= 1.0) {
            return bad(format!("theta_c must lie in (0,1], got {}", self.theta_c));
        }
        if !(self.solver_tol > 0.0) {
            return bad(format!("solver_tol must be positive, got {}", self.solver_tol));
        }
        if self.nx == 0 || self.ny == 0 {
            return bad(format!("nx, ny must be positive, got {}x{}", self.nx, self.ny));
        }
        if self.vtk_every == 0 {
            return bad("vtk_every must be positive".into());
        }
        if self.uniform_steps == Some(0) {
            return bad("uniform_steps must be positive".into());
        }
        crate::adapt_time::StepController::new(self.tol_t, self.tau_min, self.tau_max, self.k_min, self.k_max)?;
        Ok(())
    }

    /// Parses `key = value` lines; `#` and `;` start comments. The
    /// `example` key is applied first and supplies defaults for the rest.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1)));
            };
            pairs.push((lineno + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let example = match pairs.iter().find(|(_, k, _)| k == "example") {
            Some((_, _, v)) => v.parse()?,
            None => ExampleId::Example1,
        };
        let mut cfg = Config::for_example(example);
        let mut tau_max_set = false;
        for (line, key, value) in &pairs {
            let ctx = |e: Error| match e {
                Error::Config(m) => Error::Config(format!("line {line}: {m}")),
                other => other,
            };
            if key == "tau_max" {
                tau_max_set = true;
            }
            cfg.set(key, value).map_err(ctx)?;
        }
        if !tau_max_set {
            cfg.tau_max = cfg.t_final / 10.0;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Sets one key; unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
        }
        fn flag(key: &str, v: &str) -> Result<bool> {
            match v.to_ascii_lowercase().as_str() {
                "1" | "true" | "yes" | "on" => Ok(true),
                "0" | "false" | "no" | "off" => Ok(false),
                _ => Err(Error::Config(format!("{key}: expected a boolean, got '{v}'"))),
            }
        }
        let path = |v: &str| (!v.is_empty()).then(|| PathBuf::from(v));
        match key {
            "example" => self.example = value.parse()?,
            "alpha" => self.alpha = num(key, value)?,
            "Ce" => self.ce = num(key, value)?,
            "T" => self.t_final = num(key, value)?,
            "p" => self.degree = num(key, value)?,
            "tol_s" => self.tol_s = num(key, value)?,
            "tol_t" => self.tol_t = num(key, value)?,
            "theta_r" => self.theta_r = num(key, value)?,
            "theta_c" => self.theta_c = num(key, value)?,
            "tau_min" => self.tau_min = num(key, value)?,
            "tau_max" => self.tau_max = num(key, value)?,
            "k_min" => self.k_min = num(key, value)?,
            "k_max" => self.k_max = num(key, value)?,
            "normalize" => self.normalize = flag(key, value)?,
            "predictor_order" => self.predictor_order = value.parse()?,
            "solver" => self.solver = value.parse()?,
            "solver_tol" => self.solver_tol = num(key, value)?,
            "solver_max_iter" => self.solver_max_iter = num(key, value)?,
            "reuse_factors" => self.reuse_factors = flag(key, value)?,
            "nx" => self.nx = num(key, value)?,
            "ny" => self.ny = num(key, value)?,
            "out_csv" => self.out_csv = path(value),
            "out_vtk_prefix" => self.out_vtk_prefix = path(value),
            "vtk_every" => self.vtk_every = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "uniform_steps" => {
                self.uniform_steps = match value {
                    "" | "none" | "off" => None,
                    v => Some(num(key, v)?),
                }
            }
            "max_passes" => self.max_passes = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}
