//! Energy bookkeeping and the zero-stability algebra of variable-step BDF-2.

use std::f64::consts::SQRT_2;

/// Quantities of the variable-step BDF-2 energy argument for step ratio
/// `kappa = tau_n / tau_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    /// Second root `(1 + 2 kappa) / kappa^2` of the characteristic polynomial.
    pub s2: f64,
    /// Smallest admissible multiplier parameter.
    pub eta_threshold: f64,
    /// `kappa < 1 + sqrt(2)`, i.e. `s2 > 1`.
    pub admissible: bool,
}

pub fn stability_constants(kappa: f64) -> StabilityConstants {
    assert!(kappa > 0.0, "step ratio must be positive");
    let k2 = kappa * kappa;
    StabilityConstants {
        s2: (1.0 + 2.0 * kappa) / k2,
        eta_threshold: ((3.0 * k2 - 2.0 * kappa - 1.0) / (k2 + 2.0 * kappa + 1.0)).max(0.0),
        admissible: kappa < 1.0 + SQRT_2,
    }
}

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub tau: f64,
    pub k: usize,
    pub dofs: usize,
    /// `C_e |grad m^n|^2`.
    pub energy: f64,
    /// `tau_n |v^n|^2`.
    pub dissipation: f64,
    /// Running maximum of the gradient error; NaN without exact solution.
    pub err_t: f64,
    pub iterations: usize,
    /// `tau_n |H_ext(t_n)|^2`.
    pub field: f64,
    pub solver_residual: f64,
    pub constraint_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyTrace {
    pub rows: Vec<TraceRow>,
}

impl EnergyTrace {
    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Final running error.
    pub fn err_t(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.err_t)
    }

    /// Number of time steps (rows after the initial one).
    pub fn steps(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn max_dofs(&self) -> usize {
        self.rows.iter().map(|r| r.dofs).max().unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().all(|r| {
            r.t.is_finite() && r.tau.is_finite() && r.energy.is_finite() && r.dissipation.is_finite() && r.field.is_finite()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMode {
    /// Flags every increase of the exchange energy (zero-field runs).
    Decay,
    /// Tracks the ratio of both sides of the discrete energy inequality with
    /// unit constants.
    Bound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// Row indices whose energy exceeds the previous one by more than the
    /// relative tolerance.
    pub violations: Vec<usize>,
    /// Left side over right side of the energy inequality, per row.
    pub ratios: Vec<f64>,
}

/// Relative increase tolerated by the decay check.
pub const DECAY_TOL: f64 = 1e-6;

pub fn energy_report(trace: &EnergyTrace, alpha: f64, ce: f64, mode: EnergyMode) -> EnergyReport {
    let rows = &trace.rows;
    let mut violations = Vec::new();
    let mut ratios = Vec::new();
    match mode {
        EnergyMode::Decay => {
            for n in 1..rows.len() {
                let (a, b) = (rows[n - 1].energy, rows[n].energy);
                if b > a + DECAY_TOL * a.abs().max(f64::MIN_POSITIVE) {
                    violations.push(n);
                }
            }
        }
        EnergyMode::Bound => {
            let Some(first) = rows.first() else {
                return EnergyReport { violations, ratios };
            };
            let initial = first.energy / ce;
            let mut dissipated = 0.0;
            let mut forced = 0.0;
            for r in rows.iter().skip(1) {
                dissipated += r.dissipation;
                forced += r.field;
                let lhs = r.energy / ce + 0.5 * alpha * dissipated;
                let rhs = initial + forced / (2.0 * alpha);
                ratios.push(if rhs > 0.0 { lhs / rhs } else { f64::NAN });
            }
        }
    }
    EnergyReport { violations, ratios }
}
