//! Step-size and order selection from local truncation error estimates.

use crate::error::{Error, Result};
use crate::fem::Field;
use crate::step::TimeHistory;

/// Coefficients of the three-point second difference at `t_2`, for samples
/// `y_0, y_1, y_2` separated by `tau1`, `tau2`.
pub fn fd2_coeffs(tau1: f64, tau2: f64) -> [f64; 3] {
    let t12 = tau1 + tau2;
    [2.0 / (tau1 * t12), -2.0 / (tau1 * tau2), 2.0 / (t12 * tau2)]
}

/// Coefficients of the four-point third difference at `t_3`.
pub fn fd3_coeffs(tau1: f64, tau2: f64, tau3: f64) -> [f64; 4] {
    let t12 = tau1 + tau2;
    let t23 = tau2 + tau3;
    let t123 = t12 + tau3;
    [
        -6.0 / (tau1 * t12 * t123),
        6.0 / (tau1 * tau2 * t23),
        -6.0 / (t12 * tau2 * tau3),
        6.0 / (t123 * t23 * tau3),
    ]
}

/// Second difference of scalar samples, oldest first.
pub fn fd2(y: [f64; 3], tau1: f64, tau2: f64) -> f64 {
    fd2_coeffs(tau1, tau2).iter().zip(y).map(|(c, v)| c * v).sum()
}

/// Third difference of scalar samples, oldest first.
pub fn fd3(y: [f64; 4], tau1: f64, tau2: f64, tau3: f64) -> f64 {
    fd3_coeffs(tau1, tau2, tau3).iter().zip(y).map(|(c, v)| c * v).sum()
}

/// Second difference of fields, oldest first.
pub fn fd2_field(y: [&Field; 3], tau1: f64, tau2: f64) -> Field {
    Field::combination(&fd2_coeffs(tau1, tau2), &y)
}

/// Third difference of fields, oldest first.
pub fn fd3_field(y: [&Field; 4], tau1: f64, tau2: f64, tau3: f64) -> Field {
    Field::combination(&fd3_coeffs(tau1, tau2, tau3), &y)
}

/// Step proposal for order `k` from the norm of `y^{(k+1)}`.
///
/// `recent_steps` lists completed steps oldest first; BDF-2 uses the sum of
/// the last two, BDF-3 additionally the sum of the last three. A vanishing
/// derivative gives `+inf`, which the clamp turns into `tau_max`.
pub fn propose_tau(k: usize, tol: f64, deriv_norm: f64, recent_steps: &[f64]) -> f64 {
    if deriv_norm <= 0.0 {
        return f64::INFINITY;
    }
    let tail = |n: usize| recent_steps[recent_steps.len().saturating_sub(n)..].iter().sum::<f64>();
    match k {
        1 => (2.0 * tol / deriv_norm).sqrt(),
        2 => (6.0 * tol / (tail(2) * deriv_norm)).sqrt(),
        3 => (24.0 * tol / (tail(2) * tail(3) * deriv_norm)).sqrt(),
        _ => panic!("no step proposal for order {k}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepController {
    pub tol_t: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub growth: f64,
    pub shrink: f64,
    pub current_k: usize,
}

impl StepController {
    pub fn new(tol_t: f64, tau_min: f64, tau_max: f64, k_min: usize, k_max: usize) -> Result<Self> {
        if !(tol_t > 0.0) {
            return Err(Error::Config(format!("tol_t must be positive, got {tol_t}")));
        }
        if !(tau_min > 0.0 && tau_min <= tau_max) {
            return Err(Error::Config(format!("need 0 < tau_min <= tau_max, got {tau_min}, {tau_max}")));
        }
        if !(1 <= k_min && k_min <= k_max && k_max <= 3) {
            return Err(Error::Config(format!("need 1 <= k_min <= k_max <= 3, got {k_min}, {k_max}")));
        }
        Ok(StepController {
            tol_t,
            tau_min,
            tau_max,
            k_min,
            k_max,
            growth: std::f64::consts::SQRT_2,
            shrink: 0.5,
            current_k: k_min,
        })
    }

    /// `max{tau_min, tau_prev/2, min{tau*, sqrt(2) tau_prev, tau_max}}`.
    pub fn clamp(&self, tau_prev: f64, tau_star: f64) -> f64 {
        clamp_tau(tau_prev, tau_star, self)
    }

    /// The largest admissible proposal and the order giving it. Orders
    /// without a derivative estimate are skipped; ties go to the lower order.
    pub fn best_proposal(&self, est: &DerivativeEstimates, recent_steps: &[f64]) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for k in self.k_min..=self.k_max {
            if let Some(d) = est.for_order(k) {
                let tau = propose_tau(k, self.tol_t, d, recent_steps);
                if best.is_none_or(|b| tau > b.0) {
                    best = Some((tau, k));
                }
            }
        }
        best
    }
}

pub fn clamp_tau(tau_prev: f64, tau_star: f64, ctrl: &StepController) -> f64 {
    let upper = tau_star.min(ctrl.growth * tau_prev).min(ctrl.tau_max);
    ctrl.tau_min.max(ctrl.shrink * tau_prev).max(upper)
}

/// `max{k_min, k_n - 1, min{k*, k_n + 1, k_max}}`.
pub fn select_order(k_n: usize, k_star: usize, ctrl: &StepController) -> usize {
    ctrl.k_min.max(k_n.saturating_sub(1)).max(k_star.min(k_n + 1).min(ctrl.k_max))
}

/// `L^2` norms of time-derivative estimates; `None` where the history is too
/// short.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DerivativeEstimates {
    pub d2: Option<f64>,
    pub d3: Option<f64>,
    pub d4: Option<f64>,
}

impl DerivativeEstimates {
    /// Estimate of `|y^{(k+1)}|`, the quantity the order-`k` proposal needs.
    pub fn for_order(&self, k: usize) -> Option<f64> {
        match k {
            1 => self.d2,
            2 => self.d3,
            3 => self.d4,
            _ => None,
        }
    }

    /// `d2` from the second difference of `m`, `d3` from the second
    /// difference of `v`, `d4` from the third difference of `v`.
    pub fn from_history(h: &TimeHistory) -> Self {
        let l2 = |f: &Field| crate::fem::assembly::l2_norm(f);
        let n = h.len();
        let mut est = DerivativeEstimates::default();
        if n >= 3 {
            let (r0, r1, r2) = (h.back(2), h.back(1), h.back(0));
            est.d2 = Some(l2(&fd2_field([&r0.m, &r1.m, &r2.m], r1.tau, r2.tau)));
            est.d3 = Some(l2(&fd2_field([&r0.v, &r1.v, &r2.v], r1.tau, r2.tau)));
        }
        if n >= 4 {
            let (r0, r1, r2, r3) = (h.back(3), h.back(2), h.back(1), h.back(0));
            est.d4 = Some(l2(&fd3_field([&r0.v, &r1.v, &r2.v, &r3.v], r1.tau, r2.tau, r3.tau)));
        }
        est
    }
}
