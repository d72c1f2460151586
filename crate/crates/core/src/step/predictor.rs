use super::bdf::lagrange_weights;
use super::history::TimeHistory;
use crate::error::{Error, Result};
use crate::fem::Field;

/// Smallest extrapolated nodal length that is still normalized.
pub const DEGENERATE_LENGTH: f64 = 1e-12;

/// Extrapolates the newest `order + 1` magnetizations to `t_next` and
/// normalizes every nodal vector.
pub fn predictor(history: &TimeHistory, t_next: f64, order: usize) -> Result<Field> {
    if history.len() < order + 1 {
        return Err(Error::StepFailure(format!(
            "predictor of order {order} needs {} records, history has {}",
            order + 1,
            history.len()
        )));
    }
    let recs: Vec<_> = (0..=order).map(|j| history.back(j)).collect();
    let times: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let w = lagrange_weights(&times, t_next);
    let fields: Vec<&Field> = recs.iter().map(|r| &r.m).collect();
    let mut q = Field::combination(&w, &fields);
    for i in 0..q.ndofs() {
        let v = q.nodal(i);
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm >= DEGENERATE_LENGTH) {
            return Err(Error::DegeneratePredictor { dof: i, norm });
        }
        q.set_nodal(i, [v[0] / norm, v[1] / norm, v[2] / norm]);
    }
    Ok(q)
}
