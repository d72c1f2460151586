//! Variable-step BDF coefficients from polynomial collocation.

use crate::error::{Error, Result};

/// Coefficients of one BDF step of order `k`:
///
/// `tau_n v^n = sum_j delta_j m^{n-j}` and, equivalently,
/// `xi m^n = sum_{j>=1} w_j m^{n-j} + tau_n v^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BdfScheme {
    pub k: usize,
    pub xi: f64,
    /// `w_1..w_k`, newest history entry first.
    pub weights: Vec<f64>,
    /// `delta_0..delta_k`.
    pub delta: Vec<f64>,
    /// The step sizes used, oldest first; the last one is `tau_n`.
    pub steps: Vec<f64>,
}

impl BdfScheme {
    /// `steps` lists recent step sizes oldest first and ends with the step
    /// being taken; only the last `k` are used.
    pub fn new(steps: &[f64], k: usize) -> Result<Self> {
        if !(1..=3).contains(&k) {
            return Err(Error::StepFailure(format!("unsupported BDF order {k}")));
        }
        if steps.len() < k {
            return Err(Error::StepFailure(format!("BDF-{k} needs {k} step sizes, got {}", steps.len())));
        }
        let steps = steps[steps.len() - k..].to_vec();
        if let Some(&bad) = steps.iter().find(|&&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidStep(bad));
        }
        let delta = match k {
            1 => vec![1.0, -1.0],
            2 => {
                let kappa = steps[1] / steps[0];
                vec![(1.0 + 2.0 * kappa) / (1.0 + kappa), -(1.0 + kappa), kappa * kappa / (1.0 + kappa)]
            }
            _ => collocation_delta(&steps),
        };
        Ok(BdfScheme {
            k,
            xi: delta[0],
            weights: delta[1..].iter().map(|d| -d).collect(),
            delta,
            steps,
        })
    }

    pub fn tau(&self) -> f64 {
        *self.steps.last().unwrap()
    }

    /// Exchange coefficient `beta_k = C_e / xi_k` of the modified system.
    pub fn beta(&self, ce: f64) -> f64 {
        ce / self.xi
    }

    /// Collocation derivative `sum_j delta_j y^{n-j} / tau_n` of scalar
    /// samples given newest first.
    pub fn derivative(&self, newest_first: &[f64]) -> f64 {
        self.delta.iter().zip(newest_first).map(|(d, y)| d * y).sum::<f64>() / self.tau()
    }
}

/// `delta_j = tau_n l_j'(t_n)` for the Lagrange basis through
/// `t_n, t_{n-1}, ..., t_{n-k}`; works for any order.
pub fn collocation_delta(steps: &[f64]) -> Vec<f64> {
    let k = steps.len();
    let tau = steps[k - 1];
    // Nodes relative to t_n, scaled by tau_n.
    let mut s = vec![0.0; k + 1];
    for j in 1..=k {
        s[j] = s[j - 1] - steps[k - j] / tau;
    }
    let mut delta = vec![0.0; k + 1];
    delta[0] = (1..=k).map(|m| 1.0 / (s[0] - s[m])).sum();
    for j in 1..=k {
        let mut num = 1.0;
        let mut den = 1.0;
        for m in 0..=k {
            if m != j {
                den *= s[j] - s[m];
                if m != 0 {
                    num *= s[0] - s[m];
                }
            }
        }
        delta[j] = num / den;
    }
    delta
}

/// Lagrange weights `l_j(t)` for nodes `times`, used for extrapolation.
pub fn lagrange_weights(times: &[f64], t: f64) -> Vec<f64> {
    (0..times.len())
        .map(|j| {
            times
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .map(|(_, &tm)| (t - tm) / (times[j] - tm))
                .product()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_bdf2_is_classical() {
        let s = BdfScheme::new(&[0.1, 0.1], 2).unwrap();
        let expect = [1.5, -2.0, 0.5];
        for (d, e) in s.delta.iter().zip(expect) {
            assert!((d - e).abs() < 1e-15);
        }
        assert!((s.xi - 1.5).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_collocation() {
        let steps = [0.3, 0.7];
        let s = BdfScheme::new(&steps, 2).unwrap();
        let c = collocation_delta(&steps);
        for (a, b) in s.delta.iter().zip(&c) {
            assert!((a - b).abs() < 1e-13);
        }
        let (t1, t2) = (steps[0], steps[1]);
        let t12 = t1 + t2;
        assert!((s.xi - (t1 + 2.0 * t2) / t12).abs() < 1e-14);
        assert!((s.weights[0] - t12 / t1).abs() < 1e-14);
        assert!((s.weights[1] + t2 * t2 / (t1 * t12)).abs() < 1e-14);
    }

    #[test]
    fn implicit_euler() {
        let s = BdfScheme::new(&[0.25], 1).unwrap();
        assert_eq!(s.delta, vec![1.0, -1.0]);
        assert_eq!(s.weights, vec![1.0]);
        assert_eq!(s.xi, 1.0);
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(matches!(BdfScheme::new(&[0.1, 0.0], 2), Err(Error::InvalidStep(_))));
        assert!(matches!(BdfScheme::new(&[-1.0], 1), Err(Error::InvalidStep(_))));
        assert!(BdfScheme::new(&[0.1], 2).is_err());
    }

    #[test]
    fn extrapolation_weights() {
        let w = lagrange_weights(&[0.0, 1.0], 2.0);
        assert_eq!(w, vec![-1.0, 2.0]);
    }
}
