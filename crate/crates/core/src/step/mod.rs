//! The tangent-plane BDF time step.

pub mod bdf;
pub mod history;
pub mod predictor;
pub mod system;

pub use bdf::{collocation_delta, lagrange_weights, BdfScheme};
pub use history::{Record, TimeHistory};
pub use predictor::predictor;
pub use system::{assemble_step_system, history_combination, record, FieldFn, StepParams, StepResult, Stepper};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fem::{interpolate, FeSpace, Field};
    use crate::linsolve::SolverConfig;
    use crate::mesh::{Mesh, Rect};

    fn space(nx: usize, p: usize) -> Arc<FeSpace> {
        FeSpace::new(Arc::new(Mesh::rectangle(Rect::unit_square(), nx, nx).unwrap()), p)
    }

    fn stepper(normalize: bool) -> Stepper {
        Stepper::new(
            StepParams {
                alpha: 1.0,
                ce: 1.0,
                normalize,
            },
            SolverConfig::default(),
        )
    }

    #[test]
    fn stationary_state_stays_put() {
        let s = space(2, 2);
        let m0 = Field::constant(&s, &[0.0, 0.0, 1.0]);
        let hist = TimeHistory::new(
            4,
            Record {
                t: 0.0,
                tau: 0.0,
                m: m0.clone(),
                v: Field::zeros(&s, 3),
            },
        );
        let scheme = BdfScheme::new(&[0.1], 1).unwrap();
        let mhat = predictor(&hist, 0.1, 0).unwrap();
        let r = stepper(false).do_step(&hist, &scheme, &mhat, None).unwrap();
        assert!(r.v.values().iter().all(|v| v.abs() < 1e-13));
        assert!(r.lambda.values().iter().all(|v| v.abs() < 1e-13));
        for (a, b) in r.m.values().iter().zip(m0.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn predictor_extrapolates_and_normalizes() {
        let s = space(1, 1);
        let rec = |t: f64, v: [f64; 3]| Record {
            t,
            tau: 1.0,
            m: Field::constant(&s, &v),
            v: Field::zeros(&s, 3),
        };
        let mut h = TimeHistory::new(4, rec(0.0, [1.0, 0.0, 0.0]));
        h.push(rec(1.0, [0.0, 1.0, 0.0])).unwrap();
        let q = predictor(&h, 2.0, 1).unwrap();
        let r5 = 5f64.sqrt();
        let n = q.nodal(0);
        assert!((n[0] + 1.0 / r5).abs() < 1e-15 && (n[1] - 2.0 / r5).abs() < 1e-15);
        let q0 = predictor(&h, 2.0, 0).unwrap();
        assert_eq!(q0.nodal(2), [0.0, 1.0, 0.0]);
        let mut h2 = TimeHistory::new(4, rec(0.0, [1.0, 0.0, 0.0]));
        h2.push(rec(1.0, [-1.0, 0.0, 0.0])).unwrap();
        assert!(matches!(predictor(&h2, 0.5, 1), Err(crate::Error::DegeneratePredictor { .. })));
    }

    #[test]
    fn constraint_is_satisfied() {
        let s = space(3, 2);
        let m0 = interpolate(&s, |x| {
            let a = 0.4 * x[0] - 0.2 * x[1];
            [a.sin(), 0.0, a.cos()]
        });
        let hist = TimeHistory::new(
            4,
            Record {
                t: 0.0,
                tau: 0.0,
                m: m0,
                v: Field::zeros(&s, 3),
            },
        );
        let scheme = BdfScheme::new(&[0.01], 1).unwrap();
        let mhat = predictor(&hist, 0.01, 0).unwrap();
        let h = |_x: [f64; 2]| [1.0, 0.5, 0.0];
        let r = stepper(true).do_step(&hist, &scheme, &mhat, Some(&h)).unwrap();
        assert!(r.constraint_residual < 1e-12);
        assert!(r.solve.residual < 1e-10);
        assert!(r.m.max_length_defect() < 1e-14);
    }

    #[test]
    fn small_tau_limit_is_continuous() {
        let s = space(2, 1);
        let m0 = interpolate(&s, |x| {
            let a = x[0] + x[1];
            [a.sin(), 0.0, a.cos()]
        });
        let hist = TimeHistory::new(
            4,
            Record {
                t: 0.0,
                tau: 0.0,
                m: m0.clone(),
                v: Field::zeros(&s, 3),
            },
        );
        let scheme = BdfScheme::new(&[1.0], 1).unwrap();
        let mhat = predictor(&hist, 1.0, 0).unwrap();
        let a = assemble_step_system(&scheme, &hist, &mhat, 1e-14, None, 0.5, 1.0).unwrap();
        let b = assemble_step_system(&scheme, &hist, &mhat, 0.0, None, 0.5, 1.0).unwrap();
        let diff = a
            .matrix()
            .values()
            .iter()
            .zip(b.matrix().values())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-12);
    }
}
