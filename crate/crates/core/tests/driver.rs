//! End-to-end behaviour of the adaptive loop.

use std::f64::consts::SQRT_2;

use adaptive_llg::diagnostics::{energy_report, EnergyMode, ExampleId};
use adaptive_llg::driver::{precompute, run, Config, Simulation};
use adaptive_llg::Error;

fn small_example1() -> Config {
    Config {
        t_final: 0.02,
        tau_max: 2e-3,
        nx: 6,
        ny: 6,
        ..Config::for_example(ExampleId::Example1)
    }
}

#[test]
fn accepted_step_ratios_respect_the_bounds() {
    let cfg = Config { tol_t: 1e-4, ..small_example1() };
    let trace = run(&cfg).unwrap();
    let rows = &trace.rows;
    let last = rows.len() - 1;
    for n in 2..rows.len() {
        let (prev, tau) = (rows[n - 1].tau, rows[n].tau);
        let r = tau / prev;
        let bound = tau == cfg.tau_max || tau == cfg.tau_min;
        if n != last && !bound {
            assert!((0.5 - 1e-12..=SQRT_2 + 1e-12).contains(&r), "step {n}: ratio {r}");
        }
    }
    assert_eq!(rows[last].t, cfg.t_final);
}

#[test]
fn history_lives_on_the_current_space() {
    let cfg = Config {
        tol_s: 0.5,
        theta_c: 0.5,
        t_final: 0.004,
        tau_max: 2e-4,
        nx: 4,
        ny: 4,
        ..Config::for_example(ExampleId::Example2)
    };
    let mut sim = Simulation::new(cfg).unwrap();
    let mut sizes = Vec::new();
    while !sim.done() {
        sim.step().unwrap();
        let space = sim.history().space().clone();
        for rec in sim.history().records() {
            assert_eq!(rec.m.ndofs(), space.ndofs());
            assert_eq!(rec.v.ndofs(), space.ndofs());
        }
        assert_eq!(sim.trace().last().unwrap().dofs, space.ndofs());
        sizes.push(space.ndofs());
    }
    assert!(sizes.iter().any(|&n| n != sizes[0]) || sizes[0] > 25, "mesh never adapted: {sizes:?}");
}

#[test]
fn initial_adaptation_concentrates_on_the_bump() {
    let cfg = Config {
        tol_s: 0.1,
        nx: 4,
        ny: 4,
        ..Config::for_example(ExampleId::Example2)
    };
    let (space, _) = precompute(&cfg).unwrap();
    let mesh = space.mesh();
    let (mut inside, mut outside) = (0.0, 0.0);
    for e in 0..mesh.num_elements() {
        let c = mesh.centroid(e);
        let d = (c[0] - 0.5).powi(2) + (c[1] - 0.5).powi(2);
        if d < 0.25 {
            inside += 1.0;
        } else {
            outside += 1.0;
        }
    }
    // Element densities: the disk covers pi/4 of the square.
    let area_in = std::f64::consts::PI / 4.0;
    let ratio = (inside / area_in) / (outside / (1.0 - area_in));
    assert!(ratio >= 4.0, "density ratio {ratio}");
}

#[test]
fn zero_spatial_tolerance_is_unreachable() {
    let cfg = Config {
        tol_s: 1e-300,
        max_passes: 3,
        // On a 2x2 mesh every node sits where the bump is e_z, so use 3x3.
        nx: 3,
        ny: 3,
        ..Config::for_example(ExampleId::Example2)
    };
    match precompute(&cfg) {
        Err(Error::ToleranceUnreachable { iterations, best, .. }) => {
            assert_eq!(iterations, 3);
            assert!(best > 0.0);
        }
        other => panic!("expected an unreachable tolerance, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn refined_region_follows_the_domain_wall() {
    let cfg = Config {
        tol_s: 0.2,
        tol_t: 1e-2,
        theta_c: 0.5,
        t_final: 0.2,
        ..Config::for_example(ExampleId::Example4)
    };
    let mut sim = Simulation::new(cfg).unwrap();
    let finest = |sim: &Simulation| {
        let mesh = sim.history().space().mesh().clone();
        let top = (0..mesh.num_elements()).map(|e| mesh.level(e)).max().unwrap();
        let (mut sx, mut n) = (0.0, 0.0);
        for e in (0..mesh.num_elements()).filter(|&e| mesh.level(e) == top) {
            sx += mesh.centroid(e)[0];
            n += 1.0;
        }
        sx / n
    };
    let start = finest(&sim);
    sim.run_to_end().unwrap();
    let end = finest(&sim);
    // The field pushes the wall towards larger x.
    assert!(end > start + 0.2, "finest region moved from {start} to {end}");
}

#[test]
fn zero_field_bdf1_never_increases_energy() {
    let cfg = Config {
        k_min: 1,
        k_max: 1,
        uniform_steps: Some(20),
        t_final: 0.04,
        ..Config::for_example(ExampleId::Example3)
    };
    let trace = run(&cfg).unwrap();
    let report = energy_report(&trace, cfg.alpha, cfg.ce, EnergyMode::Decay);
    assert!(report.violations.is_empty(), "{:?}", report.violations);
    assert!(trace.rows.last().unwrap().energy < trace.rows[0].energy);
}

#[test]
fn runs_write_the_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let cfg = Config {
        out_csv: Some(csv.clone()),
        ..small_example1()
    };
    let trace = run(&cfg).unwrap();
    assert_eq!(adaptive_llg::diagnostics::import_csv(&csv).unwrap(), trace);
}
