//! Built-in invariant suite on small cases, for the `check` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::Config;
use super::run;
use crate::adapt_space::{mark_coarsen, mark_refine, IndicatorField};
use crate::adapt_time::{fd2, fd3};
use crate::diagnostics::{export_csv, import_csv, stability_constants, strong_residual, ExactProblem, ExampleId};
use crate::mesh::{Mesh, Rect};
use crate::step::BdfScheme;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Runs every check; never fails early.
pub fn check(seed: u64) -> Vec<CheckItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut item = |name, (passed, detail): (bool, String)| out.push(CheckItem { name, passed, detail });
    item("mesh conformity under random refine/coarsen", mesh_check(&mut rng));
    item("BDF coefficients and finite differences", bdf_check(&mut rng));
    item("marking minimality/maximality", marking_check(&mut rng));
    item("stability constants", stability_check());
    item("manufactured forcing residual", forcing_check(&mut rng));
    item("short run: constraint, final time, CSV round trip", run_check());
    out
}

fn mesh_check(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut mesh = Mesh::rectangle(Rect::unit_square(), 2, 2).unwrap();
    let mut worst = 0;
    for _ in 0..20 {
        let n = mesh.num_elements();
        let marked: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
        mesh = if rng.gen_bool(0.6) {
            mesh.bisect(&marked, 1 + rng.gen_range(0..2))
        } else {
            mesh.coarsen(&marked)
        };
        worst = worst.max(mesh.hanging_nodes());
    }
    let area: f64 = (0..mesh.num_elements()).map(|e| mesh.area(e)).sum();
    let ok = worst == 0 && (area - 1.0).abs() < 1e-12;
    (ok, format!("{} elements, {worst} hanging nodes, area {area}", mesh.num_elements()))
}

fn bdf_check(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let steps: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..1.5) * 0.1).collect();
        for k in 1..=3 {
            let s = BdfScheme::new(&steps[3 - k..], k).unwrap();
            worst = worst.max(s.delta.iter().sum::<f64>().abs());
            let mut t = vec![1.0];
            for h in steps[3 - k..].iter().rev() {
                t.push(t.last().unwrap() - h);
            }
            for deg in 0..=k {
                let y: Vec<f64> = t.iter().map(|x| x.powi(deg as i32)).collect();
                let exact = deg as f64;
                worst = worst.max((s.derivative(&y) - exact).abs());
            }
        }
        let (a, b, c) = (steps[0], steps[1], steps[2]);
        let ts = [0.0, a, a + b, a + b + c];
        let cube = |x: f64| x * x * x - x;
        worst = worst.max((fd3(ts.map(cube), a, b, c) - 6.0).abs() * 1e-3);
        let sq = |x: f64| 2.0 * x * x + x;
        worst = worst.max((fd2([sq(ts[0]), sq(ts[1]), sq(ts[2])], a, b) - 4.0).abs() * 1e-2);
    }
    (worst < 1e-10, format!("max defect {worst:e}"))
}

fn marking_check(rng: &mut ChaCha8Rng) -> (bool, String) {
    for trial in 0..100 {
        let n = rng.gen_range(1..=10);
        let eta2: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = eta2.iter().sum();
        let theta = rng.gen_range(0.05..0.95);
        let eta = IndicatorField::from_squares(eta2.clone());
        let sq = eta.squares();
        let sum = |set: &[usize]| set.iter().map(|&i| sq[i]).sum::<f64>();
        let r = mark_refine(&eta, theta);
        let c = mark_coarsen(&eta, theta);
        let mut min_r = usize::MAX;
        let mut max_c = 0;
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let s = sum(&set);
            if s >= (1.0 - theta) * total {
                min_r = min_r.min(set.len());
            }
            if s <= (1.0 - theta) * total {
                max_c = max_c.max(set.len());
            }
        }
        if r.len() != min_r || c.len() != max_c {
            return (false, format!("trial {trial}: {} vs {min_r}, {} vs {max_c}", r.len(), c.len()));
        }
    }
    (true, "100 random arrays agree with exhaustive search".into())
}

fn stability_check() -> (bool, String) {
    let sqrt2 = std::f64::consts::SQRT_2;
    let a = stability_constants(1.0);
    let b = stability_constants(sqrt2);
    let c = stability_constants(1.0 + sqrt2);
    let ok = a.s2 == 3.0 && a.eta_threshold == 0.0 && b.eta_threshold <= 0.38 && !c.admissible && (c.s2 - 1.0).abs() < 1e-12;
    (ok, format!("eta({sqrt2:.4}) = {:.4}", b.eta_threshold))
}

/// Central differences with one Richardson extrapolation.
fn forcing_check(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst: f64 = 0.0;
    for id in [ExampleId::Example1, ExampleId::Example2] {
        let p = ExactProblem::new(id);
        let m = |t: f64, x: [f64; 2]| p.exact(t, x).unwrap();
        for _ in 0..200 {
            let t = rng.gen_range(0.0..p.t_final);
            let x = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)];
            let (ht, hx) = (1e-4 * p.t_final, 1e-3);
            let d1 = |h: f64| -> [f64; 3] {
                let (a, b) = (m(t + h, x), m(t - h, x));
                std::array::from_fn(|c| (a[c] - b[c]) / (2.0 * h))
            };
            let lap = |h: f64| -> [f64; 3] {
                let c0 = m(t, x);
                let s = [
                    m(t, [x[0] + h, x[1]]),
                    m(t, [x[0] - h, x[1]]),
                    m(t, [x[0], x[1] + h]),
                    m(t, [x[0], x[1] - h]),
                ];
                std::array::from_fn(|c| (s.iter().map(|v| v[c]).sum::<f64>() - 4.0 * c0[c]) / (h * h))
            };
            let rich = |f: &dyn Fn(f64) -> [f64; 3], h: f64| -> [f64; 3] {
                let (a, b) = (f(h), f(0.5 * h));
                std::array::from_fn(|c| (4.0 * b[c] - a[c]) / 3.0)
            };
            let mt = rich(&d1, ht);
            let lp = rich(&lap, hx);
            let r = strong_residual(m(t, x), mt, lp, p.h_ext(t, x), p.alpha, p.ce);
            let scale = 1.0 + p.h_ext(t, x).iter().map(|v| v.abs()).fold(0.0, f64::max);
            worst = worst.max(r.iter().map(|v| v.abs()).fold(0.0, f64::max) / scale);
        }
    }
    (worst < 1e-5, format!("max relative residual {worst:e}"))
}

fn run_check() -> (bool, String) {
    let cfg = Config {
        nx: 4,
        ny: 4,
        t_final: 0.01,
        tau_max: 2e-3,
        ..Config::for_example(ExampleId::Example1)
    };
    let trace = match run(&cfg) {
        Ok(t) => t,
        Err(e) => return (false, e.to_string()),
    };
    let worst = trace.rows.iter().map(|r| r.constraint_residual).fold(0.0, f64::max);
    let t_end = trace.last().map_or(f64::NAN, |r| r.t);
    let path = std::env::temp_dir().join(format!("llg-adapt-check-{}.csv", std::process::id()));
    let round_trip = export_csv(&trace, &path).and_then(|_| import_csv(&path));
    let _ = std::fs::remove_file(&path);
    let same = round_trip.is_ok_and(|t| t == trace);
    let ok = worst <= 1e-9 && t_end == cfg.t_final && same;
    (
        ok,
        format!("{} steps, constraint {worst:e}, t_N = {t_end}, csv round trip {same}", trace.steps()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for item in check(1) {
            assert!(item.passed, "{}: {}", item.name, item.detail);
        }
    }
}
