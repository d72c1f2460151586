//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. `ACCEPTANCE_ONLY=4,9` restricts the run.
//!
//! Expected values come from independent oracles in this file: closed forms,
//! exhaustive search, polynomial samples and Ridders-extrapolated finite
//! differences of the exact solutions.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use adaptive_llg::adapt_space::{mark_coarsen, mark_refine, IndicatorField};
use adaptive_llg::adapt_time::{fd2, fd3};
use adaptive_llg::diagnostics::{stability_constants, EnergyTrace, ExactProblem, ExampleId};
use adaptive_llg::driver::{loglog_slope, run, Config};
use adaptive_llg::step::BdfScheme;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Constraint residuals of every accepted step in criteria 1 to 4.
#[derive(Default)]
struct Constraint {
    worst: f64,
    steps: usize,
    runs: usize,
}

impl Constraint {
    fn add(&mut self, trace: &EnergyTrace) {
        for r in &trace.rows {
            self.worst = self.worst.max(r.constraint_residual);
        }
        self.steps += trace.rows.len();
        self.runs += 1;
    }
}

fn run_ok(cfg: &Config) -> Result<EnergyTrace, String> {
    run(cfg).map_err(|e| e.to_string())
}

fn example1_fixed_mesh() -> Config {
    Config {
        alpha: 0.2,
        ce: 1.0,
        t_final: 0.1,
        tau_max: 0.01,
        degree: 2,
        nx: 32,
        ny: 32,
        ..Config::for_example(ExampleId::Example1)
    }
}

const BDF1_TOLS: [f64; 4] = [4e-3, 8.618e-4, 1.857e-4, 4e-5];
const BDF2_TOLS: [f64; 4] = [1e-3, 2.154e-4, 4.642e-5, 1e-5];

/// Criteria 1 and 2 share the adaptive BDF-2 runs.
fn criteria_1_2(cons: &mut Constraint) -> Result<(Outcome, Outcome), String> {
    let base = example1_fixed_mesh();
    let mut slopes = Vec::new();
    let mut detail = String::new();
    let mut bdf2 = Vec::new();
    for (k, tols) in [(1, BDF1_TOLS), (2, BDF2_TOLS)] {
        let mut errs = Vec::new();
        for &tol_t in &tols {
            let trace = run_ok(&Config { k_min: k, k_max: k, tol_t, ..base.clone() })?;
            cons.add(&trace);
            errs.push(trace.err_t());
            if k == 2 {
                bdf2.push((tol_t, trace.steps(), trace.err_t()));
            }
        }
        let s = loglog_slope(&tols, &errs);
        let target = k as f64 / (k as f64 + 1.0);
        slopes.push((s, target));
        detail += &format!(
            "BDF-{k} slope {s:.3} (target {target:.3}), errT {}; ",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" ")
        );
    }
    let c1 = outcome(slopes.iter().all(|(s, t)| (s - t).abs() <= 0.15), detail);

    let mut pass = true;
    let mut detail = String::new();
    for (tol_t, n, adaptive) in bdf2 {
        let trace = run_ok(&Config {
            k_min: 2,
            k_max: 2,
            tol_t,
            uniform_steps: Some(n),
            ..base.clone()
        })?;
        let uniform = trace.err_t();
        pass &= uniform >= 0.95 * adaptive;
        detail += &format!("N={n}: uniform {uniform:.3e} vs adaptive {adaptive:.3e}; ");
    }
    Ok((c1, outcome(pass, detail)))
}

fn criterion_3() -> Result<Outcome, String> {
    let base = example1_fixed_mesh();
    let ns = [20usize, 40, 80, 160];
    let taus: Vec<f64> = ns.iter().map(|&n| base.t_final / n as f64).collect();
    let mut pass = true;
    let mut detail = String::new();
    for k in [1usize, 2] {
        let mut errs = Vec::new();
        for &n in &ns {
            let trace = run_ok(&Config {
                k_min: k,
                k_max: k,
                uniform_steps: Some(n),
                ..base.clone()
            })?;
            errs.push(trace.err_t());
        }
        let order = loglog_slope(&taus, &errs);
        pass &= (order - k as f64).abs() <= 0.2;
        detail += &format!("k={k}: order {order:.3}; ");
    }
    Ok(outcome(pass, detail))
}

fn criterion_4(cons: &mut Constraint) -> Result<Outcome, String> {
    let base = Config {
        t_final: 0.01,
        tau_max: 1e-3,
        uniform_steps: Some(20),
        nx: 4,
        ny: 4,
        ..Config::for_example(ExampleId::Example2)
    };
    let mut pass = true;
    let mut detail = String::new();
    for (p, tols) in [(1usize, [1.0, 0.5, 0.25]), (2, [0.4, 0.2, 0.1])] {
        let mut errs = Vec::new();
        for &tol_s in &tols {
            let trace = run_ok(&Config { degree: p, tol_s, ..base.clone() })?;
            cons.add(&trace);
            errs.push(trace.err_t());
        }
        let s = loglog_slope(&tols, &errs);
        pass &= (s - 1.0).abs() <= 0.25;
        detail += &format!(
            "p={p}: slope {s:.3}, errT {}; ",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" ")
        );
    }
    Ok(outcome(pass, detail))
}

fn criterion_5() -> Result<Outcome, String> {
    let cfg = Config {
        alpha: 1.0,
        degree: 1,
        nx: 8,
        ny: 8,
        k_min: 1,
        k_max: 1,
        normalize: false,
        uniform_steps: Some(50),
        ..Config::for_example(ExampleId::Example3)
    };
    let trace = run_ok(&cfg)?;
    let mut worst = f64::NEG_INFINITY;
    for w in trace.rows.windows(2) {
        worst = worst.max((w[1].energy - w[0].energy) / w[0].energy);
    }
    Ok(outcome(
        trace.steps() == 50 && worst <= 1e-6,
        format!("{} steps, largest relative energy change {worst:.3e}", trace.steps()),
    ))
}

fn criterion_6() -> Outcome {
    // Roots of the characteristic polynomial of delta_2 s^2 + delta_1 s + delta_0
    // written out by hand.
    let roots = |kappa: f64| {
        let d0 = (1.0 + 2.0 * kappa) / (1.0 + kappa);
        let d1 = -(1.0 + kappa);
        let d2 = kappa * kappa / (1.0 + kappa);
        let disc = (d1 * d1 - 4.0 * d2 * d0).sqrt();
        let (a, b) = ((-d1 + disc) / (2.0 * d2), (-d1 - disc) / (2.0 * d2));
        (a.min(b), a.max(b))
    };
    let one = stability_constants(1.0);
    let r = roots(1.0);
    let mut pass = (one.s2 - 3.0).abs() <= 1e-12 && (r.1 - 3.0).abs() <= 1e-12 && (r.0 - 1.0).abs() <= 1e-12;
    pass &= one.eta_threshold.abs() <= 1e-12;
    let s = stability_constants(SQRT_2);
    // (3k^2 - 2k - 1)/(k + 1)^2 at k = sqrt 2 rationalizes to 23 - 16 sqrt 2.
    let exact = 23.0 - 16.0 * SQRT_2;
    pass &= (s.eta_threshold - exact).abs() <= 1e-12 && s.eta_threshold <= 0.38;
    pass &= (s.s2 - roots(SQRT_2).1).abs() <= 1e-12;
    let edge = 1.0 + SQRT_2;
    pass &= stability_constants(edge * (1.0 - 1e-12)).admissible && !stability_constants(edge).admissible;
    pass &= (stability_constants(edge).s2 - 1.0).abs() <= 1e-12;
    outcome(
        pass,
        format!("s2(1) = {}, eta(sqrt 2) = {:.6} vs 23 - 16 sqrt 2 = {exact:.6}", one.s2, s.eta_threshold),
    )
}

fn criterion_7() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let u = BdfScheme::new(&[0.3, 0.3], 2).map_err(|e| e.to_string())?;
    for (d, e) in u.delta.iter().zip([1.5, -2.0, 0.5]) {
        worst = worst.max((d - e).abs());
    }
    for _ in 0..100 {
        let steps: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.25..2.0));
        for k in 1..=3 {
            let s = BdfScheme::new(&steps, k).map_err(|e| e.to_string())?;
            worst = worst.max(s.delta.iter().sum::<f64>().abs());
            // Nodes t_n = 0, t_{n-1} = -tau_n, ...
            let mut t = vec![0.0];
            for h in steps[3 - k..].iter().rev() {
                t.push(t.last().unwrap() - h);
            }
            let c: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let poly = |x: f64| (0..=k).map(|j| c[j] * x.powi(j as i32)).sum::<f64>();
            let y: Vec<f64> = t.iter().map(|&x| poly(x)).collect();
            // p'(0) = c_1
            worst = worst.max((s.derivative(&y) - c[1]).abs());
        }
        let [a, b, cc] = steps;
        let ts = [0.0, a, a + b, a + b + cc];
        let c: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let quad = |x: f64| c[0] + c[1] * x + c[2] * x * x;
        worst = worst.max((fd2([quad(ts[0]), quad(ts[1]), quad(ts[2])], a, b) - 2.0 * c[2]).abs());
        let cubic = |x: f64| quad(x) + c[3] * x * x * x;
        worst = worst.max((fd3(ts.map(cubic), a, b, cc) - 6.0 * c[3]).abs());
    }
    Ok(outcome(worst <= 1e-12, format!("max defect {worst:.2e} over 100 trials")))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..200 {
        let n = rng.gen_range(1..=12);
        // Include ties and zeros now and then.
        let eta2: Vec<f64> = (0..n)
            .map(|_| match rng.gen_range(0..6) {
                0 => 0.0,
                1 => 0.25,
                _ => rng.gen_range(0.0..1.0),
            })
            .collect();
        let theta_r = rng.gen_range(0.01..0.99);
        let theta_c = rng.gen_range(0.01..0.99);
        let total: f64 = eta2.iter().sum();
        let sum = |set: &[usize]| set.iter().map(|&i| eta2[i]).sum::<f64>();
        let (mut min_r, mut max_c) = (usize::MAX, 0usize);
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let s = sum(&set);
            if s >= (1.0 - theta_r) * total {
                min_r = min_r.min(set.len());
            }
            if s <= (1.0 - theta_c) * total {
                max_c = max_c.max(set.len());
            }
        }
        let eta = IndicatorField::from_squares(eta2.clone());
        let r = mark_refine(&eta, theta_r);
        let c = mark_coarsen(&eta, theta_c);
        let r_ok = sum(&r) >= (1.0 - theta_r) * total && r.len() == min_r.min(n);
        let c_ok = sum(&c) <= (1.0 - theta_c) * total && c.len() == max_c;
        // An all-zero array needs nothing marked for refinement.
        let r_ok = r_ok || (total == 0.0 && r.is_empty());
        if !(r_ok && c_ok) {
            return outcome(
                false,
                format!("trial {trial}: refine {} vs {min_r}, coarsen {} vs {max_c}, eta2 {eta2:?}", r.len(), c.len()),
            );
        }
    }
    outcome(true, "200 random arrays of up to 12 elements agree with exhaustive search".into())
}

/// Ridders' extrapolation of `g(h) -> g(0)` for `g` even in `h`, with its
/// error estimate.
fn ridders_from(g: &dyn Fn(f64) -> f64, h0: f64) -> (f64, f64) {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 12;
    let mut a = [[0.0; NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = g(h);
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = g(h);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    (best, err)
}

/// The tableau can stop early when `h0` is too coarse; restart from smaller
/// steps and keep the estimate with the smallest error.
fn ridders(g: &dyn Fn(f64) -> f64, h0: f64) -> f64 {
    [1.0, 1.0 / 3.0, 1.0 / 9.0]
        .iter()
        .map(|s| ridders_from(g, h0 * s))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0
}

fn criterion_9(cons: &Constraint) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    let samples = 10_000;
    for id in [ExampleId::Example1, ExampleId::Example2] {
        let p = ExactProblem::new(id);
        let m = |t: f64, x: [f64; 2]| p.exact(t, x).unwrap();
        for _ in 0..samples / 2 {
            let t = rng.gen_range(0.0..p.t_final);
            let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
            let m0 = m(t, x);
            // Example 2 varies on the scale (1/4 - d)^2 next to the rim of its
            // support, so the initial differences must shrink there.
            let layer = match id {
                ExampleId::Example2 => (0.25 - ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2))).abs().max(1e-3),
                _ => 1.0,
            };
            let (ht, hx) = (0.05 * p.t_final * layer.min(1.0), 0.02_f64.min(layer * layer));
            let mut mt = [0.0; 3];
            let mut lap = [0.0; 3];
            for c in 0..3 {
                mt[c] = ridders(&|h| (m(t + h, x)[c] - m(t - h, x)[c]) / (2.0 * h), ht);
                let dxx = ridders(&|h| (m(t, [x[0] + h, x[1]])[c] + m(t, [x[0] - h, x[1]])[c] - 2.0 * m0[c]) / (h * h), hx);
                let dyy = ridders(&|h| (m(t, [x[0], x[1] + h])[c] + m(t, [x[0], x[1] - h])[c] - 2.0 * m0[c]) / (h * h), hx);
                lap[c] = dxx + dyy;
            }
            let h = p.h_ext(t, x);
            // alpha m_t + m x m_t - (I - m m^T)(Ce lap m + H)
            let heff: [f64; 3] = std::array::from_fn(|c| p.ce * lap[c] + h[c]);
            let mh = m0[0] * heff[0] + m0[1] * heff[1] + m0[2] * heff[2];
            let cross = [
                m0[1] * mt[2] - m0[2] * mt[1],
                m0[2] * mt[0] - m0[0] * mt[2],
                m0[0] * mt[1] - m0[1] * mt[0],
            ];
            let scale = 1.0 + h.iter().chain(&heff).map(|v| v.abs()).fold(0.0, f64::max);
            for c in 0..3 {
                let r = (p.alpha * mt[c] + cross[c] - (heff[c] - mh * m0[c])).abs();
                worst = worst.max(r);
                worst_rel = worst_rel.max(r / scale);
            }
        }
    }
    let constraint = if cons.runs == 0 {
        "constraint not checked (criteria 1-4 skipped)".to_string()
    } else {
        format!("constraint {:.2e} over {} steps in {} runs", cons.worst, cons.steps, cons.runs)
    };
    outcome(
        cons.worst <= 1e-9 && worst <= 1e-8,
        format!("{constraint}; forcing residual {worst:.2e} absolute, {worst_rel:.2e} relative at {samples} samples"),
    )
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|v| v.trim().parse().ok()).collect());
    let want = |n: usize| only.as_ref().is_none_or(|o| o.contains(&n));
    let names = [
        "temporal adaptive convergence",
        "adaptive beats uniform",
        "uniform-step temporal order",
        "spatial adaptive convergence",
        "energy decay without field",
        "stability-constant algebra",
        "BDF property suite",
        "marking oracle equivalence",
        "constraint and forcing residuals",
    ];
    let mut failed = 0;
    let mut report = |n: usize, start: Instant, o: Result<Outcome, String>| {
        let o = o.unwrap_or_else(|e| outcome(false, format!("run failed: {e}")));
        failed += usize::from(!o.pass);
        println!(
            "criterion {n} [{}] {}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            names[n - 1],
            o.detail,
            start.elapsed().as_secs_f64()
        );
    };
    let mut cons = Constraint::default();
    if want(1) || want(2) {
        let s = Instant::now();
        match criteria_1_2(&mut cons) {
            Ok((a, b)) => {
                report(1, s, Ok(a));
                report(2, s, Ok(b));
            }
            Err(e) => {
                report(1, s, Err(e.clone()));
                report(2, s, Err(e));
            }
        }
    }
    type Job<'a> = &'a dyn Fn(&mut Constraint) -> Result<Outcome, String>;
    let jobs: [(usize, Job); 7] = [
        (3, &|_| criterion_3()),
        (4, &criterion_4),
        (5, &|_| criterion_5()),
        (6, &|_| Ok(criterion_6())),
        (7, &|_| criterion_7()),
        (8, &|_| Ok(criterion_8())),
        (9, &|c| Ok(criterion_9(c))),
    ];
    for (n, job) in jobs {
        if want(n) {
            let s = Instant::now();
            report(n, s, job(&mut cons));
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
