//! Zero-stability algebra of variable-step BDF-2 across step ratios.
//!
//! `cargo run --example stability`

use adaptive_llg::diagnostics::stability_constants;

fn main() {
    println!("{:>8} {:>10} {:>10} {:>10}", "kappa", "s2", "eta_min", "admissible");
    for kappa in [0.5, 1.0, 1.2, std::f64::consts::SQRT_2, 2.0, 1.0 + std::f64::consts::SQRT_2, 2.5] {
        let c = stability_constants(kappa);
        println!("{kappa:>8.4} {:>10.5} {:>10.5} {:>10}", c.s2, c.eta_threshold, c.admissible);
    }
}
