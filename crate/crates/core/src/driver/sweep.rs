//! Tolerance sweeps and convergence tables.

use std::fmt;
use std::str::FromStr;

use super::config::Config;
use super::run;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepParam {
    #[default]
    TolT,
    TolS,
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tol_t" => Ok(SweepParam::TolT),
            "tol_s" => Ok(SweepParam::TolS),
            other => Err(Error::Config(format!("sweep parameter must be tol_t or tol_s, got '{other}'"))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::TolT => "tol_t",
            SweepParam::TolS => "tol_s",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tol: f64,
    pub steps: usize,
    pub max_dofs: usize,
    pub err_t: f64,
    /// Slope against the previous row.
    pub local_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log err_T` against `log tol` over all rows.
    pub slope: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Runs `base` once per tolerance, in parallel, without file output.
pub fn sweep(base: &Config, param: SweepParam, tols: &[f64]) -> Result<SweepTable> {
    if tols.len() < 2 {
        return Err(Error::Config("a sweep needs at least two tolerances".into()));
    }
    let configs: Vec<Config> = tols
        .iter()
        .map(|&tol| {
            let mut c = base.clone();
            match param {
                SweepParam::TolT => c.tol_t = tol,
                SweepParam::TolS => c.tol_s = tol,
            }
            c.out_csv = None;
            c.out_vtk_prefix = None;
            c.validate().map(|_| c)
        })
        .collect::<Result<_>>()?;
    let traces = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect::<Vec<_>>()
    });
    let mut rows: Vec<SweepRow> = Vec::with_capacity(tols.len());
    for (&tol, trace) in tols.iter().zip(traces) {
        let trace = trace?;
        let err_t = trace.err_t();
        let local_slope = rows.last().map(|p| (err_t / p.err_t).ln() / (tol / p.tol).ln());
        rows.push(SweepRow {
            tol,
            steps: trace.steps(),
            max_dofs: trace.max_dofs(),
            err_t,
            local_slope,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.tol).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.err_t).collect();
    Ok(SweepTable {
        param,
        slope: loglog_slope(&x, &y),
        rows,
    })
}

impl fmt::Display for SweepTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>12} {:>8} {:>10} {:>14} {:>8} {:>8}",
            self.param.to_string(),
            "steps",
            "max_dofs",
            "errT",
            "local",
            "fitted"
        )?;
        for r in &self.rows {
            let local = r.local_slope.map_or("-".to_string(), |s| format!("{s:.3}"));
            writeln!(
                f,
                "{:>12.4e} {:>8} {:>10} {:>14.6e} {:>8} {:>8.3}",
                r.tol, r.steps, r.max_dofs, r.err_t, local, self.slope
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let x = [1e-1, 1e-2, 1e-3];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.75)).collect();
        assert!((loglog_slope(&x, &y) - 0.75).abs() < 1e-12);
    }
}
