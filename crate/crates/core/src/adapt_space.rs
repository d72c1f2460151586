//! Recovery-based indicators, marking and the refine/coarsen loop.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::quadrature::TriangleQuadrature;
use crate::fem::recovery::{element_gradient_at, recover_component};
use crate::fem::{FeSpace, Field};
use crate::mesh::Mesh;
use crate::step::TimeHistory;

/// Bisections applied to each marked element per refinement pass.
pub const GENERATIONS: u32 = 2;
pub const DEFAULT_MAX_PASSES: usize = 30;

/// Per-element indicators `eta_K` on the active elements of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField {
    pub eta: Vec<f64>,
}

impl IndicatorField {
    pub fn from_squares(eta2: Vec<f64>) -> Self {
        IndicatorField {
            eta: eta2.into_iter().map(|e| e.max(0.0).sqrt()).collect(),
        }
    }

    pub fn squares(&self) -> Vec<f64> {
        self.eta.iter().map(|e| e * e).collect()
    }

    /// `(sum eta_K^2)^{1/2}`.
    pub fn total(&self) -> f64 {
        self.eta.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }
}

/// `eta_K^2 = sum_c |grad m_c - G m_c|^2_{L^2(K)}` with `G` the recovered
/// gradient.
pub fn indicators(m: &Field) -> Result<IndicatorField> {
    let space = m.space();
    let quad = TriangleQuadrature::of_degree(2 * space.degree());
    let tab = space.basis().tabulate(&quad);
    let nloc = space.dofs_per_element();
    let n = space.ndofs();
    let mut eta2 = vec![0.0; space.num_elements()];
    let mut phi_g = vec![[0.0; 2]; quad.len()];
    for c in 0..m.ncomp() {
        let u = m.comp(c);
        let g = recover_component(space, u)?;
        for (e, acc) in eta2.iter_mut().enumerate() {
            let geo = space.geometry(e);
            let dofs = space.elem_dofs(e);
            let grad = element_gradient_at(space, e, u, &tab, &quad);
            for (q, pg) in phi_g.iter_mut().enumerate() {
                let phi = tab.values(q);
                let mut r = [0.0; 2];
                for k in 0..nloc {
                    r[0] += g[dofs[k]] * phi[k];
                    r[1] += g[n + dofs[k]] * phi[k];
                }
                *pg = r;
            }
            let mut s = 0.0;
            for (q, w) in quad.weights.iter().enumerate() {
                let dx = grad[q][0] - phi_g[q][0];
                let dy = grad[q][1] - phi_g[q][1];
                s += w * (dx * dx + dy * dy);
            }
            *acc += s * geo.det;
        }
    }
    Ok(IndicatorField::from_squares(eta2))
}

/// Indices sorted by `eta^2`, descending (or ascending), ties by index.
fn order(eta2: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..eta2.len()).collect();
    idx.sort_by(|&a, &b| {
        let o = eta2[a].total_cmp(&eta2[b]);
        let o = if descending { o.reverse() } else { o };
        o.then(a.cmp(&b))
    });
    idx
}

/// Minimal set with `sum eta_K^2 >= (1 - theta_r) sum eta^2`: the shortest
/// prefix of the descending order.
pub fn mark_refine(eta: &IndicatorField, theta_r: f64) -> Vec<usize> {
    let eta2 = eta.squares();
    let total: f64 = eta2.iter().sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let target = (1.0 - theta_r) * total;
    let mut acc = 0.0;
    let mut out = Vec::new();
    for i in order(&eta2, true) {
        if acc >= target && !out.is_empty() {
            break;
        }
        acc += eta2[i];
        out.push(i);
    }
    out
}

/// Maximal set with `sum eta_K^2 <= (1 - theta_c) sum eta^2`: the longest
/// prefix of the ascending order.
pub fn mark_coarsen(eta: &IndicatorField, theta_c: f64) -> Vec<usize> {
    let eta2 = eta.squares();
    let total: f64 = eta2.iter().sum();
    let budget = (1.0 - theta_c) * total;
    let mut acc = 0.0;
    let mut out = Vec::new();
    for i in order(&eta2, false) {
        if acc + eta2[i] > budget {
            break;
        }
        acc += eta2[i];
        out.push(i);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptParams {
    pub tol_s: f64,
    pub theta_r: f64,
    pub theta_c: f64,
    pub max_passes: usize,
}

/// What one call of [`adapt_mesh`] did.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptReport {
    pub refinement_passes: usize,
    pub total_before: f64,
    pub total_after_refine: f64,
    pub coarsened: usize,
    pub elements: usize,
}

/// Refines until the total indicator of the newest magnetization is at most
/// `tol_s`, then runs one coarsening pass; the whole history is transferred
/// to the final space.
pub fn adapt_mesh(history: &mut TimeHistory, p: &AdaptParams) -> Result<AdaptReport> {
    let mut eta = indicators(&history.newest().m)?;
    let total_before = eta.total();
    let mut best = total_before;
    let mut passes = 0;
    while eta.total() > p.tol_s {
        if passes == p.max_passes {
            return Err(Error::ToleranceUnreachable {
                tol: p.tol_s,
                iterations: passes,
                best,
            });
        }
        let marked = mark_refine(&eta, p.theta_r);
        if marked.is_empty() {
            break;
        }
        let space = history.space().clone();
        let mesh = Arc::new(space.mesh().bisect(&marked, GENERATIONS));
        let new_space = FeSpace::new_like(mesh, &space);
        history.transfer_to(&new_space)?;
        eta = indicators(&history.newest().m)?;
        best = best.min(eta.total());
        passes += 1;
    }
    let total_after_refine = eta.total();

    let mut coarsened = 0;
    if p.theta_c < 1.0 {
        let marked = mark_coarsen(&eta, p.theta_c);
        if !marked.is_empty() {
            let space = history.space().clone();
            let before = space.mesh().num_elements();
            let mesh: Mesh = space.mesh().coarsen(&marked);
            if mesh.num_elements() < before {
                coarsened = before - mesh.num_elements();
                let new_space = FeSpace::new_like(Arc::new(mesh), &space);
                history.transfer_to(&new_space)?;
            }
        }
    }
    Ok(AdaptReport {
        refinement_passes: passes,
        total_before,
        total_after_refine,
        coarsened,
        elements: history.space().num_elements(),
    })
}

/// Refinement loop for a field given by interpolation of `f`, used to build
/// the initial mesh.
pub fn adapt_initial<F>(space: &Arc<FeSpace>, f: F, p: &AdaptParams) -> Result<(Arc<FeSpace>, Field, usize)>
where
    F: Fn([f64; 2]) -> [f64; 3],
{
    let mut space = space.clone();
    let mut m = crate::fem::interpolate(&space, &f);
    let mut eta = indicators(&m)?;
    let mut best = eta.total();
    let mut passes = 0;
    while eta.total() > p.tol_s {
        if passes == p.max_passes {
            return Err(Error::ToleranceUnreachable {
                tol: p.tol_s,
                iterations: passes,
                best,
            });
        }
        let marked = mark_refine(&eta, p.theta_r);
        if marked.is_empty() {
            break;
        }
        let mesh = Arc::new(space.mesh().bisect(&marked, GENERATIONS));
        space = FeSpace::new_like(mesh, &space);
        m = crate::fem::interpolate(&space, &f);
        eta = indicators(&m)?;
        best = best.min(eta.total());
        passes += 1;
    }
    Ok((space, m, passes))
}
