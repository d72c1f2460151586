//! Conforming triangulations with newest-vertex bisection.
//!
//! Every triangle ever created lives in an append-only arena. A triangle is
//! stored as `[newest, a, b]` in counter-clockwise order; its refinement edge
//! is `a-b`, the edge opposite the newest vertex. Bisecting it inserts the
//! midpoint `m` of `a-b` and produces the children `[m, newest, a]` and
//! `[m, b, newest]`, whose refinement edges are again opposite `m`.
//!
//! Children survive coarsening in the arena, so re-refining a triangle reuses
//! the same cell ids and midpoint vertices. This keeps the forest shared by
//! every mesh derived from one root mesh, which is what solution transfer
//! relies on.
//!
//! Public element indices always refer to the position in [`Mesh::active`].

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn unit_square() -> Self {
        Rect::new(0.0, 0.0, 1.0, 1.0)
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

/// What the adaptive loop wants done with an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkAction {
    Refine,
    Coarsen,
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementMark {
    pub element: usize,
    pub action: MarkAction,
}

#[derive(Debug, Clone)]
pub(crate) struct Cell {
    pub verts: [usize; 3],
    pub parent: Option<usize>,
    pub children: Option<[usize; 2]>,
    pub level: u32,
}

const NONE: usize = usize::MAX;

type EdgeMap = HashMap<(usize, usize), [usize; 2]>;

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn signed_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

fn dist2(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    cells: Vec<Cell>,
    refined: Vec<bool>,
    num_roots: usize,
    midpoints: HashMap<(usize, usize), usize>,
    active: Vec<usize>,
}

impl Mesh {
    /// Diagonal triangulation of a rectangle: every cell of the `nx x ny`
    /// grid is split along its lower-left to upper-right diagonal.
    pub fn rectangle(rect: Rect, nx: usize, ny: usize) -> Result<Mesh> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidDomain(format!(
                "need at least one cell per direction, got {nx}x{ny}"
            )));
        }
        let (w, h) = (rect.x1 - rect.x0, rect.y1 - rect.y0);
        if !(w > 0.0 && h > 0.0) || !w.is_finite() || !h.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "degenerate rectangle [{}, {}] x [{}, {}]",
                rect.x0, rect.x1, rect.y0, rect.y1
            )));
        }
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let x = if i == nx { rect.x1 } else { rect.x0 + w * i as f64 / nx as f64 };
                let y = if j == ny { rect.y1 } else { rect.y0 + h * j as f64 / ny as f64 };
                vertices.push([x, y]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        Mesh::from_triangles(vertices, &triangles)
    }

    /// Builds a mesh from an arbitrary conforming triangulation. Each
    /// triangle's refinement edge is its longest edge, ties going to the edge
    /// whose opposite vertex has the lowest index.
    pub fn from_triangles(vertices: Vec<[f64; 2]>, triangles: &[[usize; 3]]) -> Result<Mesh> {
        if triangles.is_empty() {
            return Err(Error::InvalidDomain("no triangles".into()));
        }
        let mut cells = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidDomain(format!("triangle {t} references a missing vertex")));
            }
            let [a, b, c] = *tri;
            let area = signed_area(vertices[a], vertices[b], vertices[c]);
            if area.abs() <= 1e-300 || !area.is_finite() {
                return Err(Error::InvalidDomain(format!("triangle {t} is degenerate")));
            }
            let ccw = if area > 0.0 { [a, b, c] } else { [a, c, b] };
            // rotation k puts vertex k first; its opposite edge becomes the refinement edge
            let mut best = 0;
            let mut best_len = -1.0;
            for k in 0..3 {
                let (p, q) = (ccw[(k + 1) % 3], ccw[(k + 2) % 3]);
                let len = dist2(vertices[p], vertices[q]);
                let better = len > best_len * (1.0 + 1e-12)
                    || ((len - best_len).abs() <= 1e-12 * len && ccw[k] < ccw[best]);
                if better {
                    best = k;
                    best_len = len;
                }
            }
            let verts = [ccw[best], ccw[(best + 1) % 3], ccw[(best + 2) % 3]];
            cells.push(Cell {
                verts,
                parent: None,
                children: None,
                level: 0,
            });
        }
        let n = cells.len();
        let mut mesh = Mesh {
            vertices,
            cells,
            refined: vec![false; n],
            num_roots: n,
            midpoints: HashMap::new(),
            active: Vec::new(),
        };
        mesh.rebuild_active();
        Ok(mesh)
    }

    fn rebuild_active(&mut self) {
        let mut ordered = Vec::with_capacity(self.active.len().max(self.num_roots));
        let mut stack = Vec::new();
        for root in 0..self.num_roots {
            stack.push(root);
            while let Some(c) = stack.pop() {
                if self.refined[c] {
                    let [c0, c1] = self.cells[c].children.expect("refined cell has children");
                    stack.push(c1);
                    stack.push(c0);
                } else {
                    ordered.push(c);
                }
            }
        }
        self.active = ordered;
    }

    /// Number of active elements.
    pub fn num_elements(&self) -> usize {
        self.active.len()
    }

    pub fn num_roots(&self) -> usize {
        self.num_roots
    }

    /// Arena ids of the active elements, in forest (depth-first) order.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn vertex(&self, v: usize) -> [f64; 2] {
        self.vertices[v]
    }

    /// All vertices ever created, including ones no active element uses.
    pub fn vertex_arena(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Sorted ids of the vertices used by active elements.
    pub fn active_vertices(&self) -> Vec<usize> {
        let mut used = vec![false; self.vertices.len()];
        for &c in &self.active {
            for &v in &self.cells[c].verts {
                used[v] = true;
            }
        }
        (0..self.vertices.len()).filter(|&v| used[v]).collect()
    }

    /// Vertex ids of active element `e`, newest vertex first.
    pub fn element(&self, e: usize) -> [usize; 3] {
        self.cells[self.active[e]].verts
    }

    pub fn element_coords(&self, e: usize) -> [[f64; 2]; 3] {
        self.cell_coords(self.active[e])
    }

    pub(crate) fn cell(&self, c: usize) -> &Cell {
        &self.cells[c]
    }

    pub(crate) fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub(crate) fn cell_coords(&self, c: usize) -> [[f64; 2]; 3] {
        let [a, b, d] = self.cells[c].verts;
        [self.vertices[a], self.vertices[b], self.vertices[d]]
    }

    /// Whether arena cell `c` is part of this mesh's current forest, either
    /// as an active leaf or as a refined interior node.
    pub(crate) fn in_tree(&self, c: usize) -> bool {
        if c >= self.cells.len() {
            return false;
        }
        let mut cur = c;
        while let Some(p) = self.cells[cur].parent {
            if !self.refined[p] {
                return false;
            }
            cur = p;
        }
        true
    }

    pub fn area(&self, e: usize) -> f64 {
        let [p, q, r] = self.element_coords(e);
        signed_area(p, q, r)
    }

    pub fn level(&self, e: usize) -> u32 {
        self.cells[self.active[e]].level
    }

    /// Root cell the active element descends from.
    pub fn root_of(&self, e: usize) -> usize {
        let mut c = self.active[e];
        while let Some(p) = self.cells[c].parent {
            c = p;
        }
        c
    }

    /// Centroid of active element `e`.
    pub fn centroid(&self, e: usize) -> [f64; 2] {
        let [p, q, r] = self.element_coords(e);
        [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0]
    }

    /// Smallest interior angle (radians) of active element `e`.
    pub fn min_angle(&self, e: usize) -> f64 {
        min_angle(self.element_coords(e))
    }

    /// Total area of the active elements.
    pub fn domain_area(&self) -> f64 {
        (0..self.num_elements()).map(|e| self.area(e)).sum()
    }

    /// Edges of active elements that belong to exactly one active element.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let adj = self.edge_map();
        let mut out: Vec<_> = adj
            .into_iter()
            .filter(|(_, s)| s[1] == NONE)
            .map(|(k, _)| k)
            .collect();
        out.sort_unstable();
        out
    }

    /// Counts hanging nodes: active vertices lying strictly inside an edge of
    /// an active element. Independent of the bisection bookkeeping.
    pub fn hanging_nodes(&self) -> usize {
        let verts = self.active_vertices();
        let mut count = 0;
        let adj = self.edge_map();
        // index vertices by a coarse grid for the point-on-segment queries
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for &v in &verts {
            for d in 0..2 {
                lo[d] = lo[d].min(self.vertices[v][d]);
                hi[d] = hi[d].max(self.vertices[v][d]);
            }
        }
        let nb = ((verts.len() as f64).sqrt().ceil() as usize).max(1);
        let cell_of = |p: [f64; 2]| -> (usize, usize) {
            let f = |d: usize| {
                let span = (hi[d] - lo[d]).max(1e-300);
                (((p[d] - lo[d]) / span * nb as f64) as usize).min(nb - 1)
            };
            (f(0), f(1))
        };
        let mut grid: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for &v in &verts {
            grid.entry(cell_of(self.vertices[v])).or_default().push(v);
        }
        for &(a, b) in adj.keys() {
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            let (ia, ib) = (cell_of(pa), cell_of(pb));
            let len2 = dist2(pa, pb);
            for gx in ia.0.min(ib.0)..=ia.0.max(ib.0) {
                for gy in ia.1.min(ib.1)..=ia.1.max(ib.1) {
                    let Some(list) = grid.get(&(gx, gy)) else { continue };
                    for &v in list {
                        if v == a || v == b {
                            continue;
                        }
                        let p = self.vertices[v];
                        let cross = signed_area(pa, pb, p).abs() * 2.0;
                        let t = ((p[0] - pa[0]) * (pb[0] - pa[0]) + (p[1] - pa[1]) * (pb[1] - pa[1])) / len2;
                        if cross <= 1e-12 * len2 && t > 1e-12 && t < 1.0 - 1e-12 {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    fn edge_map(&self) -> EdgeMap {
        let mut adj = EdgeMap::with_capacity(self.active.len() * 2);
        for &c in &self.active {
            add_cell_edges(&mut adj, c, self.cells[c].verts);
        }
        adj
    }

    /// Bisects every marked element `generations` times along refinement
    /// edges, plus whatever closure needs to stay conforming.
    pub fn bisect(&self, marked: &[usize], generations: u32) -> Mesh {
        let mut out = self.clone();
        out.bisect_in_place(marked, generations);
        out
    }

    pub fn bisect_in_place(&mut self, marked: &[usize], generations: u32) {
        if marked.is_empty() || generations == 0 {
            return;
        }
        let mut targets: Vec<usize> = marked.iter().map(|&e| self.active[e]).collect();
        targets.sort_unstable();
        targets.dedup();
        let mut adj = self.edge_map();
        for g in 1..=generations {
            for &t in &targets {
                let goal = self.cells[t].level + g;
                let mut leaves = Vec::new();
                self.collect_leaves(t, &mut leaves);
                for leaf in leaves {
                    if !self.refined[leaf] && self.cells[leaf].level < goal {
                        self.refine_cell(leaf, &mut adj);
                    }
                }
            }
        }
        self.rebuild_active();
    }

    /// Refines every active element once.
    pub fn refine_uniform(&self) -> Mesh {
        let all: Vec<usize> = (0..self.num_elements()).collect();
        self.bisect(&all, 1)
    }

    fn collect_leaves(&self, c: usize, out: &mut Vec<usize>) {
        if self.refined[c] {
            let [c0, c1] = self.cells[c].children.unwrap();
            self.collect_leaves(c0, out);
            self.collect_leaves(c1, out);
        } else {
            out.push(c);
        }
    }

    fn refinement_edge(&self, c: usize) -> (usize, usize) {
        let v = self.cells[c].verts;
        edge_key(v[1], v[2])
    }

    fn refine_cell(&mut self, t: usize, adj: &mut EdgeMap) {
        loop {
            if self.refined[t] {
                return;
            }
            let e = self.refinement_edge(t);
            let slots = adj.get(&e).copied().unwrap_or([NONE; 2]);
            let nb = if slots[0] == t { slots[1] } else { slots[0] };
            if nb == NONE {
                self.split(t, adj);
                return;
            }
            if self.refinement_edge(nb) == e {
                self.split(t, adj);
                self.split(nb, adj);
                return;
            }
            self.refine_cell(nb, adj);
        }
    }

    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let key = edge_key(a, b);
        if let Some(&m) = self.midpoints.get(&key) {
            return m;
        }
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        self.vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        let m = self.vertices.len() - 1;
        self.midpoints.insert(key, m);
        m
    }

    fn split(&mut self, t: usize, adj: &mut EdgeMap) {
        let [v0, v1, v2] = self.cells[t].verts;
        let children = match self.cells[t].children {
            Some(ch) => ch,
            None => {
                let m = self.midpoint(v1, v2);
                let level = self.cells[t].level + 1;
                let base = self.cells.len();
                for verts in [[m, v0, v1], [m, v2, v0]] {
                    self.cells.push(Cell {
                        verts,
                        parent: Some(t),
                        children: None,
                        level,
                    });
                    self.refined.push(false);
                }
                self.cells[t].children = Some([base, base + 1]);
                [base, base + 1]
            }
        };
        self.refined[t] = true;
        remove_cell_edges(adj, t, [v0, v1, v2]);
        for c in children {
            add_cell_edges(adj, c, self.cells[c].verts);
        }
    }

    /// Merges sibling pairs whose members are both marked, wherever removing
    /// the shared midpoint keeps the mesh conforming. Merged parents are not
    /// marked themselves, so one call removes at most one bisection level.
    pub fn coarsen(&self, marked: &[usize]) -> Mesh {
        let mut out = self.clone();
        out.coarsen_in_place(marked);
        out
    }

    pub fn coarsen_in_place(&mut self, marked: &[usize]) {
        let mut marked: HashSet<usize> = marked.iter().map(|&e| self.active[e]).collect();
        loop {
            let mut around: HashMap<usize, Vec<usize>> = HashMap::new();
            for &c in &self.active {
                for &v in &self.cells[c].verts {
                    around.entry(v).or_default().push(c);
                }
            }
            let mut parents: Vec<usize> = self
                .active
                .iter()
                .filter_map(|&c| self.cells[c].parent)
                .filter(|&p| {
                    let [c0, c1] = self.cells[p].children.unwrap();
                    self.refined[p]
                        && !self.refined[c0]
                        && !self.refined[c1]
                        && marked.contains(&c0)
                        && marked.contains(&c1)
                })
                .collect();
            parents.sort_unstable();
            parents.dedup();

            let mut changed = false;
            let mut done: HashSet<usize> = HashSet::new();
            for p in parents {
                if done.contains(&p) || !self.refined[p] {
                    continue;
                }
                let [c0, c1] = self.cells[p].children.unwrap();
                let mid = self.cells[c0].verts[0];
                let patch = &around[&mid];
                let mut group = vec![p];
                let ok = match patch.len() {
                    2 => patch.iter().all(|&c| c == c0 || c == c1),
                    4 => {
                        let others: Vec<usize> = patch.iter().copied().filter(|&c| c != c0 && c != c1).collect();
                        let q = self.cells[others[0]].parent;
                        match q {
                            Some(q) if others.len() == 2 && q != p && self.cells[others[1]].parent == Some(q) => {
                                let [d0, d1] = self.cells[q].children.unwrap();
                                let fits = self.cells[d0].verts[0] == mid
                                    && marked.contains(&d0)
                                    && marked.contains(&d1)
                                    && !done.contains(&q);
                                if fits {
                                    group.push(q);
                                }
                                fits
                            }
                            _ => false,
                        }
                    }
                    _ => false,
                };
                if !ok {
                    continue;
                }
                for g in group {
                    let [d0, d1] = self.cells[g].children.unwrap();
                    self.refined[g] = false;
                    marked.remove(&d0);
                    marked.remove(&d1);
                    done.insert(g);
                }
                changed = true;
            }
            if !changed {
                break;
            }
            self.rebuild_active();
        }
        self.rebuild_active();
    }

    /// Locates the active descendant of arena cell `start` that contains `p`.
    /// Falls back to the closest candidate when `p` sits on a shared edge.
    pub(crate) fn descend(&self, start: usize, p: [f64; 2]) -> usize {
        let mut c = start;
        while self.refined[c] {
            let [c0, c1] = self.cells[c].children.unwrap();
            let s0 = min_barycentric(self.cell_coords(c0), p);
            let s1 = min_barycentric(self.cell_coords(c1), p);
            c = if s0 >= s1 { c0 } else { c1 };
        }
        c
    }
}

fn add_cell_edges(adj: &mut EdgeMap, c: usize, v: [usize; 3]) {
    for k in 0..3 {
        let slot = adj.entry(edge_key(v[k], v[(k + 1) % 3])).or_insert([NONE; 2]);
        if slot[0] == NONE {
            slot[0] = c;
        } else {
            debug_assert_eq!(slot[1], NONE, "edge shared by more than two elements");
            slot[1] = c;
        }
    }
}

fn remove_cell_edges(adj: &mut EdgeMap, c: usize, v: [usize; 3]) {
    for k in 0..3 {
        let key = edge_key(v[k], v[(k + 1) % 3]);
        if let Some(slot) = adj.get_mut(&key) {
            if slot[0] == c {
                slot[0] = slot[1];
                slot[1] = NONE;
            } else if slot[1] == c {
                slot[1] = NONE;
            }
            if slot[0] == NONE {
                adj.remove(&key);
            }
        }
    }
}

/// Smallest barycentric coordinate of `p` with respect to triangle `tri`;
/// nonnegative exactly when `p` lies inside.
pub(crate) fn min_barycentric(tri: [[f64; 2]; 3], p: [f64; 2]) -> f64 {
    let total = signed_area(tri[0], tri[1], tri[2]);
    let l0 = signed_area(p, tri[1], tri[2]) / total;
    let l1 = signed_area(tri[0], p, tri[2]) / total;
    let l2 = 1.0 - l0 - l1;
    l0.min(l1).min(l2)
}

pub fn min_angle(tri: [[f64; 2]; 3]) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..3 {
        let (p, q, r) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
        let (u, w) = ([q[0] - p[0], q[1] - p[1]], [r[0] - p[0], r[1] - p[1]]);
        let cos = (u[0] * w[0] + u[1] * w[1]) / ((u[0].hypot(u[1])) * (w[0].hypot(w[1])));
        best = best.min(cos.clamp(-1.0, 1.0).acos());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_elements(m: &Mesh) -> Vec<[u64; 6]> {
        // geometry of each element, vertex order normalized, for exact comparisons
        let mut out: Vec<[u64; 6]> = (0..m.num_elements())
            .map(|e| {
                let mut pts = m.element_coords(e);
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                [
                    pts[0][0].to_bits(),
                    pts[0][1].to_bits(),
                    pts[1][0].to_bits(),
                    pts[1][1].to_bits(),
                    pts[2][0].to_bits(),
                    pts[2][1].to_bits(),
                ]
            })
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn rectangle_counts() {
        let m = Mesh::rectangle(Rect::unit_square(), 1, 1).unwrap();
        assert_eq!((m.num_elements(), m.active_vertices().len()), (2, 4));
        let m = Mesh::rectangle(Rect::unit_square(), 2, 2).unwrap();
        assert_eq!((m.num_elements(), m.active_vertices().len()), (8, 9));
        assert!((m.domain_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn strip_mesh_is_well_shaped() {
        let m = Mesh::rectangle(Rect::new(0.0, 0.0, 1.0, 0.2), 5, 1).unwrap();
        assert_eq!(m.num_elements(), 10);
        for e in 0..10 {
            assert!(m.area(e) > 0.0);
            // square cells split on the diagonal: right isosceles triangles
            assert!((m.min_angle(e) - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_rectangle_rejected() {
        assert!(matches!(
            Mesh::rectangle(Rect::new(0.0, 0.0, 0.0, 1.0), 2, 2),
            Err(Error::InvalidDomain(_))
        ));
        assert!(Mesh::rectangle(Rect::unit_square(), 0, 2).is_err());
    }

    #[test]
    fn refinement_edge_is_the_diagonal() {
        let m = Mesh::rectangle(Rect::unit_square(), 1, 1).unwrap();
        for e in 0..2 {
            let [_, a, b] = m.element(e);
            assert_eq!(edge_key(a, b), (0, 3));
        }
    }

    #[test]
    fn closure_bisects_the_neighbour() {
        let m = Mesh::rectangle(Rect::unit_square(), 1, 1).unwrap();
        let r = m.bisect(&[0], 1);
        assert_eq!(r.num_elements(), 4);
        assert_eq!(r.hanging_nodes(), 0);
        let r2 = m.bisect(&[0, 1], 2);
        assert_eq!(r2.num_elements(), 8);
        assert_eq!(r2.hanging_nodes(), 0);
    }

    #[test]
    fn empty_marking_is_identity() {
        let m = Mesh::rectangle(Rect::unit_square(), 3, 2).unwrap();
        let r = m.bisect(&[], 2);
        assert_eq!(sorted_elements(&m), sorted_elements(&r));
    }

    #[test]
    fn uniform_refine_then_coarsen_all() {
        let m = Mesh::rectangle(Rect::unit_square(), 2, 2).unwrap();
        let r = m.refine_uniform();
        assert_eq!(r.num_elements(), 16);
        let all: Vec<usize> = (0..r.num_elements()).collect();
        let c = r.coarsen(&all);
        assert_eq!(sorted_elements(&c), sorted_elements(&m));
        assert_eq!(c.active_vertices().len(), 9);
    }

    #[test]
    fn pair_rule_blocks_half_marked_siblings() {
        let m = Mesh::rectangle(Rect::unit_square(), 1, 1).unwrap().refine_uniform();
        // elements 0,1 are siblings; mark only one of them plus the other pair
        let c = m.coarsen(&[0]);
        assert_eq!(c.num_elements(), 4);
        let c = m.coarsen(&[0, 2, 3]);
        // the patch around the centre needs all four, so nothing merges
        assert_eq!(c.num_elements(), 4);
    }

    #[test]
    fn local_refinement_stays_conforming() {
        let mut m = Mesh::rectangle(Rect::unit_square(), 4, 4).unwrap();
        for _ in 0..6 {
            // refine the element nearest a corner
            let e = (0..m.num_elements())
                .min_by(|&a, &b| {
                    let (ca, cb) = (m.centroid(a), m.centroid(b));
                    (ca[0] + ca[1]).partial_cmp(&(cb[0] + cb[1])).unwrap()
                })
                .unwrap();
            m = m.bisect(&[e], 2);
            assert_eq!(m.hanging_nodes(), 0);
            assert!((m.domain_area() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn rerefinement_reuses_cells() {
        let m = Mesh::rectangle(Rect::unit_square(), 1, 1).unwrap();
        let r = m.refine_uniform();
        let all: Vec<usize> = (0..4).collect();
        let back = r.coarsen(&all).refine_uniform();
        assert_eq!(back.active(), r.active());
        assert_eq!(back.vertex_arena().len(), r.vertex_arena().len());
    }
}
