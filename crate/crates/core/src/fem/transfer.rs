//! Moving finite element functions between meshes of one bisection forest.

use std::sync::Arc;

use super::field::Field;
use super::space::FeSpace;
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Nodal interpolation of `u` onto `target`.
///
/// Both meshes must come from the same forest (one was derived from the other
/// by [`Mesh::bisect`] / [`Mesh::coarsen`], possibly several times). Each target
/// dof is located by walking up from its element to the nearest ancestor that
/// the source mesh also contains and descending through the source tree from
/// there, so no global search is needed.
pub fn transfer(u: &Field, target: &Arc<FeSpace>) -> Result<Field> {
    let source = u.space();
    if Arc::ptr_eq(source, target) {
        return Ok(u.clone());
    }
    let smesh = source.mesh();
    let tmesh = target.mesh();
    check_forest(smesh, tmesh)?;

    let mut active_index = vec![usize::MAX; smesh.num_cells()];
    for (e, &c) in smesh.active().iter().enumerate() {
        active_index[c] = e;
    }

    let ncomp = u.ncomp();
    let nt = target.ndofs();
    let mut out = vec![0.0; ncomp * nt];
    let mut done = vec![false; nt];
    let mut val = vec![0.0; ncomp];
    let nloc = target.dofs_per_element();
    for e in 0..target.num_elements() {
        let dofs = target.elem_dofs(e);
        if dofs.iter().all(|&d| done[d]) {
            continue;
        }
        let mut anc = tmesh.active()[e];
        while !smesh.in_tree(anc) {
            anc = tmesh.cell(anc).parent.ok_or_else(|| {
                Error::Geometry(format!("target element {e} has no ancestor in the source forest"))
            })?;
        }
        for (k, &d) in dofs.iter().enumerate().take(nloc) {
            if done[d] {
                continue;
            }
            let x = target.dof_coords()[d];
            let leaf = smesh.descend(anc, x);
            let se = active_index[leaf];
            if se == usize::MAX {
                return Err(Error::Geometry(format!("point location failed for target dof {d} (node {k})")));
            }
            let r = source.geometry(se).inverse_map(x);
            u.eval_in_element(se, r, &mut val);
            for c in 0..ncomp {
                out[c * nt + d] = val[c];
            }
            done[d] = true;
        }
    }
    Ok(Field::from_values(target, ncomp, out))
}

fn check_forest(a: &Mesh, b: &Mesh) -> Result<()> {
    let roots = a.num_roots();
    let same = roots == b.num_roots()
        && (0..roots).all(|c| {
            let (ca, cb) = (a.cell(c).verts, b.cell(c).verts);
            ca == cb && ca.iter().all(|&v| a.vertex(v) == b.vertex(v))
        });
    if same {
        Ok(())
    } else {
        Err(Error::Geometry("meshes do not share a root forest".into()))
    }
}
