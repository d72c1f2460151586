//! CSV traces and legacy VTK snapshots.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::energy::{EnergyTrace, TraceRow};
use crate::error::{Error, Result};
use crate::fem::Field;

pub const CSV_HEADER: [&str; 11] = [
    "t",
    "tau",
    "k",
    "dofs",
    "energy",
    "dissipation",
    "errT",
    "iterations",
    "field",
    "residual",
    "constraint",
];

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Config(format!("{}: malformed CSV ({other:?})", path.display())),
    }
}

/// Writes one row per accepted step. Floats use the shortest representation
/// that parses back to the same value.
pub fn export_csv(trace: &EnergyTrace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(CSV_HEADER).map_err(|e| csv_err(path, e))?;
    for r in &trace.rows {
        w.write_record([
            r.t.to_string(),
            r.tau.to_string(),
            r.k.to_string(),
            r.dofs.to_string(),
            r.energy.to_string(),
            r.dissipation.to_string(),
            r.err_t.to_string(),
            r.iterations.to_string(),
            r.field.to_string(),
            r.solver_residual.to_string(),
            r.constraint_residual.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn import_csv(path: impl AsRef<Path>) -> Result<EnergyTrace> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Config(format!("{}: unexpected CSV header", path.display())));
    }
    let mut trace = EnergyTrace::default();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let f = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{}: bad number '{}'", path.display(), &rec[i])))
        };
        let u = |i: usize| -> Result<usize> {
            rec[i]
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{}: bad integer '{}'", path.display(), &rec[i])))
        };
        trace.push(TraceRow {
            t: f(0)?,
            tau: f(1)?,
            k: u(2)?,
            dofs: u(3)?,
            energy: f(4)?,
            dissipation: f(5)?,
            err_t: f(6)?,
            iterations: u(7)?,
            field: f(8)?,
            solver_residual: f(9)?,
            constraint_residual: f(10)?,
        });
    }
    Ok(trace)
}

/// Legacy ASCII VTK of the active mesh with vertex values of `m` and `v`
/// and per-cell indicators.
pub fn export_vtk(m: &Field, v: Option<&Field>, eta: Option<&[f64]>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let space = m.space();
    let mesh = space.mesh();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);

    let vdofs = space.vertex_dofs();
    let index: HashMap<usize, usize> = vdofs.iter().enumerate().map(|(i, &(vert, _))| (vert, i)).collect();
    let ne = mesh.num_elements();

    writeln!(w, "# vtk DataFile Version 3.0").map_err(io)?;
    writeln!(w, "adaptive LLG snapshot").map_err(io)?;
    writeln!(w, "ASCII").map_err(io)?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID").map_err(io)?;
    writeln!(w, "POINTS {} double", vdofs.len()).map_err(io)?;
    for &(vert, _) in vdofs {
        let x = mesh.vertex(vert);
        writeln!(w, "{} {} 0", x[0], x[1]).map_err(io)?;
    }
    writeln!(w, "CELLS {} {}", ne, 4 * ne).map_err(io)?;
    for e in 0..ne {
        let [a, b, c] = mesh.element(e);
        writeln!(w, "3 {} {} {}", index[&a], index[&b], index[&c]).map_err(io)?;
    }
    writeln!(w, "CELL_TYPES {ne}").map_err(io)?;
    for _ in 0..ne {
        writeln!(w, "5").map_err(io)?;
    }
    writeln!(w, "POINT_DATA {}", vdofs.len()).map_err(io)?;
    let fields: Vec<(&str, &Field)> = std::iter::once(("m", m)).chain(v.map(|v| ("v", v))).collect();
    for (name, f) in fields {
        writeln!(w, "VECTORS {name} double").map_err(io)?;
        for &(_, d) in vdofs {
            let x = f.nodal(d);
            writeln!(w, "{} {} {}", x[0], x[1], x[2]).map_err(io)?;
        }
    }
    if let Some(eta) = eta {
        writeln!(w, "CELL_DATA {ne}").map_err(io)?;
        writeln!(w, "SCALARS eta double 1").map_err(io)?;
        writeln!(w, "LOOKUP_TABLE default").map_err(io)?;
        for x in eta {
            writeln!(w, "{x}").map_err(io)?;
        }
    }
    w.flush().map_err(io)
}
