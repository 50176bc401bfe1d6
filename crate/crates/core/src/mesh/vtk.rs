//! Legacy ASCII VTK export of a mesh and its fracture faces.
//!
//! Matrix cells and fracture faces are written to one unstructured grid; the
//! integer cell array `block` is 0 for matrix cells and 1 for fracture faces.

use std::fmt::Write as _;
use std::path::Path;

use super::{CellShape, FractureNetwork, Mesh};
use crate::error::Result;

const VTK_TETRA: u8 = 10;
const VTK_HEXAHEDRON: u8 = 12;
const VTK_POLYGON: u8 = 7;

/// A scalar field with values on matrix cells and/or fracture faces.
/// Missing blocks are written as zeros.
#[derive(Debug, Clone)]
pub struct VtkField {
    pub name: String,
    pub matrix: Option<Vec<f64>>,
    /// One value per entry of `FractureNetwork::faces`.
    pub fracture: Option<Vec<f64>>,
}

pub fn to_vtk_string(mesh: &Mesh, fractures: &FractureNetwork, fields: &[VtkField]) -> String {
    let mut s = String::new();
    let nc = mesh.cells.len();
    let nf = fractures.faces.len();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "fractured porous medium");
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.vertices.len());
    for p in &mesh.vertices {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
    }
    let mut conn: Vec<Vec<usize>> = Vec::with_capacity(nc + nf);
    let mut types = Vec::with_capacity(nc + nf);
    for c in &mesh.cells {
        match c.shape {
            CellShape::Hexahedron(v) => {
                conn.push(v.to_vec());
                types.push(VTK_HEXAHEDRON);
            }
            CellShape::Tetrahedron(v) => {
                conn.push(v.to_vec());
                types.push(VTK_TETRA);
            }
        }
    }
    for &f in &fractures.faces {
        conn.push(mesh.faces[f].vertices.clone());
        types.push(VTK_POLYGON);
    }
    let size: usize = conn.iter().map(|c| c.len() + 1).sum();
    let _ = writeln!(s, "CELLS {} {}", conn.len(), size);
    for c in &conn {
        let _ = write!(s, "{}", c.len());
        for v in c {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {}", types.len());
    for t in &types {
        let _ = writeln!(s, "{t}");
    }
    let _ = writeln!(s, "CELL_DATA {}", conn.len());
    let _ = writeln!(s, "SCALARS block int 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for i in 0..conn.len() {
        let _ = writeln!(s, "{}", usize::from(i >= nc));
    }
    for field in fields {
        let _ = writeln!(s, "SCALARS {} double 1", field.name);
        let _ = writeln!(s, "LOOKUP_TABLE default");
        for i in 0..nc {
            let v = field.matrix.as_ref().map_or(0.0, |m| m[i]);
            let _ = writeln!(s, "{v:e}");
        }
        for i in 0..nf {
            let v = field.fracture.as_ref().map_or(0.0, |m| m[i]);
            let _ = writeln!(s, "{v:e}");
        }
    }
    s
}

pub fn write_vtk(
    path: &Path,
    mesh: &Mesh,
    fractures: &FractureNetwork,
    fields: &[VtkField],
) -> Result<()> {
    std::fs::write(path, to_vtk_string(mesh, fractures, fields))?;
    Ok(())
}
