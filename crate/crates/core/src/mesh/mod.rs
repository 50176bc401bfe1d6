//! Fracture-conforming polyhedral meshes of the unit cube centred at the
//! origin, together with the fracture tagging, vertex equivalence classes
//! and the tetrahedral/triangular submeshes used by the discretizations.

mod builders;
mod classes;
mod fracture;
mod submesh;
pub mod vtk;

pub use builders::{build_cartesian_mesh, build_tetrahedral_mesh, MeshFamily};
pub use classes::{compute_vertex_classes, VertexClasses};
pub use fracture::{
    intersection_outward_normal, tag_fracture_network, FractureId, FractureNetwork, Side,
};
pub use submesh::{build_submeshes, SubTet, SubTriangle, Submeshes};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{self, Vec3};

/// Lower corner of the computational domain along each axis.
pub const DOMAIN_MIN: f64 = -0.5;
/// Upper corner of the computational domain along each axis.
pub const DOMAIN_MAX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellShape {
    /// Vertices in VTK hexahedron order.
    Hexahedron([usize; 8]),
    Tetrahedron([usize; 4]),
}

#[derive(Debug, Clone)]
pub struct Face {
    /// Ordered vertex loop.
    pub vertices: Vec<usize>,
    /// `edges[i]` joins `vertices[i]` and `vertices[i + 1]` (cyclically).
    pub edges: Vec<usize>,
    /// One adjacent cell for boundary faces, two otherwise.
    pub cells: Vec<usize>,
    /// Convex combination weights of the vertices giving `center`.
    pub beta: Vec<f64>,
    pub center: Vec3,
    pub area: f64,
    /// Unit normal, outward with respect to `cells[0]`.
    pub normal: Vec3,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.cells.len() == 1
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub faces: Vec<usize>,
    pub vertices: Vec<usize>,
    pub center: Vec3,
    pub volume: f64,
    pub shape: CellShape,
}

/// Generalised polyhedral mesh with full adjacency information.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<Face>,
    pub cells: Vec<Cell>,
    /// Cells sharing each vertex.
    pub vertex_cells: Vec<Vec<usize>>,
    /// Faces sharing each vertex.
    pub vertex_faces: Vec<Vec<usize>>,
    /// Faces sharing each edge.
    pub edge_faces: Vec<Vec<usize>>,
    pub vertex_on_boundary: Vec<bool>,
    pub edge_on_boundary: Vec<bool>,
    /// Number of cells per axis of the underlying Cartesian grid.
    pub resolution: usize,
}

/// Boundary description of one cell: its faces as vertex loops.
pub struct CellSpec {
    pub faces: Vec<Vec<usize>>,
    pub shape: CellShape,
}

impl Mesh {
    /// Builds the connectivity and geometry from cells given by face loops.
    /// Faces shared by two cells are identified by their vertex sets.
    pub fn from_cells(
        vertices: Vec<Vec3>,
        specs: Vec<CellSpec>,
        resolution: usize,
    ) -> Result<Mesh> {
        let mut face_ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut edge_ids: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut faces: Vec<Face> = Vec::new();
        let mut cells: Vec<Cell> = Vec::with_capacity(specs.len());

        for (k, spec) in specs.into_iter().enumerate() {
            let mut cell_faces = Vec::with_capacity(spec.faces.len());
            let mut cell_vertices: Vec<usize> = Vec::new();
            for lp in spec.faces {
                let mut key = lp.clone();
                key.sort_unstable();
                for &v in &lp {
                    if !cell_vertices.contains(&v) {
                        cell_vertices.push(v);
                    }
                }
                let id = match face_ids.get(&key) {
                    Some(&id) => {
                        let f = &mut faces[id];
                        if f.cells.len() != 1 {
                            return Err(Error::Conformity(format!(
                                "face {:?} shared by more than two cells",
                                key
                            )));
                        }
                        f.cells.push(k);
                        id
                    }
                    None => {
                        let id = faces.len();
                        let n = lp.len();
                        let mut fe = Vec::with_capacity(n);
                        for i in 0..n {
                            let a = lp[i];
                            let b = lp[(i + 1) % n];
                            let ek = if a < b { [a, b] } else { [b, a] };
                            let e = *edge_ids.entry(ek).or_insert_with(|| {
                                edges.push(ek);
                                edges.len() - 1
                            });
                            fe.push(e);
                        }
                        let beta = vec![1.0 / n as f64; n];
                        let center = geometry::mean(lp.iter().map(|&v| vertices[v]));
                        faces.push(Face {
                            vertices: lp,
                            edges: fe,
                            cells: vec![k],
                            beta,
                            center,
                            area: 0.0,
                            normal: [0.0; 3],
                        });
                        face_ids.insert(key, id);
                        id
                    }
                };
                cell_faces.push(id);
            }
            let center = geometry::mean(cell_vertices.iter().map(|&v| vertices[v]));
            cells.push(Cell {
                faces: cell_faces,
                vertices: cell_vertices,
                center,
                volume: 0.0,
                shape: spec.shape,
            });
        }

        // face areas and normals from the triangles (x_sigma, edge)
        for f in faces.iter_mut() {
            let n = f.vertices.len();
            let mut area = 0.0;
            let mut nsum = [0.0; 3];
            for i in 0..n {
                let a = vertices[f.vertices[i]];
                let b = vertices[f.vertices[(i + 1) % n]];
                let c = geometry::cross(geometry::sub(a, f.center), geometry::sub(b, f.center));
                area += 0.5 * geometry::norm(c);
                nsum = geometry::add(nsum, c);
            }
            if area <= 0.0 {
                return Err(Error::MeshQuality("face with zero area".into()));
            }
            let mut normal = geometry::normalize(nsum);
            let k = f.cells[0];
            if geometry::dot(normal, geometry::sub(f.center, cells[k].center)) < 0.0 {
                normal = geometry::scale(normal, -1.0);
            }
            f.area = area;
            f.normal = normal;
        }

        // cell volumes as the sum of the sub-tetrahedra D_{K,sigma,e}
        for c in cells.iter_mut() {
            let mut vol = 0.0;
            for &fi in &c.faces {
                let f = &faces[fi];
                for &e in &f.edges {
                    let [a, b] = edges[e];
                    vol +=
                        geometry::tet_signed_volume(c.center, f.center, vertices[a], vertices[b])
                            .abs();
                }
            }
            c.volume = vol;
        }

        let nv = vertices.len();
        let mut vertex_cells = vec![Vec::new(); nv];
        for (k, c) in cells.iter().enumerate() {
            for &v in &c.vertices {
                vertex_cells[v].push(k);
            }
        }
        let mut vertex_faces = vec![Vec::new(); nv];
        let mut edge_faces = vec![Vec::new(); edges.len()];
        let mut vertex_on_boundary = vec![false; nv];
        let mut edge_on_boundary = vec![false; edges.len()];
        for (fi, f) in faces.iter().enumerate() {
            for &v in &f.vertices {
                vertex_faces[v].push(fi);
                if f.is_boundary() {
                    vertex_on_boundary[v] = true;
                }
            }
            for &e in &f.edges {
                edge_faces[e].push(fi);
                if f.is_boundary() {
                    edge_on_boundary[e] = true;
                }
            }
        }

        Ok(Mesh {
            vertices,
            edges,
            faces,
            cells,
            vertex_cells,
            vertex_faces,
            edge_faces,
            vertex_on_boundary,
            edge_on_boundary,
            resolution,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Unit normal of `face` outward from `cell`.
    pub fn outward_normal(&self, cell: usize, face: usize) -> Vec3 {
        let f = &self.faces[face];
        if f.cells[0] == cell {
            f.normal
        } else {
            geometry::scale(f.normal, -1.0)
        }
    }

    /// The cell on the other side of `face`, if any.
    pub fn neighbour(&self, cell: usize, face: usize) -> Option<usize> {
        self.faces[face].cells.iter().copied().find(|&c| c != cell)
    }

    pub fn edge_midpoint(&self, e: usize) -> Vec3 {
        let [a, b] = self.edges[e];
        geometry::scale(geometry::add(self.vertices[a], self.vertices[b]), 0.5)
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        geometry::dist(self.vertices[a], self.vertices[b])
    }

    /// Largest deviation of a face vertex from the plane through the face
    /// centre with the face normal.
    pub fn face_planarity_defect(&self, face: usize) -> f64 {
        let f = &self.faces[face];
        f.vertices
            .iter()
            .map(|&v| geometry::dot(geometry::sub(self.vertices[v], f.center), f.normal).abs())
            .fold(0.0, f64::max)
    }

    /// Nominal grid spacing of the underlying Cartesian grid.
    pub fn grid_spacing(&self) -> f64 {
        (DOMAIN_MAX - DOMAIN_MIN) / self.resolution as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_hex_counts() {
        let m = build_cartesian_mesh(2).unwrap();
        assert_eq!(m.cells.len(), 8);
        assert_eq!(m.faces.len(), 36);
        assert_eq!(m.vertices.len(), 27);
        assert_eq!(m.edges.len(), 54);
    }

    #[test]
    fn every_face_has_one_or_two_cells() {
        for m in [
            build_cartesian_mesh(4).unwrap(),
            build_tetrahedral_mesh(2).unwrap(),
        ] {
            for f in &m.faces {
                let on_boundary = f.vertices.iter().all(|&v| {
                    let x = m.vertices[v];
                    (0..3).any(|d| (x[d] - DOMAIN_MIN).abs() < 1e-12)
                }) || f.vertices.iter().all(|&v| {
                    let x = m.vertices[v];
                    (0..3).any(|d| (x[d] - DOMAIN_MAX).abs() < 1e-12)
                });
                assert!(f.cells.len() == 1 || f.cells.len() == 2);
                if f.cells.len() == 1 {
                    // boundary faces lie on one of the cube's sides
                    let axis_fixed = (0..3).any(|d| {
                        f.vertices
                            .iter()
                            .all(|&v| (m.vertices[v][d].abs() - 0.5).abs() < 1e-12)
                    });
                    assert!(axis_fixed, "interior face with one cell");
                }
                let _ = on_boundary;
            }
        }
    }

    #[test]
    fn face_centres_are_convex_combinations() {
        let m = build_tetrahedral_mesh(2).unwrap();
        for f in &m.faces {
            let mut x = [0.0; 3];
            let mut s = 0.0;
            for (i, &v) in f.vertices.iter().enumerate() {
                assert!(f.beta[i] >= 0.0);
                s += f.beta[i];
                x = geometry::add(x, geometry::scale(m.vertices[v], f.beta[i]));
            }
            assert!((s - 1.0).abs() < 1e-14);
            assert!(geometry::dist(x, f.center) < 1e-12);
        }
    }

    #[test]
    fn volumes_sum_to_domain() {
        for m in [
            build_cartesian_mesh(4).unwrap(),
            build_tetrahedral_mesh(4).unwrap(),
        ] {
            let v: f64 = m.cells.iter().map(|c| c.volume).sum();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn outward_normals_point_away_from_cell_centres() {
        let m = build_tetrahedral_mesh(2).unwrap();
        for (k, c) in m.cells.iter().enumerate() {
            for &f in &c.faces {
                let n = m.outward_normal(k, f);
                assert!(geometry::dot(n, geometry::sub(m.faces[f].center, c.center)) > 0.0);
            }
        }
    }
}
