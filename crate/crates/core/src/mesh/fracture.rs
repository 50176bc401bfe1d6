use serde::{Deserialize, Serialize};

use super::Mesh;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Tolerance for "lies on a fracture plane", relative to the domain size.
const PLANE_TOL: f64 = 1e-12;

/// The four half-plane fractures of the cross network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FractureId {
    /// `x = 0, y > 0`
    F12 = 0,
    /// `y = 0, x > 0`
    F23 = 1,
    /// `x = 0, y < 0`
    F34 = 2,
    /// `y = 0, x < 0`
    F14 = 3,
}

impl FractureId {
    pub const ALL: [FractureId; 4] = [
        FractureId::F12,
        FractureId::F23,
        FractureId::F34,
        FractureId::F14,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> FractureId {
        Self::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            FractureId::F12 => "12",
            FractureId::F23 => "23",
            FractureId::F34 => "34",
            FractureId::F14 => "14",
        }
    }

    /// Coordinate axis normal to the fracture plane.
    pub fn normal_axis(self) -> usize {
        match self {
            FractureId::F12 | FractureId::F34 => 0,
            FractureId::F23 | FractureId::F14 => 1,
        }
    }

    /// In-plane coordinate axis that points away from the intersection line.
    pub fn tangent_axis(self) -> usize {
        1 - self.normal_axis()
    }

    /// Sign of the tangent coordinate on the fracture.
    pub fn tangent_sign(self) -> f64 {
        match self {
            FractureId::F12 | FractureId::F23 => 1.0,
            FractureId::F34 | FractureId::F14 => -1.0,
        }
    }

    /// Subdomains (1-based) on the negative and positive side of the plane.
    pub fn subdomains(self) -> (usize, usize) {
        match self {
            FractureId::F12 => (1, 2),
            FractureId::F23 => (3, 2),
            FractureId::F34 => (4, 3),
            FractureId::F14 => (4, 1),
        }
    }

    /// Whether `x` lies in the closure of this fracture.
    pub fn contains(self, x: Vec3) -> bool {
        let tol = PLANE_TOL;
        let inside_box = x.iter().all(|c| c.abs() <= 0.5 + tol);
        inside_box
            && x[self.normal_axis()].abs() <= tol
            && self.tangent_sign() * x[self.tangent_axis()] >= -tol
    }
}

/// One side of a fracture. The positive side is the one whose outward
/// normal is `+e_axis`, i.e. the matrix region on the negative half-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Side {
    pub fracture: FractureId,
    pub positive: bool,
}

impl Side {
    pub fn index(self) -> usize {
        2 * self.fracture.index() + usize::from(!self.positive)
    }

    pub fn opposite(self) -> Side {
        Side {
            fracture: self.fracture,
            positive: !self.positive,
        }
    }

    /// Unit normal outward to the matrix region on this side.
    pub fn normal(self) -> Vec3 {
        let mut n = [0.0; 3];
        n[self.fracture.normal_axis()] = if self.positive { 1.0 } else { -1.0 };
        n
    }

    /// Subdomain (1-based) of the matrix region on this side.
    pub fn subdomain(self) -> usize {
        let (neg, pos) = self.fracture.subdomains();
        if self.positive {
            neg
        } else {
            pos
        }
    }

    pub fn all() -> impl Iterator<Item = Side> {
        FractureId::ALL.into_iter().flat_map(|f| {
            [true, false].into_iter().map(move |positive| Side {
                fracture: f,
                positive,
            })
        })
    }
}

#[derive(Debug, Clone)]
pub struct FractureNetwork {
    /// Fracture of each mesh face, if it is a fracture face.
    pub face_fracture: Vec<Option<FractureId>>,
    /// Fracture faces per fracture.
    pub fracture_faces: [Vec<usize>; 4],
    /// All fracture faces in increasing face order.
    pub faces: Vec<usize>,
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    pub is_fracture_edge: Vec<bool>,
    pub is_fracture_vertex: Vec<bool>,
    /// Vertices on the intersection line `x = y = 0`.
    pub intersection_vertices: Vec<usize>,
    /// Edges on the intersection line `x = y = 0`.
    pub intersection_edges: Vec<usize>,
}

impl FractureNetwork {
    pub fn is_fracture_face(&self, face: usize) -> bool {
        self.face_fracture[face].is_some()
    }

    /// Side label of `cell` at fracture `face`.
    pub fn side(&self, mesh: &Mesh, cell: usize, face: usize) -> Option<Side> {
        let fr = self.face_fracture[face]?;
        let n = mesh.outward_normal(cell, face);
        Some(Side {
            fracture: fr,
            positive: n[fr.normal_axis()] > 0.0,
        })
    }

    /// Any fracture containing vertex `v` (the fracture value is continuous
    /// at the intersection, so any choice gives the same trace).
    pub fn vertex_fracture(&self, mesh: &Mesh, v: usize) -> Option<FractureId> {
        mesh.vertex_faces[v]
            .iter()
            .find_map(|&f| self.face_fracture[f])
    }

    pub fn edge_fracture(&self, mesh: &Mesh, e: usize) -> Option<FractureId> {
        mesh.edge_faces[e]
            .iter()
            .find_map(|&f| self.face_fracture[f])
    }
}

fn on_plane(mesh: &Mesh, face: usize, axis: usize) -> bool {
    mesh.faces[face]
        .vertices
        .iter()
        .all(|&v| mesh.vertices[v][axis].abs() <= PLANE_TOL)
}

/// Tags the faces lying on the four half-plane fractures.
pub fn tag_fracture_network(mesh: &Mesh) -> Result<FractureNetwork> {
    let nf = mesh.faces.len();
    let mut face_fracture = vec![None; nf];
    let mut fracture_faces: [Vec<usize>; 4] = Default::default();
    let mut faces = Vec::new();
    for fi in 0..nf {
        let c = mesh.faces[fi].center;
        let fr = if on_plane(mesh, fi, 0) {
            Some(if c[1] > 0.0 {
                FractureId::F12
            } else {
                FractureId::F34
            })
        } else if on_plane(mesh, fi, 1) {
            Some(if c[0] > 0.0 {
                FractureId::F23
            } else {
                FractureId::F14
            })
        } else {
            None
        };
        if let Some(fr) = fr {
            if mesh.faces[fi].is_boundary() {
                return Err(Error::Conformity(format!(
                    "fracture face {fi} lies on the domain boundary"
                )));
            }
            face_fracture[fi] = Some(fr);
            fracture_faces[fr.index()].push(fi);
            faces.push(fi);
        }
    }
    for fr in FractureId::ALL {
        let area: f64 = fracture_faces[fr.index()]
            .iter()
            .map(|&f| mesh.faces[f].area)
            .sum();
        if (area - 0.5).abs() > 1e-10 {
            return Err(Error::Conformity(format!(
                "fracture {} covered by faces of total area {area}, expected 0.5",
                fr.name()
            )));
        }
    }

    let mut is_fracture_edge = vec![false; mesh.edges.len()];
    let mut is_fracture_vertex = vec![false; mesh.vertices.len()];
    for &f in &faces {
        for &e in &mesh.faces[f].edges {
            is_fracture_edge[e] = true;
        }
        for &v in &mesh.faces[f].vertices {
            is_fracture_vertex[v] = true;
        }
    }
    let on_line = |x: Vec3| x[0].abs() <= PLANE_TOL && x[1].abs() <= PLANE_TOL;
    let edges: Vec<usize> = (0..mesh.edges.len())
        .filter(|&e| is_fracture_edge[e])
        .collect();
    let vertices: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&v| is_fracture_vertex[v])
        .collect();
    let intersection_vertices = vertices
        .iter()
        .copied()
        .filter(|&v| on_line(mesh.vertices[v]))
        .collect();
    let intersection_edges = edges
        .iter()
        .copied()
        .filter(|&e| {
            let [a, b] = mesh.edges[e];
            on_line(mesh.vertices[a]) && on_line(mesh.vertices[b])
        })
        .collect();

    Ok(FractureNetwork {
        face_fracture,
        fracture_faces,
        faces,
        edges,
        vertices,
        is_fracture_edge,
        is_fracture_vertex,
        intersection_vertices,
        intersection_edges,
    })
}

/// Unit normal of the intersection line pointing out of `fracture`, within
/// its plane.
pub fn intersection_outward_normal(fracture: FractureId) -> Vec3 {
    let mut n = [0.0; 3];
    n[fracture.tangent_axis()] = -fracture.tangent_sign();
    n
}
