use super::{FractureNetwork, Mesh};
use crate::error::{Error, Result};
use crate::geometry::{self, Vec3};

/// Tetrahedron `D_{K,sigma,e}`: hull of the cell centre, the face centre and
/// an edge of the face.
#[derive(Debug, Clone, Copy)]
pub struct SubTet {
    pub cell: usize,
    pub face: usize,
    pub edge: usize,
    pub volume: f64,
}

/// Triangle `T_{sigma,e}` of a fracture face.
#[derive(Debug, Clone, Copy)]
pub struct SubTriangle {
    pub face: usize,
    pub edge: usize,
    pub area: f64,
}

#[derive(Debug, Clone)]
pub struct Submeshes {
    pub tets: Vec<SubTet>,
    pub triangles: Vec<SubTriangle>,
    /// Largest tetrahedron diameter.
    pub h: f64,
    /// Shape regularity `max h_D / rho_D` (reported only).
    pub theta: f64,
}

impl SubTet {
    pub fn points(&self, mesh: &Mesh) -> [Vec3; 4] {
        let [a, b] = mesh.edges[self.edge];
        [
            mesh.cells[self.cell].center,
            mesh.faces[self.face].center,
            mesh.vertices[a],
            mesh.vertices[b],
        ]
    }
}

impl SubTriangle {
    pub fn points(&self, mesh: &Mesh) -> [Vec3; 3] {
        let [a, b] = mesh.edges[self.edge];
        [
            mesh.faces[self.face].center,
            mesh.vertices[a],
            mesh.vertices[b],
        ]
    }
}

pub fn diameter(points: &[Vec3]) -> f64 {
    let mut h: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            h = h.max(geometry::dist(points[i], points[j]));
        }
    }
    h
}

pub fn build_submeshes(mesh: &Mesh, fractures: &FractureNetwork) -> Result<Submeshes> {
    let mut tets = Vec::new();
    let mut h: f64 = 0.0;
    let mut theta: f64 = 0.0;
    for (k, c) in mesh.cells.iter().enumerate() {
        for &f in &c.faces {
            for &e in &mesh.faces[f].edges {
                let t = SubTet {
                    cell: k,
                    face: f,
                    edge: e,
                    volume: 0.0,
                };
                let p = t.points(mesh);
                let vol = geometry::tet_signed_volume(p[0], p[1], p[2], p[3]).abs();
                let hd = diameter(&p);
                if vol <= 1e-14 * hd.powi(3) {
                    return Err(Error::MeshQuality(format!(
                        "degenerate sub-tetrahedron in cell {k}, face {f}, edge {e}"
                    )));
                }
                let surface = geometry::tri_area(p[1], p[2], p[3])
                    + geometry::tri_area(p[0], p[2], p[3])
                    + geometry::tri_area(p[0], p[1], p[3])
                    + geometry::tri_area(p[0], p[1], p[2]);
                // insphere diameter 2r with r = 3V / S
                let rho = 6.0 * vol / surface;
                h = h.max(hd);
                theta = theta.max(hd / rho);
                tets.push(SubTet { volume: vol, ..t });
            }
        }
    }
    let mut triangles = Vec::new();
    for &f in &fractures.faces {
        for &e in &mesh.faces[f].edges {
            let t = SubTriangle {
                face: f,
                edge: e,
                area: 0.0,
            };
            let p = t.points(mesh);
            let area = geometry::tri_area(p[0], p[1], p[2]);
            if area <= 1e-14 * diameter(&p).powi(2) {
                return Err(Error::MeshQuality(format!(
                    "degenerate fracture triangle on face {f}"
                )));
            }
            triangles.push(SubTriangle { area, ..t });
        }
    }
    Ok(Submeshes {
        tets,
        triangles,
        h,
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian_mesh, build_tetrahedral_mesh, tag_fracture_network};

    #[test]
    fn cube_subtets_are_one_24th() {
        let m = build_cartesian_mesh(2).unwrap();
        let net = tag_fracture_network(&m).unwrap();
        let s = build_submeshes(&m, &net).unwrap();
        assert_eq!(s.tets.len(), 8 * 24);
        for t in &s.tets {
            assert!((t.volume - m.cells[t.cell].volume / 24.0).abs() < 1e-15);
        }
        for t in &s.triangles {
            assert!((t.area - m.faces[t.face].area / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn partition_of_measure() {
        for m in [
            build_cartesian_mesh(4).unwrap(),
            build_tetrahedral_mesh(4).unwrap(),
        ] {
            let net = tag_fracture_network(&m).unwrap();
            let s = build_submeshes(&m, &net).unwrap();
            let mut cell_sum = vec![0.0; m.n_cells()];
            for t in &s.tets {
                cell_sum[t.cell] += t.volume;
            }
            let mut face_sum = vec![0.0; m.faces.len()];
            for t in &s.triangles {
                face_sum[t.face] += t.area;
            }
            for (k, c) in m.cells.iter().enumerate() {
                assert!((cell_sum[k] - c.volume).abs() <= 1e-12 * c.volume);
            }
            for &f in &net.faces {
                assert!((face_sum[f] - m.faces[f].area).abs() <= 1e-12 * m.faces[f].area);
            }
        }
    }

    #[test]
    fn mesh_size_matches_exhaustive_scan() {
        let m = build_cartesian_mesh(8).unwrap();
        let net = tag_fracture_network(&m).unwrap();
        let s = build_submeshes(&m, &net).unwrap();
        let mut brute: f64 = 0.0;
        for t in &s.tets {
            let p = t.points(&m);
            for i in 0..4 {
                for j in 0..4 {
                    brute = brute.max(geometry::dist(p[i], p[j]));
                }
            }
        }
        assert_eq!(s.h, brute);
        // the longest sub-tetrahedron edge is a cube edge
        assert!((s.h - 0.125).abs() < 1e-15);
        assert!(s.theta.is_finite() && s.theta > 0.0);
    }
}
