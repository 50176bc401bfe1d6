//! Hybrid Finite Volume scheme.
//!
//! Unknowns sit at cell centres and face centres, with one face unknown per
//! side on fracture faces, and at fracture face centres and fracture edge
//! midpoints. Gradients are the stabilized two-level cone gradients; the
//! function reconstructions are cellwise and facewise constants.

use crate::error::{Error, Result};
use crate::geometry::{self, Vec3};
use crate::mesh::{FractureNetwork, Mesh};
use crate::model::{subdomain_at, ProblemData, Region};
use crate::scheme::{
    Combo, Discretization, DofLayout, GradPiece, JumpPiece, LocalMatrix, MeshBundle, MfBlock,
    Piece, PieceValue, SchemeKind, Support,
};

#[derive(Debug, Clone)]
pub struct HfvLayout {
    pub dofs: DofLayout,
    /// Face dof per cell and local face (`K̄_σ`).
    pub cell_face_dof: Vec<Vec<usize>>,
    pub face_dof: Vec<Option<usize>>,
    pub edge_dof: Vec<Option<usize>>,
}

pub fn hfv_dof_layout(mesh: &Mesh, net: &FractureNetwork, h: f64) -> Result<HfvLayout> {
    for f in 0..mesh.faces.len() {
        let deviation = mesh.face_planarity_defect(f);
        if deviation > 1e-10 * h {
            return Err(Error::NonPlanarFace { face: f, deviation });
        }
    }
    let nc = mesh.n_cells();
    let mut anchor: Vec<Vec3> = mesh.cells.iter().map(|c| c.center).collect();
    let mut region: Vec<Region> = anchor
        .iter()
        .map(|&x| Region::Matrix(subdomain_at(x)))
        .collect();
    let mut dirichlet = vec![false; nc];

    let mut cell_face_dof: Vec<Vec<usize>> =
        mesh.cells.iter().map(|c| vec![0; c.faces.len()]).collect();
    for (f, face) in mesh.faces.iter().enumerate() {
        let shared = !net.is_fracture_face(f);
        let mut first = None;
        for &k in &face.cells {
            let d = match (shared, first) {
                (true, Some(d)) => d,
                _ => {
                    let d = anchor.len();
                    anchor.push(face.center);
                    region.push(Region::Matrix(subdomain_at(mesh.cells[k].center)));
                    dirichlet.push(face.is_boundary());
                    first = Some(d);
                    d
                }
            };
            let lf = mesh.cells[k].faces.iter().position(|&x| x == f).unwrap();
            cell_face_dof[k][lf] = d;
        }
    }
    let n_matrix = anchor.len();

    let mut face_dof = vec![None; mesh.faces.len()];
    for &f in &net.faces {
        face_dof[f] = Some(anchor.len());
        anchor.push(mesh.faces[f].center);
        region.push(Region::Fracture(net.face_fracture[f].unwrap()));
        dirichlet.push(false);
    }
    let mut edge_dof = vec![None; mesh.edges.len()];
    for &e in &net.edges {
        edge_dof[e] = Some(anchor.len());
        anchor.push(mesh.edge_midpoint(e));
        region.push(Region::Fracture(net.edge_fracture(mesh, e).unwrap()));
        dirichlet.push(mesh.edge_on_boundary[e]);
    }

    let face_dofs = net
        .faces
        .iter()
        .map(|&f| {
            let es = mesh.faces[f]
                .edges
                .iter()
                .map(|&e| edge_dof[e].unwrap())
                .collect();
            (face_dof[f].unwrap(), es)
        })
        .collect();
    let intersection_dofs = net
        .intersection_edges
        .iter()
        .map(|&e| edge_dof[e].unwrap())
        .collect();
    let n_dofs = anchor.len();
    Ok(HfvLayout {
        dofs: DofLayout {
            n_cells: nc,
            n_matrix,
            n_dofs,
            anchor,
            region,
            dirichlet,
            cell_dofs: cell_face_dof.clone(),
            face_dofs,
            intersection_dofs,
        },
        cell_face_dof,
        face_dof,
        edge_dof,
    })
}

/// One cone of the stabilized gradient: outward unit normal, measure of
/// the base, distance from the apex and vector from apex to base centre.
#[derive(Debug, Clone, Copy)]
pub struct Cone {
    pub normal: Vec3,
    pub base: f64,
    pub distance: f64,
    pub offset: Vec3,
}

/// Cone gradients as columns over local dofs `[centre, cone bases...]`,
/// together with the cone measures. `dim` is 3 for cells and 2 for faces.
pub fn cone_gradients(cones: &[Cone], measure: f64, dim: usize) -> Result<Vec<(Vec<Vec3>, f64)>> {
    let n = cones.len() + 1;
    let mut mean = vec![[0.0; 3]; n];
    for (i, c) in cones.iter().enumerate() {
        if c.distance <= 0.0 {
            return Err(Error::MeshQuality(format!(
                "cone {i} has non-positive height {}",
                c.distance
            )));
        }
        for a in 0..3 {
            let w = c.base * c.normal[a] / measure;
            mean[i + 1][a] += w;
            mean[0][a] -= w;
        }
    }
    let stab = (dim as f64).sqrt();
    Ok(cones
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut r = vec![0.0; n];
            r[0] -= 1.0;
            r[i + 1] += 1.0;
            for (j, rj) in r.iter_mut().enumerate() {
                *rj -= geometry::dot(mean[j], c.offset);
                *rj *= stab / c.distance;
            }
            let cols = (0..n)
                .map(|j| geometry::add(mean[j], geometry::scale(c.normal, r[j])))
                .collect();
            (cols, c.base * c.distance / dim as f64)
        })
        .collect())
}

fn combos(cols: &[Vec3], dofs: &[usize]) -> [Combo; 3] {
    let mut out: [Combo; 3] = Default::default();
    for (c, &d) in cols.iter().zip(dofs) {
        for a in 0..3 {
            if c[a] != 0.0 {
                out[a].push((d, c[a]));
            }
        }
    }
    out
}

pub fn discretize(bundle: &MeshBundle, data: &ProblemData) -> Result<Discretization> {
    let mesh = &bundle.mesh;
    let net = &bundle.fractures;
    let hl = hfv_dof_layout(mesh, net, bundle.submeshes.h)?;
    let layout = &hl.dofs;

    let mut cell_matrices = Vec::with_capacity(mesh.n_cells());
    let mut matrix_values = Vec::new();
    let mut matrix_grads = Vec::new();
    for (k, cell) in mesh.cells.iter().enumerate() {
        let sub = subdomain_at(cell.center);
        let lambda = data.k_matrix[sub - 1];
        let mut dofs = vec![k];
        dofs.extend(&hl.cell_face_dof[k]);
        let cones: Vec<Cone> = cell
            .faces
            .iter()
            .map(|&f| {
                let face = &mesh.faces[f];
                let normal = mesh.outward_normal(k, f);
                let offset = geometry::sub(face.center, cell.center);
                Cone {
                    normal,
                    base: face.area,
                    distance: geometry::dot(offset, normal),
                    offset,
                }
            })
            .collect();
        let grads = cone_gradients(&cones, cell.volume, 3)?;
        let mut a = LocalMatrix::zeros(dofs.clone());
        for (&f, (cols, vol)) in cell.faces.iter().zip(&grads) {
            a.add_gram(cols, lambda, *vol);
            let g = combos(cols, &dofs);
            let face = &mesh.faces[f];
            for &e in &face.edges {
                let [va, vb] = mesh.edges[e];
                let p = [
                    cell.center,
                    face.center,
                    mesh.vertices[va],
                    mesh.vertices[vb],
                ];
                matrix_grads.push(GradPiece {
                    support: Support::Tet(p),
                    owner: k,
                    region: Region::Matrix(sub),
                    grad: g.clone(),
                });
                matrix_values.push(Piece {
                    support: Support::Tet(p),
                    scale: 1.0,
                    region: Region::Matrix(sub),
                    value: PieceValue::Constant(vec![(k, 1.0)]),
                });
            }
        }
        cell_matrices.push(a);
    }

    let mut face_matrices = Vec::with_capacity(net.faces.len());
    let mut fracture_values = Vec::new();
    let mut fracture_grads = Vec::new();
    let mut mf_blocks = Vec::with_capacity(net.faces.len());
    let mut jumps = Vec::new();
    for (j, &f) in net.faces.iter().enumerate() {
        let face = &mesh.faces[f];
        let fr = net.face_fracture[f].unwrap();
        let region = Region::Fracture(fr);
        let (fdof, ref edofs) = layout.face_dofs[j];
        let mut dofs = vec![fdof];
        dofs.extend(edofs);
        let cones: Vec<Cone> = face
            .edges
            .iter()
            .map(|&e| {
                let xe = mesh.edge_midpoint(e);
                let [va, vb] = mesh.edges[e];
                let t = geometry::normalize(geometry::sub(mesh.vertices[vb], mesh.vertices[va]));
                let offset = geometry::sub(xe, face.center);
                let mut w = offset;
                w = geometry::sub(
                    w,
                    geometry::scale(face.normal, geometry::dot(w, face.normal)),
                );
                w = geometry::sub(w, geometry::scale(t, geometry::dot(w, t)));
                let normal = geometry::normalize(w);
                Cone {
                    normal,
                    base: mesh.edge_length(e),
                    distance: geometry::dot(offset, normal),
                    offset,
                }
            })
            .collect();
        let grads = cone_gradients(&cones, face.area, 2)?;
        let kf = data.width * data.k_fracture[fr.index()];
        let mut a = LocalMatrix::zeros(dofs.clone());
        let mut tris = Vec::new();
        for (&e, (cols, area)) in face.edges.iter().zip(&grads) {
            a.add_gram(cols, [1.0; 3], kf * area);
            let [va, vb] = mesh.edges[e];
            let p = [face.center, mesh.vertices[va], mesh.vertices[vb]];
            fracture_grads.push(GradPiece {
                support: Support::Tri(p),
                owner: f,
                region,
                grad: combos(cols, &dofs),
            });
            fracture_values.push(Piece {
                support: Support::Tri(p),
                scale: 1.0,
                region,
                value: PieceValue::Constant(vec![(fdof, 1.0)]),
            });
            tris.push(p);
        }
        face_matrices.push(a);

        let mut sides = Vec::new();
        let mut traces = Vec::new();
        for &k in &face.cells {
            let lf = mesh.cells[k].faces.iter().position(|&x| x == f).unwrap();
            let t = hl.cell_face_dof[k][lf];
            let side = net.side(mesh, k, f).unwrap();
            for p in &tris {
                jumps.push(JumpPiece {
                    face: f,
                    side,
                    support: Support::Tri(*p),
                    scale: 1.0,
                    trace: PieceValue::Constant(vec![(t, 1.0)]),
                    fracture: PieceValue::Constant(vec![(fdof, 1.0)]),
                });
            }
            sides.push(side);
            traces.push(vec![t]);
        }
        mf_blocks.push(MfBlock {
            face: f,
            sides,
            traces,
            fracture: vec![fdof],
            mass: vec![data.t_fracture[fr.index()] * face.area],
            xi: data.xi,
        });
    }

    let intersection = net
        .intersection_edges
        .iter()
        .map(|&e| {
            let [va, vb] = mesh.edges[e];
            Piece {
                support: Support::Segment([mesh.vertices[va], mesh.vertices[vb]]),
                scale: 1.0,
                region: Region::Fracture(net.edge_fracture(mesh, e).unwrap()),
                value: PieceValue::Constant(vec![(hl.edge_dof[e].unwrap(), 1.0)]),
            }
        })
        .collect();

    Ok(Discretization {
        scheme: SchemeKind::Hfv,
        layout: hl.dofs,
        cell_matrices,
        face_matrices,
        mf_blocks,
        matrix_values,
        fracture_values,
        matrix_grads,
        fracture_grads,
        jumps,
        intersection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::MeshFamily;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn bundle(family: MeshFamily, n: usize) -> MeshBundle {
        MeshBundle::new(family, n).unwrap()
    }

    #[test]
    fn two_cube_layout_counts() {
        let b = bundle(MeshFamily::Cartesian, 2);
        let l = hfv_dof_layout(&b.mesh, &b.fractures, b.submeshes.h)
            .unwrap()
            .dofs;
        assert_eq!(l.n_matrix, 52);
        assert_eq!(l.n_dofs - l.n_matrix, 8 + b.fractures.edges.len());
    }

    #[test]
    fn eight_cube_layout_counts() {
        let b = bundle(MeshFamily::Cartesian, 8);
        let l = hfv_dof_layout(&b.mesh, &b.fractures, b.submeshes.h)
            .unwrap()
            .dofs;
        assert_eq!(l.n_dofs, 2776);
        assert_eq!(l.n_eliminated(), 2264);
    }

    #[test]
    fn mean_gradient_geometric_identity() {
        for family in [MeshFamily::Cartesian, MeshFamily::Tetrahedral] {
            let b = bundle(family, 2);
            for (k, cell) in b.mesh.cells.iter().enumerate() {
                let mut m = [[0.0; 3]; 3];
                for &f in &cell.faces {
                    let face = &b.mesh.faces[f];
                    let n = b.mesh.outward_normal(k, f);
                    let d = geometry::sub(face.center, cell.center);
                    for r in 0..3 {
                        for c in 0..3 {
                            m[r][c] += face.area * n[r] * d[c];
                        }
                    }
                }
                for r in 0..3 {
                    for c in 0..3 {
                        let expect = if r == c { cell.volume } else { 0.0 };
                        assert!((m[r][c] - expect).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn affine_data_has_zero_stabilization() {
        let b = bundle(MeshFamily::Tetrahedral, 2);
        let d = discretize(&b, &ProblemData::isotropic(1.0)).unwrap();
        let grad = [0.3, -1.2, 0.7];
        let u: Vec<f64> = d
            .layout
            .anchor
            .iter()
            .map(|&x| 0.4 + geometry::dot(grad, x))
            .collect();
        for piece in &d.matrix_grads {
            let g = piece.eval(&u);
            for a in 0..3 {
                assert!((g[a] - grad[a]).abs() < 1e-13);
            }
        }
        for (piece, _) in d.fracture_grads.iter().zip(0..) {
            let g = piece.eval(&u);
            let Region::Fracture(fr) = piece.region else {
                unreachable!()
            };
            let mut expect = grad;
            expect[fr.normal_axis()] = 0.0;
            for a in 0..3 {
                assert!((g[a] - expect[a]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cell_matrix_matches_cone_summation() {
        let b = bundle(MeshFamily::Cartesian, 2);
        let data = ProblemData::isotropic(1.0);
        let d = discretize(&b, &data).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let u: Vec<f64> = (0..d.layout.n_dofs)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        for (k, a) in d.cell_matrices.iter().enumerate() {
            let cell = &b.mesh.cells[k];
            let lam = data.k_matrix[subdomain_at(cell.center) - 1][0];
            let uk = u[k];
            let mut g = [0.0; 3];
            for (lf, &f) in cell.faces.iter().enumerate() {
                let n = b.mesh.outward_normal(k, f);
                let us = u[a.dofs[1 + lf]];
                for i in 0..3 {
                    g[i] += b.mesh.faces[f].area * (us - uk) * n[i] / cell.volume;
                }
            }
            let mut energy = 0.0;
            for (lf, &f) in cell.faces.iter().enumerate() {
                let face = &b.mesh.faces[f];
                let n = b.mesh.outward_normal(k, f);
                let off = geometry::sub(face.center, cell.center);
                let dist = geometry::dot(off, n);
                let r = 3f64.sqrt() / dist * (u[a.dofs[1 + lf]] - uk - geometry::dot(g, off));
                let gc = geometry::add(g, geometry::scale(n, r));
                energy += lam * face.area * dist / 3.0 * geometry::dot(gc, gc);
            }
            let q = a.bilinear(&u, &u);
            assert!((q - energy).abs() < 1e-12 * energy.max(1.0));
        }
    }

    #[test]
    fn cone_volumes_fill_the_cell() {
        let b = bundle(MeshFamily::Tetrahedral, 2);
        let d = discretize(&b, &ProblemData::isotropic(1.0)).unwrap();
        let total: f64 = d.matrix_values.iter().map(|p| p.support.measure()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_faces_and_edges_are_dirichlet() {
        let b = bundle(MeshFamily::Cartesian, 4);
        let l = hfv_dof_layout(&b.mesh, &b.fractures, b.submeshes.h)
            .unwrap()
            .dofs;
        let boundary_faces = b.mesh.faces.iter().filter(|f| f.is_boundary()).count();
        let boundary_edges = b
            .fractures
            .edges
            .iter()
            .filter(|&&e| b.mesh.edge_on_boundary[e])
            .count();
        assert_eq!(l.n_dirichlet(), boundary_faces + boundary_edges);
    }
}
