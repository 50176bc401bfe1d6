//! Vertex Approximate Gradient scheme.
//!
//! Matrix unknowns live at cell centres, at vertex classes and, on each side
//! of a fracture face, at the face centre. Gradients are those of the P1
//! interpolant on the tetrahedral submesh; a non-fracture face centre takes
//! the `beta`-weighted mean of its vertex values.

use crate::geometry::{self, tet_barycentric_gradients, tri_barycentric_gradients, Vec3};
use crate::mesh::{FractureNetwork, Mesh, VertexClasses};
use crate::model::{subdomain_at, ProblemData, Region};
use crate::scheme::{
    Combo, Discretization, DofLayout, GradPiece, JumpPiece, LocalMatrix, MeshBundle, MfBlock,
    Piece, PieceValue, SchemeKind, Support,
};

/// Matrix-fracture coupling and source lumping variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// P1 mass products.
    Fe,
    /// Thirds partition of every fracture triangle (diagonal coupling).
    Cv,
}

/// Fraction of a cell (or fracture face) volume lumped onto its node dofs.
pub const CV_NODE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct VagLayout {
    pub dofs: DofLayout,
    /// Class dof per cell and local vertex (aligned with `Cell::vertices`).
    pub class_dof: Vec<Vec<usize>>,
    /// Face-centre dof per cell and local face, for fracture faces.
    pub ksigma: Vec<Vec<Option<usize>>>,
    /// Fracture dof of each mesh face.
    pub face_dof: Vec<Option<usize>>,
    /// Fracture dof of each mesh vertex.
    pub vertex_dof: Vec<Option<usize>>,
}

pub fn vag_dof_layout(mesh: &Mesh, net: &FractureNetwork, classes: &VertexClasses) -> VagLayout {
    let nc = mesh.n_cells();
    let mut anchor: Vec<Vec3> = mesh.cells.iter().map(|c| c.center).collect();
    let mut region: Vec<Region> = anchor
        .iter()
        .map(|&x| Region::Matrix(subdomain_at(x)))
        .collect();
    let mut dirichlet = vec![false; nc];

    let mut ksigma: Vec<Vec<Option<usize>>> = mesh
        .cells
        .iter()
        .map(|c| vec![None; c.faces.len()])
        .collect();
    for &f in &net.faces {
        for &k in &mesh.faces[f].cells {
            let lf = mesh.cells[k].faces.iter().position(|&x| x == f).unwrap();
            ksigma[k][lf] = Some(anchor.len());
            anchor.push(mesh.faces[f].center);
            region.push(Region::Matrix(subdomain_at(mesh.cells[k].center)));
            dirichlet.push(false);
        }
    }

    let mut class_base = vec![0; mesh.vertices.len()];
    for v in 0..mesh.vertices.len() {
        class_base[v] = anchor.len();
        for members in classes.members(mesh, v) {
            anchor.push(mesh.vertices[v]);
            region.push(Region::Matrix(subdomain_at(mesh.cells[members[0]].center)));
            dirichlet.push(mesh.vertex_on_boundary[v]);
        }
    }
    let class_dof: Vec<Vec<usize>> = mesh
        .cells
        .iter()
        .enumerate()
        .map(|(k, c)| {
            c.vertices
                .iter()
                .enumerate()
                .map(|(i, &v)| class_base[v] + classes.cell_class[k][i])
                .collect()
        })
        .collect();
    let n_matrix = anchor.len();

    let mut face_dof = vec![None; mesh.faces.len()];
    for &f in &net.faces {
        face_dof[f] = Some(anchor.len());
        anchor.push(mesh.faces[f].center);
        region.push(Region::Fracture(net.face_fracture[f].unwrap()));
        dirichlet.push(false);
    }
    let mut vertex_dof = vec![None; mesh.vertices.len()];
    for &v in &net.vertices {
        vertex_dof[v] = Some(anchor.len());
        anchor.push(mesh.vertices[v]);
        region.push(Region::Fracture(net.vertex_fracture(mesh, v).unwrap()));
        dirichlet.push(mesh.vertex_on_boundary[v]);
    }

    let cell_dofs = (0..nc)
        .map(|k| {
            let mut d = class_dof[k].clone();
            d.extend(ksigma[k].iter().flatten());
            d
        })
        .collect();
    let face_dofs = net
        .faces
        .iter()
        .map(|&f| {
            let vs = mesh.faces[f]
                .vertices
                .iter()
                .map(|&v| vertex_dof[v].unwrap())
                .collect();
            (face_dof[f].unwrap(), vs)
        })
        .collect();
    let intersection_dofs = net
        .intersection_vertices
        .iter()
        .map(|&v| vertex_dof[v].unwrap())
        .collect();

    let n_dofs = anchor.len();
    VagLayout {
        dofs: DofLayout {
            n_cells: nc,
            n_matrix,
            n_dofs,
            anchor,
            region,
            dirichlet,
            cell_dofs,
            face_dofs,
            intersection_dofs,
        },
        class_dof,
        ksigma,
        face_dof,
        vertex_dof,
    }
}

/// `int_T t phi_i phi_j` over a triangle for the three corner basis
/// functions (P1) or their thirds-partition indicators (CV).
pub fn triangle_mass(area: f64, t: f64, coupling: Coupling) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = match (coupling, i == j) {
                (Coupling::Fe, true) => t * area / 6.0,
                (Coupling::Fe, false) => t * area / 12.0,
                (Coupling::Cv, true) => t * area / 3.0,
                (Coupling::Cv, false) => 0.0,
            };
        }
    }
    m
}

/// The three equal-area regions of a triangle cut by its medians, each as
/// two triangles, in corner order.
pub fn thirds(p: [Vec3; 3]) -> [[[Vec3; 3]; 2]; 3] {
    let g = geometry::mean(p);
    let mid = |i: usize, j: usize| geometry::scale(geometry::add(p[i], p[j]), 0.5);
    let (m01, m02, m12) = (mid(0, 1), mid(0, 2), mid(1, 2));
    [
        [[p[0], m01, g], [p[0], g, m02]],
        [[p[1], m12, g], [p[1], g, m01]],
        [[p[2], m02, g], [p[2], g, m12]],
    ]
}

fn to_global(local: &[(usize, f64)], dofs: &[usize]) -> Combo {
    local.iter().map(|&(i, w)| (dofs[i], w)).collect()
}

fn gradient_combos(
    nodes: &[Vec<(usize, f64)>],
    grads: &[Vec3],
    dofs: &[usize],
) -> ([Combo; 3], Vec<Vec3>) {
    let mut cols = vec![[0.0; 3]; dofs.len()];
    for (node, g) in nodes.iter().zip(grads) {
        for &(i, w) in node {
            for a in 0..3 {
                cols[i][a] += w * g[a];
            }
        }
    }
    let mut combos: [Combo; 3] = Default::default();
    for (i, c) in cols.iter().enumerate() {
        for a in 0..3 {
            if c[a] != 0.0 {
                combos[a].push((dofs[i], c[a]));
            }
        }
    }
    (combos, cols)
}

pub fn discretize(bundle: &MeshBundle, data: &ProblemData, coupling: Coupling) -> Discretization {
    let mesh = &bundle.mesh;
    let net = &bundle.fractures;
    let vl = vag_dof_layout(mesh, net, &bundle.classes);
    let layout = &vl.dofs;

    let mut cell_matrices = Vec::with_capacity(mesh.n_cells());
    let mut matrix_values = Vec::new();
    let mut matrix_grads = Vec::new();
    for (k, cell) in mesh.cells.iter().enumerate() {
        let sub = subdomain_at(cell.center);
        let lambda = data.k_matrix[sub - 1];
        let mut dofs = vec![k];
        dofs.extend(&layout.cell_dofs[k]);
        let nv = cell.vertices.len();
        let vpos = |v: usize| 1 + cell.vertices.iter().position(|&x| x == v).unwrap();
        let mut fracture_slot = vec![None; cell.faces.len()];
        let mut next = 1 + nv;
        for (lf, ks) in vl.ksigma[k].iter().enumerate() {
            if ks.is_some() {
                fracture_slot[lf] = Some(next);
                next += 1;
            }
        }
        let mut a = LocalMatrix::zeros(dofs.clone());
        let mut tets = Vec::new();
        for (lf, &f) in cell.faces.iter().enumerate() {
            let face = &mesh.faces[f];
            let centre: Vec<(usize, f64)> = match fracture_slot[lf] {
                Some(i) => vec![(i, 1.0)],
                None => face
                    .vertices
                    .iter()
                    .zip(&face.beta)
                    .map(|(&v, &b)| (vpos(v), b))
                    .collect(),
            };
            for &e in &face.edges {
                let [va, vb] = mesh.edges[e];
                let p = [
                    cell.center,
                    face.center,
                    mesh.vertices[va],
                    mesh.vertices[vb],
                ];
                let nodes = vec![
                    vec![(0, 1.0)],
                    centre.clone(),
                    vec![(vpos(va), 1.0)],
                    vec![(vpos(vb), 1.0)],
                ];
                tets.push((p, nodes));
            }
        }
        for (p, nodes) in &tets {
            let vol = geometry::tet_signed_volume(p[0], p[1], p[2], p[3]).abs();
            let g = tet_barycentric_gradients(*p).expect("submesh checked for degeneracy");
            let (combos, cols) = gradient_combos(nodes, &g, &dofs);
            a.add_gram(&cols, lambda, vol);
            matrix_grads.push(GradPiece {
                support: Support::Tet(*p),
                owner: k,
                region: Region::Matrix(sub),
                grad: combos,
            });
            if coupling == Coupling::Fe {
                matrix_values.push(Piece {
                    support: Support::Tet(*p),
                    scale: 1.0,
                    region: Region::Matrix(sub),
                    value: PieceValue::Linear(nodes.iter().map(|n| to_global(n, &dofs)).collect()),
                });
            }
        }
        if coupling == Coupling::Cv {
            let nd = layout.cell_dofs[k].len();
            let omega = CV_NODE_FRACTION * cell.volume / nd as f64;
            let mut lumped = 0.0;
            for &d in &layout.cell_dofs[k] {
                if !layout.dirichlet[d] {
                    lumped += omega;
                    matrix_values.push(Piece {
                        support: Support::Point(layout.anchor[d]),
                        scale: omega,
                        region: Region::Matrix(sub),
                        value: PieceValue::Constant(vec![(d, 1.0)]),
                    });
                }
            }
            let frac = (cell.volume - lumped) / cell.volume;
            for (p, _) in &tets {
                matrix_values.push(Piece {
                    support: Support::Tet(*p),
                    scale: frac,
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
        let kf = data.width * data.k_fracture[fr.index()];
        let tf = data.t_fracture[fr.index()];
        let (fdof, ref vdofs) = layout.face_dofs[j];
        let mut dofs = vec![fdof];
        dofs.extend(vdofs);
        let n = dofs.len();
        let vpos = |v: usize| 1 + face.vertices.iter().position(|&x| x == v).unwrap();
        let mut a = LocalMatrix::zeros(dofs.clone());
        let mut mass = vec![0.0; n * n];
        let mut tris = Vec::new();
        for &e in &face.edges {
            let [va, vb] = mesh.edges[e];
            let p = [face.center, mesh.vertices[va], mesh.vertices[vb]];
            let idx = [0, vpos(va), vpos(vb)];
            let area = geometry::tri_area(p[0], p[1], p[2]);
            let g = tri_barycentric_gradients(p).expect("submesh checked for degeneracy");
            let nodes: Vec<Vec<(usize, f64)>> = idx.iter().map(|&i| vec![(i, 1.0)]).collect();
            let (combos, cols) = gradient_combos(&nodes, &g, &dofs);
            a.add_gram(&cols, [1.0; 3], kf * area);
            fracture_grads.push(GradPiece {
                support: Support::Tri(p),
                owner: f,
                region,
                grad: combos,
            });
            let m = triangle_mass(area, tf, coupling);
            for r in 0..3 {
                for c in 0..3 {
                    mass[idx[r] * n + idx[c]] += m[r][c];
                }
            }
            if coupling == Coupling::Fe {
                fracture_values.push(Piece {
                    support: Support::Tri(p),
                    scale: 1.0,
                    region,
                    value: PieceValue::Linear(idx.iter().map(|&i| vec![(dofs[i], 1.0)]).collect()),
                });
            }
            tris.push((p, idx, area));
        }
        if coupling == Coupling::Cv {
            let omega = CV_NODE_FRACTION * face.area / vdofs.len() as f64;
            let mut lumped = 0.0;
            for &d in vdofs {
                if !layout.dirichlet[d] {
                    lumped += omega;
                    fracture_values.push(Piece {
                        support: Support::Point(layout.anchor[d]),
                        scale: omega,
                        region,
                        value: PieceValue::Constant(vec![(d, 1.0)]),
                    });
                }
            }
            let frac = (face.area - lumped) / face.area;
            for (p, _, _) in &tris {
                fracture_values.push(Piece {
                    support: Support::Tri(*p),
                    scale: frac,
                    region,
                    value: PieceValue::Constant(vec![(fdof, 1.0)]),
                });
            }
        }
        face_matrices.push(a);

        let mut sides = Vec::new();
        let mut traces = Vec::new();
        for &k in &face.cells {
            let cell = &mesh.cells[k];
            let lf = cell.faces.iter().position(|&x| x == f).unwrap();
            let mut t = vec![vl.ksigma[k][lf].unwrap()];
            for &v in &face.vertices {
                let lv = cell.vertices.iter().position(|&x| x == v).unwrap();
                t.push(vl.class_dof[k][lv]);
            }
            let side = net.side(mesh, k, f).unwrap();
            for (p, idx, _) in &tris {
                let trace: Vec<usize> = idx.iter().map(|&i| t[i]).collect();
                let frac: Vec<usize> = idx.iter().map(|&i| dofs[i]).collect();
                match coupling {
                    Coupling::Fe => jumps.push(JumpPiece {
                        face: f,
                        side,
                        support: Support::Tri(*p),
                        scale: 1.0,
                        trace: PieceValue::Linear(trace.iter().map(|&d| vec![(d, 1.0)]).collect()),
                        fracture: PieceValue::Linear(
                            frac.iter().map(|&d| vec![(d, 1.0)]).collect(),
                        ),
                    }),
                    Coupling::Cv => {
                        for (corner, parts) in thirds(*p).iter().enumerate() {
                            for q in parts {
                                jumps.push(JumpPiece {
                                    face: f,
                                    side,
                                    support: Support::Tri(*q),
                                    scale: 1.0,
                                    trace: PieceValue::Constant(vec![(trace[corner], 1.0)]),
                                    fracture: PieceValue::Constant(vec![(frac[corner], 1.0)]),
                                });
                            }
                        }
                    }
                }
            }
            sides.push(side);
            traces.push(t);
        }
        mf_blocks.push(MfBlock {
            face: f,
            sides,
            traces,
            fracture: dofs,
            mass,
            xi: data.xi,
        });
    }

    let mut intersection = Vec::new();
    for &e in &net.intersection_edges {
        let [va, vb] = mesh.edges[e];
        let (pa, pb) = (mesh.vertices[va], mesh.vertices[vb]);
        let (da, db) = (vl.vertex_dof[va].unwrap(), vl.vertex_dof[vb].unwrap());
        let region = Region::Fracture(net.edge_fracture(mesh, e).unwrap());
        match coupling {
            Coupling::Fe => intersection.push(Piece {
                support: Support::Segment([pa, pb]),
                scale: 1.0,
                region,
                value: PieceValue::Linear(vec![vec![(da, 1.0)], vec![(db, 1.0)]]),
            }),
            Coupling::Cv => {
                let m = mesh.edge_midpoint(e);
                for (seg, d) in [([pa, m], da), ([m, pb], db)] {
                    intersection.push(Piece {
                        support: Support::Segment(seg),
                        scale: 1.0,
                        region,
                        value: PieceValue::Constant(vec![(d, 1.0)]),
                    });
                }
            }
        }
    }

    Discretization {
        scheme: match coupling {
            Coupling::Fe => SchemeKind::VagFe,
            Coupling::Cv => SchemeKind::VagCv,
        },
        layout: vl.dofs,
        cell_matrices,
        face_matrices,
        mf_blocks,
        matrix_values,
        fracture_values,
        matrix_grads,
        fracture_grads,
        jumps,
        intersection,
    }
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
        let l = vag_dof_layout(&b.mesh, &b.fractures, &b.classes).dofs;
        assert_eq!(l.n_matrix, 72);
        assert_eq!(l.n_dofs - l.n_matrix, 23);
    }

    #[test]
    fn eight_cube_layout_counts() {
        let b = bundle(MeshFamily::Cartesian, 8);
        let l = vag_dof_layout(&b.mesh, &b.fractures, &b.classes).dofs;
        assert_eq!(l.n_dofs, 1949);
        assert_eq!(l.n_eliminated(), 1437);
    }

    #[test]
    fn triangle_mass_closed_forms() {
        let fe = triangle_mass(0.3, 1.0, Coupling::Fe);
        let cv = triangle_mass(0.3, 1.0, Coupling::Cv);
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert!((fe[i][j] - 0.05).abs() < 1e-16);
                    assert!((cv[i][j] - 0.1).abs() < 1e-16);
                } else {
                    assert!((fe[i][j] - 0.025).abs() < 1e-16);
                    assert_eq!(cv[i][j], 0.0);
                }
            }
        }
        for m in [fe, cv] {
            for row in m {
                assert!((row.iter().sum::<f64>() - 0.1).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn thirds_have_equal_area() {
        let p = [[0.0, 0.0, 0.0], [1.0, 0.2, 0.0], [0.3, 0.8, 0.1]];
        let a = geometry::tri_area(p[0], p[1], p[2]);
        for parts in thirds(p) {
            let s: f64 = parts
                .iter()
                .map(|q| geometry::tri_area(q[0], q[1], q[2]))
                .sum();
            assert!((s - a / 3.0).abs() < 1e-15);
        }
    }

    /// Gradient of the affine function through four nodal values, computed
    /// by solving the 3x3 system of edge differences.
    fn oracle_gradient(p: &[Vec3; 4], vals: [f64; 4]) -> Vec3 {
        let mut m = [[0.0; 4]; 3];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] = p[r + 1][c] - p[0][c];
            }
            m[r][3] = vals[r + 1] - vals[0];
        }
        for c in 0..3 {
            let piv = (c..3)
                .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
                .unwrap();
            m.swap(c, piv);
            for r in 0..3 {
                if r != c {
                    let f = m[r][c] / m[c][c];
                    for k in 0..4 {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
        [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]]
    }

    #[test]
    fn cell_matrix_matches_per_tet_quadrature() {
        let b = bundle(MeshFamily::Cartesian, 2);
        let data = ProblemData::isotropic(1.0);
        let d = discretize(&b, &data, Coupling::Fe);
        let vl = vag_dof_layout(&b.mesh, &b.fractures, &b.classes);
        let mut rng = StdRng::seed_from_u64(7);
        let u: Vec<f64> = (0..d.layout.n_dofs)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        for (k, a) in d.cell_matrices.iter().enumerate() {
            let cell = &b.mesh.cells[k];
            let lam = data.k_matrix[subdomain_at(cell.center) - 1];
            // nodal values of the P1 interpolant on every sub-tetrahedron
            let val = |v: usize| {
                let lv = cell.vertices.iter().position(|&x| x == v).unwrap();
                u[a.dofs[1 + lv]]
            };
            let mut energy = 0.0;
            for &f in &cell.faces {
                let face = &b.mesh.faces[f];
                let lf = cell.faces.iter().position(|&x| x == f).unwrap();
                let uc = if let Some(ks) = vl.ksigma[k][lf] {
                    u[ks]
                } else {
                    face.vertices
                        .iter()
                        .zip(&face.beta)
                        .map(|(&v, &w)| w * val(v))
                        .sum()
                };
                for &e in &face.edges {
                    let [va, vb] = b.mesh.edges[e];
                    let p = [
                        cell.center,
                        face.center,
                        b.mesh.vertices[va],
                        b.mesh.vertices[vb],
                    ];
                    let g = oracle_gradient(&p, [u[k], uc, val(va), val(vb)]);
                    let vol = geometry::tet_signed_volume(p[0], p[1], p[2], p[3]).abs();
                    energy +=
                        vol * (lam[0] * g[0] * g[0] + lam[1] * g[1] * g[1] + lam[2] * g[2] * g[2]);
                }
            }
            let q = a.bilinear(&u, &u);
            assert!(
                (q - energy).abs() <= 1e-12 * energy.max(1.0),
                "cell {k}: {q} vs {energy}"
            );
        }
    }

    #[test]
    fn local_matrices_have_constants_in_kernel() {
        let b = bundle(MeshFamily::Tetrahedral, 2);
        let d = discretize(&b, &ProblemData::anisotropic(1.0), Coupling::Fe);
        for m in d.cell_matrices.iter().chain(&d.face_matrices) {
            let n = m.n();
            let scale = (0..n).map(|i| m.get(i, i)).fold(0.0, f64::max);
            for i in 0..n {
                let s: f64 = (0..n).map(|j| m.get(i, j)).sum();
                assert!(s.abs() <= 1e-13 * scale);
            }
        }
    }

    #[test]
    fn cv_coupling_only_links_colocated_dofs() {
        let b = bundle(MeshFamily::Cartesian, 4);
        let d = discretize(&b, &ProblemData::isotropic(0.75), Coupling::Cv);
        for blk in &d.mf_blocks {
            let m = blk.local_matrix();
            for i in 0..m.n() {
                for j in 0..m.n() {
                    if m.get(i, j) != 0.0 {
                        let (a, c) = (m.dofs[i], m.dofs[j]);
                        assert_eq!(d.layout.anchor[a], d.layout.anchor[c]);
                    }
                }
            }
        }
    }

    #[test]
    fn mf_mass_sums_to_transmissibility_times_area() {
        let b = bundle(MeshFamily::Tetrahedral, 2);
        let data = ProblemData::isotropic(1.0);
        for c in [Coupling::Fe, Coupling::Cv] {
            let d = discretize(&b, &data, c);
            for blk in &d.mf_blocks {
                let fr = b.fractures.face_fracture[blk.face].unwrap();
                let total: f64 = blk.mass.iter().sum();
                let expect = data.t_fracture[fr.index()] * b.mesh.faces[blk.face].area;
                assert!((total - expect).abs() < 1e-14 * expect.max(1.0));
            }
        }
    }

    #[test]
    fn affine_data_is_reproduced_exactly() {
        for family in [MeshFamily::Cartesian, MeshFamily::Tetrahedral] {
            let b = bundle(family, 2);
            let d = discretize(&b, &ProblemData::anisotropic(1.0), Coupling::Fe);
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
            for piece in &d.fracture_grads {
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
    }
}
