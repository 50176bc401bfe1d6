//! Scheme-independent description of a discretization: dof layout, local
//! matrices whose sum is the global bilinear form, matrix-fracture coupling
//! blocks and the reconstruction operators used for sources and errors.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{dist, tet_signed_volume, tri_area, Vec3};
use crate::mesh::{
    build_submeshes, compute_vertex_classes, tag_fracture_network, FractureNetwork, Mesh,
    MeshFamily, Side, Submeshes, VertexClasses,
};
use crate::model::{AnalyticCase, ProblemData, Region};
use crate::quadrature::{self, map};
use crate::{hfv, vag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "vag-fe")]
    VagFe,
    #[serde(rename = "vag-cv")]
    VagCv,
    #[serde(rename = "hfv")]
    Hfv,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::VagFe => "vag-fe",
            SchemeKind::VagCv => "vag-cv",
            SchemeKind::Hfv => "hfv",
        }
    }

    pub fn is_vag(self) -> bool {
        !matches!(self, SchemeKind::Hfv)
    }
}

/// A mesh with everything derived from it that the schemes need.
#[derive(Debug, Clone)]
pub struct MeshBundle {
    pub family: MeshFamily,
    pub mesh: Mesh,
    pub fractures: FractureNetwork,
    pub classes: VertexClasses,
    pub submeshes: Submeshes,
}

impl MeshBundle {
    pub fn new(family: MeshFamily, n: usize) -> Result<MeshBundle> {
        let mesh = family.build(n)?;
        let fractures = tag_fracture_network(&mesh)?;
        let classes = compute_vertex_classes(&mesh, &fractures);
        let submeshes = build_submeshes(&mesh, &fractures)?;
        Ok(MeshBundle {
            family,
            mesh,
            fractures,
            classes,
            submeshes,
        })
    }
}

/// Sparse linear combination of dofs.
pub type Combo = Vec<(usize, f64)>;

pub fn eval_combo(c: &Combo, u: &[f64]) -> f64 {
    c.iter().map(|&(i, w)| w * u[i]).sum()
}

#[derive(Debug, Clone)]
pub struct DofLayout {
    pub n_cells: usize,
    /// Matrix dofs are `0..n_matrix`, cells first; fracture dofs follow.
    pub n_matrix: usize,
    pub n_dofs: usize,
    pub anchor: Vec<Vec3>,
    /// Where the exact solution is sampled for each dof.
    pub region: Vec<Region>,
    pub dirichlet: Vec<bool>,
    /// `dof_K` per cell.
    pub cell_dofs: Vec<Vec<usize>>,
    /// Per fracture face (in `FractureNetwork::faces` order): its own dof
    /// and `dof_sigma`.
    pub face_dofs: Vec<(usize, Vec<usize>)>,
    /// Fracture dofs located on the intersection line.
    pub intersection_dofs: Vec<usize>,
}

impl DofLayout {
    pub fn n_dirichlet(&self) -> usize {
        self.dirichlet.iter().filter(|&&d| d).count()
    }

    /// Size of the system left after eliminating the cell unknowns.
    pub fn n_eliminated(&self) -> usize {
        self.n_dofs - self.n_cells
    }

    pub fn is_fracture_dof(&self, i: usize) -> bool {
        i >= self.n_matrix
    }

    /// Exact solution sampled at every dof anchor.
    pub fn interpolate(&self, case: &AnalyticCase) -> Vec<f64> {
        (0..self.n_dofs)
            .map(|i| sample(case, self.region[i], self.anchor[i]))
            .collect()
    }
}

pub fn sample(case: &AnalyticCase, region: Region, x: Vec3) -> f64 {
    match region {
        Region::Matrix(i) => case.matrix_value(i, x),
        Region::Fracture(f) => case.fracture_value(f, x),
    }
}

/// Dense symmetric matrix over a list of global dofs.
#[derive(Debug, Clone)]
pub struct LocalMatrix {
    pub dofs: Vec<usize>,
    pub a: Vec<f64>,
}

impl LocalMatrix {
    pub fn zeros(dofs: Vec<usize>) -> LocalMatrix {
        let n = dofs.len();
        LocalMatrix {
            dofs,
            a: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.dofs.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n() + j]
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let n = self.n();
        self.a[i * n + j] += v;
    }

    /// Adds `w * (Lambda G_i) . G_j` for rows `G` of a gradient given
    /// column-wise over local indices.
    pub fn add_gram(&mut self, grad: &[[f64; 3]], lambda: [f64; 3], w: f64) {
        let n = self.n();
        for i in 0..n {
            let gi = grad[i];
            if gi == [0.0; 3] {
                continue;
            }
            for j in 0..n {
                let gj = grad[j];
                let v = lambda[0] * gi[0] * gj[0]
                    + lambda[1] * gi[1] * gj[1]
                    + lambda[2] * gi[2] * gj[2];
                self.a[i * n + j] += w * v;
            }
        }
    }

    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        for i in 0..n {
            let vi = v[self.dofs[i]];
            for j in 0..n {
                s += vi * self.a[i * n + j] * u[self.dofs[j]];
            }
        }
        s
    }

    /// Fluxes `F_nu = sum_nu' A[nu, nu'] (u_0 - u_nu')` from the first local
    /// dof (cell or face) to each of the others.
    pub fn fluxes(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n();
        let u0 = u[self.dofs[0]];
        (1..n)
            .map(|i| {
                (1..n)
                    .map(|j| self.get(i, j) * (u0 - u[self.dofs[j]]))
                    .sum()
            })
            .collect()
    }
}

/// Matrix-fracture coupling on one fracture face. Each node is a point of
/// the face carrying one trace dof per side and one fracture dof.
#[derive(Debug, Clone)]
pub struct MfBlock {
    pub face: usize,
    pub sides: Vec<Side>,
    /// Trace dofs per side, one per node.
    pub traces: Vec<Vec<usize>>,
    pub fracture: Vec<usize>,
    /// `int_sigma T_f phi_i phi_j`, row-major over nodes.
    pub mass: Vec<f64>,
    pub xi: f64,
}

impl MfBlock {
    pub fn n_nodes(&self) -> usize {
        self.fracture.len()
    }

    fn mass(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.n_nodes() + j]
    }

    /// Local matrix over `[side 0 traces, side 1 traces, fracture]`.
    pub fn local_matrix(&self) -> LocalMatrix {
        let n = self.n_nodes();
        let ns = self.traces.len();
        let mut dofs: Vec<usize> = self.traces.iter().flatten().copied().collect();
        dofs.extend(&self.fracture);
        let mut m = LocalMatrix::zeros(dofs);
        let f = ns * n;
        if ns == 1 {
            for i in 0..n {
                for j in 0..n {
                    let w = self.mass(i, j);
                    m.add(i, j, w);
                    m.add(i, f + j, -w);
                    m.add(f + i, j, -w);
                    m.add(f + i, f + j, w);
                }
            }
            return m;
        }
        let xi = self.xi;
        let c = 1.0 / (2.0 * xi - 1.0);
        for i in 0..n {
            for j in 0..n {
                let w = c * self.mass(i, j);
                for a in 0..2 {
                    let b = 1 - a;
                    m.add(a * n + i, a * n + j, xi * w);
                    m.add(a * n + i, b * n + j, (1.0 - xi) * w);
                    m.add(a * n + i, f + j, -w);
                    m.add(f + i, a * n + j, -w);
                }
                m.add(f + i, f + j, 2.0 * w);
            }
        }
        m
    }

    /// `F_{nu_m nu_f}` per side and node, positive from matrix to fracture.
    pub fn fluxes(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n_nodes();
        let ns = self.traces.len();
        let (xi, c) = if ns == 1 {
            (1.0, 1.0)
        } else {
            (self.xi, 1.0 / (2.0 * self.xi - 1.0))
        };
        (0..ns)
            .map(|a| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let ua = u[self.traces[a][j]];
                                let ub = if ns == 2 {
                                    u[self.traces[1 - a][j]]
                                } else {
                                    ua
                                };
                                c * self.mass(i, j)
                                    * (xi * ua + (1.0 - xi) * ub - u[self.fracture[j]])
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Domain of a reconstruction piece.
#[derive(Debug, Clone, Copy)]
pub enum Support {
    Tet([Vec3; 4]),
    Tri([Vec3; 3]),
    Segment([Vec3; 2]),
    /// A lumped region of unspecified shape, represented by one point.
    Point(Vec3),
}

/// A quadrature node: position, barycentric coordinates on the support
/// and weight including the measure.
pub struct QuadPoint {
    pub x: Vec3,
    pub lambda: [f64; 4],
    pub w: f64,
}

impl Support {
    pub fn measure(&self) -> f64 {
        match self {
            Support::Tet(p) => tet_signed_volume(p[0], p[1], p[2], p[3]).abs(),
            Support::Tri(p) => tri_area(p[0], p[1], p[2]),
            Support::Segment(p) => dist(p[0], p[1]),
            Support::Point(_) => 1.0,
        }
    }

    /// Quadrature on the support, optionally on `levels` uniform refinements
    /// (barycentric coordinates stay relative to the unrefined support).
    pub fn quadrature(&self, levels: usize) -> Vec<QuadPoint> {
        let mut out = Vec::new();
        match *self {
            Support::Tet(p) => {
                let mut parts = vec![p];
                for _ in 0..levels {
                    parts = parts.iter().flat_map(quadrature::refine_tet).collect();
                }
                let rule = quadrature::tet_rule();
                for q in &parts {
                    let vol = tet_signed_volume(q[0], q[1], q[2], q[3]).abs();
                    let qb = q.map(|x| barycentric_tet(&p, x));
                    for (l, w) in rule.points.iter().zip(&rule.weights) {
                        let lambda = map4(&qb, l);
                        out.push(QuadPoint {
                            x: map(q, l),
                            lambda,
                            w: w * vol,
                        });
                    }
                }
            }
            Support::Tri(p) => {
                let mut parts = vec![p];
                for _ in 0..levels {
                    parts = parts.iter().flat_map(quadrature::refine_tri).collect();
                }
                let rule = quadrature::tri_rule();
                for q in &parts {
                    let area = tri_area(q[0], q[1], q[2]);
                    let qb = q.map(|x| barycentric_tri(&p, x));
                    for (l, w) in rule.points.iter().zip(&rule.weights) {
                        let mut lambda = [0.0; 4];
                        for k in 0..3 {
                            lambda[k] = (0..3).map(|v| l[v] * qb[v][k]).sum();
                        }
                        out.push(QuadPoint {
                            x: map(q, l),
                            lambda,
                            w: w * area,
                        });
                    }
                }
            }
            Support::Segment(p) => {
                let n = 1usize << levels;
                let len = dist(p[0], p[1]) / n as f64;
                let rule = quadrature::segment_rule();
                for k in 0..n {
                    for (l, w) in rule.points.iter().zip(&rule.weights) {
                        let s = (k as f64 + l[1]) / n as f64;
                        out.push(QuadPoint {
                            x: map(&p, &[1.0 - s, s]),
                            lambda: [1.0 - s, s, 0.0, 0.0],
                            w: w * len,
                        });
                    }
                }
            }
            Support::Point(x) => out.push(QuadPoint {
                x,
                lambda: [1.0, 0.0, 0.0, 0.0],
                w: 1.0,
            }),
        }
        out
    }
}

fn map4(vertices: &[[f64; 4]; 4], l: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (v, w) in vertices.iter().zip(l) {
        for k in 0..4 {
            out[k] += w * v[k];
        }
    }
    out
}

fn barycentric_tet(p: &[Vec3; 4], x: Vec3) -> [f64; 4] {
    let v = tet_signed_volume(p[0], p[1], p[2], p[3]);
    [
        tet_signed_volume(x, p[1], p[2], p[3]) / v,
        tet_signed_volume(p[0], x, p[2], p[3]) / v,
        tet_signed_volume(p[0], p[1], x, p[3]) / v,
        tet_signed_volume(p[0], p[1], p[2], x) / v,
    ]
}

fn barycentric_tri(p: &[Vec3; 3], x: Vec3) -> [f64; 3] {
    // the children of a refined triangle lie in its plane
    let a = tri_area(p[0], p[1], p[2]);
    let l1 = tri_area(p[0], x, p[2]) / a;
    let l2 = tri_area(p[0], p[1], x) / a;
    [1.0 - l1 - l2, l1, l2]
}

#[derive(Debug, Clone)]
pub enum PieceValue {
    /// Affine on the support with the given value at each support vertex.
    Linear(Vec<Combo>),
    Constant(Combo),
}

impl PieceValue {
    pub fn eval(&self, u: &[f64], lambda: &[f64; 4]) -> f64 {
        match self {
            PieceValue::Linear(c) => c
                .iter()
                .zip(lambda)
                .map(|(c, l)| l * eval_combo(c, u))
                .sum(),
            PieceValue::Constant(c) => eval_combo(c, u),
        }
    }

    /// Calls `f(dof, basis value)` for every dof contributing at `lambda`.
    pub fn for_each_basis(&self, lambda: &[f64; 4], mut f: impl FnMut(usize, f64)) {
        match self {
            PieceValue::Linear(cs) => {
                for (c, l) in cs.iter().zip(lambda) {
                    for &(i, w) in c {
                        f(i, w * l);
                    }
                }
            }
            PieceValue::Constant(c) => {
                for &(i, w) in c {
                    f(i, w);
                }
            }
        }
    }
}

/// One piece of a function reconstruction.
#[derive(Debug, Clone)]
pub struct Piece {
    pub support: Support,
    /// Factor applied to the support measure; for a point support this is
    /// the measure itself.
    pub scale: f64,
    pub region: Region,
    pub value: PieceValue,
}

/// A piece on which a discrete gradient is constant.
#[derive(Debug, Clone)]
pub struct GradPiece {
    pub support: Support,
    /// Cell (matrix) or face (fracture) the piece belongs to.
    pub owner: usize,
    pub region: Region,
    pub grad: [Combo; 3],
}

impl GradPiece {
    pub fn eval(&self, u: &[f64]) -> Vec3 {
        [
            eval_combo(&self.grad[0], u),
            eval_combo(&self.grad[1], u),
            eval_combo(&self.grad[2], u),
        ]
    }
}

/// Matrix trace on one side of a fracture together with the fracture
/// reconstruction it is compared with.
#[derive(Debug, Clone)]
pub struct JumpPiece {
    pub face: usize,
    pub side: Side,
    pub support: Support,
    pub scale: f64,
    pub trace: PieceValue,
    pub fracture: PieceValue,
}

/// Everything the assembly, the conservation audit and the error norms
/// need from a scheme.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub scheme: SchemeKind,
    pub layout: DofLayout,
    pub cell_matrices: Vec<LocalMatrix>,
    pub face_matrices: Vec<LocalMatrix>,
    pub mf_blocks: Vec<MfBlock>,
    pub matrix_values: Vec<Piece>,
    pub fracture_values: Vec<Piece>,
    pub matrix_grads: Vec<GradPiece>,
    pub fracture_grads: Vec<GradPiece>,
    pub jumps: Vec<JumpPiece>,
    /// Fracture test functions restricted to the intersection line.
    pub intersection: Vec<Piece>,
}

impl Discretization {
    pub fn build(
        scheme: SchemeKind,
        bundle: &MeshBundle,
        data: &ProblemData,
    ) -> Result<Discretization> {
        match scheme {
            SchemeKind::VagFe => Ok(vag::discretize(bundle, data, vag::Coupling::Fe)),
            SchemeKind::VagCv => Ok(vag::discretize(bundle, data, vag::Coupling::Cv)),
            SchemeKind::Hfv => hfv::discretize(bundle, data),
        }
    }

    /// All local matrices whose sum is the global bilinear form.
    pub fn local_matrices(&self) -> impl Iterator<Item = std::borrow::Cow<'_, LocalMatrix>> {
        self.cell_matrices
            .iter()
            .map(std::borrow::Cow::Borrowed)
            .chain(self.face_matrices.iter().map(std::borrow::Cow::Borrowed))
            .chain(
                self.mf_blocks
                    .iter()
                    .map(|b| std::borrow::Cow::Owned(b.local_matrix())),
            )
    }

    /// The global bilinear form evaluated through the local matrices.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        self.local_matrices().map(|m| m.bilinear(u, v)).sum()
    }
}
