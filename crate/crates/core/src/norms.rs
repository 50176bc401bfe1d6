//! Normalized L2 errors of a discrete solution and convergence orders.

use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;
use crate::model::{AnalyticCase, Region};
use crate::scheme::{Discretization, Piece, PieceValue, Support};

/// How the error of a discrete solution is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMode {
    /// Reconstruction of `u_D - P_D u`, with `P_D u` the exact solution
    /// sampled at the dofs.
    Discrete,
    /// Reconstruction of `u_D` against the exact solution at quadrature
    /// points. Lumped point pieces use the value at the point.
    Continuous,
    /// Values at the reconstruction nodes with lumped weights. Gradients
    /// are averaged per cell (or fracture face) and compared with the exact
    /// gradient at its centroid.
    #[default]
    Nodal,
}

/// Grouping of the matrix sides in the jump norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpSides {
    /// One norm per side of each fracture.
    PerFracture,
    /// One norm for all positive sides and one for all negative sides.
    #[default]
    Oriented,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NormOptions {
    pub mode: NormMode,
    pub sides: JumpSides,
    /// Uniform refinements of each piece before applying the degree-4 rules.
    pub levels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub err_sol: f64,
    pub err_grad: f64,
    /// Jump error over `sum_alpha |gamma_alpha u_m + u_f|`.
    pub err_jump: f64,
    /// Jump error over `sum_alpha |gamma_alpha u_m - u_f|`.
    pub err_jump_minus: f64,
}

fn exact_value(case: &AnalyticCase, r: Region, x: Vec3) -> f64 {
    match r {
        Region::Matrix(i) => case.matrix_value(i, x),
        Region::Fracture(f) => case.fracture_value(f, x),
    }
}

fn exact_gradient(case: &AnalyticCase, r: Region, x: Vec3) -> Vec3 {
    match r {
        Region::Matrix(i) => case.matrix_jet(i, x).g,
        Region::Fracture(f) => case.fracture_tangential_gradient(f, x),
    }
}

fn value_error_sq(
    pieces: &[Piece],
    case: &AnalyticCase,
    u: &[f64],
    e: &[f64],
    opts: &NormOptions,
) -> f64 {
    let mut s = 0.0;
    for p in pieces {
        for q in p.support.quadrature(opts.levels) {
            let err = match opts.mode {
                NormMode::Discrete => p.value.eval(e, &q.lambda),
                NormMode::Continuous | NormMode::Nodal => {
                    p.value.eval(u, &q.lambda) - exact_value(case, p.region, q.x)
                }
            };
            s += q.w * p.scale * err * err;
        }
    }
    s
}

fn sq(v: Vec3) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

fn side_slot(side: crate::mesh::Side, sides: JumpSides) -> usize {
    match sides {
        JumpSides::PerFracture => 2 * side.fracture.index() + usize::from(side.positive),
        JumpSides::Oriented => usize::from(side.positive),
    }
}

/// Nodes of a piece for the lumped rule: the support vertices for affine
/// values, the location of the dof for a single-dof constant.
fn nodes(
    disc: &Discretization,
    support: &Support,
    scale: f64,
    value: &PieceValue,
) -> Vec<(Vec3, [f64; 4], f64)> {
    let m = match support {
        Support::Point(_) => scale,
        s => s.measure() * scale,
    };
    let vertices: &[Vec3] = match support {
        Support::Tet(p) => p,
        Support::Tri(p) => p,
        Support::Segment(p) => p,
        Support::Point(x) => std::slice::from_ref(x),
    };
    match value {
        PieceValue::Constant(c) => {
            let x = match c.as_slice() {
                [(d, _)] => disc.layout.anchor[*d],
                _ => centroid(vertices),
            };
            vec![(x, [0.0; 4], m)]
        }
        PieceValue::Linear(_) => {
            let w = m / vertices.len() as f64;
            vertices
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let mut l = [0.0; 4];
                    l[i] = 1.0;
                    (x, l, w)
                })
                .collect()
        }
    }
}

fn centroid(p: &[Vec3]) -> Vec3 {
    let mut c = [0.0; 3];
    for x in p {
        for a in 0..3 {
            c[a] += x[a] / p.len() as f64;
        }
    }
    c
}

fn nodal_errors(
    disc: &Discretization,
    u: &[f64],
    case: &AnalyticCase,
    sides: JumpSides,
) -> ErrorNorms {
    let mut sol = [[0.0; 2]; 2];
    for (slot, pieces) in [&disc.matrix_values, &disc.fracture_values]
        .into_iter()
        .enumerate()
    {
        for p in pieces {
            for (x, l, w) in nodes(disc, &p.support, p.scale, &p.value) {
                let ex = exact_value(case, p.region, x);
                sol[slot][0] += w * (p.value.eval(u, &l) - ex).powi(2);
                sol[slot][1] += w * ex * ex;
            }
        }
    }

    let mut grad = [[0.0; 2]; 2];
    for (slot, pieces) in [&disc.matrix_grads, &disc.fracture_grads]
        .into_iter()
        .enumerate()
    {
        let mut owners: std::collections::BTreeMap<usize, (Vec3, Vec3, f64, Region)> =
            std::collections::BTreeMap::new();
        for p in pieces {
            let m = p.support.measure();
            let g = p.eval(u);
            let c = match p.support {
                Support::Tet(v) => centroid(&v),
                Support::Tri(v) => centroid(&v),
                Support::Segment(v) => centroid(&v),
                Support::Point(x) => x,
            };
            let e = owners
                .entry(p.owner)
                .or_insert(([0.0; 3], [0.0; 3], 0.0, p.region));
            for a in 0..3 {
                e.0[a] += m * g[a];
                e.1[a] += m * c[a];
            }
            e.2 += m;
        }
        for (gs, cs, m, region) in owners.into_values() {
            let c = cs.map(|v| v / m);
            let g = exact_gradient(case, region, c);
            grad[slot][0] += m * sq([gs[0] / m - g[0], gs[1] / m - g[1], gs[2] / m - g[2]]);
            grad[slot][1] += m * sq(g);
        }
    }

    let mut jump = [[0.0; 3]; 8];
    for j in &disc.jumps {
        let slot = side_slot(j.side, sides);
        for (x, l, w) in nodes(disc, &j.support, j.scale, &j.fracture) {
            let t = case.trace(j.side, x);
            let f = case.fracture_value(j.side.fracture, x);
            let err = j.trace.eval(u, &l) - j.fracture.eval(u, &l) - (t - f);
            jump[slot][0] += w * err * err;
            jump[slot][1] += w * (t + f) * (t + f);
            jump[slot][2] += w * (t - f) * (t - f);
        }
    }
    let col = |c: usize| jump.iter().map(|v| v[c].sqrt()).sum::<f64>();
    let ratio =
        |v: [[f64; 2]; 2]| (v[0][0].sqrt() + v[1][0].sqrt()) / (v[0][1].sqrt() + v[1][1].sqrt());
    ErrorNorms {
        err_sol: ratio(sol),
        err_grad: ratio(grad),
        err_jump: col(0) / col(1),
        err_jump_minus: col(0) / col(2),
    }
}

/// Errors of `u` (a full dof vector) against the closed-form solution.
pub fn compute_errors(
    disc: &Discretization,
    u: &[f64],
    case: &AnalyticCase,
    opts: &NormOptions,
) -> ErrorNorms {
    if opts.mode == NormMode::Nodal {
        return nodal_errors(disc, u, case, opts.sides);
    }
    let lv = opts.levels;
    let interp = disc.layout.interpolate(case);
    let e: Vec<f64> = u.iter().zip(&interp).map(|(a, b)| a - b).collect();

    let num_sol = value_error_sq(&disc.matrix_values, case, u, &e, opts).sqrt()
        + value_error_sq(&disc.fracture_values, case, u, &e, opts).sqrt();

    let mut den = [0.0; 2];
    let mut den_grad = [0.0; 2];
    let mut num_grad = [0.0; 2];
    for (slot, pieces) in [&disc.matrix_grads, &disc.fracture_grads]
        .into_iter()
        .enumerate()
    {
        for p in pieces {
            let (gd, ge) = (p.eval(u), p.eval(&e));
            for q in p.support.quadrature(lv) {
                let v = exact_value(case, p.region, q.x);
                let g = exact_gradient(case, p.region, q.x);
                den[slot] += q.w * v * v;
                den_grad[slot] += q.w * sq(g);
                num_grad[slot] += q.w
                    * match opts.mode {
                        NormMode::Discrete => sq(ge),
                        _ => sq([gd[0] - g[0], gd[1] - g[1], gd[2] - g[2]]),
                    };
            }
        }
    }

    let mut num_jump = [0.0; 8];
    let mut den_plus = [0.0; 8];
    let mut den_minus = [0.0; 8];
    for j in &disc.jumps {
        let slot = side_slot(j.side, opts.sides);
        for q in j.support.quadrature(lv) {
            let w = q.w * j.scale;
            let t = case.trace(j.side, q.x);
            let f = case.fracture_value(j.side.fracture, q.x);
            let err = match opts.mode {
                NormMode::Discrete => j.trace.eval(&e, &q.lambda) - j.fracture.eval(&e, &q.lambda),
                _ => j.trace.eval(u, &q.lambda) - j.fracture.eval(u, &q.lambda) - (t - f),
            };
            num_jump[slot] += w * err * err;
            den_plus[slot] += w * (t + f) * (t + f);
            den_minus[slot] += w * (t - f) * (t - f);
        }
    }
    let sum_sqrt = |a: &[f64]| a.iter().map(|v| v.sqrt()).sum::<f64>();
    let nj = sum_sqrt(&num_jump);
    ErrorNorms {
        err_sol: num_sol / (den[0].sqrt() + den[1].sqrt()),
        err_grad: (num_grad[0].sqrt() + num_grad[1].sqrt())
            / (den_grad[0].sqrt() + den_grad[1].sqrt()),
        err_jump: nj / sum_sqrt(&den_plus),
        err_jump_minus: nj / sum_sqrt(&den_minus),
    }
}

/// `(sum_alpha ||Pi^alpha u_m - Pi_f u_f||^2)^{1/2}` of a discrete solution.
pub fn interface_jump(disc: &Discretization, u: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in &disc.jumps {
        for q in j.support.quadrature(0) {
            let d = j.trace.eval(u, &q.lambda) - j.fracture.eval(u, &q.lambda);
            s += q.w * j.scale * d * d;
        }
    }
    s.sqrt()
}

/// `log(e_l / e_{l+1}) / log((N_{l+1} / N_l)^{1/3})` per refinement step;
/// `None` when an error is zero or not finite.
pub fn convergence_orders(errors: &[f64], cells: &[usize]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .zip(cells.windows(2))
        .map(|(e, n)| {
            if e[0] > 0.0 && e[1] > 0.0 && e[0].is_finite() && e[1].is_finite() {
                Some((e[0] / e[1]).ln() / ((n[1] as f64 / n[0] as f64).cbrt()).ln())
            } else {
                None
            }
        })
        .collect()
}

/// Total measure covered by the pieces (point pieces count their scale).
pub fn covered_measure(pieces: &[Piece]) -> f64 {
    pieces
        .iter()
        .map(|p| match p.support {
            Support::Point(_) => p.scale,
            s => s.measure() * p.scale,
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::MeshFamily;
    use crate::model::{make_case, CaseKind};
    use crate::scheme::{MeshBundle, SchemeKind};

    #[test]
    fn orders_of_model_sequences() {
        let a = convergence_orders(&[1e-2, 2.5e-3], &[512, 4096]);
        assert!((a[0].unwrap() - 2.0).abs() < 1e-12);
        let b = convergence_orders(&[1e-2, 5e-3], &[512, 4096]);
        assert!((b[0].unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(convergence_orders(&[1e-2, 0.0], &[512, 4096]), vec![None]);
    }

    #[test]
    fn zero_solution_has_unit_solution_error() {
        let b = MeshBundle::new(MeshFamily::Cartesian, 2).unwrap();
        let case = make_case(CaseKind::Isotropic, 1.0).unwrap();
        for s in [SchemeKind::VagFe, SchemeKind::Hfv] {
            let d = Discretization::build(s, &b, &case.data).unwrap();
            let zero = vec![0.0; d.layout.n_dofs];
            let e = compute_errors(
                &d,
                &zero,
                &case,
                &NormOptions {
                    mode: NormMode::Continuous,
                    ..Default::default()
                },
            );
            assert!((e.err_sol - 1.0).abs() < 1e-12, "{s:?}: {}", e.err_sol);
            assert!((e.err_grad - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolant_has_zero_discrete_error() {
        let b = MeshBundle::new(MeshFamily::Tetrahedral, 2).unwrap();
        let case = make_case(CaseKind::Anisotropic, 1.0).unwrap();
        for s in [SchemeKind::VagFe, SchemeKind::VagCv, SchemeKind::Hfv] {
            let d = Discretization::build(s, &b, &case.data).unwrap();
            let p = d.layout.interpolate(&case);
            let opts = NormOptions {
                mode: NormMode::Discrete,
                ..Default::default()
            };
            let e = compute_errors(&d, &p, &case, &opts);
            assert_eq!(e.err_sol, 0.0);
            assert_eq!(e.err_grad, 0.0);
            assert_eq!(e.err_jump, 0.0);
        }
    }

    #[test]
    fn pieces_partition_the_domain() {
        let b = MeshBundle::new(MeshFamily::Cartesian, 4).unwrap();
        let case = make_case(CaseKind::Isotropic, 1.0).unwrap();
        for s in [SchemeKind::VagFe, SchemeKind::VagCv, SchemeKind::Hfv] {
            let d = Discretization::build(s, &b, &case.data).unwrap();
            assert!((covered_measure(&d.matrix_values) - 1.0).abs() < 1e-12);
            assert!((covered_measure(&d.fracture_values) - 2.0).abs() < 1e-12);
            let jumps: f64 = d.jumps.iter().map(|j| j.support.measure() * j.scale).sum();
            assert!((jumps - 4.0).abs() < 1e-12);
        }
    }
}
