//! Global finite-volume system, Dirichlet lifting, cell elimination and the
//! post-solve conservation audit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AnalyticCase, Region};
use crate::scheme::{sample, Discretization, Piece};
use crate::solver::Csr;

/// Treatment of the flux mismatch of the closed-form solution along the
/// fracture intersection line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMode {
    /// Line source added to the fracture equations.
    #[default]
    LineSource,
    /// Intersection dofs fixed to the exact solution.
    DirichletPin,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AssemblyOptions {
    pub sigma: SigmaMode,
    /// Uniform refinements of each piece for source quadrature.
    pub source_levels: usize,
}

/// Full system over all dofs. Dirichlet rows are identity rows and their
/// columns are moved to the right-hand side.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: Csr,
    pub rhs: Vec<f64>,
    pub dirichlet: Vec<bool>,
    pub dirichlet_values: Vec<f64>,
    /// Discrete source terms `H_nu` before lifting.
    pub sources: Vec<f64>,
    pub n_cells: usize,
}

fn integrate_pieces(
    pieces: &[Piece],
    levels: usize,
    f: impl Fn(Region, [f64; 3]) -> f64,
    out: &mut [f64],
) {
    for p in pieces {
        for q in p.support.quadrature(levels) {
            let w = q.w * p.scale * f(p.region, q.x);
            p.value.for_each_basis(&q.lambda, |i, b| out[i] += w * b);
        }
    }
}

/// Discrete source vector `H`: matrix and fracture sources, the
/// transmission-defect compensation and the intersection line source.
pub fn source_vector(
    disc: &Discretization,
    case: &AnalyticCase,
    opts: &AssemblyOptions,
) -> Vec<f64> {
    let lv = opts.source_levels;
    let mut h = vec![0.0; disc.layout.n_dofs];
    let width = case.data.width;
    let src = |r: Region, x| match r {
        Region::Matrix(i) => case.matrix_source(i, x),
        Region::Fracture(f) => width * case.fracture_source(f, x),
    };
    integrate_pieces(&disc.matrix_values, lv, src, &mut h);
    integrate_pieces(&disc.fracture_values, lv, src, &mut h);
    for j in &disc.jumps {
        for q in j.support.quadrature(lv) {
            let w = q.w * j.scale * case.transmission_defect(j.side, q.x);
            if w != 0.0 {
                j.trace.for_each_basis(&q.lambda, |i, b| h[i] -= w * b);
            }
        }
    }
    if opts.sigma == SigmaMode::LineSource {
        integrate_pieces(
            &disc.intersection,
            lv,
            |_, x| -case.intersection_flux(x[2]),
            &mut h,
        );
    }
    h
}

pub fn dirichlet_mask(disc: &Discretization, sigma: SigmaMode) -> Vec<bool> {
    let mut mask = disc.layout.dirichlet.clone();
    if sigma == SigmaMode::DirichletPin {
        for &d in &disc.layout.intersection_dofs {
            mask[d] = true;
        }
    }
    mask
}

pub fn assemble(
    disc: &Discretization,
    case: &AnalyticCase,
    opts: &AssemblyOptions,
) -> Result<LinearSystem> {
    let l = &disc.layout;
    let n = l.n_dofs;
    let sources = source_vector(disc, case, opts);
    let dirichlet = dirichlet_mask(disc, opts.sigma);
    let values: Vec<f64> = (0..n)
        .map(|i| {
            if dirichlet[i] {
                sample(case, l.region[i], l.anchor[i])
            } else {
                0.0
            }
        })
        .collect();
    assemble_with(disc, sources, dirichlet, values)
}

/// Assembly from explicit sources and Dirichlet data.
pub fn assemble_with(
    disc: &Discretization,
    sources: Vec<f64>,
    dirichlet: Vec<bool>,
    dirichlet_values: Vec<f64>,
) -> Result<LinearSystem> {
    let n = disc.layout.n_dofs;
    if sources.len() != n || dirichlet.len() != n || dirichlet_values.len() != n {
        return Err(Error::Dimension(format!(
            "assembly vectors must have length {n}"
        )));
    }
    let mut rhs = sources.clone();
    let mut triplets = Vec::new();
    for m in disc.local_matrices() {
        let k = m.n();
        for (a, &i) in m.dofs.iter().enumerate() {
            if i >= n {
                return Err(Error::Dimension(format!("local dof {i} outside 0..{n}")));
            }
            if dirichlet[i] {
                continue;
            }
            for (b, &j) in m.dofs.iter().enumerate() {
                let v = m.a[a * k + b];
                if v == 0.0 {
                    continue;
                }
                if dirichlet[j] {
                    rhs[i] -= v * dirichlet_values[j];
                } else {
                    triplets.push((i, j, v));
                }
            }
        }
    }
    for i in 0..n {
        if dirichlet[i] {
            triplets.push((i, i, 1.0));
            rhs[i] = dirichlet_values[i];
        }
    }
    Ok(LinearSystem {
        matrix: Csr::from_triplets(n, n, triplets)?,
        rhs,
        dirichlet,
        dirichlet_values,
        sources,
        n_cells: disc.layout.n_cells,
    })
}

/// What is needed to recover the cell values after the reduced solve.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub n_cells: usize,
    pub diagonal: Vec<f64>,
    /// Row couplings of each cell to non-cell dofs, in reduced numbering.
    pub couplings: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: Csr,
    pub rhs: Vec<f64>,
    pub elimination: Elimination,
}

/// Schur complement on the non-cell dofs. Cells come first in the dof
/// numbering and a cell row couples only to itself and its stencil, so the
/// update of each cell stays inside the clique of its stencil.
pub fn eliminate_cells(sys: &LinearSystem) -> Result<ReducedSystem> {
    let a = &sys.matrix;
    let nc = sys.n_cells;
    let n = a.n_rows;
    let m = n - nc;
    let mut triplets = Vec::with_capacity(a.nnz());
    for i in nc..n {
        for (j, v) in a.row(i) {
            if j >= nc {
                triplets.push((i - nc, j - nc, v));
            }
        }
    }
    let mut rhs: Vec<f64> = sys.rhs[nc..].to_vec();
    let mut diagonal = Vec::with_capacity(nc);
    let mut couplings = Vec::with_capacity(nc);
    for k in 0..nc {
        let mut d = 0.0;
        let mut row = Vec::new();
        for (j, v) in a.row(k) {
            if j == k {
                d = v;
            } else if j < nc {
                return Err(Error::Dimension(format!("cell {k} is coupled to cell {j}")));
            } else {
                row.push((j - nc, v));
            }
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::SingularCell { cell: k });
        }
        let col: Vec<(usize, f64)> = row.iter().map(|&(i, _)| (i, a.get(i + nc, k))).collect();
        let bk = sys.rhs[k];
        for &(i, aik) in &col {
            if aik == 0.0 {
                continue;
            }
            rhs[i] -= aik * bk / d;
            for &(j, akj) in &row {
                triplets.push((i, j, -aik * akj / d));
            }
        }
        diagonal.push(d);
        couplings.push(row);
    }
    Ok(ReducedSystem {
        matrix: Csr::from_triplets(m, m, triplets)?,
        rhs,
        elimination: Elimination {
            n_cells: nc,
            diagonal,
            couplings,
            rhs: sys.rhs[..nc].to_vec(),
        },
    })
}

/// Number of nonzeros of the reduced Jacobian counted structurally over
/// all non-cell dofs: every cell stencil and fracture-face stencil is a
/// dense clique, matrix-fracture blocks contribute their nonzero entries.
pub fn jacobian_pattern_nnz(disc: &Discretization) -> usize {
    let mut pattern = std::collections::HashSet::new();
    let stencils = disc
        .layout
        .cell_dofs
        .iter()
        .chain(disc.face_matrices.iter().map(|m| &m.dofs));
    for c in stencils {
        for &i in c {
            for &j in c {
                pattern.insert((i, j));
            }
        }
    }
    for b in &disc.mf_blocks {
        let m = b.local_matrix();
        let n = m.n();
        for a in 0..n {
            for c in 0..n {
                if m.a[a * n + c] != 0.0 {
                    pattern.insert((m.dofs[a], m.dofs[c]));
                }
            }
        }
    }
    pattern.len()
}

/// Full dof vector from the reduced solution by back-substitution.
pub fn recover_cells(reduced: &[f64], e: &Elimination) -> Vec<f64> {
    let mut u = Vec::with_capacity(e.n_cells + reduced.len());
    for k in 0..e.n_cells {
        let s: f64 = e.couplings[k].iter().map(|&(j, v)| v * reduced[j]).sum();
        u.push((e.rhs[k] - s) / e.diagonal[k]);
    }
    u.extend_from_slice(reduced);
    u
}

/// Net outflow of every control volume computed from the local fluxes:
/// cell and fracture-face stiffness fluxes and matrix-fracture fluxes.
pub fn flux_balance(disc: &Discretization, u: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; disc.layout.n_dofs];
    for m in disc.cell_matrices.iter().chain(&disc.face_matrices) {
        let f = m.fluxes(u);
        for (&nu, fk) in m.dofs[1..].iter().zip(&f) {
            r[m.dofs[0]] += fk;
            r[nu] -= fk;
        }
    }
    for b in &disc.mf_blocks {
        for (trace, fl) in b.traces.iter().zip(b.fluxes(u)) {
            for ((&t, &fr), f) in trace.iter().zip(&b.fracture).zip(fl) {
                r[t] += f;
                r[fr] -= f;
            }
        }
    }
    r
}

#[derive(Debug, Clone)]
pub struct ConservationReport {
    /// `balance - H` per dof, zero on Dirichlet dofs.
    pub residuals: Vec<f64>,
    /// `max |balance - H| / max |H|` over non-Dirichlet dofs.
    pub max_relative: f64,
}

pub fn conservation_check(
    disc: &Discretization,
    sys: &LinearSystem,
    u: &[f64],
) -> ConservationReport {
    let mut r = flux_balance(disc, u);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (i, ri) in r.iter_mut().enumerate() {
        if sys.dirichlet[i] {
            *ri = 0.0;
        } else {
            *ri -= sys.sources[i];
            worst = worst.max(ri.abs());
            scale = scale.max(sys.sources[i].abs());
        }
    }
    ConservationReport {
        residuals: r,
        max_relative: if scale > 0.0 { worst / scale } else { worst },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::MeshFamily;
    use crate::model::{make_case, CaseKind, ProblemData};
    use crate::scheme::{MeshBundle, SchemeKind};
    use crate::solver::{gmres, ilut_factor, GmresOptions};

    const SCHEMES: [SchemeKind; 3] = [SchemeKind::VagFe, SchemeKind::VagCv, SchemeKind::Hfv];

    fn constant_system(disc: &Discretization, c: f64) -> LinearSystem {
        let n = disc.layout.n_dofs;
        let mask = disc.layout.dirichlet.clone();
        assemble_with(disc, vec![0.0; n], mask, vec![c; n]).unwrap()
    }

    fn solve(sys: &LinearSystem, tol: f64) -> Vec<f64> {
        let red = eliminate_cells(sys).unwrap();
        let pc = ilut_factor(&red.matrix, 1e-4).unwrap();
        let opts = GmresOptions {
            tol,
            ..Default::default()
        };
        let r = gmres(&red.matrix, &red.rhs, &pc, opts).unwrap();
        recover_cells(&r.x, &red.elimination)
    }

    /// Union of the dof cliques of every cell, fracture face and
    /// matrix-fracture block, Dirichlet dofs keeping only their diagonal.
    fn clique_pattern(
        disc: &Discretization,
        dirichlet: &[bool],
    ) -> std::collections::HashSet<(usize, usize)> {
        let mut set = std::collections::HashSet::new();
        let cliques = disc
            .layout
            .cell_dofs
            .iter()
            .cloned()
            .chain(disc.local_matrices().map(|m| m.dofs.clone()));
        for c in cliques {
            for &i in &c {
                for &j in &c {
                    if !dirichlet[i] && !dirichlet[j] {
                        set.insert((i, j));
                    }
                }
            }
        }
        for (i, &d) in dirichlet.iter().enumerate() {
            if d {
                set.insert((i, i));
            }
        }
        set
    }

    #[test]
    fn schur_complement_of_two_by_two() {
        let sys = LinearSystem {
            matrix: Csr::from_dense(&[vec![2.0, -1.0], vec![-1.0, 2.0]]),
            rhs: vec![1.0, 0.0],
            dirichlet: vec![false; 2],
            dirichlet_values: vec![0.0; 2],
            sources: vec![1.0, 0.0],
            n_cells: 1,
        };
        let red = eliminate_cells(&sys).unwrap();
        assert_eq!(red.matrix.to_dense(), vec![vec![1.5]]);
        assert_eq!(red.rhs, vec![0.5]);
        let u = recover_cells(&[1.0 / 3.0], &red.elimination);
        assert!((u[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_cell_diagonal_is_singular() {
        let sys = LinearSystem {
            matrix: Csr::from_dense(&[vec![0.0, 1.0], vec![1.0, 2.0]]),
            rhs: vec![0.0; 2],
            dirichlet: vec![false; 2],
            dirichlet_values: vec![0.0; 2],
            sources: vec![0.0; 2],
            n_cells: 1,
        };
        assert!(matches!(
            eliminate_cells(&sys),
            Err(Error::SingularCell { cell: 0 })
        ));
    }

    #[test]
    fn constant_boundary_data_gives_constant_solution() {
        let b = MeshBundle::new(MeshFamily::Cartesian, 4).unwrap();
        for s in SCHEMES {
            let disc = Discretization::build(s, &b, &ProblemData::isotropic(0.75)).unwrap();
            let sys = constant_system(&disc, 2.5);
            let c = vec![2.5; disc.layout.n_dofs];
            let r = sys.matrix.mul(&c);
            for (ri, bi) in r.iter().zip(&sys.rhs) {
                assert!((ri - bi).abs() <= 1e-12 * sys.matrix.max_abs(), "{s:?}");
            }
            let u = solve(&sys, 1e-12);
            for v in &u {
                assert!((v - 2.5).abs() < 1e-9, "{s:?}: {v}");
            }
            let rep = conservation_check(&disc, &sys, &vec![2.5; disc.layout.n_dofs]);
            assert!(rep.residuals.iter().all(|r| r.abs() <= 1e-14));
        }
    }

    #[test]
    fn reduced_system_matches_full_solve() {
        let b = MeshBundle::new(MeshFamily::Cartesian, 2).unwrap();
        let case = make_case(CaseKind::Isotropic, 1.0).unwrap();
        for s in SCHEMES {
            let disc = Discretization::build(s, &b, &case.data).unwrap();
            let sys = assemble(&disc, &case, &AssemblyOptions::default()).unwrap();
            let opts = GmresOptions {
                tol: 1e-13,
                ..Default::default()
            };
            let full = gmres(
                &sys.matrix,
                &sys.rhs,
                &ilut_factor(&sys.matrix, 0.0).unwrap(),
                opts,
            )
            .unwrap();
            let u = solve(&sys, 1e-13);
            for (a, b) in u.iter().zip(&full.x) {
                assert!(
                    (a - b).abs() <= 1e-10 * b.abs().max(1.0),
                    "{s:?}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn elimination_adds_no_fill() {
        let b = MeshBundle::new(MeshFamily::Tetrahedral, 2).unwrap();
        let case = make_case(CaseKind::Anisotropic, 1.0).unwrap();
        for s in SCHEMES {
            let disc = Discretization::build(s, &b, &case.data).unwrap();
            let sys = assemble(&disc, &case, &AssemblyOptions::default()).unwrap();
            let red = eliminate_cells(&sys).unwrap();
            let allowed = clique_pattern(&disc, &sys.dirichlet);
            let nc = sys.n_cells;
            for i in 0..red.matrix.n_rows {
                for (j, _) in red.matrix.row(i) {
                    assert!(
                        allowed.contains(&(i + nc, j + nc)),
                        "{s:?}: fill at ({i}, {j})"
                    );
                }
            }
        }
    }

    #[test]
    fn conservation_residual_localizes_perturbation() {
        let b = MeshBundle::new(MeshFamily::Cartesian, 2).unwrap();
        let disc =
            Discretization::build(SchemeKind::VagFe, &b, &ProblemData::isotropic(1.0)).unwrap();
        let sys = constant_system(&disc, 1.0);
        let mut u = vec![1.0; disc.layout.n_dofs];
        let k = 3;
        u[k] += 1e-3;
        let rep = conservation_check(&disc, &sys, &u);
        let mut touched: Vec<usize> = vec![k];
        touched.extend(&disc.layout.cell_dofs[k]);
        for (i, r) in rep.residuals.iter().enumerate() {
            if !touched.contains(&i) {
                assert_eq!(*r, 0.0);
            }
        }
        assert!(rep.residuals[k].abs() > 0.0);
    }

    #[test]
    fn pin_mode_fixes_intersection_dofs() {
        let b = MeshBundle::new(MeshFamily::Cartesian, 2).unwrap();
        let case = make_case(CaseKind::Isotropic, 1.0).unwrap();
        let disc = Discretization::build(SchemeKind::Hfv, &b, &case.data).unwrap();
        let opts = AssemblyOptions {
            sigma: SigmaMode::DirichletPin,
            ..Default::default()
        };
        let sys = assemble(&disc, &case, &opts).unwrap();
        for &d in &disc.layout.intersection_dofs {
            assert!(sys.dirichlet[d]);
            assert_eq!(sys.matrix.get(d, d), 1.0);
        }
    }
}
