//! Convergence studies: configuration, per-level solve, CSV and VTK output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble, conservation_check, eliminate_cells, jacobian_pattern_nnz, recover_cells,
    AssemblyOptions, SigmaMode,
};
use crate::error::{Error, Result};
use crate::mesh::vtk::{write_vtk, VtkField};
use crate::mesh::MeshFamily;
use crate::model::{AnalyticCase, CaseKind, ProblemData};
use crate::norms::{
    compute_errors, convergence_orders, interface_jump, ErrorNorms, JumpSides, NormMode,
    NormOptions,
};
use crate::scheme::{Discretization, MeshBundle, SchemeKind};
use crate::solver::{gmres, ilut_factor, GmresOptions};

/// A named parameter set or explicit coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CaseSpec {
    Named(CaseKind),
    Inline(ProblemData),
}

fn default_tolerance() -> f64 {
    1e-10
}

fn default_threshold() -> f64 {
    1e-4
}

fn default_one() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub scheme: SchemeKind,
    pub mesh: MeshFamily,
    /// Cells per axis for each level.
    pub refinements: Vec<usize>,
    pub case: CaseSpec,
    /// Overrides the weighting of the case when given.
    #[serde(default)]
    pub xi: Option<f64>,
    /// Factor applied to every fracture transmissibility.
    #[serde(default = "default_one")]
    pub transmissibility_scale: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_threshold")]
    pub ilut_threshold: f64,
    #[serde(default)]
    pub sigma: SigmaMode,
    #[serde(default)]
    pub norm: NormMode,
    #[serde(default)]
    pub jump_sides: JumpSides,
    #[serde(default)]
    pub quadrature_levels: usize,
    /// When false the CPU column is left empty, which makes the CSV
    /// reproducible byte for byte.
    #[serde(default = "default_true")]
    pub record_timings: bool,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub vtk_dir: Option<PathBuf>,
}

impl StudyConfig {
    pub fn new(
        scheme: SchemeKind,
        mesh: MeshFamily,
        refinements: Vec<usize>,
        case: CaseKind,
    ) -> StudyConfig {
        StudyConfig {
            scheme,
            mesh,
            refinements,
            case: CaseSpec::Named(case),
            xi: None,
            transmissibility_scale: 1.0,
            tolerance: default_tolerance(),
            ilut_threshold: default_threshold(),
            sigma: SigmaMode::default(),
            norm: NormMode::default(),
            jump_sides: JumpSides::default(),
            quadrature_levels: 0,
            record_timings: true,
            csv: None,
            vtk_dir: None,
        }
    }

    pub fn from_json(s: &str) -> Result<StudyConfig> {
        let c: StudyConfig = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<StudyConfig> {
        StudyConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// Applies `key=value` with the value parsed as JSON (bare words are
    /// taken as strings).
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "override `{assignment}` is not of the form key=value"
            ))
        })?;
        let value: serde_json::Value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        let mut doc = serde_json::to_value(&*self)?;
        let obj = doc.as_object_mut().expect("config serializes to an object");
        obj.insert(key.trim().to_string(), value);
        *self = serde_json::from_value(doc)?;
        self.validate()
    }

    pub fn problem_data(&self) -> ProblemData {
        let mut d = match &self.case {
            CaseSpec::Named(CaseKind::Isotropic) => ProblemData::isotropic(1.0),
            CaseSpec::Named(CaseKind::Anisotropic) => ProblemData::anisotropic(1.0),
            CaseSpec::Inline(d) => d.clone(),
        };
        if let Some(xi) = self.xi {
            d.xi = xi;
        }
        d.with_scaled_transmissibility(self.transmissibility_scale)
    }

    pub fn case_name(&self) -> &'static str {
        match &self.case {
            CaseSpec::Named(k) => k.name(),
            CaseSpec::Inline(_) => "inline",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.refinements.is_empty() {
            return Err(Error::Config("the refinement list is empty".into()));
        }
        if self.refinements.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "refinements must be strictly increasing".into(),
            ));
        }
        let positive = [
            ("tolerance", self.tolerance),
            ("ilut_threshold", self.ilut_threshold + f64::MIN_POSITIVE),
            ("transmissibility_scale", self.transmissibility_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    value: v,
                    reason: "must be positive and finite",
                });
            }
        }
        self.problem_data().validate()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelResult {
    pub n: usize,
    pub cells: usize,
    pub dofs: usize,
    pub eliminated: usize,
    pub jacobian_nnz: usize,
    pub iterations: usize,
    pub cpu_seconds: Option<f64>,
    pub converged: bool,
    /// True relative residual of the reduced system.
    pub residual: f64,
    /// Relative residual of the full system at the recovered solution.
    pub full_residual: f64,
    pub conservation: f64,
    pub h: f64,
    pub errors: ErrorNorms,
    /// L2 norm of the computed matrix-fracture jump over all sides.
    pub jump_l2: f64,
}

/// Solution of one level together with what produced it.
pub struct LevelSolution {
    pub bundle: MeshBundle,
    pub disc: Discretization,
    pub u: Vec<f64>,
    pub result: LevelResult,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn run_level(config: &StudyConfig, case: &AnalyticCase, n: usize) -> Result<LevelSolution> {
    let bundle = MeshBundle::new(config.mesh, n)?;
    let disc = Discretization::build(config.scheme, &bundle, &case.data)?;
    let opts = AssemblyOptions {
        sigma: config.sigma,
        source_levels: config.quadrature_levels,
    };
    let sys = assemble(&disc, case, &opts)?;

    let start = Instant::now();
    let red = eliminate_cells(&sys)?;
    let pc = ilut_factor(&red.matrix, config.ilut_threshold)?;
    let gopts = GmresOptions {
        tol: config.tolerance,
        max_iterations: None,
    };
    let (x, iterations, residual, converged) = match gmres(&red.matrix, &red.rhs, &pc, gopts) {
        Ok(r) => (r.x, r.iterations, r.residual, true),
        Err(Error::NotConverged {
            iterations,
            residual,
        }) => {
            log::warn!("level n = {n} did not converge: residual {residual:.3e} after {iterations} iterations");
            (vec![f64::NAN; red.rhs.len()], iterations, residual, false)
        }
        Err(e) => return Err(e),
    };
    let u = recover_cells(&x, &red.elimination);
    let elapsed = start.elapsed().as_secs_f64();

    let au = sys.matrix.mul(&u);
    let r: Vec<f64> = sys.rhs.iter().zip(&au).map(|(b, a)| b - a).collect();
    let full_residual = norm2(&r) / norm2(&sys.rhs);
    let conservation = conservation_check(&disc, &sys, &u).max_relative;
    let errors = compute_errors(
        &disc,
        &u,
        case,
        &NormOptions {
            mode: config.norm,
            sides: config.jump_sides,
            levels: config.quadrature_levels,
        },
    );
    let result = LevelResult {
        n,
        cells: bundle.mesh.n_cells(),
        dofs: disc.layout.n_dofs,
        eliminated: disc.layout.n_eliminated(),
        jacobian_nnz: jacobian_pattern_nnz(&disc),
        iterations,
        cpu_seconds: config.record_timings.then_some(elapsed),
        converged,
        residual,
        full_residual,
        conservation,
        h: bundle.submeshes.h,
        errors,
        jump_l2: interface_jump(&disc, &u),
    };
    Ok(LevelSolution {
        bundle,
        disc,
        u,
        result,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Orders {
    pub sol: Option<f64>,
    pub grad: Option<f64>,
    pub jump: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub scheme: SchemeKind,
    pub mesh: MeshFamily,
    pub case: String,
    pub levels: Vec<LevelResult>,
    pub orders: Vec<Orders>,
}

impl StudyReport {
    pub fn all_converged(&self) -> bool {
        self.levels.iter().all(|l| l.converged)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6e}"));
        for (i, l) in self.levels.iter().enumerate() {
            w.write_record([
                "level".to_string(),
                (i + 1).to_string(),
                self.scheme.name().into(),
                self.mesh.name().into(),
                self.case.clone(),
                l.n.to_string(),
                l.cells.to_string(),
                l.dofs.to_string(),
                l.eliminated.to_string(),
                l.jacobian_nnz.to_string(),
                l.iterations.to_string(),
                opt(l.cpu_seconds),
                l.converged.to_string(),
                format!("{:.6e}", l.residual),
                format!("{:.17e}", l.errors.err_sol),
                format!("{:.17e}", l.errors.err_grad),
                format!("{:.17e}", l.errors.err_jump),
                format!("{:.17e}", l.errors.err_jump_minus),
                format!("{:.17e}", l.jump_l2),
                String::new(),
                String::new(),
                String::new(),
            ])?;
        }
        for (i, o) in self.orders.iter().enumerate() {
            let mut rec = vec![
                "order".to_string(),
                format!("{}-{}", i + 1, i + 2),
                self.scheme.name().into(),
                self.mesh.name().into(),
                self.case.clone(),
            ];
            rec.extend(std::iter::repeat_n(String::new(), 14));
            rec.extend([opt(o.sol), opt(o.grad), opt(o.jump)]);
            w.write_record(rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}

/// Column names of the study CSV. `level` rows carry one mesh each,
/// `order` rows the orders between two consecutive meshes.
pub const CSV_HEADER: [&str; 22] = [
    "row",
    "key",
    "scheme",
    "mesh",
    "case",
    "n",
    "cells",
    "dofs",
    "eliminated",
    "jacobian_nnz",
    "iterations",
    "cpu_seconds",
    "converged",
    "residual",
    "err_sol",
    "err_grad",
    "err_jump",
    "err_jump_minus",
    "jump_l2",
    "alpha_sol",
    "alpha_grad",
    "alpha_jump",
];

pub fn compute_orders(levels: &[LevelResult]) -> Vec<Orders> {
    let cells: Vec<usize> = levels.iter().map(|l| l.cells).collect();
    let pick = |f: fn(&ErrorNorms) -> f64| {
        let e: Vec<f64> = levels.iter().map(|l| f(&l.errors)).collect();
        convergence_orders(&e, &cells)
    };
    let (s, g, j) = (
        pick(|e| e.err_sol),
        pick(|e| e.err_grad),
        pick(|e| e.err_jump),
    );
    (0..s.len())
        .map(|i| Orders {
            sol: s[i],
            grad: g[i],
            jump: j[i],
        })
        .collect()
}

/// Runs every level; VTK files are written when `write_fields` is set and
/// the configuration names a directory.
pub fn run_study(config: &StudyConfig, write_fields: bool) -> Result<StudyReport> {
    config.validate()?;
    let case = AnalyticCase::new(config.problem_data())?;
    for w in &case.warnings {
        log::warn!("{w}");
    }
    let mut levels = Vec::new();
    for &n in &config.refinements {
        let sol = run_level(config, &case, n)?;
        let r = &sol.result;
        log::info!(
            "{} {} n={} dofs={} iter={} err_sol={:.3e} err_grad={:.3e} err_jump={:.3e}",
            config.scheme.name(),
            config.mesh.name(),
            n,
            r.dofs,
            r.iterations,
            r.errors.err_sol,
            r.errors.err_grad,
            r.errors.err_jump
        );
        if write_fields {
            if let Some(dir) = &config.vtk_dir {
                std::fs::create_dir_all(dir)?;
                let name = format!(
                    "{}_{}_{}_n{}.vtk",
                    config.scheme.name(),
                    config.mesh.name(),
                    config.case_name(),
                    n
                );
                export_fields(&sol, &dir.join(name))?;
            }
        }
        levels.push(sol.result);
    }
    let report = StudyReport {
        scheme: config.scheme,
        mesh: config.mesh,
        case: config.case_name().into(),
        orders: compute_orders(&levels),
        levels,
    };
    if let Some(path) = &config.csv {
        std::fs::write(path, report.to_csv()?)?;
    }
    Ok(report)
}

/// Per-cell and per-fracture-face fields of a solved level.
pub fn solution_fields(sol: &LevelSolution) -> Vec<VtkField> {
    let disc = &sol.disc;
    let u = &sol.u;
    let nf = disc.layout.face_dofs.len();
    let matrix: Vec<f64> = u[..disc.layout.n_cells].to_vec();
    let fracture: Vec<f64> = disc.layout.face_dofs.iter().map(|&(d, _)| u[d]).collect();
    let mut slot = vec![0; sol.bundle.mesh.faces.len()];
    for (i, &f) in sol.bundle.fractures.faces.iter().enumerate() {
        slot[f] = i;
    }
    // mean jump over each side of a fracture face, largest side kept
    let mut acc = vec![[0.0; 2]; nf];
    let mut area = vec![[0.0; 2]; nf];
    for j in &disc.jumps {
        let i = slot[j.face];
        let s = usize::from(j.side.positive);
        for q in j.support.quadrature(0) {
            let w = q.w * j.scale;
            acc[i][s] += w * (j.trace.eval(u, &q.lambda) - j.fracture.eval(u, &q.lambda));
            area[i][s] += w;
        }
    }
    let jump: Vec<f64> = (0..nf)
        .map(|i| {
            (0..2)
                .filter(|&s| area[i][s] > 0.0)
                .map(|s| (acc[i][s] / area[i][s]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    vec![
        VtkField {
            name: "pressure".into(),
            matrix: Some(matrix),
            fracture: Some(fracture),
        },
        VtkField {
            name: "jump".into(),
            matrix: None,
            fracture: Some(jump),
        },
    ]
}

pub fn export_fields(sol: &LevelSolution, path: &Path) -> Result<()> {
    write_vtk(
        path,
        &sol.bundle.mesh,
        &sol.bundle.fractures,
        &solution_fields(sol),
    )
}
