use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use super::jet::Jet;
use crate::error::{Error, Result};
use crate::geometry::{dot, Vec3};
use crate::mesh::{FractureId, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Isotropic,
    Anisotropic,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Isotropic => "isotropic",
            CaseKind::Anisotropic => "anisotropic",
        }
    }
}

/// Coefficients of the continuous model. Subdomain `i` (1-based) uses
/// `k_matrix[i - 1]`; fracture data is indexed by `FractureId::index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemData {
    /// Diagonal matrix permeability `(K_x, K_y, K_z)` per subdomain.
    pub k_matrix: [[f64; 3]; 4],
    /// Tangential fracture permeability per fracture.
    pub k_fracture: [f64; 4],
    /// Half normal transmissibility per fracture.
    pub t_fracture: [f64; 4],
    #[serde(default = "unit_width")]
    pub width: f64,
    #[serde(default = "unit_xi")]
    pub xi: f64,
}

fn unit_width() -> f64 {
    1.0
}

fn unit_xi() -> f64 {
    1.0
}

impl ProblemData {
    pub fn isotropic(xi: f64) -> ProblemData {
        ProblemData {
            k_matrix: [[1.0; 3], [100.0; 3], [3.0; 3], [40.0; 3]],
            k_fracture: [1.0, 2.0, 3.0, 10.0],
            t_fracture: [1.0, 0.2, 100.0, 10.0],
            width: 1.0,
            xi,
        }
    }

    pub fn anisotropic(xi: f64) -> ProblemData {
        ProblemData {
            k_matrix: [
                [1.0, 50.0, 1.0],
                [2.0, 100.0, 2.0],
                [30.0, 3.0, 3.0],
                [40.0, 40.0, 4.0],
            ],
            k_fracture: [1.0; 4],
            t_fracture: [1.0; 4],
            width: 1.0,
            xi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: String, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be strictly positive and finite",
                })
            }
        };
        for (i, k) in self.k_matrix.iter().enumerate() {
            for (a, v) in k.iter().enumerate() {
                positive(format!("K{}{}", i + 1, ["x", "y", "z"][a]), *v)?;
            }
        }
        for f in FractureId::ALL {
            positive(format!("K{}", f.name()), self.k_fracture[f.index()])?;
            positive(format!("T{}", f.name()), self.t_fracture[f.index()])?;
        }
        positive("width".into(), self.width)?;
        if !(self.xi > 0.5 && self.xi <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "xi".into(),
                value: self.xi,
                reason: "must lie in (1/2, 1]",
            });
        }
        Ok(())
    }

    /// `K1y K2x K3y K4x / (K1x K2y K3x K4y)`; the closed-form family solves
    /// every transmission condition only when this equals one.
    pub fn compatibility_ratio(&self) -> f64 {
        let k = &self.k_matrix;
        k[0][1] * k[1][0] * k[2][1] * k[3][0] / (k[0][0] * k[1][1] * k[2][0] * k[3][1])
    }

    pub fn with_scaled_transmissibility(&self, s: f64) -> ProblemData {
        let mut d = self.clone();
        for t in &mut d.t_fracture {
            *t *= s;
        }
        d
    }
}

/// Where a point is evaluated: a matrix subdomain (1..=4) or a fracture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Matrix(usize),
    Fracture(FractureId),
}

/// Subdomain containing an interior point (ties on the planes go to the
/// `x >= 0` and `y >= 0` sides).
pub fn subdomain_at(x: Vec3) -> usize {
    match (x[0] < 0.0, x[1] < 0.0) {
        (true, false) => 1,
        (false, false) => 2,
        (false, true) => 3,
        (true, true) => 4,
    }
}

/// The fractures whose pressures multiply into `u_i`.
fn subdomain_fractures(i: usize) -> (FractureId, FractureId) {
    match i {
        1 => (FractureId::F12, FractureId::F14),
        2 => (FractureId::F12, FractureId::F23),
        3 => (FractureId::F34, FractureId::F23),
        4 => (FractureId::F34, FractureId::F14),
        _ => panic!("subdomain index {i} out of range"),
    }
}

fn in_subdomain(i: usize, x: Vec3, tol: f64) -> bool {
    let in_box = x.iter().all(|c| c.abs() <= 0.5 + tol);
    let (sx, sy) = match i {
        1 => (-1.0, 1.0),
        2 => (1.0, 1.0),
        3 => (1.0, -1.0),
        _ => (-1.0, -1.0),
    };
    in_box && sx * x[0] >= -tol && sy * x[1] >= -tol
}

/// The closed-form solution family together with its problem data.
#[derive(Debug, Clone)]
pub struct AnalyticCase {
    pub data: ProblemData,
    /// `c_i` in `alpha_i = 1 / (alpha_f - c_i beta_12)`.
    pub alpha_coeff: [f64; 4],
    /// `beta_ij / beta_12` per fracture.
    pub beta_coeff: [f64; 4],
    pub compatibility_ratio: f64,
    pub warnings: Vec<String>,
}

pub fn make_case(kind: CaseKind, xi: f64) -> Result<AnalyticCase> {
    let data = match kind {
        CaseKind::Isotropic => ProblemData::isotropic(xi),
        CaseKind::Anisotropic => ProblemData::anisotropic(xi),
    };
    AnalyticCase::new(data)
}

const POINT_TOL: f64 = 1e-12;

impl AnalyticCase {
    pub fn new(data: ProblemData) -> Result<AnalyticCase> {
        data.validate()?;
        let k = &data.k_matrix;
        let (k1x, k1y) = (k[0][0], k[0][1]);
        let k2x = k[1][0];
        let (k3x, k3y) = (k[2][0], k[2][1]);
        let (k4x, k4y) = (k[3][0], k[3][1]);
        let [t12, t23, t34, t14] = data.t_fracture;
        let alpha_coeff = [
            k1y / t14,
            k1y * k2x * k3y * k4x / (k1x * k3x * k4y * t23),
            k1y * k3y * k4x * t12 / (k1x * k4y * t23 * t34),
            k1y * k4x * t12 / (k1x * t14 * t34),
        ];
        let beta_coeff = [
            1.0,
            k1y * k3y * k4x * t12 / (k1x * k3x * k4y * t23),
            -k1y * k4x * t12 / (k1x * k4y * t34),
            -k1y * t12 / (k1x * t14),
        ];
        let ratio = data.compatibility_ratio();
        let mut warnings = Vec::new();
        if (ratio - 1.0).abs() > 1e-12 {
            warnings.push(format!(
                "compatibility ratio is {ratio}, not 1: the closed form does not satisfy every \
                 transmission condition and the defect is compensated in the right-hand side"
            ));
        }
        let case = AnalyticCase {
            data,
            alpha_coeff,
            beta_coeff,
            compatibility_ratio: ratio,
            warnings,
        };
        // 1/alpha_i = alpha_f - c_i beta_12 with alpha_f in [1/e, e] and beta_12 = -1
        for (i, c) in case.alpha_coeff.iter().enumerate() {
            let min = (-1.0f64).exp() + c;
            if min <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: format!("alpha{}", i + 1),
                    value: min,
                    reason: "1/alpha_i vanishes in the domain",
                });
            }
        }
        for w in &case.warnings {
            log::warn!("{w}");
        }
        Ok(case)
    }

    fn alpha_f(x: Vec3) -> Jet {
        (Jet::coordinate(2, x).scale(PI)).sin().exp()
    }

    fn beta_12(_x: Vec3) -> Jet {
        Jet::constant(-1.0)
    }

    fn gamma(f: FractureId, x: Vec3) -> Jet {
        let t = Jet::coordinate(f.tangent_axis(), x);
        match f {
            FractureId::F12 => t.scale(2.0 * PI).cos() + t + (-1.0),
            FractureId::F23 => t,
            FractureId::F34 => -(t.scale(PI).cos().exp()) + t + E,
            FractureId::F14 => t.scale(PI).sin().scale(1.0 / PI),
        }
    }

    /// `u_ij` extended to all of R^3 (it depends on the tangent coordinate
    /// and `z` only).
    pub fn fracture_jet(&self, f: FractureId, x: Vec3) -> Jet {
        Self::alpha_f(x) + Self::beta_12(x).scale(self.beta_coeff[f.index()]) * Self::gamma(f, x)
    }

    pub fn alpha_jet(&self, i: usize, x: Vec3) -> Jet {
        (Self::alpha_f(x) - Self::beta_12(x).scale(self.alpha_coeff[i - 1])).recip()
    }

    /// `u_i` extended to all of R^3.
    pub fn matrix_jet(&self, i: usize, x: Vec3) -> Jet {
        let (a, b) = subdomain_fractures(i);
        self.alpha_jet(i, x) * self.fracture_jet(a, x) * self.fracture_jet(b, x)
    }

    pub fn matrix_value(&self, i: usize, x: Vec3) -> f64 {
        self.matrix_jet(i, x).v
    }

    pub fn fracture_value(&self, f: FractureId, x: Vec3) -> f64 {
        self.fracture_jet(f, x).v
    }

    pub fn fracture_tangential_gradient(&self, f: FractureId, x: Vec3) -> Vec3 {
        let mut g = self.fracture_jet(f, x).g;
        g[f.normal_axis()] = 0.0;
        g
    }

    /// `h_m = -div(K grad u_i)`.
    pub fn matrix_source(&self, i: usize, x: Vec3) -> f64 {
        -self
            .matrix_jet(i, x)
            .weighted_laplacian(self.data.k_matrix[i - 1])
    }

    /// Trace of the matrix pressure on side `s`.
    pub fn trace(&self, s: Side, x: Vec3) -> f64 {
        self.matrix_value(s.subdomain(), x)
    }

    /// Normal Darcy flux `-(K grad u) . n_alpha` from side `s` into the fracture.
    pub fn normal_flux(&self, s: Side, x: Vec3) -> f64 {
        let i = s.subdomain();
        let j = self.matrix_jet(i, x);
        let k = self.data.k_matrix[i - 1];
        let q = [-k[0] * j.g[0], -k[1] * j.g[1], -k[2] * j.g[2]];
        dot(q, s.normal())
    }

    /// Right-hand side of the transmission condition on side `s`.
    pub fn transmission_flux(&self, s: Side, x: Vec3) -> f64 {
        let xi = self.data.xi;
        let t = self.data.t_fracture[s.fracture.index()];
        let ua = self.trace(s, x);
        let ub = self.trace(s.opposite(), x);
        let uf = self.fracture_value(s.fracture, x);
        t / (2.0 * xi - 1.0) * (xi * ua + (1.0 - xi) * ub - uf)
    }

    /// Amount by which the closed form violates the transmission condition
    /// on side `s`; identically zero for compatible data at `xi = 1`.
    pub fn transmission_defect(&self, s: Side, x: Vec3) -> f64 {
        self.normal_flux(s, x) - self.transmission_flux(s, x)
    }

    /// `h_f` such that the fracture balance holds with the transmission
    /// fluxes of the discrete coupling.
    pub fn fracture_source(&self, f: FractureId, x: Vec3) -> f64 {
        let d = self.data.width;
        let kf = self.data.k_fracture[f.index()];
        let j = self.fracture_jet(f, x);
        let mut k = [kf; 3];
        k[f.normal_axis()] = 0.0;
        let div_q = -d * j.weighted_laplacian(k);
        let exchange: f64 = [true, false]
            .into_iter()
            .map(|positive| {
                self.transmission_flux(
                    Side {
                        fracture: f,
                        positive,
                    },
                    x,
                )
            })
            .sum();
        (div_q - exchange) / d
    }

    /// Net tangential flux leaving the four fractures through the
    /// intersection line at height `z`.
    pub fn intersection_flux(&self, z: f64) -> f64 {
        let x = [0.0, 0.0, z];
        FractureId::ALL
            .into_iter()
            .map(|f| {
                let g = self.fracture_tangential_gradient(f, x);
                let q = g.map(|c| -self.data.width * self.data.k_fracture[f.index()] * c);
                dot(q, crate::mesh::intersection_outward_normal(f))
            })
            .sum()
    }

    pub fn intersection_mismatch(&self, point: Vec3) -> Result<f64> {
        if point[0].abs() > POINT_TOL
            || point[1].abs() > POINT_TOL
            || point[2].abs() > 0.5 + POINT_TOL
        {
            return Err(Error::OutsideRegion {
                point,
                region: "intersection line".into(),
            });
        }
        Ok(self.intersection_flux(point[2]))
    }

    fn check_region(&self, point: Vec3, region: Region) -> Result<()> {
        let ok = match region {
            Region::Matrix(i) => (1..=4).contains(&i) && in_subdomain(i, point, POINT_TOL),
            Region::Fracture(f) => f.contains(point),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutsideRegion {
                point,
                region: format!("{region:?}"),
            })
        }
    }

    /// Exact pressure and gradient (tangential in a fracture).
    pub fn eval_solution(&self, point: Vec3, region: Region) -> Result<(f64, Vec3)> {
        self.check_region(point, region)?;
        Ok(match region {
            Region::Matrix(i) => {
                let j = self.matrix_jet(i, point);
                (j.v, j.g)
            }
            Region::Fracture(f) => (
                self.fracture_value(f, point),
                self.fracture_tangential_gradient(f, point),
            ),
        })
    }

    pub fn eval_sources(&self, point: Vec3, region: Region) -> Result<f64> {
        self.check_region(point, region)?;
        Ok(match region {
            Region::Matrix(i) => self.matrix_source(i, point),
            Region::Fracture(f) => self.fracture_source(f, point),
        })
    }
}
