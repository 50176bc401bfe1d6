//! Degree-4 quadrature on tetrahedra and triangles, 3-point Gauss on segments.
//!
//! Rules are given in barycentric coordinates with weights summing to one,
//! so an integral is `measure * sum(w * f(x))`.

use std::sync::OnceLock;

use crate::geometry::Vec3;

pub struct Rule<const N: usize> {
    pub points: Vec<[f64; N]>,
    pub weights: Vec<f64>,
}

/// 11-point rule of Keast, exact for polynomials of degree 4.
pub fn tet_rule() -> &'static Rule<4> {
    static RULE: OnceLock<Rule<4>> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut points = vec![[0.25; 4]];
        let mut weights = vec![-148.0 / 1875.0];
        let (a, b) = (1.0 / 14.0, 11.0 / 14.0);
        for i in 0..4 {
            let mut p = [a; 4];
            p[i] = b;
            points.push(p);
            weights.push(343.0 / 7500.0);
        }
        let r = (5.0f64 / 14.0).sqrt();
        let (c, d) = ((1.0 + r) / 4.0, (1.0 - r) / 4.0);
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let mut p = [d; 4];
            p[i] = c;
            p[j] = c;
            points.push(p);
            weights.push(56.0 / 375.0);
        }
        Rule { points, weights }
    })
}

/// 6-point rule of Dunavant, exact for polynomials of degree 4.
pub fn tri_rule() -> &'static Rule<3> {
    static RULE: OnceLock<Rule<3>> = OnceLock::new();
    RULE.get_or_init(|| {
        let groups = [
            (0.223381589678011, 0.108103018168070, 0.445948490915965),
            (0.109951743655322, 0.816847572980459, 0.091576213509771),
        ];
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (w, a, b) in groups {
            for p in [[a, b, b], [b, a, b], [b, b, a]] {
                points.push(p);
                weights.push(w);
            }
        }
        Rule { points, weights }
    })
}

/// 3-point Gauss-Legendre rule, exact for degree 5.
pub fn segment_rule() -> &'static Rule<2> {
    static RULE: OnceLock<Rule<2>> = OnceLock::new();
    RULE.get_or_init(|| {
        let s = (0.6f64).sqrt() / 2.0;
        Rule {
            points: vec![[0.5 - s, 0.5 + s], [0.5, 0.5], [0.5 + s, 0.5 - s]],
            weights: vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0],
        }
    })
}

pub fn map<const N: usize>(vertices: &[Vec3; N], lambda: &[f64; N]) -> Vec3 {
    let mut x = [0.0; 3];
    for (v, l) in vertices.iter().zip(lambda) {
        for a in 0..3 {
            x[a] += l * v[a];
        }
    }
    x
}

/// Splits a tetrahedron into 8 children of equal volume.
pub fn refine_tet(p: &[Vec3; 4]) -> Vec<[Vec3; 4]> {
    let m = |i: usize, j: usize| map(&[p[i], p[j]], &[0.5, 0.5]);
    let (m01, m02, m03, m12, m13, m23) = (m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3));
    vec![
        [p[0], m01, m02, m03],
        [m01, p[1], m12, m13],
        [m02, m12, p[2], m23],
        [m03, m13, m23, p[3]],
        [m01, m02, m03, m13],
        [m01, m02, m12, m13],
        [m02, m03, m13, m23],
        [m02, m12, m13, m23],
    ]
}

/// Splits a triangle into 4 congruent children.
pub fn refine_tri(p: &[Vec3; 3]) -> Vec<[Vec3; 3]> {
    let m = |i: usize, j: usize| map(&[p[i], p[j]], &[0.5, 0.5]);
    let (m01, m02, m12) = (m(0, 1), m(0, 2), m(1, 2));
    vec![
        [p[0], m01, m02],
        [m01, p[1], m12],
        [m02, m12, p[2]],
        [m01, m12, m02],
    ]
}
