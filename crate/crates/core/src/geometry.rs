//! Small fixed-size vector helpers for 3D coordinates.

pub type Vec3 = [f64; 3];

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Arithmetic mean of a set of points.
pub fn mean(points: impl IntoIterator<Item = Vec3>) -> Vec3 {
    let mut acc = [0.0; 3];
    let mut n = 0usize;
    for p in points {
        acc = add(acc, p);
        n += 1;
    }
    scale(acc, 1.0 / n as f64)
}

/// Signed volume of the tetrahedron (a, b, c, d).
pub fn tet_signed_volume(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    dot(sub(b, a), cross(sub(c, a), sub(d, a))) / 6.0
}

pub fn tri_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    0.5 * norm(cross(sub(b, a), sub(c, a)))
}

/// Gradients of the four barycentric coordinates of a tetrahedron.
///
/// Returns `None` for a degenerate tetrahedron.
pub fn tet_barycentric_gradients(p: [Vec3; 4]) -> Option<[Vec3; 4]> {
    let e1 = sub(p[1], p[0]);
    let e2 = sub(p[2], p[0]);
    let e3 = sub(p[3], p[0]);
    let det = dot(e1, cross(e2, e3));
    let scale_ref = norm(e1) * norm(e2) * norm(e3);
    if det.abs() <= 1e-14 * scale_ref {
        return None;
    }
    // rows of the inverse Jacobian
    let g1 = scale(cross(e2, e3), 1.0 / det);
    let g2 = scale(cross(e3, e1), 1.0 / det);
    let g3 = scale(cross(e1, e2), 1.0 / det);
    let g0 = scale(add(add(g1, g2), g3), -1.0);
    Some([g0, g1, g2, g3])
}

/// In-plane gradients of the three barycentric coordinates of a triangle
/// embedded in 3D.
pub fn tri_barycentric_gradients(p: [Vec3; 3]) -> Option<[Vec3; 3]> {
    let n = cross(sub(p[1], p[0]), sub(p[2], p[0]));
    let nn = dot(n, n);
    if nn <= 1e-28 * dot(sub(p[1], p[0]), sub(p[1], p[0])).powi(2) {
        return None;
    }
    // grad(lambda_i) = n x (p_k - p_j) / |n|^2 for (i, j, k) cyclic
    let g = |j: usize, k: usize| scale(cross(n, sub(p[k], p[j])), 1.0 / nn);
    Some([g(1, 2), g(2, 0), g(0, 1)])
}
