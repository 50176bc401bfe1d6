use serde::{Deserialize, Serialize};

use super::{CellShape, CellSpec, Mesh};
use crate::error::{Error, Result};

/// Mesh families available to a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFamily {
    /// Uniform hexahedral grid.
    Cartesian,
    /// Kuhn subdivision of the hexahedral grid into six tetrahedra per cube.
    Tetrahedral,
}

impl MeshFamily {
    pub fn build(self, n: usize) -> Result<Mesh> {
        match self {
            MeshFamily::Cartesian => build_cartesian_mesh(n),
            MeshFamily::Tetrahedral => build_tetrahedral_mesh(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Cartesian => "cartesian",
            MeshFamily::Tetrahedral => "tetrahedral",
        }
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidResolution {
            n,
            reason: "at least two cells per axis are required",
        });
    }
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidResolution {
            n,
            reason:
                "an odd number of cells per axis cannot resolve the fracture planes x = 0 and y = 0",
        });
    }
    Ok(())
}

struct Grid {
    n: usize,
}

impl Grid {
    fn vertex(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.n + 1;
        i + m * (j + m * k)
    }

    fn coordinates(&self) -> Vec<[f64; 3]> {
        let n = self.n;
        let half = (n / 2) as f64;
        let c = |i: usize| (i as f64 - half) / n as f64;
        let mut v = Vec::with_capacity((n + 1).pow(3));
        for k in 0..=n {
            for j in 0..=n {
                for i in 0..=n {
                    v.push([c(i), c(j), c(k)]);
                }
            }
        }
        v
    }

    /// Corner `(a, b, c)` of cube `(i, j, k)`.
    fn corner(&self, i: usize, j: usize, k: usize, a: usize, b: usize, c: usize) -> usize {
        self.vertex(i + a, j + b, k + c)
    }
}

/// Uniform `n x n x n` hexahedral mesh of the domain.
pub fn build_cartesian_mesh(n: usize) -> Result<Mesh> {
    check_resolution(n)?;
    let g = Grid { n };
    let mut specs = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let p = |a, b, c| g.corner(i, j, k, a, b, c);
                let faces = vec![
                    vec![p(0, 0, 0), p(0, 1, 0), p(0, 1, 1), p(0, 0, 1)],
                    vec![p(1, 0, 0), p(1, 1, 0), p(1, 1, 1), p(1, 0, 1)],
                    vec![p(0, 0, 0), p(1, 0, 0), p(1, 0, 1), p(0, 0, 1)],
                    vec![p(0, 1, 0), p(1, 1, 0), p(1, 1, 1), p(0, 1, 1)],
                    vec![p(0, 0, 0), p(1, 0, 0), p(1, 1, 0), p(0, 1, 0)],
                    vec![p(0, 0, 1), p(1, 0, 1), p(1, 1, 1), p(0, 1, 1)],
                ];
                let shape = CellShape::Hexahedron([
                    p(0, 0, 0),
                    p(1, 0, 0),
                    p(1, 1, 0),
                    p(0, 1, 0),
                    p(0, 0, 1),
                    p(1, 0, 1),
                    p(1, 1, 1),
                    p(0, 1, 1),
                ]);
                specs.push(CellSpec { faces, shape });
            }
        }
    }
    Mesh::from_cells(g.coordinates(), specs, n)
}

const AXIS_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Kuhn subdivision of the `n x n x n` grid: every cube is split into the six
/// tetrahedra sharing its main diagonal. All cubes use the same diagonal, so
/// the triangulations of shared square faces match.
pub fn build_tetrahedral_mesh(n: usize) -> Result<Mesh> {
    check_resolution(n)?;
    let g = Grid { n };
    let mut specs = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in AXIS_PERMUTATIONS {
                    let mut offs = [0usize; 3];
                    let mut tet = [0usize; 4];
                    tet[0] = g.corner(i, j, k, 0, 0, 0);
                    for (step, &axis) in perm.iter().enumerate() {
                        offs[axis] = 1;
                        tet[step + 1] = g.corner(i, j, k, offs[0], offs[1], offs[2]);
                    }
                    let faces = vec![
                        vec![tet[1], tet[2], tet[3]],
                        vec![tet[0], tet[2], tet[3]],
                        vec![tet[0], tet[1], tet[3]],
                        vec![tet[0], tet[1], tet[2]],
                    ];
                    specs.push(CellSpec {
                        faces,
                        shape: CellShape::Tetrahedron(tet),
                    });
                }
            }
        }
    }
    Mesh::from_cells(g.coordinates(), specs, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_cell_counts() {
        assert_eq!(build_cartesian_mesh(8).unwrap().n_cells(), 512);
    }

    #[test]
    fn tetrahedral_cell_counts() {
        assert_eq!(build_tetrahedral_mesh(2).unwrap().n_cells(), 48);
        assert_eq!(build_tetrahedral_mesh(4).unwrap().n_cells(), 384);
    }

    #[test]
    fn odd_or_tiny_resolution_is_rejected() {
        assert!(matches!(
            build_cartesian_mesh(3),
            Err(Error::InvalidResolution { n: 3, .. })
        ));
        assert!(build_tetrahedral_mesh(0).is_err());
        assert!(build_cartesian_mesh(1).is_err());
    }

    #[test]
    fn kuhn_faces_are_conforming() {
        let m = build_tetrahedral_mesh(4).unwrap();
        let boundary = m.faces.iter().filter(|f| f.is_boundary()).count();
        // 6 sides, n^2 squares each, 2 triangles per square
        assert_eq!(boundary, 6 * 16 * 2);
        // Euler characteristic of a ball: V - E + F - C = 1
        let chi = m.vertices.len() as i64 - m.edges.len() as i64 + m.faces.len() as i64
            - m.cells.len() as i64;
        assert_eq!(chi, 1);
        for c in &m.cells {
            assert!((c.volume - 1.0 / (6.0 * 64.0)).abs() < 1e-15);
        }
    }
}
