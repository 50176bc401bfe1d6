use super::{FractureNetwork, Mesh};

/// Partition of the cells around each vertex into classes connected through
/// non-fracture faces containing that vertex.
#[derive(Debug, Clone)]
pub struct VertexClasses {
    /// Number of classes at each vertex.
    pub counts: Vec<usize>,
    /// `cell_class[k][i]` is the class, at vertex `cells[k].vertices[i]`,
    /// containing cell `k`.
    pub cell_class: Vec<Vec<usize>>,
}

impl VertexClasses {
    /// Class index of `cell` at `vertex`, if the cell contains the vertex.
    pub fn class_of(&self, mesh: &Mesh, cell: usize, vertex: usize) -> Option<usize> {
        let i = mesh.cells[cell]
            .vertices
            .iter()
            .position(|&v| v == vertex)?;
        Some(self.cell_class[cell][i])
    }

    /// Cells of every class at `vertex`.
    pub fn members(&self, mesh: &Mesh, vertex: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.counts[vertex]];
        for &k in &mesh.vertex_cells[vertex] {
            let c = self
                .class_of(mesh, k, vertex)
                .expect("vertex cell contains vertex");
            out[c].push(k);
        }
        out
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

pub fn compute_vertex_classes(mesh: &Mesh, fractures: &FractureNetwork) -> VertexClasses {
    let nv = mesh.vertices.len();
    let mut counts = vec![0; nv];
    let mut cell_class: Vec<Vec<usize>> = mesh
        .cells
        .iter()
        .map(|c| vec![usize::MAX; c.vertices.len()])
        .collect();
    for v in 0..nv {
        let cells = &mesh.vertex_cells[v];
        let local = |k: usize| cells.iter().position(|&c| c == k).unwrap();
        let mut parent: Vec<usize> = (0..cells.len()).collect();
        for &f in &mesh.vertex_faces[v] {
            if fractures.is_fracture_face(f) {
                continue;
            }
            let fc = &mesh.faces[f].cells;
            if fc.len() == 2 {
                let a = find(&mut parent, local(fc[0]));
                let b = find(&mut parent, local(fc[1]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut label = vec![usize::MAX; cells.len()];
        let mut n = 0;
        for i in 0..cells.len() {
            let r = find(&mut parent, i);
            if label[r] == usize::MAX {
                label[r] = n;
                n += 1;
            }
            let k = cells[i];
            let pos = mesh.cells[k].vertices.iter().position(|&w| w == v).unwrap();
            cell_class[k][pos] = label[r];
        }
        counts[v] = n;
    }
    VertexClasses { counts, cell_class }
}
