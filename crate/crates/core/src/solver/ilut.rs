use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::gmres::Preconditioner;
use super::Csr;
use crate::error::{Error, Result};

/// Incomplete LU factors: `l` is strictly lower (unit diagonal implied),
/// `u` is upper with the diagonal stored first in each row.
#[derive(Debug, Clone)]
pub struct IlutFactors {
    pub l: Csr,
    pub u: Csr,
    pub threshold: f64,
}

/// Threshold ILU: entries below `threshold` times the 2-norm of the
/// original row are dropped; diagonals are always kept.
pub fn ilut_factor(a: &Csr, threshold: f64) -> Result<IlutFactors> {
    let n = a.n_rows;
    if a.n_cols != n {
        return Err(Error::Dimension(format!(
            "ILUT needs a square matrix, got {}x{}",
            n, a.n_cols
        )));
    }
    let mut l_ptr = vec![0];
    let mut l_idx: Vec<usize> = Vec::new();
    let mut l_val: Vec<f64> = Vec::new();
    let mut u_ptr = vec![0];
    let mut u_idx: Vec<usize> = Vec::new();
    let mut u_val: Vec<f64> = Vec::new();

    let mut w = vec![0.0; n];
    let mut filled = vec![false; n];
    let mut upper: Vec<usize> = Vec::new();
    let mut heap = BinaryHeap::new();

    for i in 0..n {
        let norm = a.row(i).map(|(_, v)| v * v).sum::<f64>().sqrt();
        let tol = threshold * norm;
        for (j, v) in a.row(i) {
            w[j] = v;
            filled[j] = true;
            if j < i {
                heap.push(Reverse(j));
            } else {
                upper.push(j);
            }
        }
        if !filled[i] {
            filled[i] = true;
            upper.push(i);
        }
        let mut lower = Vec::new();
        while let Some(Reverse(k)) = heap.pop() {
            let pivot: f64 = u_val[u_ptr[k]];
            let wk = w[k] / pivot;
            w[k] = 0.0;
            filled[k] = false;
            if wk.abs() <= tol {
                continue;
            }
            lower.push((k, wk));
            for p in u_ptr[k] + 1..u_ptr[k + 1] {
                let j = u_idx[p];
                if !filled[j] {
                    filled[j] = true;
                    w[j] = 0.0;
                    if j < i {
                        heap.push(Reverse(j));
                    } else {
                        upper.push(j);
                    }
                }
                w[j] -= wk * u_val[p];
            }
        }
        lower.sort_unstable_by_key(|&(k, _)| k);
        for (k, v) in lower {
            l_idx.push(k);
            l_val.push(v);
        }
        l_ptr.push(l_idx.len());

        let d = w[i];
        if d == 0.0 || !d.is_finite() {
            return Err(Error::ZeroPivot { row: i });
        }
        u_idx.push(i);
        u_val.push(d);
        upper.sort_unstable();
        for &j in &upper {
            if j != i && w[j].abs() > tol {
                u_idx.push(j);
                u_val.push(w[j]);
            }
            w[j] = 0.0;
            filled[j] = false;
        }
        upper.clear();
        u_ptr.push(u_idx.len());
    }
    let csr = |indptr, indices, values| Csr {
        n_rows: n,
        n_cols: n,
        indptr,
        indices,
        values,
    };
    Ok(IlutFactors {
        l: csr(l_ptr, l_idx, l_val),
        u: csr(u_ptr, u_idx, u_val),
        threshold,
    })
}

impl IlutFactors {
    pub fn nnz(&self) -> usize {
        self.l.nnz() + self.u.nnz()
    }

    pub fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = self.l.n_rows;
        for i in 0..n {
            let mut s = b[i];
            for (k, v) in self.l.row(i) {
                s -= v * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let p0 = self.u.indptr[i];
            let mut s = x[i];
            for p in p0 + 1..self.u.indptr[i + 1] {
                s -= self.u.values[p] * x[self.u.indices[p]];
            }
            x[i] = s / self.u.values[p0];
        }
    }
}

impl Preconditioner for IlutFactors {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.solve(r, z);
    }
}
