use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n_rows: usize,
    pub n_cols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    /// Builds the matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Csr> {
        if let Some(&(i, j, _)) = triplets
            .iter()
            .find(|&&(i, j, _)| i >= n_rows || j >= n_cols)
        {
            return Err(Error::Dimension(format!(
                "entry ({i}, {j}) outside {n_rows}x{n_cols}"
            )));
        }
        triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0; n_rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n_rows {
            indptr[i + 1] += indptr[i];
        }
        Ok(Csr {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Csr {
        Csr {
            n_rows: n,
            n_cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Csr {
        let n = a.len();
        let m = a.first().map_or(0, Vec::len);
        let t = a
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(move |(j, &v)| (i, j, v))
            })
            .collect();
        Csr::from_triplets(n, m, t).expect("indices in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n_cols]; self.n_rows];
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                a[i][j] += v;
            }
        }
        a
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n_rows) {
            let mut s = 0.0;
            for p in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[p] * x[self.indices[p]];
            }
            *yi = s;
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.matvec(x, &mut y);
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |a_ij - a_ji| / max |a_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, i)).collect()
    }

    pub fn write_matrix_market(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let a = Csr::from_triplets(
            2,
            3,
            vec![(1, 2, 1.0), (0, 1, 2.0), (1, 0, 3.0), (0, 1, 0.5)],
        )
        .unwrap();
        assert_eq!(a.indptr, vec![0, 1, 3]);
        assert_eq!(a.indices, vec![1, 0, 2]);
        assert_eq!(a.values, vec![2.5, 3.0, 1.0]);
        assert_eq!(a.mul(&[1.0, 2.0, 3.0]), vec![5.0, 6.0]);
        assert_eq!(a.get(1, 1), 0.0);
    }

    #[test]
    fn out_of_range_entry_is_rejected() {
        assert!(matches!(
            Csr::from_triplets(2, 2, vec![(2, 0, 1.0)]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn matrix_market_round_trip_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.mtx");
        Csr::identity(3).write_matrix_market(&p).unwrap();
        let s = std::fs::read_to_string(p).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1], "3 3 3");
        assert_eq!(lines.len(), 5);
    }
}
