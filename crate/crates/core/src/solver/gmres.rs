use super::Csr;
use crate::error::{Error, Result};

pub trait Preconditioner {
    /// `z = M^{-1} r`.
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    /// Relative residual target `|b - Ax| / |b|`.
    pub tol: f64,
    /// Iteration cap; the system dimension when `None`.
    pub max_iterations: Option<usize>,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            tol: 1e-10,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual recomputed from `b - Ax`.
    pub residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn true_residual(a: &Csr, b: &[f64], x: &[f64]) -> Vec<f64> {
    let ax = a.mul(x);
    b.iter().zip(ax).map(|(b, ax)| b - ax).collect()
}

/// Right-preconditioned GMRes without restart. Convergence is accepted only
/// once the unpreconditioned residual meets the tolerance; if the Krylov
/// estimate is met but the true residual is not, the cycle restarts from
/// the current iterate.
pub fn gmres(
    a: &Csr,
    b: &[f64],
    m: &impl Preconditioner,
    opts: GmresOptions,
) -> Result<GmresResult> {
    let n = a.n_rows;
    if b.len() != n || a.n_cols != n {
        return Err(Error::Dimension(format!(
            "GMRes: matrix {}x{}, rhs {}",
            n,
            a.n_cols,
            b.len()
        )));
    }
    let max_it = opts.max_iterations.unwrap_or(n).max(1);
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(GmresResult {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = opts.tol * bnorm;
    let mut iterations = 0;
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    loop {
        let r = true_residual(a, b, &x);
        let beta = norm(&r);
        if beta <= target {
            return Ok(GmresResult {
                x,
                iterations,
                residual: beta / bnorm,
            });
        }
        if iterations >= max_it {
            return Err(Error::NotConverged {
                iterations,
                residual: beta / bnorm,
            });
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|ri| ri / beta).collect()];
        let mut h: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];
        while iterations < max_it {
            let j = v.len() - 1;
            m.apply(&v[j], &mut z);
            a.matvec(&z, &mut w);
            let mut col = vec![0.0; j + 2];
            for (i, vi) in v.iter().enumerate() {
                let hij: f64 = w.iter().zip(vi).map(|(a, b)| a * b).sum();
                col[i] = hij;
                for (wk, vk) in w.iter_mut().zip(vi) {
                    *wk -= hij * vk;
                }
            }
            let hn = norm(&w);
            col[j + 1] = hn;
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let rho = col[j].hypot(col[j + 1]);
            let (c, s) = if rho == 0.0 {
                (1.0, 0.0)
            } else {
                (col[j] / rho, col[j + 1] / rho)
            };
            cs.push(c);
            sn.push(s);
            col[j] = rho;
            col[j + 1] = 0.0;
            g.push(-s * g[j]);
            g[j] *= c;
            h.push(col);
            iterations += 1;
            let breakdown = hn <= f64::EPSILON * beta;
            if g[j + 1].abs() <= target || breakdown || iterations >= max_it {
                break;
            }
            v.push(w.iter().map(|wi| wi / hn).collect());
        }
        let k = h.len();
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|l| h[l][i] * y[l]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut u = vec![0.0; n];
        for (yi, vi) in y.iter().zip(&v) {
            for (uk, vk) in u.iter_mut().zip(vi) {
                *uk += yi * vk;
            }
        }
        m.apply(&u, &mut z);
        for (xk, zk) in x.iter_mut().zip(&z) {
            *xk += zk;
        }
    }
}
