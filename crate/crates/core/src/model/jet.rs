//! Second-order forward-mode derivatives in three variables.

use std::ops::{Add, Mul, Neg, Sub};

/// A value together with its gradient and Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

impl Jet {
    pub fn constant(v: f64) -> Jet {
        Jet {
            v,
            g: [0.0; 3],
            h: [[0.0; 3]; 3],
        }
    }

    /// The coordinate function `x_i` evaluated at `x`.
    pub fn coordinate(i: usize, x: [f64; 3]) -> Jet {
        let mut j = Jet::constant(x[i]);
        j.g[i] = 1.0;
        j
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.v`.
    pub fn chain(self, f: f64, df: f64, d2f: f64) -> Jet {
        let mut out = Jet::constant(f);
        for i in 0..3 {
            out.g[i] = df * self.g[i];
            for j in 0..3 {
                out.h[i][j] = df * self.h[i][j] + d2f * self.g[i] * self.g[j];
            }
        }
        out
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn recip(self) -> Jet {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn scale(self, s: f64) -> Jet {
        self.chain(s * self.v, s, 0.0)
    }

    /// Sum of the diagonal Hessian entries weighted by `k`.
    pub fn weighted_laplacian(&self, k: [f64; 3]) -> f64 {
        k[0] * self.h[0][0] + k[1] * self.h[1][1] + k[2] * self.h[2][2]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut out = self;
        out.v += o.v;
        for i in 0..3 {
            out.g[i] += o.g[i];
            for j in 0..3 {
                out.h[i][j] += o.h[i][j];
            }
        }
        out
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, c: f64) -> Jet {
        self.v += c;
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for i in 0..3 {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for j in 0..3 {
                out.h[i][j] = self.h[i][j] * o.v
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i]
                    + self.v * o.h[i][j];
            }
        }
        out
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(Jet, Jet, Jet) -> Jet, x: [f64; 3]) {
        let eval = |p: [f64; 3]| {
            f(
                Jet::constant(p[0]),
                Jet::constant(p[1]),
                Jet::constant(p[2]),
            )
            .v
        };
        let j = f(
            Jet::coordinate(0, x),
            Jet::coordinate(1, x),
            Jet::coordinate(2, x),
        );
        let h = 1e-4;
        for i in 0..3 {
            let mut p = x;
            p[i] += h;
            let fp = eval(p);
            p[i] -= 2.0 * h;
            let fm = eval(p);
            assert!((j.g[i] - (fp - fm) / (2.0 * h)).abs() < 1e-6);
            assert!((j.h[i][i] - (fp - 2.0 * j.v + fm) / (h * h)).abs() < 1e-4);
        }
    }

    #[test]
    fn composite_expression() {
        fd_check(
            |x, y, z| (x * y).sin().exp() + (z * 2.0).cos() * (x + 3.0).recip(),
            [0.3, -0.2, 0.7],
        );
    }

    #[test]
    fn mixed_second_derivative_of_product() {
        let x = [0.5, 2.0, 0.0];
        let j = Jet::coordinate(0, x) * Jet::coordinate(1, x);
        assert_eq!(j.h[0][1], 1.0);
        assert_eq!(j.h[1][0], 1.0);
        assert_eq!(j.h[0][0], 0.0);
    }
}
