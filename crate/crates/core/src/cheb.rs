//! Chebyshev series on the reference interval [-1, 1].
//!
//! Every polynomial piece in the crate is stored as a Chebyshev series in a
//! local variable `s`, mapped affinely onto the piece's interval. This keeps
//! high-degree projections well conditioned.

use std::f64::consts::PI;

/// Maximum polynomial degree of a single piece.
pub const DEGREE_CAP: usize = 64;

/// Chebyshev coefficients: `p(s) = sum c[k] T_k(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cheb {
    coeffs: Vec<f64>,
}

impl Cheb {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Builds the series of the monomial polynomial `sum a[k] x^k` restricted
    /// to [lo, hi].
    pub fn from_monomial(a: &[f64], lo: f64, hi: f64) -> Self {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = Cheb::zero();
        for &ak in a.iter().rev() {
            // acc <- acc * (mid + half s) + ak
            let mut next = acc.mul_s().scale(half);
            next = next.add(&acc.scale(mid));
            next.coeffs[0] += ak;
            acc = next;
        }
        acc
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, s: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * s * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        s * b1 - b2 + self.coeffs[0]
    }

    /// Value at s = 1.
    pub fn right_value(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Value at s = -1.
    pub fn left_value(&self) -> f64 {
        self.coeffs.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c } else { -c }).sum()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn add(&self, other: &Cheb) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0)).collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Cheb) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Multiplication by `s`.
    fn mul_s(&self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            if k == 0 {
                out[1] += c;
            } else {
                out[k + 1] += 0.5 * c;
                out[k - 1] += 0.5 * c;
            }
        }
        Self { coeffs: out }
    }

    pub fn mul(&self, other: &Cheb) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (m, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (n, &b) in other.coeffs.iter().enumerate() {
                let p = 0.5 * a * b;
                out[m + n] += p;
                out[m.abs_diff(n)] += p;
            }
        }
        Self { coeffs: out }
    }

    /// Derivative with respect to `s`.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Cheb::zero();
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        Self { coeffs: d }
    }

    /// Antiderivative with respect to `s`, vanishing at s = -1.
    pub fn antiderivative(&self) -> Self {
        let n = self.coeffs.len();
        let c = |k: usize| -> f64 { self.coeffs.get(k).copied().unwrap_or(0.0) };
        let mut out = vec![0.0; n + 1];
        out[1] = c(0) - 0.5 * c(2);
        for (k, o) in out.iter_mut().enumerate().skip(2) {
            *o = (c(k - 1) - c(k + 1)) / (2.0 * k as f64);
        }
        let mut p = Self { coeffs: out };
        let shift = p.left_value();
        p.coeffs[0] -= shift;
        p
    }

    /// Integral over [-1, 1].
    pub fn integral(&self) -> f64 {
        self.coeffs.iter().enumerate().filter(|(k, _)| k % 2 == 0).map(|(k, &c)| 2.0 * c / (1.0 - (k * k) as f64)).sum()
    }

    /// Interpolant of degree `n` at the Chebyshev points of the first kind.
    pub fn interpolate<F: FnMut(f64) -> f64>(n: usize, mut f: F) -> Self {
        let m = n + 1;
        let mf = m as f64;
        let values: Vec<f64> = (0..m).map(|j| f((PI * (j as f64 + 0.5) / mf).cos())).collect();
        let coeffs = (0..m)
            .map(|k| {
                let sum: f64 =
                    values.iter().enumerate().map(|(j, &v)| v * (PI * k as f64 * (j as f64 + 0.5) / mf).cos()).sum();
                if k == 0 {
                    sum / mf
                } else {
                    2.0 * sum / mf
                }
            })
            .collect();
        Self { coeffs }
    }

    /// Drops trailing coefficients at rounding level relative to the largest one.
    pub fn chop(mut self) -> Self {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let thresh = 8.0 * f64::EPSILON * scale;
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.abs() <= thresh) {
            self.coeffs.pop();
        }
        if scale == 0.0 {
            self.coeffs.truncate(1);
        }
        self
    }

    /// Sum of the magnitudes of the trailing `k` coefficients, with entries
    /// at rounding level counted as zero.
    pub fn tail_estimate(&self, k: usize) -> f64 {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let thresh = 8.0 * f64::EPSILON * scale;
        let n = self.coeffs.len();
        if n <= k {
            return 0.0;
        }
        self.coeffs[n - k..].iter().map(|c| if c.abs() <= thresh { 0.0 } else { c.abs() }).sum()
    }

    /// Re-expands the polynomial `p` living on [lo, hi] onto the sub-interval
    /// [new_lo, new_hi] (which may also extend beyond it).
    pub fn remap(&self, lo: f64, hi: f64, new_lo: f64, new_hi: f64) -> Self {
        if lo == new_lo && hi == new_hi {
            return self.clone();
        }
        let to_old = |s: f64| {
            let x = 0.5 * (new_lo + new_hi) + 0.5 * (new_hi - new_lo) * s;
            (2.0 * x - lo - hi) / (hi - lo)
        };
        Cheb::interpolate(self.degree(), |s| self.eval(to_old(s)))
    }

    /// Real roots in [-1, 1] where the polynomial changes sign.
    ///
    /// Sign changes are bracketed on a dense Chebyshev-spaced grid, then
    /// isolated by bisection and polished with Newton steps.
    pub fn sign_change_roots(&self) -> Vec<f64> {
        let deg = self.degree();
        if deg == 0 {
            return Vec::new();
        }
        let d = self.derivative();
        let m = 8 * deg + 16;
        let grid: Vec<f64> = (0..=m).map(|j| -(PI * j as f64 / m as f64).cos()).collect();
        let vals: Vec<f64> = grid.iter().map(|&s| self.eval(s)).collect();
        let mut roots = Vec::new();
        for j in 0..m {
            let (mut a, mut b) = (grid[j], grid[j + 1]);
            let (mut fa, fb) = (vals[j], vals[j + 1]);
            if fa == 0.0 {
                if j > 0 && vals[j - 1] * fb < 0.0 {
                    roots.push(a);
                }
                continue;
            }
            if fa * fb >= 0.0 {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = self.eval(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa * fm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
                if b - a < 1e-9 {
                    break;
                }
            }
            let mut x = 0.5 * (a + b);
            for _ in 0..4 {
                let dv = d.eval(x);
                if dv == 0.0 {
                    break;
                }
                let nx = x - self.eval(x) / dv;
                if nx < a || nx > b {
                    break;
                }
                x = nx;
            }
            roots.push(x);
        }
        roots
    }
}
