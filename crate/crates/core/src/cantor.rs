//! The standard Cantor function and its singular continuous measure.

use crate::error::{Error, Result};

/// Variance of the standard Cantor measure on [0, 1].
const CANTOR_VARIANCE: f64 = 0.125;

/// Minimum recursion depth before adaptive acceptance is allowed.
const MIN_DEPTH: usize = 6;

/// The standard Cantor function on [0, 1], clamped outside.
pub fn cantor_function(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let mut y = y;
    let mut value = 0.0;
    let mut weight = 0.5;
    for _ in 0..60 {
        y *= 3.0;
        if y < 1.0 {
            // digit 0
        } else if y <= 2.0 {
            return value + weight;
        } else {
            value += weight;
            y -= 2.0;
        }
        weight *= 0.5;
    }
    value
}

/// `mass` times the Cantor measure mapped affinely onto [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CantorSpec {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

impl CantorSpec {
    /// Integral of `f` against the measure.
    ///
    /// Cells of the self-similar construction are integrated with the
    /// symmetric two-point rule that matches the cell's mass and variance
    /// (exact for cubics). A cell is split into its two children until the
    /// rule and the children agree to `tol`, or until `depth` levels. Cells
    /// disjoint from `support` are skipped.
    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        depth: usize,
        tol: f64,
        support: Option<(f64, f64)>,
    ) -> f64 {
        if self.mass == 0.0 {
            return 0.0;
        }
        let sigma = CANTOR_VARIANCE.sqrt();
        let mut rule = |a: f64, b: f64, m: f64| {
            let mid = 0.5 * (a + b);
            let off = sigma * (b - a);
            0.5 * m * (f(mid - off) + f(mid + off))
        };
        let outside = |a: f64, b: f64| match support {
            Some((slo, shi)) => b <= slo || a >= shi,
            None => false,
        };
        let total = self.mass.abs();
        let mut acc = 0.0;
        let mut stack = vec![(self.lo, self.hi, self.mass, 0usize)];
        while let Some((a, b, m, level)) = stack.pop() {
            if outside(a, b) {
                continue;
            }
            let third = (b - a) / 3.0;
            let (la, lb) = (a, a + third);
            let (ra, rb) = (b - third, b);
            if level >= depth {
                acc += rule(a, b, m);
                continue;
            }
            if level >= MIN_DEPTH {
                let coarse = rule(a, b, m);
                let fine = rule(la, lb, 0.5 * m) + rule(ra, rb, 0.5 * m);
                if (fine - coarse).abs() <= tol * m.abs() / total {
                    acc += fine;
                    continue;
                }
            }
            stack.push((la, lb, 0.5 * m, level + 1));
            stack.push((ra, rb, 0.5 * m, level + 1));
        }
        acc
    }

    /// Restriction to (sub_lo, sub_hi) as a list of self-similar cells.
    /// Cells straddling an endpoint at the last level are kept when their
    /// midpoint lies inside.
    pub fn restrict(&self, sub_lo: f64, sub_hi: f64, depth: usize) -> Vec<CantorSpec> {
        let mut out = Vec::new();
        let mut stack = vec![(self.lo, self.hi, self.mass, 0usize)];
        while let Some((a, b, m, level)) = stack.pop() {
            if b <= sub_lo || a >= sub_hi {
                continue;
            }
            if a >= sub_lo && b <= sub_hi {
                out.push(CantorSpec { lo: a, hi: b, mass: m });
                continue;
            }
            if level >= depth {
                let mid = 0.5 * (a + b);
                if mid > sub_lo && mid < sub_hi {
                    out.push(CantorSpec { lo: a, hi: b, mass: m });
                }
                continue;
            }
            let third = (b - a) / 3.0;
            stack.push((b - third, b, 0.5 * m, level + 1));
            stack.push((a, a + third, 0.5 * m, level + 1));
        }
        out.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        out
    }
}

/// Amplitude times the Cantor function mapped onto [lo, hi]: zero to the
/// left of the carrier, equal to the amplitude to the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CantorFunction {
    pub lo: f64,
    pub hi: f64,
    pub amplitude: f64,
}

impl CantorFunction {
    pub fn new(lo: f64, hi: f64, amplitude: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi && amplitude.is_finite()) {
            return Err(Error::InvalidBV(format!("bad Cantor carrier ({lo}, {hi})")));
        }
        Ok(Self { lo, hi, amplitude })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * cantor_function((x - self.lo) / (self.hi - self.lo))
    }

    pub fn derivative_measure(&self) -> CantorSpec {
        CantorSpec { lo: self.lo, hi: self.hi, mass: self.amplitude }
    }

    /// The piecewise-linear iterate of generation `depth`: linear on the
    /// remaining intervals, constant on the removed ones. Its sup distance
    /// to the Cantor function is at most `|amplitude| 2^-depth`, its L1
    /// distance at most `|amplitude| (hi - lo) 3^-depth`.
    ///
    /// Returns (lo, hi, value at lo, value at hi) segments covering the carrier.
    pub fn linear_iterate(&self, depth: usize) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::new();
        self.iterate_cell(self.lo, self.hi, 0.0, self.amplitude, depth, &mut out);
        out
    }

    fn iterate_cell(&self, a: f64, b: f64, va: f64, vb: f64, depth: usize, out: &mut Vec<(f64, f64, f64, f64)>) {
        if depth == 0 {
            out.push((a, b, va, vb));
            return;
        }
        let third = (b - a) / 3.0;
        let mid = 0.5 * (va + vb);
        self.iterate_cell(a, a + third, va, mid, depth - 1, out);
        out.push((a + third, b - third, mid, mid));
        self.iterate_cell(b - third, b, mid, vb, depth - 1, out);
    }

    /// `int F(x) g'(x) dx` over the carrier for the Cantor function F, given
    /// the antiderivative-side values `g`. Removed intervals contribute
    /// exactly; remaining cells at `depth` use the trapezoid of F.
    pub fn integrate_against_derivative<G: FnMut(f64) -> f64>(&self, mut g: G, depth: usize) -> f64 {
        let mut acc = 0.0;
        let mut stack = vec![(self.lo, self.hi, 0.0, self.amplitude, 0usize)];
        while let Some((a, b, va, vb, level)) = stack.pop() {
            if level >= depth {
                acc += 0.5 * (va + vb) * (g(b) - g(a));
                continue;
            }
            let third = (b - a) / 3.0;
            let mid = 0.5 * (va + vb);
            acc += mid * (g(b - third) - g(a + third));
            stack.push((a, a + third, va, mid, level + 1));
            stack.push((b - third, b, mid, vb, level + 1));
        }
        acc
    }
}
