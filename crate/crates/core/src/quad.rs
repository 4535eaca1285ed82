//! Gauss-Legendre rules and an adaptive composite integrator.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule on [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(mid + half * x)).sum::<f64>() * half
    }

    fn try_integrate<F: FnMut(f64) -> Result<f64>>(&self, a: f64, b: f64, f: &mut F) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x)?;
        }
        Ok(acc * half)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

const CACHED_SIZES: [usize; 6] = [8, 12, 16, 24, 32, 48];

/// Returns a cached rule with at least `n` nodes (48 at most).
pub fn rule(n: usize) -> &'static GaussLegendre {
    static RULES: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
    let rules = RULES.get_or_init(|| CACHED_SIZES.iter().map(|&k| GaussLegendre::new(k)).collect());
    let idx = CACHED_SIZES.iter().position(|&k| k >= n).unwrap_or(CACHED_SIZES.len() - 1);
    &rules[idx]
}

/// Adaptive bisection driven by the difference between a rule on an
/// interval and the same rule on its two halves.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    /// Absolute tolerance on the whole interval.
    pub tol: f64,
    /// Nodes per panel.
    pub order: usize,
    /// Panel budget before giving up.
    pub max_panels: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self { tol: 1e-10, order: 12, max_panels: 20_000 }
    }
}

impl Adaptive {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> Result<f64> {
        self.try_integrate(a, b, |x| Ok(f(x)))
    }

    pub fn try_integrate<F: FnMut(f64) -> Result<f64>>(&self, a: f64, b: f64, mut f: F) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if b < a {
            return self.try_integrate(b, a, f).map(|v| -v);
        }
        let gl = rule(self.order);
        let total = b - a;
        let mut stack = vec![(a, b, gl.try_integrate(a, b, &mut f)?)];
        let mut result = 0.0;
        let mut panels = 0usize;
        while let Some((lo, hi, coarse)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = gl.try_integrate(lo, mid, &mut f)?;
            let right = gl.try_integrate(mid, hi, &mut f)?;
            let fine = left + right;
            let local_tol = self.tol * (hi - lo) / total;
            let floor = 64.0 * f64::EPSILON * fine.abs();
            if (fine - coarse).abs() <= local_tol.max(floor) || (hi - lo) <= 1e-15 * total.max(1.0) {
                result += fine;
                continue;
            }
            panels += 1;
            if panels > self.max_panels {
                return Err(Error::QuadratureNonConvergent { a, b });
            }
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
        Ok(result)
    }

    /// Integrates over [a, b] split at the given interior points.
    pub fn try_integrate_split<F: FnMut(f64) -> Result<f64>>(
        &self,
        a: f64,
        b: f64,
        splits: &[f64],
        mut f: F,
    ) -> Result<f64> {
        let mut pts: Vec<f64> = Vec::with_capacity(splits.len() + 2);
        pts.push(a);
        pts.extend(splits.iter().copied().filter(|&s| s > a && s < b));
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let total = (b - a).abs().max(f64::MIN_POSITIVE);
        let mut acc = 0.0;
        for w in pts.windows(2) {
            let sub = Adaptive { tol: self.tol * (w[1] - w[0]) / total, ..*self };
            acc += sub.try_integrate(w[0], w[1], &mut f)?;
        }
        Ok(acc)
    }

    pub fn integrate_split<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, splits: &[f64], mut f: F) -> Result<f64> {
        self.try_integrate_split(a, b, splits, |x| Ok(f(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 12, 24, 48] {
            let gl = GaussLegendre::new(n);
            let w: f64 = gl.weights.iter().sum();
            assert_abs_diff_eq!(w, 2.0, epsilon = 1e-13);
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            let val = gl.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
            assert_abs_diff_eq!(val, exact, epsilon = 1e-13);
            let even = gl.integrate(0.0, 1.0, |x| x.powi(2 * (n as i32 - 1)));
            assert_abs_diff_eq!(even, 1.0 / (2.0 * n as f64 - 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_kinks() {
        let q = Adaptive::with_tol(1e-12);
        let v = q.integrate(-1.0, 2.0, |x: f64| x.abs()).unwrap();
        assert_abs_diff_eq!(v, 2.5, epsilon = 1e-11);
        let v = q.integrate_split(-1.0, 2.0, &[0.0], |x: f64| x.abs()).unwrap();
        assert_abs_diff_eq!(v, 2.5, epsilon = 1e-13);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let q = Adaptive { tol: 1e-14, order: 8, max_panels: 4 };
        let r = q.integrate(0.0, 1.0, |x: f64| (50.0 * x).sin() / (x + 1e-3));
        assert!(matches!(r, Err(Error::QuadratureNonConvergent { .. })));
    }
}
