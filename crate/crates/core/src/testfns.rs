//! Smooth compactly supported test functions with analytic derivatives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Window;

/// `exp(-1/y)` for `y > 0`, zero otherwise.
fn psi(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        (-1.0 / y).exp()
    }
}

fn dpsi(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        psi(y) / (y * y)
    }
}

/// Smooth step: 0 for `y <= 0`, 1 for `y >= 1`, C-infinity in between.
pub fn smoothstep(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let a = psi(y);
    let b = psi(1.0 - y);
    a / (a + b)
}

pub fn smoothstep_derivative(y: f64) -> f64 {
    if y <= 0.0 || y >= 1.0 {
        return 0.0;
    }
    let a = psi(y);
    let b = psi(1.0 - y);
    let den = a + b;
    (dpsi(y) * b + a * dpsi(1.0 - y)) / (den * den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKind {
    Bump,
    Plateau,
    PolyTimesBump,
}

/// Serializable description of a test function.
///
/// `poly_times_bump` multiplies the monomial polynomial `coeffs` (in `x`)
/// with a plateau when `half_width` is given, with the standard bump otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub kind: BumpKind,
    pub center: f64,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// `exp(1 - 1/(1 - z^2))`, peak 1 at the center.
    Standard,
    /// Identically 1 on `|x - c| <= half_width`.
    Plateau { half_width: f64 },
}

/// A C-infinity function supported in `(center - radius, center + radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    center: f64,
    radius: f64,
    shape: Shape,
    /// Monomial coefficients of a polynomial factor in `x`.
    factor: Option<Vec<f64>>,
}

impl TestFunction {
    pub fn build(spec: &BumpSpec) -> Result<Self> {
        let BumpSpec { kind, center, radius, half_width, coeffs } = spec.clone();
        if !(center.is_finite() && radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidSpec(format!("radius must be positive, got {radius}")));
        }
        let shape = match (kind, half_width) {
            (BumpKind::Bump, _) => Shape::Standard,
            (BumpKind::Plateau, None) => {
                return Err(Error::InvalidSpec("plateau needs half_width".into()));
            }
            (_, Some(h)) => {
                if !(h.is_finite() && h >= 0.0 && h < radius) {
                    return Err(Error::InvalidSpec(format!("plateau half width {h} must lie in [0, radius)")));
                }
                Shape::Plateau { half_width: h }
            }
            (BumpKind::PolyTimesBump, None) => Shape::Standard,
        };
        let factor = match kind {
            BumpKind::PolyTimesBump => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidSpec("poly_times_bump needs finite coefficients".into()));
                }
                Some(coeffs)
            }
            _ => None,
        };
        Ok(Self { center, radius, shape, factor })
    }

    pub fn bump(center: f64, radius: f64) -> Result<Self> {
        Self::build(&BumpSpec { kind: BumpKind::Bump, center, radius, half_width: None, coeffs: vec![] })
    }

    pub fn plateau(center: f64, radius: f64, half_width: f64) -> Result<Self> {
        Self::build(&BumpSpec { kind: BumpKind::Plateau, center, radius, half_width: Some(half_width), coeffs: vec![] })
    }

    /// Plateau identically 1 on `[lo, hi]` with transition layers of width `margin`.
    pub fn plateau_on(lo: f64, hi: f64, margin: f64) -> Result<Self> {
        let h = 0.5 * (hi - lo);
        Self::plateau(0.5 * (lo + hi), h + margin, h)
    }

    /// Polynomial (monomial coefficients in `x`) times this function.
    pub fn times_poly(&self, coeffs: &[f64]) -> Self {
        let factor = match &self.factor {
            None => coeffs.to_vec(),
            Some(f) => poly_mul(f, coeffs),
        };
        Self { factor: Some(factor), ..self.clone() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.times_poly(&[c])
    }

    pub fn spec(&self) -> BumpSpec {
        BumpSpec {
            kind: self.kind(),
            center: self.center,
            radius: self.radius,
            half_width: match self.shape {
                Shape::Plateau { half_width } => Some(half_width),
                Shape::Standard => None,
            },
            coeffs: self.factor.clone().unwrap_or_default(),
        }
    }

    pub fn kind(&self) -> BumpKind {
        match (&self.factor, self.shape) {
            (Some(_), _) => BumpKind::PolyTimesBump,
            (None, Shape::Standard) => BumpKind::Bump,
            (None, Shape::Plateau { .. }) => BumpKind::Plateau,
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Open support interval.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    /// Points where the shape changes character (support ends, plateau
    /// edges, center). Quadrature splits here.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        let mut pts = vec![lo, self.center, hi];
        if let Shape::Plateau { half_width } = self.shape {
            pts.push(self.center - half_width);
            pts.push(self.center + half_width);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn base(&self, x: f64) -> f64 {
        let d = x - self.center;
        match self.shape {
            Shape::Standard => {
                let z = d / self.radius;
                let q = 1.0 - z * z;
                if q <= 0.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / q).exp()
                }
            }
            Shape::Plateau { half_width } => smoothstep((self.radius - d.abs()) / (self.radius - half_width)),
        }
    }

    fn base_derivative(&self, x: f64) -> f64 {
        let d = x - self.center;
        match self.shape {
            Shape::Standard => {
                let z = d / self.radius;
                let q = 1.0 - z * z;
                if q <= 0.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / q).exp() * (-2.0 * z / (q * q)) / self.radius
                }
            }
            Shape::Plateau { half_width } => {
                let w = self.radius - half_width;
                let y = (self.radius - d.abs()) / w;
                -d.signum() * smoothstep_derivative(y) / w
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let b = self.base(x);
        match &self.factor {
            None => b,
            Some(_) if b == 0.0 => 0.0,
            Some(p) => poly_eval(p, x) * b,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.factor {
            None => self.base_derivative(x),
            Some(p) => poly_eval(&poly_derivative(p), x) * self.base(x) + poly_eval(p, x) * self.base_derivative(x),
        }
    }

    /// Degree of the polynomial factor (0 without one).
    pub fn factor_degree(&self) -> usize {
        self.factor.as_ref().map_or(0, |p| p.len().saturating_sub(1))
    }

    /// Sup norm. Exact (1) without a polynomial factor; otherwise the max of
    /// a dense sample refined by golden-section search.
    pub fn sup_norm(&self) -> f64 {
        if self.factor.is_none() {
            return 1.0;
        }
        let (lo, hi) = self.support();
        let n = 2000;
        let h = (hi - lo) / n as f64;
        let mut best = (0.0f64, lo);
        for i in 0..=n {
            let x = lo + h * i as f64;
            let v = self.value(x).abs();
            if v > best.0 {
                best = (v, x);
            }
        }
        let (mut a, mut b) = ((best.1 - h).max(lo), (best.1 + h).min(hi));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if self.value(c).abs() > self.value(d).abs() {
                b = d;
            } else {
                a = c;
            }
        }
        best.0.max(self.value(0.5 * (a + b)).abs())
    }

    /// True when the closed support lies inside the closed window.
    pub fn inside(&self, window: &Window) -> bool {
        let (lo, hi) = self.support();
        lo >= window.a && hi <= window.b
    }
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    p.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// One test function per component.
#[derive(Debug, Clone, PartialEq)]
pub struct TestVector {
    pub components: Vec<TestFunction>,
}

impl TestVector {
    pub fn new(components: Vec<TestFunction>) -> Self {
        Self { components }
    }

    pub fn scalar(phi: TestFunction) -> Self {
        Self { components: vec![phi] }
    }

    /// `phi` in component `i` of `n`, the zero test function elsewhere.
    pub fn unit(n: usize, i: usize, phi: TestFunction) -> Self {
        let zero = phi.scaled(0.0);
        let components = (0..n).map(|k| if k == i { phi.clone() } else { zero.clone() }).collect();
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { components: self.components.iter().map(|p| p.scaled(c)).collect() }
    }

    /// Euclidean combination of the component sup norms; the dual of the
    /// Euclidean measure-vector norm.
    pub fn sup_norm(&self) -> f64 {
        self.components.iter().map(|p| p.sup_norm().powi(2)).sum::<f64>().sqrt()
    }
}

/// Deterministic family of `count` plateau bumps supported inside `window`.
pub fn seeded_family(window: &Window, count: usize, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = window.length();
    (0..count)
        .map(|_| {
            let center = window.a + len * rng.gen_range(0.1..0.9);
            let room = (center - window.a).min(window.b - center);
            let radius = room * rng.gen_range(0.3..0.95);
            let half_width = radius * rng.gen_range(0.1..0.7);
            TestFunction::plateau(center, radius, half_width).expect("radius and half width are valid by construction")
        })
        .collect()
}
