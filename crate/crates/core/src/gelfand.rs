//! Curves of measures in time, paired against test functions.
//!
//! A [`MeasureCurve`] is a map `t -> Psi(t)` into measure vectors on a fixed
//! window, optionally with a weak* derivative. Everything here works through
//! the scalar functions `t -> <Psi(t), phi>`, which is all the weak* topology
//! sees.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{MeasureVector, Quadrature, Window};
use crate::quad::Adaptive;
use crate::testfns::TestVector;

pub type Evaluator = Arc<dyn Fn(f64) -> Result<MeasureVector> + Send + Sync>;
pub type TestEvaluator = Arc<dyn Fn(f64) -> TestVector + Send + Sync>;

/// Slack allowed when evaluating just outside `[0, T]`.
const TIME_SLACK: f64 = 1e-12;

#[derive(Clone)]
pub struct MeasureCurve {
    horizon: f64,
    window: Window,
    dim: usize,
    value: Evaluator,
    derivative: Option<Evaluator>,
}

impl fmt::Debug for MeasureCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureCurve")
            .field("horizon", &self.horizon)
            .field("window", &self.window)
            .field("dim", &self.dim)
            .field("has_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl MeasureCurve {
    pub fn new(horizon: f64, window: Window, dim: usize, value: Evaluator) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::TimeOutOfRange { t: horizon, horizon });
        }
        Ok(Self { horizon, window, dim, value, derivative: None })
    }

    pub fn with_derivative(mut self, derivative: Evaluator) -> Self {
        self.derivative = Some(derivative);
        self
    }

    pub fn constant(mu: MeasureVector, horizon: f64) -> Result<Self> {
        let (window, dim) = (mu.window(), mu.dim());
        let zero = MeasureVector::zero(window, dim);
        let value = Arc::new(move |_| Ok(mu.clone()));
        Ok(Self::new(horizon, window, dim, value)?.with_derivative(Arc::new(move |_| Ok(zero.clone()))))
    }

    /// Piecewise-linear interpolation between samples `(t_i, Psi_i)`.
    /// Neighbouring samples must share structure (same atom count, piece
    /// count and Cantor carriers); positions and weights are interpolated.
    pub fn from_samples(times: Vec<f64>, values: Vec<MeasureVector>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::InvalidSpec("need at least two samples with matching times".into()));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("sample times must start at 0 and increase".into()));
        }
        for w in values.windows(2) {
            w[0].lerp(&w[1], 0.5)?;
        }
        let horizon = *times.last().unwrap_or(&0.0);
        let (window, dim) = (values[0].window(), values[0].dim());
        let value = Arc::new(move |t: f64| {
            let i = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1);
            let theta = ((t - times[i - 1]) / (times[i] - times[i - 1])).clamp(0.0, 1.0);
            values[i - 1].lerp(&values[i], theta)
        });
        Self::new(horizon, window, dim, value)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        if !(t >= -TIME_SLACK && t <= self.horizon * (1.0 + TIME_SLACK) + TIME_SLACK) {
            return Err(Error::TimeOutOfRange { t, horizon: self.horizon });
        }
        Ok(t.clamp(0.0, self.horizon))
    }

    pub fn eval(&self, t: f64) -> Result<MeasureVector> {
        (self.value)(self.check_time(t)?)
    }

    pub fn derivative(&self, t: f64) -> Result<MeasureVector> {
        let d = self.derivative.as_ref().ok_or(Error::MissingDerivative)?;
        d(self.check_time(t)?)
    }

    /// The curve `t -> Psi'(t)`.
    pub fn derivative_curve(&self) -> Result<MeasureCurve> {
        let d = self.derivative.clone().ok_or(Error::MissingDerivative)?;
        Self::new(self.horizon, self.window, self.dim, d)
    }

    /// `t -> c Psi(t)`.
    pub fn scaled(&self, c: f64) -> MeasureCurve {
        let v = self.value.clone();
        let d = self.derivative.clone();
        MeasureCurve {
            horizon: self.horizon,
            window: self.window,
            dim: self.dim,
            value: Arc::new(move |t| Ok(v(t)?.scale(c))),
            derivative: d.map(|d| Arc::new(move |t| Ok(d(t)?.scale(c))) as Evaluator),
        }
    }

    /// `<Psi(t), phi>`, ignoring any part of the support of `phi` outside
    /// the window.
    pub fn pairing(&self, t: f64, phi: &TestVector, quad: &Quadrature) -> Result<f64> {
        self.eval(t)?.pair_truncated(phi, quad)
    }

    pub fn derivative_pairing(&self, t: f64, phi: &TestVector, quad: &Quadrature) -> Result<f64> {
        self.derivative(t)?.pair_truncated(phi, quad)
    }
}

/// A time-dependent test vector with its time derivative.
#[derive(Clone)]
pub struct TestCurve {
    value: TestEvaluator,
    derivative: TestEvaluator,
}

impl fmt::Debug for TestCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TestCurve")
    }
}

impl TestCurve {
    pub fn new(value: TestEvaluator, derivative: TestEvaluator) -> Self {
        Self { value, derivative }
    }

    /// `beta(t) phi`.
    pub fn separable<B, D>(phi: TestVector, beta: B, dbeta: D) -> Self
    where
        B: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let p = phi.clone();
        Self { value: Arc::new(move |t| p.scaled(beta(t))), derivative: Arc::new(move |t| phi.scaled(dbeta(t))) }
    }

    pub fn value(&self, t: f64) -> TestVector {
        (self.value)(t)
    }

    pub fn derivative(&self, t: f64) -> TestVector {
        (self.derivative)(t)
    }
}

/// Tolerances for time integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GelfandOptions {
    /// Absolute tolerance of the time integral.
    pub tol: f64,
    /// Absolute tolerance of each spatial pairing.
    pub pairing_tol: f64,
}

impl Default for GelfandOptions {
    fn default() -> Self {
        Self { tol: 1e-10, pairing_tol: 1e-12 }
    }
}

impl GelfandOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, pairing_tol: (tol * 1e-2).max(1e-14) }
    }

    fn quad(&self) -> Quadrature {
        Quadrature { tol: self.pairing_tol, ..Quadrature::default() }
    }
}

/// `<int_s^t Phi, phi> = int_s^t <Phi(tau), phi> dtau`.
pub fn gelfand_integral(curve: &MeasureCurve, phi: &TestVector, s: f64, t: f64, opts: &GelfandOptions) -> Result<f64> {
    let quad = opts.quad();
    let (s, t) = (curve.check_time(s)?, curve.check_time(t)?);
    Adaptive::with_tol(opts.tol).try_integrate(s, t, |tau| curve.pairing(tau, phi, &quad))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TVFunctionReport {
    /// `(t_i, sum of increments up to t_i)` on the finest dyadic grid.
    pub grid: Vec<(f64, f64)>,
    /// Total estimate at each dyadic level.
    pub levels: Vec<f64>,
    pub converged: bool,
    pub divergence_flag: bool,
}

/// Settings for the dyadic variation estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TVOptions {
    pub tol: f64,
    pub min_level: usize,
    pub max_level: usize,
    /// Ratio between successive levels that counts as doubling.
    pub divergence_ratio: f64,
}

impl Default for TVOptions {
    fn default() -> Self {
        Self { tol: 1e-8, min_level: 3, max_level: 14, divergence_ratio: 1.9 }
    }
}

/// Variation of the curve on `[0, t]` in the norm topology, by refining
/// dyadic partitions. Two successive level ratios at or above the divergence
/// ratio raise the flag and stop the refinement.
pub fn tv_function(curve: &MeasureCurve, t: f64, opts: &TVOptions) -> Result<TVFunctionReport> {
    let t = curve.check_time(t)?;
    let mut values = vec![curve.eval(0.0)?, curve.eval(t)?];
    let mut levels = Vec::new();
    let mut converged = false;
    let mut divergence_flag = false;
    let mut increments = Vec::new();
    let mut high_ratios = 0;
    for level in 0..=opts.max_level {
        if level > 0 {
            let n = values.len() - 1;
            let mut refined = Vec::with_capacity(2 * n + 1);
            for (i, v) in values.into_iter().enumerate() {
                if i > 0 {
                    let tm = t * (2 * i - 1) as f64 / (2 * n) as f64;
                    refined.push(curve.eval(tm)?);
                }
                refined.push(v);
            }
            values = refined;
        }
        increments = values.windows(2).map(|w| w[1].sub(&w[0]).map(|d| d.norm())).collect::<Result<Vec<f64>>>()?;
        let est: f64 = increments.iter().sum();
        if let Some(&prev) = levels.last() {
            let prev: f64 = prev;
            if prev > 0.0 && est / prev >= opts.divergence_ratio {
                high_ratios += 1;
            } else {
                high_ratios = 0;
            }
            levels.push(est);
            if high_ratios >= 2 {
                divergence_flag = true;
                break;
            }
            if level >= opts.min_level && (est - prev).abs() <= opts.tol * est.max(1.0) {
                converged = true;
                break;
            }
        } else {
            levels.push(est);
        }
    }
    let n = increments.len();
    let mut acc = 0.0;
    let mut grid = vec![(0.0, 0.0)];
    for (i, inc) in increments.iter().enumerate() {
        acc += inc;
        grid.push((t * (i + 1) as f64 / n as f64, acc));
    }
    Ok(TVFunctionReport { grid, levels, converged, divergence_flag })
}

/// `|<Psi(t) - Psi(s), phi> - int_s^t <Psi'(tau), phi> dtau|`.
pub fn ftc_residual(curve: &MeasureCurve, phi: &TestVector, s: f64, t: f64, opts: &GelfandOptions) -> Result<f64> {
    let deriv = curve.derivative_curve()?;
    let quad = opts.quad();
    let lhs = curve.pairing(t, phi, &quad)? - curve.pairing(s, phi, &quad)?;
    let rhs = gelfand_integral(&deriv, phi, s, t, opts)?;
    Ok((lhs - rhs).abs())
}

/// `|h^-1 int_t^{t+h} <Psi, phi> - <Psi(t), phi>|` for each `h`.
pub fn lebesgue_diff_check(curve: &MeasureCurve, phi: &TestVector, t: f64, hs: &[f64]) -> Result<Vec<f64>> {
    let quad = Quadrature { tol: 1e-14, ..Quadrature::default() };
    let at = curve.pairing(t, phi, &quad)?;
    hs.iter()
        .map(|&h| {
            let opts = GelfandOptions { tol: (1e-6 * h * h).max(1e-15), pairing_tol: 1e-14 };
            let avg = gelfand_integral(curve, phi, t, t + h, &opts)? / h;
            Ok((avg - at).abs())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IbpReport {
    /// `int_0^T <Psi', f> dt`.
    pub lhs: f64,
    /// `<Psi(T), f(T)> - <Psi(0), f(0)> - int_0^T <Psi, f'> dt`.
    pub rhs: f64,
    /// Largest `|d/dt <Psi, f> - <Psi', f> - <Psi, f'>|` over the sample times.
    pub product_rule_residual: f64,
}

/// Integration by parts in time against a test curve.
pub fn ibp_check(curve: &MeasureCurve, f: &TestCurve, samples: usize, opts: &GelfandOptions) -> Result<IbpReport> {
    let t_end = curve.horizon;
    let quad = opts.quad();
    let q = Adaptive::with_tol(opts.tol);
    let lhs = q.try_integrate(0.0, t_end, |t| curve.derivative_pairing(t, &f.value(t), &quad))?;
    let inner = q.try_integrate(0.0, t_end, |t| curve.pairing(t, &f.derivative(t), &quad))?;
    let rhs = curve.pairing(t_end, &f.value(t_end), &quad)? - curve.pairing(0.0, &f.value(0.0), &quad)? - inner;

    let h = 1e-4 * t_end;
    let g = |t: f64| curve.pairing(t, &f.value(t), &quad);
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let t = t_end * (i as f64 + 0.5) / samples as f64;
        let dg = fd_derivative(g, t, h, 0.0, t_end)?;
        let expected = curve.derivative_pairing(t, &f.value(t), &quad)? + curve.pairing(t, &f.derivative(t), &quad)?;
        worst = worst.max((dg - expected).abs());
    }
    Ok(IbpReport { lhs, rhs, product_rule_residual: worst })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveNormReport {
    /// `None` encodes `q = infinity`.
    pub q: Option<f64>,
    pub value: f64,
    pub samples: usize,
}

/// `W^{1,q}` norm of the curve: `(int |Psi|^q + |Psi'|^q)^(1/q)` for finite
/// `q`, `sup (|Psi| + |Psi'|)` over a uniform grid including both endpoints
/// for `q = infinity`.
pub fn curve_norm(curve: &MeasureCurve, q: f64, samples: usize) -> Result<CurveNormReport> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::Config(format!("exponent {q} must be at least 1")));
    }
    let samples = samples.max(2);
    let t_end = curve.horizon;
    let point = |t: f64| -> Result<(f64, f64)> { Ok((curve.eval(t)?.norm(), curve.derivative(t)?.norm())) };
    if q.is_infinite() {
        let mut sup: f64 = 0.0;
        for i in 0..samples {
            let (a, b) = point(t_end * i as f64 / (samples - 1) as f64)?;
            sup = sup.max(a + b);
        }
        return Ok(CurveNormReport { q: None, value: sup, samples });
    }
    let rule = crate::quad::rule(8);
    let panels = samples.div_ceil(8);
    let dt = t_end / panels as f64;
    let mut acc = 0.0;
    let mut err = None;
    for p in 0..panels {
        acc += rule.integrate(p as f64 * dt, (p + 1) as f64 * dt, |t| match point(t) {
            Ok((a, b)) => a.powf(q) + b.powf(q),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        });
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(CurveNormReport { q: Some(q), value: acc.powf(1.0 / q), samples: panels * 8 })
}

/// Fourth-order finite difference of `g` at `t` on `[lo, hi]`: central with
/// one Richardson step when the stencil fits, one-sided otherwise.
pub fn fd_derivative<G: FnMut(f64) -> Result<f64>>(mut g: G, t: f64, h: f64, lo: f64, hi: f64) -> Result<f64> {
    if t - 2.0 * h >= lo && t + 2.0 * h <= hi {
        let d1 = (g(t + h)? - g(t - h)?) / (2.0 * h);
        let d2 = (g(t + 2.0 * h)? - g(t - 2.0 * h)?) / (4.0 * h);
        return Ok((4.0 * d1 - d2) / 3.0);
    }
    let sign = if t - 2.0 * h < lo { 1.0 } else { -1.0 };
    let step = sign * h;
    let (g0, g1, g2, g4) = (g(t)?, g(t + step)?, g(t + 2.0 * step)?, g(t + 4.0 * step)?);
    // second-order one-sided at steps h and 2h, then Richardson
    let d_h = (-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * step);
    let d_2h = (-3.0 * g0 + 4.0 * g2 - g4) / (4.0 * step);
    Ok((4.0 * d_h - d_2h) / 3.0)
}
