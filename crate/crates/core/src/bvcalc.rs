//! Piecewise-polynomial BV functions with an optional Cantor component.
//!
//! A [`PiecewiseBV`] is `F = P + A C` on a window, where `P` is polynomial on
//! each cell of a breakpoint grid (jumps allowed at breakpoints) and `C` is a
//! Cantor function on a sub-interval. Values are right-continuous.

use serde::Serialize;

use crate::cantor::CantorFunction;
use crate::cheb::{Cheb, DEGREE_CAP};
use crate::claw::FluxModel;
use crate::error::{Error, Result};
use crate::measures::{Atom, DensityPiece, MeasureVector, Quadrature, SignedMeasure, Window};
use crate::quad::Adaptive;
use crate::testfns::TestFunction;

/// Jumps below this, relative to the size of the one-sided limits, are
/// treated as continuity.
pub const JUMP_REL_TOL: f64 = 1e-12;

/// Generation of the piecewise-linear Cantor iterate used by `to_measure`.
pub const CANTOR_ITERATE_DEPTH: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseBV {
    window: Window,
    breakpoints: Vec<f64>,
    pieces: Vec<Cheb>,
    cantor: Option<CantorFunction>,
}

/// Continuous, jump and singular parts; `continuous` carries the absolutely
/// continuous behaviour and is anchored so that all three sum to `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct BVDecomposition {
    pub continuous: PiecewiseBV,
    pub jump: PiecewiseBV,
    pub singular: PiecewiseBV,
}

impl PiecewiseBV {
    /// `breakpoints` are the interior points; `pieces[i]` is expanded in the
    /// local variable of the i-th cell.
    pub fn new(
        window: Window,
        breakpoints: Vec<f64>,
        pieces: Vec<Cheb>,
        cantor: Option<CantorFunction>,
    ) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidBV(format!("{} pieces for {} breakpoints", pieces.len(), breakpoints.len())));
        }
        let mut prev = window.a;
        for &x in &breakpoints {
            if !(x > prev && x < window.b) {
                return Err(Error::InvalidBV(format!("breakpoint {x} is not increasing inside the window")));
            }
            prev = x;
        }
        for p in &pieces {
            if p.degree() > DEGREE_CAP {
                return Err(Error::DegreeCap(p.degree()));
            }
            if p.coeffs().iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidBV("non-finite coefficient".into()));
            }
        }
        if let Some(c) = &cantor {
            if c.lo < window.a || c.hi > window.b {
                return Err(Error::InvalidBV("Cantor carrier outside the window".into()));
            }
        }
        Ok(Self { window, breakpoints, pieces, cantor })
    }

    /// Pieces given by monomial coefficients in the global variable `x`.
    pub fn from_monomials(
        window: Window,
        breakpoints: Vec<f64>,
        coeffs: &[Vec<f64>],
        cantor: Option<CantorFunction>,
    ) -> Result<Self> {
        if coeffs.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidBV(format!("{} pieces for {} breakpoints", coeffs.len(), breakpoints.len())));
        }
        let mut edges = vec![window.a];
        edges.extend(&breakpoints);
        edges.push(window.b);
        let pieces =
            coeffs.iter().enumerate().map(|(i, c)| Cheb::from_monomial(c, edges[i], edges[i + 1]).chop()).collect();
        Self::new(window, breakpoints, pieces, cantor)
    }

    pub fn constant(window: Window, c: f64) -> Self {
        Self { window, breakpoints: Vec::new(), pieces: vec![Cheb::constant(c)], cantor: None }
    }

    /// `left` on (a, x0), `right` on [x0, b).
    pub fn step(window: Window, x0: f64, left: f64, right: f64) -> Result<Self> {
        Self::new(window, vec![x0], vec![Cheb::constant(left), Cheb::constant(right)], None)
    }

    /// A zero function carrying only a Cantor component.
    pub fn cantor_only(window: Window, cantor: CantorFunction) -> Result<Self> {
        Self::new(window, Vec::new(), vec![Cheb::zero()], Some(cantor))
    }

    /// The absolutely continuous function with density `mu`:
    /// `F(x) = mu((a, x])`, zero at `a`.
    pub fn from_density(mu: &SignedMeasure) -> Result<Self> {
        if !mu.atoms().is_empty() || !mu.cantor_parts().is_empty() {
            return Err(Error::NotBVRepresentable);
        }
        let mut offset = 0.0;
        let mut pieces = Vec::with_capacity(mu.density().len());
        for d in mu.density() {
            let anti = d.poly.antiderivative().scale(d.half_width());
            pieces.push(anti.add(&Cheb::constant(offset)).chop());
            offset += anti.right_value();
        }
        let breakpoints = mu.density()[1..].iter().map(|d| d.lo).collect();
        Self::new(mu.window(), breakpoints, pieces, None)
    }

    /// The function whose Lebesgue density is `mu`; atoms and Cantor parts
    /// have no representation as a function and are rejected.
    pub fn from_measure(mu: &SignedMeasure) -> Result<Self> {
        if !mu.atoms().is_empty() || !mu.cantor_parts().is_empty() {
            return Err(Error::NotBVRepresentable);
        }
        let breakpoints = mu.density()[1..].iter().map(|d| d.lo).collect();
        let pieces = mu.density().iter().map(|d| d.poly.clone()).collect();
        Self::new(mu.window(), breakpoints, pieces, None)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Cheb] {
        &self.pieces
    }

    pub fn cantor(&self) -> Option<&CantorFunction> {
        self.cantor.as_ref()
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(Cheb::degree).max().unwrap_or(0)
    }

    /// Cell edges `(lo, hi)` of piece `i`.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { self.window.a } else { self.breakpoints[i - 1] };
        let hi = if i == self.breakpoints.len() { self.window.b } else { self.breakpoints[i] };
        (lo, hi)
    }

    pub fn cells(&self) -> Vec<(f64, f64)> {
        (0..self.pieces.len()).map(|i| self.cell(i)).collect()
    }

    fn local(lo: f64, hi: f64, x: f64) -> f64 {
        ((2.0 * x - lo - hi) / (hi - lo)).clamp(-1.0, 1.0)
    }

    fn cantor_at(&self, x: f64) -> f64 {
        self.cantor.map_or(0.0, |c| c.eval(x))
    }

    /// Right-continuous value `F(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        let (lo, hi) = self.cell(i);
        self.pieces[i].eval(Self::local(lo, hi, x)) + self.cantor_at(x)
    }

    /// Left limit `F(x-)` at breakpoint `i`.
    pub fn left_limit(&self, i: usize) -> f64 {
        self.pieces[i].right_value() + self.cantor_at(self.breakpoints[i])
    }

    /// Right limit `F(x+)` at breakpoint `i`.
    pub fn right_limit(&self, i: usize) -> f64 {
        self.pieces[i + 1].left_value() + self.cantor_at(self.breakpoints[i])
    }

    /// Non-negligible jumps `(x, F(x+) - F(x-))`.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        (0..self.breakpoints.len())
            .filter_map(|i| {
                let (l, r) = (self.left_limit(i), self.right_limit(i));
                let j = r - l;
                (j.abs() > JUMP_REL_TOL * l.abs().max(r.abs()).max(1.0)).then_some((self.breakpoints[i], j))
            })
            .collect()
    }

    fn piece_variation(p: &Cheb) -> f64 {
        if p.degree() == 0 {
            return 0.0;
        }
        let mut pts = vec![-1.0];
        pts.extend(p.derivative().sign_change_roots());
        pts.push(1.0);
        pts.windows(2).map(|w| (p.eval(w[1]) - p.eval(w[0])).abs()).sum()
    }

    /// Pointwise variation on the window.
    pub fn total_variation(&self) -> f64 {
        let jumps: f64 = self.jumps().iter().map(|(_, j)| j.abs()).sum();
        let smooth: f64 = self.pieces.iter().map(Self::piece_variation).sum();
        let singular = self.cantor.map_or(0.0, |c| c.amplitude.abs());
        jumps + smooth + singular
    }

    pub fn decompose(&self) -> BVDecomposition {
        let mut offset = self.pieces[0].left_value();
        let mut continuous = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            continuous.push(p.add(&Cheb::constant(offset - p.left_value())).chop());
            offset += p.right_value() - p.left_value();
        }
        let mut cumulative = 0.0;
        let mut jump = vec![Cheb::zero()];
        for i in 0..self.breakpoints.len() {
            let (l, r) = (self.left_limit(i), self.right_limit(i));
            let j = r - l;
            if j.abs() > JUMP_REL_TOL * l.abs().max(r.abs()).max(1.0) {
                cumulative += j;
            }
            jump.push(Cheb::constant(cumulative));
        }
        let bp = self.breakpoints.clone();
        BVDecomposition {
            continuous: Self { window: self.window, breakpoints: bp.clone(), pieces: continuous, cantor: None },
            jump: Self { window: self.window, breakpoints: bp, pieces: jump, cantor: None },
            singular: Self {
                window: self.window,
                breakpoints: Vec::new(),
                pieces: vec![Cheb::zero()],
                cantor: self.cantor,
            },
        }
    }

    /// The distributional derivative `DF`: jump atoms, the derivative
    /// density of each piece and the Cantor measure.
    pub fn dderiv(&self) -> Result<SignedMeasure> {
        let atoms = self.jumps().into_iter().map(|(x, weight)| Atom { x, weight }).collect();
        let density = self
            .cells()
            .into_iter()
            .zip(&self.pieces)
            .map(|((lo, hi), p)| DensityPiece::new(lo, hi, p.derivative().scale(2.0 / (hi - lo))))
            .collect();
        let cantor = self.cantor.iter().map(CantorFunction::derivative_measure).collect();
        SignedMeasure::new(self.window, atoms, density, cantor)
    }

    /// `F dx` as a measure. A Cantor component is replaced by its
    /// piecewise-linear iterate of generation `depth`.
    pub fn to_measure(&self, depth: usize) -> Result<SignedMeasure> {
        let density = self
            .cells()
            .into_iter()
            .zip(&self.pieces)
            .map(|((lo, hi), p)| DensityPiece::new(lo, hi, p.clone()))
            .collect();
        let base = SignedMeasure::from_density(self.window, density)?;
        let Some(c) = self.cantor else {
            return Ok(base);
        };
        let mut pieces = Vec::new();
        if c.lo > self.window.a {
            pieces.push(DensityPiece::constant(self.window.a, c.lo, 0.0));
        }
        for (lo, hi, va, vb) in c.linear_iterate(depth) {
            pieces.push(DensityPiece::new(lo, hi, Cheb::new(vec![0.5 * (va + vb), 0.5 * (vb - va)]).chop()));
        }
        if c.hi < self.window.b {
            pieces.push(DensityPiece::constant(c.hi, self.window.b, c.amplitude));
        }
        base.add(&SignedMeasure::from_density(self.window, pieces)?)
    }

    /// `int F g dx` over the window.
    pub fn integrate_against<G: Fn(f64) -> f64>(&self, g: G, splits: &[f64], tol: f64) -> Result<f64> {
        if self.cantor.is_some() {
            return self.to_measure(CANTOR_ITERATE_DEPTH + 8)?.integrate(
                g,
                splits,
                &Quadrature { tol, ..Quadrature::default() },
            );
        }
        let mut acc = 0.0;
        for (i, (lo, hi)) in self.cells().into_iter().enumerate() {
            let p = &self.pieces[i];
            if p.is_zero() {
                continue;
            }
            let q = Adaptive::with_tol(tol * (hi - lo) / self.window.length());
            acc += q.integrate_split(lo, hi, splits, |x| p.eval(Self::local(lo, hi, x)) * g(x))?;
        }
        Ok(acc)
    }

    /// `int F phi' dx`; the Cantor component is handled exactly on the
    /// removed intervals of its construction.
    pub fn pair_with_derivative(&self, phi: &TestFunction, tol: f64) -> Result<f64> {
        let splits = phi.breakpoints();
        let (slo, shi) = phi.support();
        let mut acc = 0.0;
        for (i, (lo, hi)) in self.cells().into_iter().enumerate() {
            let p = &self.pieces[i];
            let (lo2, hi2) = (lo.max(slo), hi.min(shi));
            if p.is_zero() || hi2 <= lo2 {
                continue;
            }
            let q = Adaptive::with_tol(tol * (hi2 - lo2) / self.window.length());
            acc += q.integrate_split(lo2, hi2, &splits, |x| p.eval(Self::local(lo, hi, x)) * phi.derivative(x))?;
        }
        if let Some(c) = &self.cantor {
            acc += c.integrate_against_derivative(|x| phi.value(x), 20);
            acc += c.amplitude * (phi.value(self.window.b) - phi.value(c.hi));
        }
        Ok(acc)
    }

    /// `F` with the breakpoint grid refined to `grid` (a superset).
    pub fn refined(&self, grid: &[f64]) -> Result<Self> {
        let mut pieces = Vec::with_capacity(grid.len() + 1);
        let mut edges = vec![self.window.a];
        edges.extend(grid);
        edges.push(self.window.b);
        for w in edges.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let i = self.breakpoints.partition_point(|&b| b <= mid);
            let (lo, hi) = self.cell(i);
            pieces.push(self.pieces[i].remap(lo, hi, w[0], w[1]).chop());
        }
        Self::new(self.window, grid.to_vec(), pieces, self.cantor)
    }
}

/// A vector of BV functions sharing one breakpoint grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BVVector {
    components: Vec<PiecewiseBV>,
}

impl BVVector {
    pub fn new(components: Vec<PiecewiseBV>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        };
        let window = first.window;
        if components.iter().any(|c| !c.window.same_as(&window)) {
            return Err(Error::WindowMismatch);
        }
        let tol = window.merge_tol();
        let mut grid: Vec<f64> = components.iter().flat_map(|c| c.breakpoints.iter().copied()).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() <= tol);
        let components = components
            .iter()
            .map(|c| if c.breakpoints == grid { Ok(c.clone()) } else { c.refined(&grid) })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    pub fn scalar(f: PiecewiseBV) -> Self {
        Self { components: vec![f] }
    }

    pub fn from_measure(mu: &MeasureVector) -> Result<Self> {
        Self::new(mu.components().iter().map(PiecewiseBV::from_measure).collect::<Result<_>>()?)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn window(&self) -> Window {
        self.components[0].window
    }

    pub fn components(&self) -> &[PiecewiseBV] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &PiecewiseBV {
        &self.components[i]
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.components[0].breakpoints
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    /// Euclidean combination of the component variations.
    pub fn total_variation(&self) -> f64 {
        self.components.iter().map(|c| c.total_variation().powi(2)).sum::<f64>().sqrt()
    }

    pub fn dderiv(&self) -> Result<MeasureVector> {
        MeasureVector::new(self.components.iter().map(PiecewiseBV::dderiv).collect::<Result<_>>()?)
    }

    pub fn to_measure(&self, depth: usize) -> Result<MeasureVector> {
        MeasureVector::new(self.components.iter().map(|c| c.to_measure(depth)).collect::<Result<_>>()?)
    }
}

/// Options for projecting a composition onto polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionOptions {
    pub degree: usize,
    pub tol: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self { degree: 32, tol: 1e-10 }
    }
}

/// `F(u)` with an estimate of the projection error.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub value: BVVector,
    pub error_estimate: f64,
}

/// `F(u)` cell by cell. Polynomial flux components are interpolated
/// exactly at their true degree; others are projected at `opts.degree` and
/// the size of the trailing coefficients is reported as the error.
pub fn compose_flux(u: &BVVector, flux: &FluxModel, opts: &ProjectionOptions) -> Result<Composition> {
    if u.dim() != flux.dim() {
        return Err(Error::DimensionMismatch { expected: flux.dim(), got: u.dim() });
    }
    if u.components.iter().any(|c| c.cantor.is_some()) {
        return Err(Error::SingularComponentUnsupported);
    }
    let n = flux.dim();
    let cells = u.components[0].pieces.len();
    let mut out: Vec<Vec<Cheb>> = vec![Vec::with_capacity(cells); n];
    let mut error: f64 = 0.0;
    let mut state = vec![0.0; n];
    for cell in 0..cells {
        let deg = u.components.iter().map(|c| c.pieces[cell].degree()).max().unwrap_or(0);
        for (m, out_m) in out.iter_mut().enumerate() {
            let exact = match flux.poly_degree(m) {
                Some(d) if d * deg <= DEGREE_CAP => Some(d * deg),
                _ if deg == 0 => Some(0),
                _ => None,
            };
            let order = exact.unwrap_or(opts.degree);
            let poly = Cheb::interpolate(order, |s| {
                for (j, c) in u.components.iter().enumerate() {
                    state[j] = c.pieces[cell].eval(s);
                }
                flux.flux(&state)[m]
            });
            if exact.is_none() {
                error = error.max(poly.tail_estimate(4));
            }
            out_m.push(poly.chop());
        }
    }
    if error > opts.tol {
        return Err(Error::ProjectionErrorAboveTolerance { estimate: error, tolerance: opts.tol });
    }
    let window = u.window();
    let grid = u.breakpoints().to_vec();
    let components = out
        .into_iter()
        .map(|pieces| PiecewiseBV::new(window, grid.clone(), pieces, None))
        .collect::<Result<Vec<_>>>()?;
    Ok(Composition { value: BVVector { components }, error_estimate: error })
}
