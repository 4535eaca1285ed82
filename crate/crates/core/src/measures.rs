//! Finite signed Radon measures on a bounded window.
//!
//! A [`SignedMeasure`] is the sum of three mutually singular parts: finitely
//! many atoms, a piecewise-polynomial density, and affine images of the
//! Cantor measure. Pairing with a [`TestFunction`] evaluates
//! `int phi d(mu)`; the total variation norm is the sum of the parts' norms.

use serde::{Deserialize, Serialize};

use crate::cantor::CantorSpec;
use crate::cheb::Cheb;
use crate::error::{Error, Result};
use crate::quad::Adaptive;
use crate::testfns::{TestFunction, TestVector};

/// Relative atom merge tolerance (times the window length).
pub const MERGE_REL_TOL: f64 = 1e-12;
/// Default Cantor recursion depth.
pub const DEFAULT_CANTOR_DEPTH: usize = 24;
/// Default absolute quadrature tolerance for pairings.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

pub type CantorPart = CantorSpec;

/// Bounded open interval (a, b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Window {
    pub a: f64,
    pub b: f64,
}

impl TryFrom<[f64; 2]> for Window {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        Window::new(v[0], v[1])
    }
}

impl From<Window> for [f64; 2] {
    fn from(w: Window) -> Self {
        [w.a, w.b]
    }
}

impl Window {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidWindow { a, b })
        }
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn merge_tol(&self) -> f64 {
        MERGE_REL_TOL * self.length()
    }

    /// Open containment.
    pub fn contains(&self, x: f64) -> bool {
        x > self.a && x < self.b
    }

    pub fn same_as(&self, other: &Window) -> bool {
        let tol = self.merge_tol();
        (self.a - other.a).abs() <= tol && (self.b - other.b).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub weight: f64,
}

/// Polynomial density on [lo, hi], stored as a Chebyshev series in the
/// local variable.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPiece {
    pub lo: f64,
    pub hi: f64,
    pub poly: Cheb,
}

impl DensityPiece {
    pub fn new(lo: f64, hi: f64, poly: Cheb) -> Self {
        Self { lo, hi, poly }
    }

    pub fn constant(lo: f64, hi: f64, c: f64) -> Self {
        Self { lo, hi, poly: Cheb::constant(c) }
    }

    pub fn from_monomial(lo: f64, hi: f64, coeffs: &[f64]) -> Self {
        Self { lo, hi, poly: Cheb::from_monomial(coeffs, lo, hi) }
    }

    pub fn local(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.poly.eval(self.local(x))
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn integral(&self) -> f64 {
        self.poly.integral() * self.half_width()
    }

    /// `int |p|`, split at the sign changes of `p`.
    pub fn abs_integral(&self) -> f64 {
        if self.poly.is_zero() {
            return 0.0;
        }
        let anti = self.poly.antiderivative();
        let mut pts = vec![-1.0];
        pts.extend(self.poly.sign_change_roots());
        pts.push(1.0);
        pts.windows(2).map(|w| (anti.eval(w[1]) - anti.eval(w[0])).abs()).sum::<f64>() * self.half_width()
    }

    /// The same polynomial expanded on [lo, hi].
    pub fn remapped(&self, lo: f64, hi: f64) -> DensityPiece {
        DensityPiece { lo, hi, poly: self.poly.remap(self.lo, self.hi, lo, hi) }
    }
}

/// Accuracy knobs for pairings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Absolute tolerance for the density part over the whole window.
    pub tol: f64,
    /// Recursion depth cap for Cantor parts.
    pub cantor_depth: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { tol: DEFAULT_QUAD_TOL, cantor_depth: DEFAULT_CANTOR_DEPTH }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure {
    window: Window,
    atoms: Vec<Atom>,
    density: Vec<DensityPiece>,
    cantor: Vec<CantorPart>,
}

impl SignedMeasure {
    pub fn zero(window: Window) -> Self {
        Self {
            window,
            atoms: Vec::new(),
            density: vec![DensityPiece::constant(window.a, window.b, 0.0)],
            cantor: Vec::new(),
        }
    }

    pub fn dirac(window: Window, x: f64, weight: f64) -> Result<Self> {
        Self::new(window, vec![Atom { x, weight }], Vec::new(), Vec::new())
    }

    pub fn from_density(window: Window, density: Vec<DensityPiece>) -> Result<Self> {
        Self::new(window, Vec::new(), density, Vec::new())
    }

    /// Validates and normalizes the parts: atoms are sorted, merged within
    /// the merge tolerance and zero weights dropped; density pieces must
    /// partition the window (an empty list means zero density); Cantor
    /// carriers must lie in the window and be pairwise disjoint.
    pub fn new(window: Window, atoms: Vec<Atom>, density: Vec<DensityPiece>, cantor: Vec<CantorPart>) -> Result<Self> {
        let tol = window.merge_tol();
        for a in &atoms {
            if !(a.x.is_finite() && a.weight.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite atom".into()));
            }
            if !window.contains(a.x) {
                return Err(Error::InvalidMeasure(format!("atom at {} outside window", a.x)));
            }
        }
        let atoms = normalize_atoms(atoms, tol);

        let density = if density.is_empty() {
            vec![DensityPiece::constant(window.a, window.b, 0.0)]
        } else {
            let mut d = density;
            d.sort_by(|p, q| p.lo.total_cmp(&q.lo));
            if (d[0].lo - window.a).abs() > tol || (d[d.len() - 1].hi - window.b).abs() > tol {
                return Err(Error::InvalidMeasure("density pieces do not cover the window".into()));
            }
            for w in d.windows(2) {
                if (w[0].hi - w[1].lo).abs() > tol {
                    return Err(Error::InvalidMeasure("density pieces are not contiguous".into()));
                }
            }
            for p in &d {
                if p.hi.partial_cmp(&p.lo) != Some(std::cmp::Ordering::Greater)
                    || p.poly.coeffs().iter().any(|c| !c.is_finite())
                {
                    return Err(Error::InvalidMeasure("degenerate or non-finite density piece".into()));
                }
            }
            let n = d.len();
            d[0].lo = window.a;
            d[n - 1].hi = window.b;
            for i in 1..n {
                d[i].lo = d[i - 1].hi;
            }
            d
        };

        let mut cantor: Vec<CantorPart> = cantor.into_iter().filter(|c| c.mass != 0.0).collect();
        cantor.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        for c in &cantor {
            if !(c.lo < c.hi && c.lo >= window.a - tol && c.hi <= window.b + tol && c.mass.is_finite()) {
                return Err(Error::InvalidMeasure("Cantor carrier outside window".into()));
            }
        }
        for w in cantor.windows(2) {
            if w[1].lo < w[0].hi - tol {
                return Err(Error::OverlappingCantorCarriers);
            }
        }
        Ok(Self { window, atoms, density, cantor })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> &[DensityPiece] {
        &self.density
    }

    pub fn cantor_parts(&self) -> &[CantorPart] {
        &self.cantor
    }

    pub fn has_zero_density(&self) -> bool {
        self.density.iter().all(|p| p.poly.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.cantor.is_empty() && self.has_zero_density()
    }

    /// Density value at `x` (right-continuous at piece boundaries).
    pub fn density_at(&self, x: f64) -> f64 {
        let idx = self.density.partition_point(|p| p.hi <= x).min(self.density.len() - 1);
        self.density[idx].eval(x)
    }

    /// `int phi d(mu)`; the support of `phi` must lie in the closed window.
    pub fn pair(&self, phi: &TestFunction) -> Result<f64> {
        self.pair_with(phi, &Quadrature::default())
    }

    pub fn pair_with(&self, phi: &TestFunction, quad: &Quadrature) -> Result<f64> {
        if !phi.inside(&self.window) {
            let (lo, hi) = phi.support();
            return Err(Error::SupportOutsideWindow { lo, hi, a: self.window.a, b: self.window.b });
        }
        self.pair_truncated(phi, quad)
    }

    /// `int_window phi d(mu)` for any smooth `phi`, ignoring whatever part of
    /// its support falls outside the window.
    pub fn pair_truncated(&self, phi: &TestFunction, quad: &Quadrature) -> Result<f64> {
        let (slo, shi) = phi.support();
        let atoms: f64 = self.atoms.iter().map(|a| a.weight * phi.value(a.x)).sum();

        let splits = phi.breakpoints();
        let order =
            12.max((phi.factor_degree() + self.density.iter().map(|p| p.poly.degree()).max().unwrap_or(0)) / 2 + 4);
        let mut dens = 0.0;
        for piece in &self.density {
            if piece.poly.is_zero() {
                continue;
            }
            let lo = piece.lo.max(slo);
            let hi = piece.hi.min(shi);
            if hi <= lo {
                continue;
            }
            let q = Adaptive { tol: quad.tol * (hi - lo) / self.window.length(), order, ..Adaptive::default() };
            dens += q.integrate_split(lo, hi, &splits, |x| piece.eval(x) * phi.value(x))?;
        }

        let cantor: f64 = self
            .cantor
            .iter()
            .map(|c| c.integrate(|x| phi.value(x), quad.cantor_depth, quad.tol, Some((slo, shi))))
            .sum();
        Ok(atoms + dens + cantor)
    }

    /// Integral of an arbitrary function against the measure.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, splits: &[f64], quad: &Quadrature) -> Result<f64> {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight * f(a.x)).sum();
        let mut dens = 0.0;
        for piece in &self.density {
            if piece.poly.is_zero() {
                continue;
            }
            let q = Adaptive { tol: quad.tol * (piece.hi - piece.lo) / self.window.length(), ..Adaptive::default() };
            dens += q.integrate_split(piece.lo, piece.hi, splits, |x| piece.eval(x) * f(x))?;
        }
        let cantor: f64 = self.cantor.iter().map(|c| c.integrate(&f, quad.cantor_depth, quad.tol, None)).sum();
        Ok(atoms + dens + cantor)
    }

    /// `|mu|(window)`.
    pub fn tv_norm(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight.abs()).sum();
        let dens: f64 = self.density.iter().map(DensityPiece::abs_integral).sum();
        let cantor: f64 = self.cantor.iter().map(|c| c.mass.abs()).sum();
        atoms + dens + cantor
    }

    /// `mu(window)`.
    pub fn total_mass(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let dens: f64 = self.density.iter().map(DensityPiece::integral).sum();
        let cantor: f64 = self.cantor.iter().map(|c| c.mass).sum();
        atoms + dens + cantor
    }

    pub fn scale(&self, c: f64) -> Self {
        let atoms =
            self.atoms.iter().map(|a| Atom { x: a.x, weight: a.weight * c }).filter(|a| a.weight != 0.0).collect();
        let density = self.density.iter().map(|p| DensityPiece { lo: p.lo, hi: p.hi, poly: p.poly.scale(c) }).collect();
        let cantor =
            self.cantor.iter().map(|p| CantorPart { mass: p.mass * c, ..*p }).filter(|p| p.mass != 0.0).collect();
        Self { window: self.window, atoms, density, cantor }
    }

    pub fn add(&self, other: &SignedMeasure) -> Result<Self> {
        if !self.window.same_as(&other.window) {
            return Err(Error::WindowMismatch);
        }
        let tol = self.window.merge_tol();
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);

        let mut edges: Vec<f64> = self.density.iter().map(|p| p.lo).chain(other.density.iter().map(|p| p.lo)).collect();
        edges.push(self.window.b);
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|x, y| (*x - *y).abs() <= tol);
        let density = edges
            .windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let mid = 0.5 * (lo + hi);
                let p = covering_piece(&self.density, mid).remapped(lo, hi);
                let q = covering_piece(&other.density, mid).remapped(lo, hi);
                DensityPiece { lo, hi, poly: add_cancelling(&p.poly, &q.poly) }
            })
            .collect();

        let mut cantor = self.cantor.clone();
        for c in &other.cantor {
            if let Some(existing) = cantor.iter_mut().find(|e| (e.lo - c.lo).abs() <= tol && (e.hi - c.hi).abs() <= tol)
            {
                existing.mass += c.mass;
            } else if cantor.iter().any(|e| c.lo < e.hi - tol && e.lo < c.hi - tol) {
                return Err(Error::OverlappingCantorCarriers);
            } else {
                cantor.push(*c);
            }
        }
        Self::new(self.window, atoms, density, cantor)
    }

    pub fn sub(&self, other: &SignedMeasure) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Restriction to the open sub-window, which becomes the new window.
    pub fn restrict(&self, sub: Window) -> Result<Self> {
        let tol = self.window.merge_tol();
        if sub.a < self.window.a - tol || sub.b > self.window.b + tol {
            return Err(Error::WindowMismatch);
        }
        let atoms = self.atoms.iter().copied().filter(|a| sub.contains(a.x)).collect();
        let density = self
            .density
            .iter()
            .filter_map(|p| {
                let lo = p.lo.max(sub.a);
                let hi = p.hi.min(sub.b);
                (hi - lo > tol).then(|| p.remapped(lo, hi))
            })
            .collect();
        let cantor = self.cantor.iter().flat_map(|c| c.restrict(sub.a, sub.b, 40)).collect();
        Self::new(sub, atoms, density, cantor)
    }

    /// Parameter-wise linear interpolation `(1 - theta) self + theta other`
    /// of two measures with the same structure (atom count, density piece
    /// count, Cantor part count).
    pub fn lerp(&self, other: &SignedMeasure, theta: f64) -> Result<Self> {
        if !self.window.same_as(&other.window)
            || self.atoms.len() != other.atoms.len()
            || self.density.len() != other.density.len()
            || self.cantor.len() != other.cantor.len()
        {
            return Err(Error::StructureMismatch);
        }
        let mix = |a: f64, b: f64| (1.0 - theta) * a + theta * b;
        let atoms = self
            .atoms
            .iter()
            .zip(&other.atoms)
            .map(|(p, q)| Atom { x: mix(p.x, q.x), weight: mix(p.weight, q.weight) })
            .collect();
        let density = self
            .density
            .iter()
            .zip(&other.density)
            .map(|(p, q)| {
                let n = p.poly.coeffs().len().max(q.poly.coeffs().len());
                let coeffs = (0..n)
                    .map(|k| mix(*p.poly.coeffs().get(k).unwrap_or(&0.0), *q.poly.coeffs().get(k).unwrap_or(&0.0)))
                    .collect();
                DensityPiece { lo: mix(p.lo, q.lo), hi: mix(p.hi, q.hi), poly: Cheb::new(coeffs) }
            })
            .collect();
        let cantor = self
            .cantor
            .iter()
            .zip(&other.cantor)
            .map(|(p, q)| CantorPart { lo: mix(p.lo, q.lo), hi: mix(p.hi, q.hi), mass: mix(p.mass, q.mass) })
            .collect();
        Self::new(self.window, atoms, density, cantor)
    }
}

fn covering_piece(pieces: &[DensityPiece], x: f64) -> &DensityPiece {
    let idx = pieces.partition_point(|p| p.hi <= x).min(pieces.len() - 1);
    &pieces[idx]
}

/// Coefficient-wise sum that flushes entries cancelled to rounding level.
fn add_cancelling(p: &Cheb, q: &Cheb) -> Cheb {
    let n = p.coeffs().len().max(q.coeffs().len());
    let coeffs = (0..n)
        .map(|k| {
            let a = *p.coeffs().get(k).unwrap_or(&0.0);
            let b = *q.coeffs().get(k).unwrap_or(&0.0);
            let s = a + b;
            if s.abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
                0.0
            } else {
                s
            }
        })
        .collect();
    Cheb::new(coeffs).chop()
}

fn normalize_atoms(mut atoms: Vec<Atom>, tol: f64) -> Vec<Atom> {
    atoms.sort_by(|p, q| p.x.total_cmp(&q.x));
    let mut out: Vec<(Atom, f64)> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some((last, abs_sum)) if (a.x - last.x).abs() <= tol => {
                last.weight += a.weight;
                *abs_sum += a.weight.abs();
            }
            _ => out.push((a, a.weight.abs())),
        }
    }
    out.into_iter().filter(|(a, abs_sum)| a.weight.abs() > 4.0 * f64::EPSILON * abs_sum).map(|(a, _)| a).collect()
}

/// An element of the product space of `n` measures on a shared window,
/// normed by the Euclidean combination of component total variations.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureVector {
    components: Vec<SignedMeasure>,
}

impl MeasureVector {
    pub fn new(components: Vec<SignedMeasure>) -> Result<Self> {
        let first = components.first().ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?;
        if components.iter().any(|c| !c.window.same_as(&first.window)) {
            return Err(Error::WindowMismatch);
        }
        Ok(Self { components })
    }

    pub fn scalar(mu: SignedMeasure) -> Self {
        Self { components: vec![mu] }
    }

    pub fn zero(window: Window, n: usize) -> Self {
        Self { components: vec![SignedMeasure::zero(window); n.max(1)] }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn window(&self) -> Window {
        self.components[0].window
    }

    pub fn components(&self) -> &[SignedMeasure] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &SignedMeasure {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<SignedMeasure> {
        self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SignedMeasure::is_zero)
    }

    /// `(sum_i |mu_i|^2)^(1/2)`.
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c.tv_norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn pair(&self, phi: &TestVector) -> Result<f64> {
        self.pair_with(phi, &Quadrature::default())
    }

    pub fn pair_with(&self, phi: &TestVector, quad: &Quadrature) -> Result<f64> {
        self.check_dim(phi.dim())?;
        self.components.iter().zip(&phi.components).map(|(m, p)| m.pair_with(p, quad)).sum()
    }

    pub fn pair_truncated(&self, phi: &TestVector, quad: &Quadrature) -> Result<f64> {
        self.check_dim(phi.dim())?;
        self.components.iter().zip(&phi.components).map(|(m, p)| m.pair_truncated(p, quad)).sum()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }

    pub fn add(&self, other: &MeasureVector) -> Result<Self> {
        self.check_dim(other.dim())?;
        let components =
            self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    pub fn sub(&self, other: &MeasureVector) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { components: self.components.iter().map(|m| m.scale(c)).collect() }
    }

    pub fn lerp(&self, other: &MeasureVector, theta: f64) -> Result<Self> {
        self.check_dim(other.dim())?;
        let components =
            self.components.iter().zip(&other.components).map(|(a, b)| a.lerp(b, theta)).collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfns::TestFunction;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn w(a: f64, b: f64) -> Window {
        Window::new(a, b).unwrap()
    }

    fn quad() -> Quadrature {
        Quadrature { tol: 1e-13, ..Quadrature::default() }
    }

    #[test]
    fn atom_pairing() {
        let mu = SignedMeasure::dirac(w(-1.0, 1.0), 0.0, 1.0).unwrap();
        assert_eq!(mu.pair(&TestFunction::bump(0.0, 0.5).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn density_pairing_with_linear_factor() {
        let mu = SignedMeasure::from_density(w(0.0, 1.0), vec![DensityPiece::constant(0.0, 1.0, 1.0)]).unwrap();
        let phi = TestFunction::plateau(0.5, 1.5, 1.0).unwrap().times_poly(&[0.0, 1.0]);
        assert_abs_diff_eq!(mu.pair_truncated(&phi, &quad()).unwrap(), 0.5, epsilon = 1e-13);
    }

    #[test]
    fn cantor_pairing_with_identity() {
        let mu =
            SignedMeasure::new(w(0.0, 1.0), vec![], vec![], vec![CantorPart { lo: 0.0, hi: 1.0, mass: 1.0 }]).unwrap();
        let v = mu.integrate(|x| x, &[], &quad()).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn support_outside_window_is_rejected() {
        let mu = SignedMeasure::zero(w(0.0, 1.0));
        let r = mu.pair(&TestFunction::bump(0.9, 0.5).unwrap());
        assert!(matches!(r, Err(Error::SupportOutsideWindow { .. })));
    }

    #[test]
    fn total_variation_examples() {
        let mu = SignedMeasure::new(
            w(0.0, 1.0),
            vec![Atom { x: 0.5, weight: 2.0 }],
            vec![DensityPiece::constant(0.0, 1.0, -1.0)],
            vec![],
        )
        .unwrap();
        assert_abs_diff_eq!(mu.tv_norm(), 3.0, epsilon = 1e-15);
        assert_eq!(SignedMeasure::zero(w(0.0, 1.0)).tv_norm(), 0.0);

        let mu = SignedMeasure::from_density(w(0.0, 1.0), vec![DensityPiece::from_monomial(0.0, 1.0, &[-1.0, 2.0])])
            .unwrap();
        // midpoint Riemann sum of |2x - 1| with 10^6 points
        let n = 1_000_000;
        let brute: f64 = (0..n).map(|i| ((2.0 * (i as f64 + 0.5) / n as f64) - 1.0).abs()).sum::<f64>() / n as f64;
        assert_abs_diff_eq!(brute, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(mu.tv_norm(), brute, epsilon = 1e-9);
        assert_abs_diff_eq!(mu.tv_norm(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn vector_norms() {
        let win = w(0.0, 1.0);
        let three = SignedMeasure::dirac(win, 0.2, 3.0).unwrap();
        let four = SignedMeasure::from_density(win, vec![DensityPiece::constant(0.0, 1.0, -4.0)]).unwrap();
        assert_abs_diff_eq!(MeasureVector::new(vec![three, four]).unwrap().norm(), 5.0, epsilon = 1e-15);
        let seven = SignedMeasure::dirac(win, 0.2, 7.0).unwrap();
        assert_eq!(MeasureVector::scalar(seven).norm(), 7.0);
        assert_eq!(MeasureVector::zero(win, 3).norm(), 0.0);
    }

    #[test]
    fn vector_pairings() {
        let win = w(-1.0, 2.0);
        let mu = MeasureVector::new(vec![
            SignedMeasure::dirac(win, 0.0, 1.0).unwrap(),
            SignedMeasure::dirac(win, 1.0, 1.0).unwrap(),
        ])
        .unwrap();
        let phi = TestVector::new(vec![TestFunction::bump(0.0, 0.5).unwrap(), TestFunction::bump(1.0, 0.5).unwrap()]);
        assert_eq!(mu.pair(&phi).unwrap(), 2.0);
        assert_eq!(MeasureVector::zero(win, 2).pair(&phi).unwrap(), 0.0);

        let win = w(0.0, 1.0);
        let mu = MeasureVector::new(vec![
            SignedMeasure::from_density(win, vec![DensityPiece::constant(0.0, 1.0, 1.0)]).unwrap(),
            SignedMeasure::dirac(win, 0.5, 2.0).unwrap(),
        ])
        .unwrap();
        let phi = TestVector::new(vec![
            TestFunction::plateau(0.5, 1.5, 1.0).unwrap().times_poly(&[0.0, 1.0]),
            TestFunction::bump(0.5, 0.4).unwrap(),
        ]);
        assert_abs_diff_eq!(mu.pair_truncated(&phi, &quad()).unwrap(), 2.5, epsilon = 1e-13);
        let short = TestVector::scalar(TestFunction::bump(0.5, 0.4).unwrap());
        assert!(matches!(mu.pair(&short), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn arithmetic_examples() {
        let win = w(-1.0, 3.0);
        let plus = SignedMeasure::dirac(win, 0.0, 1.0).unwrap();
        let minus = SignedMeasure::dirac(win, 0.0, -1.0).unwrap();
        assert!(plus.add(&minus).unwrap().is_zero());
        let bump = TestFunction::bump(0.0, 0.5).unwrap();
        assert_eq!(plus.scale(3.0).pair(&bump).unwrap(), 3.0);
        assert!(plus.restrict(w(1.0, 2.0)).unwrap().is_zero());
        let other = SignedMeasure::zero(w(0.0, 1.0));
        assert_eq!(plus.add(&other).unwrap_err(), Error::WindowMismatch);
    }

    #[test]
    fn restriction_of_densities_and_cantor_parts() {
        let win = w(0.0, 1.0);
        let mu = SignedMeasure::new(
            win,
            vec![Atom { x: 0.25, weight: 1.0 }],
            vec![DensityPiece::from_monomial(0.0, 1.0, &[0.0, 2.0])],
            vec![CantorPart { lo: 0.0, hi: 1.0, mass: 1.0 }],
        )
        .unwrap();
        let left = mu.restrict(w(0.0, 0.5)).unwrap();
        // 1 + int_0^0.5 2x + half the Cantor mass
        assert_abs_diff_eq!(left.total_mass(), 1.0 + 0.25 + 0.5, epsilon = 1e-12);
    }

    #[test]
    fn cantor_depths_agree() {
        let mu =
            SignedMeasure::new(w(0.0, 2.0), vec![], vec![], vec![CantorPart { lo: 0.2, hi: 1.7, mass: 1.3 }]).unwrap();
        let phi = TestFunction::bump(0.9, 0.85).unwrap();
        let d = 10;
        let coarse = mu.pair_with(&phi, &Quadrature { tol: 0.0, cantor_depth: d }).unwrap();
        let fine = mu.pair_with(&phi, &Quadrature { tol: 0.0, cantor_depth: d + 4 }).unwrap();
        // sup |phi'| * mass * 2^-1 * 3^-d with sup |phi'| < 3 / radius
        let bound = 3.0 / 0.85 * 1.3 * 0.5 * 3f64.powi(-(d as i32));
        assert!((coarse - fine).abs() <= bound);
    }

    #[test]
    fn merging_near_atoms() {
        let win = w(0.0, 1.0);
        let mu = SignedMeasure::new(
            win,
            vec![Atom { x: 0.5, weight: 1.0 }, Atom { x: 0.5 + 1e-14, weight: 2.0 }],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert_eq!(mu.atoms()[0].weight, 3.0);
    }

    fn fixture() -> impl Strategy<Value = SignedMeasure> {
        (
            prop::collection::vec((0.05f64..0.95, -3.0f64..3.0), 0..4),
            prop::collection::vec(-2.0f64..2.0, 1..5),
            prop::option::of(-2.0f64..2.0),
        )
            .prop_map(|(atoms, coeffs, cantor)| {
                let atoms = atoms.into_iter().map(|(x, weight)| Atom { x, weight }).collect();
                let density =
                    vec![DensityPiece::from_monomial(0.0, 0.4, &coeffs), DensityPiece::constant(0.4, 1.0, coeffs[0])];
                // a shared carrier keeps sums representable
                let cantor = cantor.into_iter().map(|mass| CantorPart { lo: 0.1, hi: 0.55, mass }).collect();
                SignedMeasure::new(w(0.0, 1.0), atoms, density, cantor).unwrap()
            })
    }

    fn test_fn() -> impl Strategy<Value = TestFunction> {
        (0.3f64..0.7, 0.05f64..0.3, prop::collection::vec(-1.0f64..1.0, 1..3))
            .prop_map(|(c, r, p)| TestFunction::bump(c, r).unwrap().times_poly(&p))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn pairing_is_linear(mu in fixture(), nu in fixture(), phi in test_fn()) {
            let q = quad();
            let sum = mu.add(&nu).unwrap();
            let lhs = sum.pair_with(&phi, &q).unwrap();
            let rhs = mu.pair_with(&phi, &q).unwrap() + nu.pair_with(&phi, &q).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn scaling_scales_variation(mu in fixture(), c in -5.0f64..5.0, k in -4i32..4) {
            let tv = mu.tv_norm();
            prop_assert!((mu.scale(c).tv_norm() - c.abs() * tv).abs() <= 8.0 * f64::EPSILON * c.abs() * tv);
            let p = 2f64.powi(k);
            prop_assert_eq!(mu.scale(-p).tv_norm(), p * tv);
        }

        #[test]
        fn duality_bound(a in fixture(), b in fixture(), p in test_fn(), q in test_fn()) {
            let mu = MeasureVector::new(vec![a, b]).unwrap();
            let phi = TestVector::new(vec![p, q]);
            let v = mu.pair_with(&phi, &quad()).unwrap();
            prop_assert!(v.abs() <= mu.norm() * phi.sup_norm() * (1.0 + 1e-9) + 1e-12);
        }
    }
}
