//! Self-similar Riemann solutions and their derivative measures.

use serde::{Deserialize, Serialize};

use super::flux::{FamilyKind, FluxModel};
use crate::bvcalc::{BVVector, PiecewiseBV};
use crate::cheb::Cheb;
use crate::error::{Error, Result};
use crate::measures::{Atom, DensityPiece, MeasureVector, SignedMeasure, Window};

/// Waves whose end states differ by less than this (relative) are dropped.
const TRIVIAL_WAVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Contact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveSpeed {
    Jump(f64),
    Fan { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub kind: WaveKind,
    /// Characteristic family, numbered from 1.
    pub family: usize,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub speed: WaveSpeed,
}

impl Wave {
    pub fn is_jump(&self) -> bool {
        matches!(self.speed, WaveSpeed::Jump(_))
    }

    pub fn jump_speed(&self) -> Option<f64> {
        match self.speed {
            WaveSpeed::Jump(s) => Some(s),
            WaveSpeed::Fan { .. } => None,
        }
    }

    pub fn lower_speed(&self) -> f64 {
        match self.speed {
            WaveSpeed::Jump(s) => s,
            WaveSpeed::Fan { lo, .. } => lo,
        }
    }

    pub fn upper_speed(&self) -> f64 {
        match self.speed {
            WaveSpeed::Jump(s) => s,
            WaveSpeed::Fan { hi, .. } => hi,
        }
    }

    /// Euclidean size of the state change.
    pub fn strength(&self) -> f64 {
        self.left.iter().zip(&self.right).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
    }
}

/// Solver controls for the p-system middle state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RiemannOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 100 }
    }
}

/// The self-similar solution `u(x, t) = w(x / t)`, a left-to-right sequence of
/// waves separating constant states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiemannSolution {
    pub flux: FluxModel,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// Constant states, `states[0] = left`, `states[last] = right`.
    pub states: Vec<Vec<f64>>,
    pub waves: Vec<Wave>,
}

fn check_states(flux: &FluxModel, ul: &[f64], ur: &[f64]) -> Result<()> {
    flux.validate()?;
    for u in [ul, ur] {
        if u.len() != flux.dim() {
            return Err(Error::DimensionMismatch { expected: flux.dim(), got: u.len() });
        }
        if !flux.admissible(u) {
            return Err(Error::InadmissibleState(u.to_vec()));
        }
    }
    Ok(())
}

fn differs(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).any(|(x, y)| (x - y).abs() > TRIVIAL_WAVE_TOL * x.abs().max(y.abs()).max(1.0))
}

/// Solves the Riemann problem with the entropy-admissible wave curves.
pub fn riemann_solve(flux: &FluxModel, ul: &[f64], ur: &[f64]) -> Result<RiemannSolution> {
    riemann_solve_with(flux, ul, ur, &RiemannOptions::default())
}

pub fn riemann_solve_with(flux: &FluxModel, ul: &[f64], ur: &[f64], opts: &RiemannOptions) -> Result<RiemannSolution> {
    check_states(flux, ul, ur)?;
    let mut waves = Vec::new();
    match *flux {
        FluxModel::Burgers => {
            if differs(ul, ur) {
                let (a, b) = (ul[0], ur[0]);
                if a > b {
                    waves.push(Wave {
                        kind: WaveKind::Shock,
                        family: 1,
                        left: ul.to_vec(),
                        right: ur.to_vec(),
                        speed: WaveSpeed::Jump(0.5 * (a + b)),
                    });
                } else {
                    waves.push(Wave {
                        kind: WaveKind::Rarefaction,
                        family: 1,
                        left: ul.to_vec(),
                        right: ur.to_vec(),
                        speed: WaveSpeed::Fan { lo: a, hi: b },
                    });
                }
            }
        }
        FluxModel::LinearAdvection { a } => {
            if differs(ul, ur) {
                waves.push(Wave {
                    kind: WaveKind::Contact,
                    family: 1,
                    left: ul.to_vec(),
                    right: ur.to_vec(),
                    speed: WaveSpeed::Jump(a),
                });
            }
        }
        FluxModel::PSystem { .. } => waves = p_system_waves(flux, ul, ur, opts)?,
    }
    let mut states = vec![ul.to_vec()];
    states.extend(waves.iter().map(|w| w.right.clone()));
    if let Some(last) = states.last_mut() {
        *last = ur.to_vec();
    }
    Ok(RiemannSolution { flux: *flux, left: ul.to_vec(), right: ur.to_vec(), states, waves })
}

/// Velocity reached from the left state along the admissible 1-curve.
fn forward_curve(flux: &FluxModel, vl: f64, ul: f64, v: f64) -> f64 {
    if v >= vl {
        ul + flux.riemann_potential(v) - flux.riemann_potential(vl)
    } else {
        ul - ((flux.pressure(v) - flux.pressure(vl)) * (vl - v)).sqrt()
    }
}

/// Velocity of the middle state that connects to the right state along the
/// admissible 2-curve.
fn backward_curve(flux: &FluxModel, vr: f64, ur: f64, v: f64) -> f64 {
    if v >= vr {
        ur + flux.riemann_potential(vr) - flux.riemann_potential(v)
    } else {
        ur + ((flux.pressure(v) - flux.pressure(vr)) * (vr - v)).sqrt()
    }
}

fn p_system_waves(flux: &FluxModel, ul: &[f64], ur: &[f64], opts: &RiemannOptions) -> Result<Vec<Wave>> {
    let (vl, vel_l) = (ul[0], ul[1]);
    let (vr, vel_r) = (ur[0], ur[1]);
    let f = |v: f64| forward_curve(flux, vl, vel_l, v) - backward_curve(flux, vr, vel_r, v);

    // f increases in v; a root exists iff f(inf) > 0.
    if let Some(phi_inf) = flux.riemann_potential_at_infinity() {
        let f_inf = vel_l - vel_r + 2.0 * phi_inf - flux.riemann_potential(vl) - flux.riemann_potential(vr);
        if f_inf <= 0.0 {
            return Err(Error::VacuumFormation);
        }
    }
    let mut lo = vl.min(vr);
    let mut hi = vl.max(vr);
    let mut expansions = 0;
    while f(lo) > 0.0 {
        lo *= 0.5;
        expansions += 1;
        if expansions > 2000 || lo < f64::MIN_POSITIVE {
            return Err(Error::NoConvergence("middle state bracket below".into()));
        }
    }
    while f(hi) < 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 2000 || !hi.is_finite() {
            return Err(Error::VacuumFormation);
        }
    }

    let mut v = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let fv = f(v);
        if fv == 0.0 {
            converged = true;
            break;
        }
        if fv < 0.0 {
            lo = v;
        } else {
            hi = v;
        }
        let h = 1e-7 * v;
        let df = (f(v + h) - f(v - h)) / (2.0 * h);
        let mut next = v - fv / df;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - v).abs();
        v = next;
        if step <= opts.tol * v || hi - lo <= opts.tol * v {
            converged = true;
            // one more Newton step at rounding level
            let fv = f(v);
            let df = (f(v + h) - f(v - h)) / (2.0 * h);
            let polished = v - fv / df;
            if polished > 0.0 && polished.is_finite() && (polished - v).abs() <= 10.0 * opts.tol * v {
                v = polished;
            }
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("middle state Newton iteration".into()));
    }

    let mut mid = vec![v, forward_curve(flux, vl, vel_l, v)];
    let first_trivial = !differs(ul, &mid);
    let second_trivial = !differs(&mid, ur);
    if second_trivial {
        mid = ur.to_vec();
    } else if first_trivial {
        mid = ul.to_vec();
    }

    let mut waves = Vec::new();
    if differs(ul, &mid) {
        waves.push(p_system_wave(flux, 1, ul, &mid));
    }
    if differs(&mid, ur) {
        waves.push(p_system_wave(flux, 2, &mid, ur));
    }
    Ok(waves)
}

fn p_system_wave(flux: &FluxModel, family: usize, left: &[f64], right: &[f64]) -> Wave {
    let (vl, vr) = (left[0], right[0]);
    let shock = if family == 1 { vr < vl } else { vr > vl };
    let speed = if shock {
        let s = (-(flux.pressure(vr) - flux.pressure(vl)) / (vr - vl)).sqrt();
        WaveSpeed::Jump(if family == 1 { -s } else { s })
    } else {
        WaveSpeed::Fan { lo: flux.eigenvalue(family, left), hi: flux.eigenvalue(family, right) }
    };
    Wave {
        kind: if shock { WaveKind::Shock } else { WaveKind::Rarefaction },
        family,
        left: left.to_vec(),
        right: right.to_vec(),
        speed,
    }
}

/// A single discontinuity from `ul` to `ur`, admissible or not. The speed
/// defaults to the Rankine-Hugoniot speed when one exists.
pub fn forced_jump(flux: &FluxModel, ul: &[f64], ur: &[f64], speed: Option<f64>) -> Result<RiemannSolution> {
    check_states(flux, ul, ur)?;
    let s = match speed {
        Some(s) if s.is_finite() => s,
        Some(_) => return Err(Error::Config("non-finite jump speed".into())),
        None => rh_speed(flux, ul, ur)?,
    };
    let family = (1..=flux.dim())
        .min_by(|&i, &j| {
            let avg: Vec<f64> = ul.iter().zip(ur).map(|(a, b)| 0.5 * (a + b)).collect();
            let di = (flux.eigenvalue(i, &avg) - s).abs();
            let dj = (flux.eigenvalue(j, &avg) - s).abs();
            di.total_cmp(&dj)
        })
        .unwrap_or(1);
    let kind = match flux.family_kind(family) {
        FamilyKind::LinearlyDegenerate => WaveKind::Contact,
        FamilyKind::GenuinelyNonlinear => WaveKind::Shock,
    };
    let waves = if differs(ul, ur) {
        vec![Wave { kind, family, left: ul.to_vec(), right: ur.to_vec(), speed: WaveSpeed::Jump(s) }]
    } else {
        Vec::new()
    };
    Ok(RiemannSolution {
        flux: *flux,
        left: ul.to_vec(),
        right: ur.to_vec(),
        states: vec![ul.to_vec(), ur.to_vec()],
        waves,
    })
}

/// Least-squares speed `s` minimizing `|[F] - s [U]|`.
pub fn rh_speed(flux: &FluxModel, ul: &[f64], ur: &[f64]) -> Result<f64> {
    let (fl, fr) = (flux.flux(ul), flux.flux(ur));
    let du: Vec<f64> = ur.iter().zip(ul).map(|(a, b)| a - b).collect();
    let num: f64 = fr.iter().zip(&fl).zip(&du).map(|((a, b), d)| (a - b) * d).sum();
    let den: f64 = du.iter().map(|d| d * d).sum();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// Classical RK4 integration of `w' = r_k(w)` from `from`, starting at
/// `eps0 = lambda_k(from)` with step `h`. Works for any genuinely nonlinear
/// family with the normalized eigenvector.
pub fn rarefaction_profile_rk4(flux: &FluxModel, family: usize, from: &[f64], eps: f64, h: f64) -> Vec<f64> {
    let eps0 = flux.eigenvalue(family, from);
    let span = eps - eps0;
    let steps = (span.abs() / h).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let mut w = from.to_vec();
    let axpy = |w: &[f64], k: &[f64], a: f64| -> Vec<f64> { w.iter().zip(k).map(|(x, y)| x + a * y).collect() };
    for _ in 0..steps {
        let k1 = flux.eigenvector(family, &w);
        let k2 = flux.eigenvector(family, &axpy(&w, &k1, 0.5 * dt));
        let k3 = flux.eigenvector(family, &axpy(&w, &k2, 0.5 * dt));
        let k4 = flux.eigenvector(family, &axpy(&w, &k3, dt));
        for i in 0..w.len() {
            w[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    w
}

impl RiemannSolution {
    pub fn dim(&self) -> usize {
        self.left.len()
    }

    /// Profile state inside the fan of `wave` at `eps = x / t`.
    pub fn fan_state(&self, wave: &Wave, eps: f64) -> Vec<f64> {
        self.flux
            .rarefaction_state(wave.family, &wave.left, eps)
            .unwrap_or_else(|| rarefaction_profile_rk4(&self.flux, wave.family, &wave.left, eps, 1e-3))
    }

    /// `u(x, t)`; for `t <= 0` the initial data (right-continuous at 0).
    pub fn sample(&self, x: f64, t: f64) -> Vec<f64> {
        if t <= 0.0 {
            return if x < 0.0 { self.left.clone() } else { self.right.clone() };
        }
        let eps = x / t;
        for (i, w) in self.waves.iter().enumerate() {
            match w.speed {
                WaveSpeed::Jump(s) => {
                    if eps < s {
                        return self.states[i].clone();
                    }
                }
                WaveSpeed::Fan { lo, hi } => {
                    if eps < lo {
                        return self.states[i].clone();
                    }
                    if eps < hi {
                        return self.fan_state(w, eps);
                    }
                }
            }
        }
        self.states.last().cloned().unwrap_or_else(|| self.right.clone())
    }

    /// Positions of the wave edges at time `t`, checked against the window.
    fn edges(&self, t: f64, window: &Window) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        if t <= 0.0 {
            if !self.waves.is_empty() {
                if !window.contains(0.0) {
                    return Err(Error::WaveOutsideWindow { x: 0.0, a: window.a, b: window.b });
                }
                out.push(0.0);
            }
            return Ok(out);
        }
        for w in &self.waves {
            for x in [w.lower_speed() * t, w.upper_speed() * t] {
                if !window.contains(x) {
                    return Err(Error::WaveOutsideWindow { x, a: window.a, b: window.b });
                }
            }
            out.push(w.lower_speed() * t);
            if !w.is_jump() {
                out.push(w.upper_speed() * t);
            }
        }
        Ok(out)
    }

    /// `u(., t)` on the window as piecewise polynomials, with the largest
    /// projection error estimate over the fans.
    pub fn as_bv(&self, t: f64, window: &Window, degree: usize) -> Result<(BVVector, f64)> {
        let n = self.dim();
        let edges = self.edges(t, window)?;
        let mut pieces: Vec<Vec<Cheb>> = vec![Vec::new(); n];
        let mut error: f64 = 0.0;
        if t <= 0.0 {
            let states = if edges.is_empty() { vec![&self.left] } else { vec![&self.left, &self.right] };
            for s in states {
                for c in 0..n {
                    pieces[c].push(Cheb::constant(s[c]));
                }
            }
        } else {
            pieces.iter_mut().enumerate().for_each(|(c, p)| p.push(Cheb::constant(self.states[0][c])));
            for (i, w) in self.waves.iter().enumerate() {
                if let WaveSpeed::Fan { lo, hi } = w.speed {
                    for (c, p) in pieces.iter_mut().enumerate() {
                        let poly = Cheb::interpolate(degree, |s| {
                            let eps = 0.5 * (lo + hi) + 0.5 * (hi - lo) * s;
                            self.fan_state(w, eps)[c]
                        });
                        error = error.max(poly.tail_estimate(4));
                        p.push(poly.chop());
                    }
                }
                for (c, p) in pieces.iter_mut().enumerate() {
                    p.push(Cheb::constant(self.states[i + 1][c]));
                }
            }
        }
        let comps = pieces
            .into_iter()
            .map(|p| PiecewiseBV::new(*window, edges.clone(), p, None))
            .collect::<Result<Vec<_>>>()?;
        Ok((BVVector::new(comps)?, error))
    }

    /// `u(., t) dx` as a measure vector.
    pub fn measure_at(&self, t: f64, window: &Window, degree: usize) -> Result<MeasureVector> {
        self.as_bv(t, window, degree)?.0.to_measure(0)
    }

    /// Fan densities at time `t` for each wave, built from `f(w, eps)`
    /// projected onto the fan interval.
    fn fan_densities<G: Fn(&Wave, &[f64], f64) -> Vec<f64>>(
        &self,
        t: f64,
        window: &Window,
        degree: usize,
        g: G,
    ) -> Result<Vec<Vec<DensityPiece>>> {
        let n = self.dim();
        let edges = self.edges(t, window)?;
        let mut grid = vec![window.a];
        grid.extend(&edges);
        grid.push(window.b);
        let mut out: Vec<Vec<DensityPiece>> = vec![Vec::new(); n];
        let mut cell = 0;
        let push_zero = |out: &mut Vec<Vec<DensityPiece>>, lo: f64, hi: f64| {
            for c in out.iter_mut() {
                c.push(DensityPiece::constant(lo, hi, 0.0));
            }
        };
        push_zero(&mut out, grid[0], grid[1]);
        cell += 1;
        for w in &self.waves {
            if let WaveSpeed::Fan { lo, hi } = w.speed {
                let (xlo, xhi) = (grid[cell], grid[cell + 1]);
                for (c, o) in out.iter_mut().enumerate() {
                    let poly = Cheb::interpolate(degree, |s| {
                        let eps = 0.5 * (lo + hi) + 0.5 * (hi - lo) * s;
                        g(w, &self.fan_state(w, eps), eps)[c]
                    })
                    .chop();
                    o.push(DensityPiece::new(xlo, xhi, poly));
                }
                cell += 1;
            }
            push_zero(&mut out, grid[cell], grid[cell + 1]);
            cell += 1;
        }
        Ok(out)
    }

    fn assemble(
        &self,
        window: &Window,
        atoms: Vec<Vec<Atom>>,
        density: Vec<Vec<DensityPiece>>,
    ) -> Result<MeasureVector> {
        let comps = atoms
            .into_iter()
            .zip(density)
            .map(|(a, d)| SignedMeasure::new(*window, a, d, Vec::new()))
            .collect::<Result<Vec<_>>>()?;
        MeasureVector::new(comps)
    }

    /// `d/dt u(., t)` as a measure: `-s [u] delta` at jumps and
    /// `-(x / t^2) r_k(w(x / t))` inside fans. At `t = 0` every wave is
    /// concentrated at the origin.
    pub fn time_derivative_measure(&self, t: f64, window: &Window, degree: usize) -> Result<MeasureVector> {
        let n = self.dim();
        if t <= 0.0 {
            return self.initial_derivative(window, true);
        }
        let mut atoms: Vec<Vec<Atom>> = vec![Vec::new(); n];
        for w in self.waves.iter().filter(|w| w.is_jump()) {
            let s = w.lower_speed();
            for (c, list) in atoms.iter_mut().enumerate() {
                list.push(Atom { x: s * t, weight: -s * (w.right[c] - w.left[c]) });
            }
        }
        let density = self.fan_densities(t, window, degree, |w, state, eps| {
            self.flux.eigenvector(w.family, state).into_iter().map(|r| -eps / t * r).collect()
        })?;
        self.assemble(window, atoms, density)
    }

    /// `D_x F(u(., t))`: `[F] delta` at jumps and `DF(w) r_k(w) / t` inside
    /// fans. At `t = 0` the total `F(u_R) - F(u_L)` sits at the origin.
    pub fn flux_derivative_measure(&self, t: f64, window: &Window, degree: usize) -> Result<MeasureVector> {
        let n = self.dim();
        if t <= 0.0 {
            return self.initial_derivative(window, false);
        }
        let mut atoms: Vec<Vec<Atom>> = vec![Vec::new(); n];
        for w in self.waves.iter().filter(|w| w.is_jump()) {
            let (fl, fr) = (self.flux.flux(&w.left), self.flux.flux(&w.right));
            for c in 0..n {
                atoms[c].push(Atom { x: w.lower_speed() * t, weight: fr[c] - fl[c] });
            }
        }
        let density = self.fan_densities(t, window, degree, |w, state, _| {
            let r = self.flux.eigenvector(w.family, state);
            self.flux.apply_jacobian(state, &r).into_iter().map(|v| v / t).collect()
        })?;
        self.assemble(window, atoms, density)
    }

    fn initial_derivative(&self, window: &Window, time: bool) -> Result<MeasureVector> {
        let n = self.dim();
        if !self.waves.is_empty() && !window.contains(0.0) {
            return Err(Error::WaveOutsideWindow { x: 0.0, a: window.a, b: window.b });
        }
        let mut atoms: Vec<Vec<Atom>> = vec![Vec::new(); n];
        for w in &self.waves {
            let (fl, fr) = (self.flux.flux(&w.left), self.flux.flux(&w.right));
            for c in 0..n {
                let df = fr[c] - fl[c];
                let weight = match (time, w.speed) {
                    (true, WaveSpeed::Jump(s)) => -s * (w.right[c] - w.left[c]),
                    (true, WaveSpeed::Fan { .. }) => -df,
                    (false, _) => df,
                };
                atoms[c].push(Atom { x: 0.0, weight });
            }
        }
        self.assemble(window, atoms, vec![Vec::new(); n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Quadrature;
    use crate::testfns::{TestFunction, TestVector};
    use approx::assert_abs_diff_eq;

    fn rh_residual(flux: &FluxModel, w: &Wave) -> f64 {
        let s = w.jump_speed().unwrap();
        let (fl, fr) = (flux.flux(&w.left), flux.flux(&w.right));
        (0..w.left.len()).map(|i| ((fr[i] - fl[i]) - s * (w.right[i] - w.left[i])).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn burgers_shock_and_rarefaction() {
        let sol = riemann_solve(&FluxModel::Burgers, &[1.0], &[0.0]).unwrap();
        assert_eq!(sol.waves.len(), 1);
        assert_eq!(sol.waves[0].kind, WaveKind::Shock);
        assert_eq!(sol.waves[0].speed, WaveSpeed::Jump(0.5));

        let sol = riemann_solve(&FluxModel::Burgers, &[0.0], &[1.0]).unwrap();
        assert_eq!(sol.waves[0].kind, WaveKind::Rarefaction);
        assert_eq!(sol.waves[0].speed, WaveSpeed::Fan { lo: 0.0, hi: 1.0 });
        assert_abs_diff_eq!(sol.sample(0.3, 1.0)[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(sol.sample(-0.3, 1.0)[0], 0.0);
        assert_abs_diff_eq!(sol.sample(1.3, 1.0)[0], 1.0);

        let sol = riemann_solve(&FluxModel::Burgers, &[0.4], &[0.4]).unwrap();
        assert!(sol.waves.is_empty());
    }

    #[test]
    fn linear_advection_contact() {
        let sol = riemann_solve(&FluxModel::LinearAdvection { a: 1.0 }, &[2.0], &[-1.0]).unwrap();
        assert_eq!(sol.waves[0].kind, WaveKind::Contact);
        assert_eq!(sol.waves[0].jump_speed(), Some(1.0));
    }

    #[test]
    fn p_system_single_shock() {
        let flux = FluxModel::PSystem { k: 1.0, gamma: 1.0 };
        let sol = riemann_solve(&flux, &[1.0, 0.0], &[0.5, -(0.5f64).sqrt()]).unwrap();
        assert_eq!(sol.waves.len(), 1);
        let w = &sol.waves[0];
        assert_eq!((w.kind, w.family), (WaveKind::Shock, 1));
        assert_abs_diff_eq!(w.jump_speed().unwrap(), -(2f64).sqrt(), epsilon = 1e-12);
        assert!(rh_residual(&flux, w) < 1e-12);
    }

    #[test]
    fn p_system_general_problems() {
        for (flux, ul, ur) in [
            (FluxModel::PSystem { k: 1.0, gamma: 1.4 }, vec![1.0, 0.5], vec![0.8, -0.3]),
            (FluxModel::PSystem { k: 1.0, gamma: 1.4 }, vec![1.0, -0.5], vec![1.2, 0.3]),
            (FluxModel::PSystem { k: 2.0, gamma: 1.0 }, vec![0.5, 0.0], vec![2.0, 0.0]),
            (FluxModel::PSystem { k: 1.0, gamma: 3.0 }, vec![1.0, 1.0], vec![1.0, -1.0]),
        ] {
            let sol = riemann_solve(&flux, &ul, &ur).unwrap();
            assert!(!sol.waves.is_empty());
            for pair in sol.waves.windows(2) {
                assert!(pair[0].upper_speed() < pair[1].lower_speed());
            }
            for w in &sol.waves {
                match w.kind {
                    WaveKind::Shock => {
                        assert!(rh_residual(&flux, w) < 1e-12);
                        let s = w.jump_speed().unwrap();
                        assert!(flux.eigenvalue(w.family, &w.left) > s && s > flux.eigenvalue(w.family, &w.right));
                    }
                    WaveKind::Rarefaction => {
                        let end = sol.fan_state(w, w.upper_speed());
                        assert_abs_diff_eq!(end[0], w.right[0], epsilon = 1e-10);
                        assert_abs_diff_eq!(end[1], w.right[1], epsilon = 1e-10);
                    }
                    WaveKind::Contact => unreachable!(),
                }
            }
            // continuity of the self-similar profile at fan edges
            for w in sol.waves.iter().filter(|w| !w.is_jump()) {
                let (lo, hi) = (w.lower_speed(), w.upper_speed());
                let a = sol.sample(lo + 1e-12, 1.0);
                let b = sol.sample(hi - 1e-12, 1.0);
                assert_abs_diff_eq!(a[0], w.left[0], epsilon = 1e-8);
                assert_abs_diff_eq!(b[1], w.right[1], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn closed_form_fan_agrees_with_rk4() {
        let flux = FluxModel::PSystem { k: 1.0, gamma: 1.4 };
        let sol = riemann_solve(&flux, &[1.0, -0.5], &[1.2, 0.3]).unwrap();
        for w in sol.waves.iter().filter(|w| !w.is_jump()) {
            for theta in [0.25, 0.5, 1.0] {
                let eps = w.lower_speed() + theta * (w.upper_speed() - w.lower_speed());
                let exact = sol.fan_state(w, eps);
                let rk = rarefaction_profile_rk4(&flux, w.family, &w.left, eps, 1e-3);
                for i in 0..2 {
                    assert_abs_diff_eq!(exact[i], rk[i], epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn vacuum_is_reported() {
        let flux = FluxModel::PSystem { k: 1.0, gamma: 1.4 };
        assert_eq!(riemann_solve(&flux, &[1.0, -20.0], &[1.0, 20.0]).unwrap_err(), Error::VacuumFormation);
        assert!(matches!(riemann_solve(&flux, &[-1.0, 0.0], &[1.0, 0.0]), Err(Error::InadmissibleState(_))));
    }

    #[test]
    fn derivative_measures_cancel() {
        let w = Window::new(-3.0, 3.0).unwrap();
        for (flux, ul, ur) in [
            (FluxModel::Burgers, vec![1.0], vec![0.0]),
            (FluxModel::Burgers, vec![-0.5], vec![1.0]),
            (FluxModel::PSystem { k: 1.0, gamma: 1.4 }, vec![1.0, -0.5], vec![1.2, 0.3]),
        ] {
            let sol = riemann_solve(&flux, &ul, &ur).unwrap();
            for t in [0.0, 0.4, 1.0] {
                let dt = sol.time_derivative_measure(t, &w, 32).unwrap();
                let dx = sol.flux_derivative_measure(t, &w, 32).unwrap();
                let sum = dt.add(&dx).unwrap();
                assert!(sum.norm() < 1e-10, "t = {t}: {}", sum.norm());
            }
        }
    }

    #[test]
    fn time_derivative_matches_finite_difference() {
        let w = Window::new(-3.0, 3.0).unwrap();
        let sol = riemann_solve(&FluxModel::PSystem { k: 1.0, gamma: 1.4 }, &[1.0, -0.5], &[1.2, 0.3]).unwrap();
        let phi = TestVector::new(vec![
            TestFunction::plateau(0.2, 2.5, 1.0).unwrap(),
            TestFunction::bump(-0.4, 2.0).unwrap().times_poly(&[1.0, 0.5]),
        ]);
        let quad = Quadrature { tol: 1e-13, ..Quadrature::default() };
        let t = 0.7;
        let h = 1e-3;
        let pair = |t: f64| sol.measure_at(t, &w, 32).unwrap().pair_with(&phi, &quad).unwrap();
        let fd = (8.0 * (pair(t + h) - pair(t - h)) - (pair(t + 2.0 * h) - pair(t - 2.0 * h))) / (12.0 * h);
        let exact = sol.time_derivative_measure(t, &w, 32).unwrap().pair_with(&phi, &quad).unwrap();
        assert_abs_diff_eq!(fd, exact, epsilon = 1e-8);
    }

    #[test]
    fn projection_is_exact_for_burgers_fan() {
        let w = Window::new(-2.0, 2.0).unwrap();
        let sol = riemann_solve(&FluxModel::Burgers, &[0.0], &[1.0]).unwrap();
        let (bv, err) = sol.as_bv(1.0, &w, 32).unwrap();
        assert_eq!(err, 0.0);
        assert_eq!(bv.component(0).pieces()[1].degree(), 1);
        assert!(matches!(sol.as_bv(3.0, &w, 32), Err(Error::WaveOutsideWindow { .. })));
    }

    #[test]
    fn forced_jump_keeps_given_speed() {
        let sol = forced_jump(&FluxModel::Burgers, &[1.0], &[0.0], Some(0.0)).unwrap();
        assert_eq!(sol.waves[0].jump_speed(), Some(0.0));
        let sol = forced_jump(&FluxModel::Burgers, &[0.0], &[1.0], None).unwrap();
        assert_abs_diff_eq!(sol.waves[0].jump_speed().unwrap(), 0.5, epsilon = 1e-15);
    }
}
