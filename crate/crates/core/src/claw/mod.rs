//! One-dimensional conservation laws `u_t + F(u)_x = 0`.

mod flux;
mod riemann;

use std::sync::Arc;

pub use flux::{EntropyPair, FamilyKind, FluxModel};
pub use riemann::{
    forced_jump, rarefaction_profile_rk4, rh_speed, riemann_solve, riemann_solve_with, RiemannOptions, RiemannSolution,
    Wave, WaveKind, WaveSpeed,
};

use crate::error::Result;
use crate::gelfand::MeasureCurve;
use crate::measures::Window;

/// `t -> u(., t) dx` on `[0, horizon]`, with the time-derivative measure as
/// its derivative. Fails up front if a wave leaves the window.
pub fn solution_curve(sol: &RiemannSolution, window: Window, horizon: f64, degree: usize) -> Result<MeasureCurve> {
    sol.as_bv(horizon, &window, degree)?;
    let (v, d) = (sol.clone(), sol.clone());
    MeasureCurve::new(horizon, window, sol.dim(), Arc::new(move |t| v.measure_at(t, &window, degree)))
        .map(|c| c.with_derivative(Arc::new(move |t| d.time_derivative_measure(t, &window, degree))))
}

/// `t -> D_x F(u(., t))` on `[0, horizon]`.
pub fn flux_derivative_curve(
    sol: &RiemannSolution,
    window: Window,
    horizon: f64,
    degree: usize,
) -> Result<MeasureCurve> {
    sol.as_bv(horizon, &window, degree)?;
    let s = sol.clone();
    MeasureCurve::new(horizon, window, sol.dim(), Arc::new(move |t| s.flux_derivative_measure(t, &window, degree)))
}
