//! Built-in flux models: Burgers, linear advection and the p-system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shock/rarefaction families versus contact families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    GenuinelyNonlinear,
    LinearlyDegenerate,
}

/// A flux `F: R^n -> R^n` with its Jacobian and eigenstructure.
///
/// Families are numbered from 1 in every method. For genuinely nonlinear
/// families the right eigenvector is scaled so that `r_k . grad lambda_k = 1`,
/// which makes `lambda_k(w_k(eps)) = eps` along a rarefaction profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxModel {
    /// `F(u) = u^2 / 2`.
    Burgers,
    /// `F(u) = a u`.
    LinearAdvection { a: f64 },
    /// Lagrangian gas dynamics in `(v, u)`: `v_t - u_x = 0`, `u_t + p(v)_x = 0`
    /// with `p(v) = k v^-gamma`.
    PSystem { k: f64, gamma: f64 },
}

impl FluxModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FluxModel::Burgers => Ok(()),
            FluxModel::LinearAdvection { a } if a.is_finite() => Ok(()),
            FluxModel::PSystem { k, gamma } if k > 0.0 && gamma >= 1.0 && k.is_finite() && gamma.is_finite() => Ok(()),
            _ => Err(Error::Config(format!("invalid flux parameters: {self:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FluxModel::Burgers => "burgers",
            FluxModel::LinearAdvection { .. } => "linear_advection",
            FluxModel::PSystem { .. } => "p_system",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FluxModel::PSystem { .. } => 2,
            _ => 1,
        }
    }

    pub fn admissible(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && u.iter().all(|x| x.is_finite())
            && match self {
                FluxModel::PSystem { .. } => u[0] > 0.0,
                _ => true,
            }
    }

    pub fn flux(&self, u: &[f64]) -> Vec<f64> {
        match *self {
            FluxModel::Burgers => vec![0.5 * u[0] * u[0]],
            FluxModel::LinearAdvection { a } => vec![a * u[0]],
            FluxModel::PSystem { .. } => vec![-u[1], self.pressure(u[0])],
        }
    }

    /// Row-major Jacobian `DF(u)`.
    pub fn jacobian(&self, u: &[f64]) -> Vec<Vec<f64>> {
        match *self {
            FluxModel::Burgers => vec![vec![u[0]]],
            FluxModel::LinearAdvection { a } => vec![vec![a]],
            FluxModel::PSystem { .. } => vec![vec![0.0, -1.0], vec![self.pressure_derivative(u[0]), 0.0]],
        }
    }

    /// `DF(u) w`.
    pub fn apply_jacobian(&self, u: &[f64], w: &[f64]) -> Vec<f64> {
        self.jacobian(u).iter().map(|row| row.iter().zip(w).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn family_kind(&self, _family: usize) -> FamilyKind {
        match self {
            FluxModel::LinearAdvection { .. } => FamilyKind::LinearlyDegenerate,
            _ => FamilyKind::GenuinelyNonlinear,
        }
    }

    pub fn eigenvalue(&self, family: usize, u: &[f64]) -> f64 {
        match *self {
            FluxModel::Burgers => u[0],
            FluxModel::LinearAdvection { a } => a,
            FluxModel::PSystem { .. } => {
                let c = self.sound_speed(u[0]);
                if family == 1 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// Ordered `(lambda_k, r_k)` pairs.
    pub fn eigen(&self, u: &[f64]) -> Vec<(f64, Vec<f64>)> {
        match *self {
            FluxModel::Burgers => vec![(u[0], vec![1.0])],
            FluxModel::LinearAdvection { a } => vec![(a, vec![1.0])],
            FluxModel::PSystem { .. } => {
                let v = u[0];
                let c = self.sound_speed(v);
                let dc = self.sound_speed_derivative(v);
                vec![(-c, vec![-1.0 / dc, -c / dc]), (c, vec![1.0 / dc, -c / dc])]
            }
        }
    }

    pub fn eigenvector(&self, family: usize, u: &[f64]) -> Vec<f64> {
        self.eigen(u).swap_remove(family - 1).1
    }

    /// `grad lambda_k(u)`.
    pub fn eigenvalue_gradient(&self, family: usize, u: &[f64]) -> Vec<f64> {
        match *self {
            FluxModel::Burgers => vec![1.0],
            FluxModel::LinearAdvection { .. } => vec![0.0],
            FluxModel::PSystem { .. } => {
                let dc = self.sound_speed_derivative(u[0]);
                if family == 1 {
                    vec![-dc, 0.0]
                } else {
                    vec![dc, 0.0]
                }
            }
        }
    }

    /// Total polynomial degree of flux component `i`, when polynomial.
    pub fn poly_degree(&self, component: usize) -> Option<usize> {
        match self {
            FluxModel::Burgers => Some(2),
            FluxModel::LinearAdvection { .. } => Some(1),
            FluxModel::PSystem { .. } if component == 0 => Some(1),
            FluxModel::PSystem { .. } => None,
        }
    }

    pub fn entropy_pair(&self) -> Option<EntropyPair> {
        Some(EntropyPair { model: *self })
    }

    /// Closed-form rarefaction profile `w_k(eps)` through `from`.
    pub fn rarefaction_state(&self, family: usize, from: &[f64], eps: f64) -> Option<Vec<f64>> {
        match *self {
            FluxModel::Burgers => Some(vec![eps]),
            FluxModel::LinearAdvection { .. } => None,
            FluxModel::PSystem { .. } => {
                let (v0, u0) = (from[0], from[1]);
                if family == 1 {
                    let v = self.inverse_sound_speed(-eps)?;
                    Some(vec![v, u0 + self.riemann_potential(v) - self.riemann_potential(v0)])
                } else {
                    let v = self.inverse_sound_speed(eps)?;
                    Some(vec![v, u0 + self.riemann_potential(v0) - self.riemann_potential(v)])
                }
            }
        }
    }

    // p-system helpers; unused for scalar models.

    pub fn pressure(&self, v: f64) -> f64 {
        match *self {
            FluxModel::PSystem { k, gamma } => k * v.powf(-gamma),
            _ => 0.0,
        }
    }

    pub fn pressure_derivative(&self, v: f64) -> f64 {
        match *self {
            FluxModel::PSystem { k, gamma } => -gamma * k * v.powf(-gamma - 1.0),
            _ => 0.0,
        }
    }

    /// `c(v) = sqrt(-p'(v))`.
    pub fn sound_speed(&self, v: f64) -> f64 {
        match *self {
            FluxModel::PSystem { k, gamma } => (gamma * k).sqrt() * v.powf(-0.5 * (gamma + 1.0)),
            _ => 0.0,
        }
    }

    pub fn sound_speed_derivative(&self, v: f64) -> f64 {
        match *self {
            FluxModel::PSystem { gamma, .. } => -0.5 * (gamma + 1.0) * self.sound_speed(v) / v,
            _ => 0.0,
        }
    }

    fn inverse_sound_speed(&self, c: f64) -> Option<f64> {
        match *self {
            FluxModel::PSystem { k, gamma } if c > 0.0 => Some((c / (gamma * k).sqrt()).powf(-2.0 / (gamma + 1.0))),
            _ => None,
        }
    }

    /// `int c(v) dv`; `u - Phi(v)` is constant along 1-rarefactions and
    /// `u + Phi(v)` along 2-rarefactions.
    pub fn riemann_potential(&self, v: f64) -> f64 {
        match *self {
            FluxModel::PSystem { k, gamma } => {
                if (gamma - 1.0).abs() < 1e-14 {
                    k.sqrt() * v.ln()
                } else {
                    2.0 * (gamma * k).sqrt() / (1.0 - gamma) * v.powf(0.5 * (1.0 - gamma))
                }
            }
            _ => 0.0,
        }
    }

    /// Limit of the Riemann potential as `v -> infinity`, when finite.
    pub fn riemann_potential_at_infinity(&self) -> Option<f64> {
        match *self {
            FluxModel::PSystem { gamma, .. } if gamma > 1.0 + 1e-14 => Some(0.0),
            _ => None,
        }
    }
}

/// Convex entropy `eta` with entropy flux `q`, `grad q = grad eta DF`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    model: FluxModel,
}

impl EntropyPair {
    pub fn eta(&self, u: &[f64]) -> f64 {
        match self.model {
            FluxModel::Burgers | FluxModel::LinearAdvection { .. } => 0.5 * u[0] * u[0],
            FluxModel::PSystem { k, gamma } => {
                let potential = if (gamma - 1.0).abs() < 1e-14 {
                    -k * u[0].ln()
                } else {
                    k * u[0].powf(1.0 - gamma) / (gamma - 1.0)
                };
                0.5 * u[1] * u[1] + potential
            }
        }
    }

    pub fn q(&self, u: &[f64]) -> f64 {
        match self.model {
            FluxModel::Burgers => u[0].powi(3) / 3.0,
            FluxModel::LinearAdvection { a } => 0.5 * a * u[0] * u[0],
            FluxModel::PSystem { .. } => u[1] * self.model.pressure(u[0]),
        }
    }

    pub fn grad_eta(&self, u: &[f64]) -> Vec<f64> {
        match self.model {
            FluxModel::Burgers | FluxModel::LinearAdvection { .. } => vec![u[0]],
            FluxModel::PSystem { .. } => vec![-self.model.pressure(u[0]), u[1]],
        }
    }

    pub fn grad_q(&self, u: &[f64]) -> Vec<f64> {
        match self.model {
            FluxModel::Burgers => vec![u[0] * u[0]],
            FluxModel::LinearAdvection { a } => vec![a * u[0]],
            FluxModel::PSystem { .. } => vec![u[1] * self.model.pressure_derivative(u[0]), self.model.pressure(u[0])],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn models() -> Vec<(FluxModel, Vec<Vec<f64>>)> {
        vec![
            (FluxModel::Burgers, vec![vec![-1.0], vec![0.3], vec![2.0]]),
            (FluxModel::LinearAdvection { a: -0.7 }, vec![vec![0.0], vec![1.5]]),
            (FluxModel::PSystem { k: 1.0, gamma: 1.0 }, vec![vec![1.0, 0.0], vec![0.4, -0.3]]),
            (FluxModel::PSystem { k: 2.0, gamma: 1.4 }, vec![vec![0.8, 1.0], vec![2.5, -0.2]]),
        ]
    }

    #[test]
    fn eigenpairs_satisfy_the_eigen_equation() {
        for (m, states) in models() {
            for u in states {
                let pairs = m.eigen(&u);
                for (i, (lam, r)) in pairs.iter().enumerate() {
                    let dr = m.apply_jacobian(&u, r);
                    for (a, b) in dr.iter().zip(r) {
                        assert_abs_diff_eq!(*a, lam * b, epsilon = 1e-12);
                    }
                    assert_abs_diff_eq!(*lam, m.eigenvalue(i + 1, &u), epsilon = 1e-15);
                    if m.family_kind(i + 1) == FamilyKind::GenuinelyNonlinear {
                        let g = m.eigenvalue_gradient(i + 1, &u);
                        let dot: f64 = g.iter().zip(r).map(|(a, b)| a * b).sum();
                        assert_abs_diff_eq!(dot, 1.0, epsilon = 1e-12);
                    }
                }
                for w in pairs.windows(2) {
                    assert!(w[0].0 < w[1].0, "strict hyperbolicity");
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let h = 1e-6;
        for (m, states) in models() {
            for u in states {
                let jac = m.jacobian(&u);
                for j in 0..m.dim() {
                    let mut up = u.clone();
                    let mut dn = u.clone();
                    up[j] += h;
                    dn[j] -= h;
                    let (fp, fm) = (m.flux(&up), m.flux(&dn));
                    for i in 0..m.dim() {
                        assert_abs_diff_eq!((fp[i] - fm[i]) / (2.0 * h), jac[i][j], epsilon = 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn entropy_flux_compatibility() {
        for (m, states) in models() {
            let pair = m.entropy_pair().unwrap();
            for u in states {
                // grad q = grad eta DF
                let ge = pair.grad_eta(&u);
                let jac = m.jacobian(&u);
                let gq = pair.grad_q(&u);
                for j in 0..m.dim() {
                    let lhs: f64 = (0..m.dim()).map(|i| ge[i] * jac[i][j]).sum();
                    assert_abs_diff_eq!(lhs, gq[j], epsilon = 1e-12);
                }
                // gradients match finite differences of eta, q
                let h = 1e-6;
                for j in 0..m.dim() {
                    let mut up = u.clone();
                    let mut dn = u.clone();
                    up[j] += h;
                    dn[j] -= h;
                    assert_abs_diff_eq!((pair.eta(&up) - pair.eta(&dn)) / (2.0 * h), ge[j], epsilon = 1e-6);
                    assert_abs_diff_eq!((pair.q(&up) - pair.q(&dn)) / (2.0 * h), gq[j], epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn rarefaction_profiles_follow_the_eigenvalue() {
        let m = FluxModel::PSystem { k: 1.0, gamma: 1.4 };
        let from = vec![1.0, 0.2];
        for family in [1usize, 2] {
            let lam0 = m.eigenvalue(family, &from);
            for d in [0.0, 0.1, 0.3] {
                let w = m.rarefaction_state(family, &from, lam0 + d).unwrap();
                assert_abs_diff_eq!(m.eigenvalue(family, &w), lam0 + d, epsilon = 1e-12);
            }
            let w0 = m.rarefaction_state(family, &from, lam0).unwrap();
            assert_abs_diff_eq!(w0[0], from[0], epsilon = 1e-12);
            assert_abs_diff_eq!(w0[1], from[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(FluxModel::PSystem { k: -1.0, gamma: 1.4 }.validate().is_err());
        assert!(FluxModel::PSystem { k: 1.0, gamma: 0.5 }.validate().is_err());
        assert!(FluxModel::LinearAdvection { a: f64::NAN }.validate().is_err());
        assert!(FluxModel::Burgers.validate().is_ok());
    }
}
