//! JSON configuration files for the command-line tool.

use serde::{Deserialize, Serialize};

use crate::bvcalc::PiecewiseBV;
use crate::cantor::CantorFunction;
use crate::claw::{forced_jump, riemann_solve, FluxModel, RiemannSolution};
use crate::error::{Error, Result};
use crate::measures::Window;
use crate::verify::{CheckName, Scenario, ToleranceConfig, SCHEMA_VERSION};

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn one() -> f64 {
    1.0
}

fn sample_points() -> usize {
    201
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Infinity {
    #[serde(rename = "inf")]
    Inf,
}

/// Integrability exponent: a number `>= 1` or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Infinite(Infinity),
}

impl Default for Exponent {
    fn default() -> Self {
        Exponent::Infinite(Infinity::Inf)
    }
}

impl Exponent {
    pub fn value(&self) -> f64 {
        match self {
            Exponent::Finite(q) => *q,
            Exponent::Infinite(_) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    /// The entropy solution of the Riemann problem.
    #[default]
    Exact,
    /// A single jump between the two states, at `jump_speed` or the
    /// Rankine-Hugoniot speed.
    ForcedJump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub count: usize,
    pub seed: u64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self { count: 10, seed: 42 }
    }
}

/// Configuration for `riemann` and `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub flux: FluxModel,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub window: Window,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default)]
    pub q: Exponent,
    #[serde(default)]
    pub solution: SolutionKind,
    #[serde(default)]
    pub jump_speed: Option<f64>,
    #[serde(default)]
    pub test_family: FamilyConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub checks: Option<Vec<CheckName>>,
    /// Times at which solution samples are written; defaults to `0, T/2, T`.
    #[serde(default)]
    pub sample_times: Option<Vec<f64>>,
    #[serde(default = "sample_points")]
    pub sample_points: usize,
    #[serde(default)]
    pub variation_bound: Option<f64>,
    #[serde(default)]
    pub dominating: Option<f64>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

fn check_schema(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Config(format!("unsupported schema_version {v}")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = parse(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        self.flux.validate().map_err(|e| Error::Config(e.to_string()))?;
        let n = self.flux.dim();
        if self.left.len() != n || self.right.len() != n {
            return Err(Error::Config(format!("{} model needs {n}-component states", self.flux.name())));
        }
        for u in [&self.left, &self.right] {
            if !self.flux.admissible(u) || u.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!("inadmissible state {u:?}")));
            }
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config("horizon must be positive".into()));
        }
        if let Exponent::Finite(q) = self.q {
            if q.is_nan() || q < 1.0 {
                return Err(Error::Config("q must be at least 1".into()));
            }
        }
        if self.jump_speed.is_some() && self.solution != SolutionKind::ForcedJump {
            return Err(Error::Config("jump_speed requires solution \"forced_jump\"".into()));
        }
        if self.test_family.count == 0 || self.sample_points < 2 {
            return Err(Error::Config("test_family.count and sample_points must be positive".into()));
        }
        if let Some(ts) = &self.sample_times {
            if ts.iter().any(|t| !(*t >= 0.0 && *t <= self.horizon)) {
                return Err(Error::Config("sample_times must lie in [0, horizon]".into()));
            }
        }
        self.tolerances.validate()
    }

    pub fn solve(&self) -> Result<RiemannSolution> {
        match self.solution {
            SolutionKind::Exact => riemann_solve(&self.flux, &self.left, &self.right),
            SolutionKind::ForcedJump => forced_jump(&self.flux, &self.left, &self.right, self.jump_speed),
        }
    }

    pub fn sample_times(&self) -> Vec<f64> {
        self.sample_times.clone().unwrap_or_else(|| vec![0.0, 0.5 * self.horizon, self.horizon])
    }

    /// The certification scenario, with `seed` replacing the configured one.
    pub fn scenario(&self, name: &str, seed: Option<u64>) -> Result<Scenario> {
        let mut s = Scenario::new(name, self.solve()?, self.window, self.horizon);
        s.q = self.q.value();
        s.family_count = self.test_family.count;
        s.seed = seed.unwrap_or(self.test_family.seed);
        s.checks = self.checks.clone();
        s.variation_bound = self.variation_bound;
        s.dominating = self.dominating;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorConfig {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

/// Configuration for `decompose`: a piecewise polynomial with monomial
/// coefficients in `x` per cell, plus an optional Cantor function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub window: Window,
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
    #[serde(default)]
    pub cantor: Option<CantorConfig>,
    #[serde(default = "sample_points")]
    pub sample_points: usize,
}

impl DecomposeConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = parse(text)?;
        check_schema(cfg.schema_version)?;
        if cfg.sample_points < 2 {
            return Err(Error::Config("sample_points must be at least 2".into()));
        }
        cfg.function()?;
        Ok(cfg)
    }

    pub fn function(&self) -> Result<PiecewiseBV> {
        let cantor = self.cantor.map(|c| CantorFunction::new(c.lo, c.hi, c.amplitude)).transpose();
        let cantor = cantor.map_err(|e| Error::Config(e.to_string()))?;
        PiecewiseBV::from_monomials(self.window, self.breakpoints.clone(), &self.pieces, cantor)
            .map_err(|e| Error::Config(e.to_string()))
    }
}
