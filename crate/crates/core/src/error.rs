use thiserror::Error;

/// Errors raised by the measure calculus, the Riemann solvers and the
/// certification checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid window ({a}, {b}): need finite a < b")]
    InvalidWindow { a: f64, b: f64 },
    #[error("windows do not match")]
    WindowMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("test function support ({lo}, {hi}) leaves the window ({a}, {b})")]
    SupportOutsideWindow { lo: f64, hi: f64, a: f64, b: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid BV function: {0}")]
    InvalidBV(String),
    #[error("invalid test function spec: {0}")]
    InvalidSpec(String),
    #[error("overlapping Cantor carriers cannot be combined")]
    OverlappingCantorCarriers,
    #[error("measure curve samples have different structure")]
    StructureMismatch,
    #[error("operation does not support a singular continuous component")]
    SingularComponentUnsupported,
    #[error("Chebyshev projection error {estimate:e} above tolerance {tolerance:e}")]
    ProjectionErrorAboveTolerance { estimate: f64, tolerance: f64 },
    #[error("polynomial degree {0} exceeds the cap")]
    DegreeCap(usize),
    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureNonConvergent { a: f64, b: f64 },
    #[error("curve has no derivative evaluator")]
    MissingDerivative,
    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("wave curves do not intersect in the admissible set (vacuum)")]
    VacuumFormation,
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("state {0:?} is not admissible for the flux model")]
    InadmissibleState(Vec<f64>),
    #[error("wave at x = {x} lies outside the window ({a}, {b})")]
    WaveOutsideWindow { x: f64, a: f64, b: f64 },
    #[error("measure is not representable as a BV function (atoms or Cantor part present)")]
    NotBVRepresentable,
    #[error("point ({x}, {t}) lies on a jump path")]
    OnJumpPath { x: f64, t: f64 },
    #[error("flux model has no entropy pair")]
    MissingEntropyPair,
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
