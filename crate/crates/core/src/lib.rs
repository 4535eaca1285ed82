//! Measure-valued calculus for BV weak* solutions of one-dimensional
//! hyperbolic conservation laws.

pub mod bvcalc;
pub mod cantor;
pub mod cheb;
pub mod claw;
pub mod cli;
pub mod error;
pub mod gelfand;
pub mod measures;
pub mod quad;
pub mod testfns;

pub use error::{Error, Result};
pub mod verify;
