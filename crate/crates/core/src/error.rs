//! Error type shared by all solver layers.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Structured solver errors. Variants carry enough context to point at the
/// offending quantity (a radius, a time, an iteration count) so that the
/// Glimm driver can report which cell failed and why.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model or grid parameter violated its domain (named field, value).
    InvalidParameter { name: &'static str, value: f64 },
    /// A density was zero or negative where a positive one is required.
    NonPositiveDensity { rho: f64 },
    /// Argument of a logarithm was not strictly positive.
    LogDomain { what: &'static str, value: f64 },
    /// An iterative root find did not converge.
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last_x: f64,
        last_f: f64,
    },
    /// A bracketing step failed to produce a sign change.
    NoBracket { what: &'static str, lo: f64, hi: f64 },
    /// A radius fell outside a steady solution's domain of definition.
    OutsideDomain {
        r: f64,
        lo: f64,
        hi: f64,
        /// Sonic endpoint of the domain, when one exists.
        sonic_r: Option<f64>,
    },
    /// A wave curve or evaluation range ran into a sonic point.
    SonicHit { r: f64, t: f64 },
    /// Characteristics of one family crossed inside a generalized fan.
    CharacteristicCrossing { t: f64 },
    /// Evaluation was requested beyond the constructed validity horizon.
    BeyondValidity { t: f64, achieved: f64 },
    /// Input outside the scheme's constructive hypotheses (e.g. v = 0 data).
    Unsupported { what: String },
    /// A per-cell solve failed inside the Glimm driver.
    CellFailure {
        step: usize,
        cell: usize,
        r: f64,
        source: Box<Error>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid parameter {name} = {value}")
            }
            Error::NonPositiveDensity { rho } => {
                write!(f, "non-positive density rho = {rho}")
            }
            Error::LogDomain { what, value } => {
                write!(f, "logarithm domain error in {what}: argument {value}")
            }
            Error::NoConvergence {
                what,
                iterations,
                last_x,
                last_f,
            } => write!(
                f,
                "{what}: no convergence after {iterations} iterations (x = {last_x}, f = {last_f})"
            ),
            Error::NoBracket { what, lo, hi } => {
                write!(f, "{what}: could not bracket a root on [{lo}, {hi}]")
            }
            Error::OutsideDomain { r, lo, hi, sonic_r } => match sonic_r {
                Some(rs) => write!(
                    f,
                    "radius {r} outside steady domain ({lo}, {hi}) with sonic point {rs}"
                ),
                None => write!(f, "radius {r} outside steady domain ({lo}, {hi})"),
            },
            Error::SonicHit { r, t } => {
                write!(f, "steady state reached its sonic point at r = {r} (t = {t})")
            }
            Error::CharacteristicCrossing { t } => {
                write!(f, "characteristics crossed inside a generalized fan at t = {t}")
            }
            Error::BeyondValidity { t, achieved } => {
                write!(f, "evaluation at t = {t} beyond achieved validity {achieved}")
            }
            Error::Unsupported { what } => write!(f, "unsupported input: {what}"),
            Error::CellFailure { step, cell, r, source } => {
                write!(f, "step {step}, cell {cell} (r = {r}): {source}")
            }
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::CellFailure { source, .. } => Some(source),
            _ => None,
        }
    }
}
