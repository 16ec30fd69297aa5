use thiserror::Error;

use crate::grid::DyadicIndex;

/// Errors raised by the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dyadic index {index} for a grid of depth {depth}: {reason}")]
    InvalidIndex {
        index: DyadicIndex,
        depth: u32,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("grids differ: depth {left} vs depth {right}")]
    GridMismatch { left: u32, right: u32 },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate}, residual {residual:e})")]
    Convergence {
        iterations: usize,
        estimate: f64,
        residual: f64,
    },

    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
