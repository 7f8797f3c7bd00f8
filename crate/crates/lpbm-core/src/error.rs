//! Crate-wide error type.
//!
//! Errors split into two families: usage errors (bad specs, mismatched grids,
//! violated index constraints) and numerical failures (non-zero mean data,
//! diverging fixed points, degenerate least-squares systems). The CLI maps
//! the former to exit code 2 and the latter to exit code 3.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid spec: {0}")]
    InvalidSpec(String),

    #[error("grid specs do not match: {0:?} vs {1:?}")]
    SpecMismatch(crate::grid::GridSpec, crate::grid::GridSpec),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("space spec requires {0}")]
    IndexConstraint(&'static str),

    #[error("dilation factor {0} is not a power of two; resampling would be ambiguous")]
    NonDyadicLambda(f64),

    #[error("function is not supported in the centered sub-box (mass {0:.3e} outside)")]
    SupportCheck(f64),

    #[error("block index {block} out of range (j_max = {j_max})")]
    BlockOutOfRange { block: usize, j_max: usize },

    #[error("right-hand side has non-zero mean {mean:.3e} (bound {bound:.3e}); not a valid torus Poisson datum")]
    MeanNotZero { mean: f64, bound: f64 },

    #[error("gauge fixed point did not contract: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("gradient least-squares system rank-deficient on {percent:.2}% of nodes")]
    DegenerateGradient { percent: f64 },

    #[error("not a BMGF file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the CLI uses for this error: 2 for usage/config errors,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MeanNotZero { .. }
            | Error::NoConvergence { .. }
            | Error::DegenerateGradient { .. } => 3,
            _ => 2,
        }
    }
}
