use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{source} at point {point:?}")]
    Eval { source: EvalError, point: Vec<f64> },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields are not conformable: {0}")]
    Shape(String),
    #[error("shift {shift} along axis {axis} is not a multiple of the grid spacing {spacing}")]
    Alignment { axis: usize, shift: f64, spacing: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("test function is not compactly supported: {0}")]
    Support(String),
    #[error("mollifier radius {eps} is not resolved by grid spacing {spacing}")]
    UnderResolvedKernel { eps: f64, spacing: f64 },
    #[error("axis {axis} has {points} points, need at least {needed}")]
    GridTooSmall { axis: usize, points: usize, needed: usize },
    #[error("field must be periodic for {0}")]
    NotPeriodic(&'static str),
    #[error("imaginary residue {residue:e} exceeds tolerance relative to amplitude {amplitude:e}")]
    SymmetryViolation { residue: f64, amplitude: f64 },
    #[error("divergence equation is unsolvable on the torus: field mean {mean:e} is not zero")]
    NonzeroMean { mean: f64 },
    #[error("improper integral did not converge{}: last accelerated values {last:?}", cube.map(|r| format!(" on cube {r}")).unwrap_or_default())]
    Diverged { last: [f64; 2], cube: Option<usize> },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
