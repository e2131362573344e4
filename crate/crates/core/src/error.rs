use std::io;

use thiserror::Error;

/// Errors produced while loading volumes or computing barcodes and matchings.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("unsupported shape: {0}")]
    Shape(String),

    #[error("invalid value: {0}")]
    Value(String),

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: [usize; 3], right: [usize; 3] },

    #[error("filtration mode mismatch: both volumes must use the same filtration direction")]
    FiltrationModeMismatch,

    #[error("input volume does not dominate the comparison volume at voxel {voxel:?}")]
    DominanceViolation { voxel: [usize; 3] },

    #[error("cube {0:?} lies outside the complex")]
    OutOfBounds([usize; 3]),

    #[error("dense reduction limited to {limit} cells, complex has {cells}")]
    SizeGuard { cells: usize, limit: usize },
}

impl Error {
    /// Whether the error stems from the environment (I/O) rather than from invalid input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
