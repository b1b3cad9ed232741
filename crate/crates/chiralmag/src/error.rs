use crate::lattice::LatticeTag;
use crate::linear::Symmetry;

/// Errors produced by lattice construction, field operations and the flow solver.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("wave-vector enumeration would visit ~{estimate} candidates, above the cap {cap}")]
    Capacity { estimate: usize, cap: usize },

    #[error("grid size must be odd, got {0}")]
    EvenGridSize(usize),

    #[error("grid sizes do not match: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("{symmetry} is not available on a {lattice} lattice")]
    SymmetryMismatch {
        symmetry: Symmetry,
        lattice: LatticeTag,
    },

    #[error("helix of pitch 2*pi/{kappa} is not periodic on this lattice")]
    IncompatibleLattice { kappa: f64 },

    #[error("helix amplitude vanishes at lambda = kappa^2")]
    ZeroAmplitude,

    #[error("fixed-point iteration did not converge within {max_iters} inner iterations")]
    FixedPointFailure { max_iters: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
