use alloc::string::String;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid needs a power-of-two point count of at least 16 and a positive length (got {points} points, length {length})")]
    InvalidGrid { points: usize, length: f64 },

    #[error("width {width} is narrower than {required} ({samples} grid spacings)")]
    Resolution { width: f64, required: f64, samples: usize },

    #[error("grid would need {needed} points, above the limit of {limit}")]
    GridTooLarge { needed: usize, limit: usize },

    #[error("state has probability {mass:e} on the grid boundary samples")]
    BoundarySupport { mass: f64 },

    #[error("packet at {center} with width {sigma} is closer than 6 widths to the grid boundary")]
    PacketAtBoundary { center: f64, sigma: f64 },

    #[error("momentum {0} is not on the grid's momentum lattice")]
    OffLattice(f64),

    #[error("interval [{lo}, {hi}) is empty or outside the grid domain")]
    IntervalOutsideDomain { lo: f64, hi: f64 },

    #[error("sector probability {probability:e} is below the reduction floor {floor:e}")]
    EmptySector { probability: f64, floor: f64 },

    #[error("{count} packets of width {width} overlap inside length {length}")]
    OverlappingPackets { count: usize, width: f64, length: f64 },

    #[error("packet amplitudes are not normalized (sum of squares {0})")]
    AmplitudeNorm(f64),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("operator is not Hermitian: imaginary expectation {0:e}")]
    NonHermitian(f64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("relabeling needs identical grids on both axes")]
    GridMismatch,

    #[error("no pointer is designated for the {0} target")]
    UndefinedPointer(&'static str),

    #[error("pointer and target quadratures differ")]
    QuadratureMismatch,

    #[error("pointer observables do not commute")]
    NonCommutingPointers,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("log-log fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("log-log fit needs positive values, got {0}")]
    NonPositive(f64),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
