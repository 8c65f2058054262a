use thiserror::Error;

use crate::simcore::topology::NodeId;

/// Errors surfaced by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("number of sub-areas must be positive")]
    ZeroSubAreas,

    #[error("points coincide; the construction needs two distinct points")]
    CoincidentPoints,

    #[error("closed-form optimal point requires exponent 2, got {0}")]
    ClosedFormRequiresSquare(f64),

    #[error("degenerate metric range: f_max {f_max} <= f_star {f_star}")]
    DegenerateMetricRange { f_star: f64, f_max: f64 },

    #[error("distance {distance} m is below the reference distance {reference} m")]
    BelowReferenceDistance { distance: f64, reference: f64 },

    #[error("mean SNR must be strictly positive")]
    NonPositiveMeanSnr,

    #[error("unsupported constellation size {0}; supported sizes are 4, 16 and 64")]
    UnsupportedConstellation(u32),

    #[error("node {0} has no retained planar edges; face traversal is stuck")]
    DeadEnd(NodeId),

    #[error("face traversal revisited a directed edge within one recovery episode")]
    TraversalLoop,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
