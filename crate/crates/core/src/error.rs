use thiserror::Error;

use crate::lattice::LatticeVector;

/// Errors raised by the geometry, algebra and cohomology routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GkzError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix has rank {actual}, expected full row rank {expected}")]
    RankDeficient { actual: usize, expected: usize },
    #[error("lattice vector {0} is not in the cone")]
    NotInCone(LatticeVector),
    #[error("face {0} contains the origin")]
    FaceContainsOrigin(usize),
    #[error("face {sub} is not a codimension-one face of face {face}")]
    NotAFacePair { face: usize, sub: usize },
    #[error("truncation degree {available} is below the certified bound {required}")]
    TruncationTooSmall { required: i64, available: i64 },
    #[error("fiber is degenerate on faces {faces:?}")]
    DegenerateFiber { faces: Vec<usize> },
    #[error("top cohomology has dimension {actual} in degree {degree}, expected {expected}")]
    MismatchAtDegree {
        degree: i64,
        expected: i64,
        actual: i64,
    },
    #[error("{0} is not an integer relation among the columns")]
    NotARelation(String),
    #[error("unknown subcommand `{0}`")]
    UnknownSubcommand(String),
    #[error("cannot parse rational `{0}`")]
    BadRational(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl GkzError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            GkzError::ShapeMismatch(_) => "ShapeMismatch",
            GkzError::RankDeficient { .. } => "RankDeficient",
            GkzError::NotInCone(_) => "NotInCone",
            GkzError::FaceContainsOrigin(_) => "FaceContainsOrigin",
            GkzError::NotAFacePair { .. } => "NotAFacePair",
            GkzError::TruncationTooSmall { .. } => "TruncationTooSmall",
            GkzError::DegenerateFiber { .. } => "DegenerateFiber",
            GkzError::MismatchAtDegree { .. } => "MismatchAtDegree",
            GkzError::NotARelation(_) => "NotARelation",
            GkzError::UnknownSubcommand(_) => "UnknownSubcommand",
            GkzError::BadRational(_) => "BadRational",
            GkzError::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T, E = GkzError> = std::result::Result<T, E>;
