use thiserror::Error;

use crate::graph::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid cone graph: {0}")]
    Validation(ValidationReport),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("alpha = {alpha} lies within {guard} of the singular degree {singular} (edge {edge})")]
    SingularAlpha {
        alpha: f64,
        singular: f64,
        guard: f64,
        edge: String,
    },
    #[error("alpha = {0} is not a singular degree")]
    NotSingular(f64),
    #[error("edge {0} has no target angle phi")]
    MissingPhi(String),
    #[error("edge angles are not all equal")]
    NonConstantTheta,
    #[error("alpha = {alpha} is outside the admissible range (0, {max})")]
    AlphaOutOfRange { alpha: f64, max: f64 },
    #[error("numerical accuracy: {0}")]
    Accuracy(String),
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("cone graph is not a cycle")]
    NotACycle,
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("mesh resolution m = {m} is below the minimum {min}")]
    MeshTooCoarse { m: usize, min: usize },
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("basis is empty")]
    EmptyBasis,
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 3,
            Error::Accuracy(_) | Error::NonFinite => 4,
            _ => 2,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Validation(_) => "validation",
            Error::InvalidArgument(_) | Error::MeshTooCoarse { .. } => "argument",
            Error::SingularAlpha { .. } | Error::NotSingular(_) | Error::AlphaOutOfRange { .. } => "domain",
            Error::MissingPhi(_) | Error::NonConstantTheta | Error::NotACycle | Error::UnknownEdge(_) => {
                "precondition"
            }
            Error::Accuracy(_) | Error::NonFinite => "accuracy",
            Error::NotSymmetric | Error::ZeroFunction | Error::EmptyBasis => "argument",
        }
    }
}
