//! Shared error type for all pipeline stages.

use thiserror::Error;

/// Errors surfaced by the pipeline stages. The CLI maps these to exit code 1
/// with the variant name in the diagnostic.
#[derive(Debug, Error)]
pub enum Error {
    /// Input geometry has no usable extent (zero area, zero diagonal, empty).
    #[error("DegenerateInput: {0}")]
    DegenerateInput(String),

    /// An iso-surface extraction found no level-set crossing anywhere.
    #[error("EmptySurface: {0}")]
    EmptySurface(String),

    /// Tensor/argument shapes are incompatible. Carries both shapes.
    #[error("ShapeError: {context}: left shape {lhs:?}, right shape {rhs:?}")]
    ShapeError {
        context: String,
        lhs: Vec<usize>,
        rhs: Vec<usize>,
    },

    /// A gradient contained NaN or infinity.
    #[error("NonFiniteGradient: {0}")]
    NonFiniteGradient(String),

    /// A loss value became NaN or infinite.
    #[error("NonFiniteLoss: {0}")]
    NonFiniteLoss(String),

    /// Sampler state became NaN or infinite during integration.
    #[error("NonFiniteState: {0}")]
    NonFiniteState(String),

    /// A query point fell outside the supported domain.
    #[error("DomainError: {0}")]
    DomainError(String),

    /// The mesh carries no UV parameterization.
    #[error("MissingUVs: {0}")]
    MissingUVs(String),

    /// A volumetric metric was asked of a mesh with open edges.
    #[error("NotWatertight: {0}")]
    NotWatertight(String),

    /// Training diverged (loss exceeded 10x its initial value).
    #[error("Divergence: {0}")]
    Divergence(String),

    /// Malformed or unreadable file contents.
    #[error("Format: {0}")]
    Format(String),

    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn shape(context: impl Into<String>, lhs: &[usize], rhs: &[usize]) -> Self {
        Error::ShapeError {
            context: context.into(),
            lhs: lhs.to_vec(),
            rhs: rhs.to_vec(),
        }
    }

    /// Stable variant name, used by the CLI for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::EmptySurface(_) => "EmptySurface",
            Error::ShapeError { .. } => "ShapeError",
            Error::NonFiniteGradient(_) => "NonFiniteGradient",
            Error::NonFiniteLoss(_) => "NonFiniteLoss",
            Error::NonFiniteState(_) => "NonFiniteState",
            Error::DomainError(_) => "DomainError",
            Error::MissingUVs(_) => "MissingUVs",
            Error::NotWatertight(_) => "NotWatertight",
            Error::Divergence(_) => "Divergence",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
        }
    }
}
