use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("polygon does not fit in the ambient ball: vertex at distance {farthest} exceeds R = {radius}")]
    OutsideAmbientBall { radius: f64, farthest: f64 },

    /// A domain violates one of its invariants; the message names it.
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no grid node lies strictly inside the domain (h = {h})")]
    EmptyGrid { h: f64 },

    #[error("system is not positive definite at gamma = {gamma} (pivot {pivot:e} at unknown {row})")]
    IndefiniteSystem { gamma: f64, row: usize, pivot: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Rayleigh quotient denominator is zero")]
    ZeroDenominator,

    #[error("no positive suffix among the sampled tensions: {0}")]
    NotFound(String),

    #[error("proposal infeasible: {0}")]
    ProposalInfeasible(String),

    #[error("invalid load: {0}")]
    InvalidLoad(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DegenerateInput(_)
            | Error::OutsideAmbientBall { .. }
            | Error::InvalidDomain(_)
            | Error::PreconditionViolated(_)
            | Error::EmptyGrid { .. }
            | Error::InvalidLoad(_)
            | Error::InvalidConfig(_)
            | Error::ProposalInfeasible(_) => ErrorKind::Validation,
            Error::IndefiniteSystem { .. }
            | Error::NoConvergence { .. }
            | Error::ZeroDenominator
            | Error::NotFound(_) => ErrorKind::Numerical,
            Error::Json(e) if !e.is_io() => ErrorKind::Validation,
            Error::Csv(e) if !e.is_io_error() => ErrorKind::Validation,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => ErrorKind::Io,
        }
    }
}
