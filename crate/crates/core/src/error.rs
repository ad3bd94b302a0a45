use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("site {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("site collision: both operator legs placed on site {0}")]
    SiteCollision(usize),

    #[error("grading mismatch: ({0}|{1}) vs ({2}|{3})")]
    GradingMismatch(usize, usize, usize, usize),

    #[error("invalid grading ({m}|{n}): need m + n >= 1")]
    InvalidGrading { m: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("invalid model data: {0}")]
    InvalidSpec(String),

    #[error("coupling constraint violated: defect {0:.3e}")]
    Constraint(f64),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("operators do not commute (residual {0:.3e})")]
    NonCommuting(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("Bethe precondition violated: residual {0:.3e}")]
    OffShell(f64),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
