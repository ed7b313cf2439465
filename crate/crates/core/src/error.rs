use thiserror::Error;

/// Errors produced by geometry, problem, solver and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside the domain: {0}")]
    DomainViolation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mirror map has no maximizer: {0}")]
    NoMaximizer(String),

    /// The prox argmin escapes the domain (log-barrier only); the caller must shrink the step.
    #[error("prox step leaves the domain at coordinate {index} (1 - x*v = {denominator:e})")]
    StepTooLarge { index: usize, denominator: f64 },

    #[error("degenerate initialization: symmetric divergence {0:e} between the initial points")]
    DegenerateInit(f64),

    #[error("certificate violated: {0}")]
    CertificateViolation(String),

    #[error("gap {gap:e} at t = {t} is too small for a log-log fit")]
    NonPositiveGap { t: usize, gap: f64 },

    #[error("no known optimum available")]
    MissingOptimum,

    #[error("traces have mismatched horizons ({first} vs {other})")]
    MismatchedHorizons { first: usize, other: usize },

    #[error(
        "sequence lemma {lemma} violated: lhs {lhs:e}, bound {bound:e}, sequence {sequence:?}"
    )]
    LemmaViolation {
        lemma: &'static str,
        lhs: f64,
        bound: f64,
        sequence: Vec<f64>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
