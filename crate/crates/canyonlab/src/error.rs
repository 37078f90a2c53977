use thiserror::Error;

/// Crate-wide error type. Every fallible operation in the pipeline reports
/// through this enum so the CLI can map failures to stable exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible coefficient towers")]
    IncompatibleTowers,
    #[error("reducible minimal polynomial")]
    ReducibleMinPoly,
    #[error("zero divisor at tower level {0}: adjoined polynomial was reducible")]
    TowerDefect(usize),
    #[error("truncation too low: {0}")]
    TruncationTooLow(String),
    #[error("arcs coincide (every conjugate pair difference vanishes)")]
    SameArc,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("not mini-regular in x")]
    NotMiniRegular,
    #[error("malformed top edge: {0}")]
    MalformedTopEdge(String),
    #[error("relative derivative has empty support")]
    NoDots,
    #[error("inconsistent canyon: {0}")]
    InconsistentCanyon(String),
    #[error("orders ord f(gamma) differ between the two polar arcs")]
    UnequalOrders,
    #[error("no polar arc found at contact {0} (contradicts the intercept relation)")]
    MissingCounterpartPolar(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unbound parameter: {0}")]
    UnboundParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
