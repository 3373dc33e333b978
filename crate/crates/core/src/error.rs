use thiserror::Error;

/// Errors shared across the whole library.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("precision cap {0} exhausted before the valuation was determined")]
    PrecisionExhausted(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different field models")]
    ModelMismatch,
    #[error("requested extremal Newton-polygon segment has lattice length > 1")]
    NoSimpleSegment,
    #[error("zero polynomial")]
    ZeroPoly,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not biproximal: extremal Newton-polygon segment has lattice length > 1")]
    NotBiproximal,
    #[error("degenerate pairing: {0}")]
    DegeneratePairing(String),
    #[error("median requires three pairwise distinct points")]
    NotDistinct,
    #[error("projection is undefined for the axis endpoints 0 and infinity")]
    OnAxisEndpoint,
    #[error("expected 0 < |a| < |b|")]
    Order,
    #[error("unknown letter {0:?}")]
    BadLetter(char),
    #[error("surface ({0},{1}) has non-negative Euler characteristic")]
    BadSurface(u32, u32),
    #[error("boundary image is not hyperbolic")]
    NotHyperbolic,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("singular matrix")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
