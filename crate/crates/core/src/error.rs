use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),

    #[error("generator index {index} outside 1..={n}")]
    LetterOutOfRange { index: usize, n: usize },

    #[error("ambient generator counts differ: {left} vs {right}")]
    AmbientMismatch { left: String, right: String },

    #[error("no unital embedding of O_{m} into O_{n}: n-1 does not divide m-1")]
    NoEmbedding { n: usize, m: usize },

    #[error("generator t_{index} outside the source algebra (m = {m})")]
    GeneratorOutOfRange { index: usize, m: String },

    #[error("matrix is not unitary (residual {residual:e})")]
    NonUnitary { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameter within {distance:e} of the boundary |z_m| = 1; closed form refused")]
    NearBoundary { distance: f64 },

    #[error("parameter lies on the boundary |z_m| = 1")]
    Boundary,

    #[error("parameter is not on the boundary |z_m| = 1")]
    NotBoundary,

    #[error("boundary mixture has no canonical invariant")]
    MixtureHasNoInvariant,

    #[error("order {source_order} does not divide target order {target}")]
    NotDivisor { source_order: usize, target: usize },

    #[error(
        "tail bound too loose for requested precision {requested:e} (achievable {achievable:e})"
    )]
    TailBoundTooLoose { requested: f64, achievable: f64 },

    #[error("vector of length {len} is not indexed by {{1..{n}}}^m")]
    BadTensorDimension { len: usize, n: usize },

    #[error("image list is not an isometry family: {0}")]
    NotIsometryFamily(String),

    #[error("singular linear system")]
    SingularSystem,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
