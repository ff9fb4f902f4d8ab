use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("degenerate face {face}: affine rank {rank}, expected {expected}")]
    DegenerateFace {
        face: usize,
        rank: usize,
        expected: usize,
    },

    #[error("hull assumption violated: affine hulls intersect or direction spaces overlap")]
    AssumptionViolated,

    #[error("degenerate hull: |det R| = {0:e}")]
    DegenerateHull(f64),

    #[error("face {face} has no singular vertex but touches the singular plane (distance {distance:e})")]
    AssumptionPSViolated { face: usize, distance: f64 },

    #[error("polytopes are not conforming: {0}")]
    BadConformity(String),

    #[error("Jacobi exponents must exceed -1, got a = {a}, b = {b}")]
    InvalidExponent { a: f64, b: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("validation error: {0}")]
    ValidationError(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("kernel exponent {alpha} is not integrable on a base of dimension {r} (need alpha < r + 1)")]
    IntegrabilityViolated { alpha: f64, r: usize },

    #[error("base of piece {piece} degenerates: |x_F - y_F| = {distance:e} at a quadrature node")]
    DegenerateBase { piece: usize, distance: f64 },

    #[error("integrand is not finite ({value}) at piece {piece}, x = {x:?}, y = {y:?}")]
    NonFiniteValue {
        piece: usize,
        x: Vec<f64>,
        y: Vec<f64>,
        value: f64,
    },

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("unknown kernel: {0}")]
    UnknownKernel(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPolytope(_) => "InvalidPolytope",
            Error::DegenerateFace { .. } => "DegenerateFace",
            Error::AssumptionViolated => "AssumptionViolated",
            Error::DegenerateHull(_) => "DegenerateHull",
            Error::AssumptionPSViolated { .. } => "AssumptionPSViolated",
            Error::BadConformity(_) => "BadConformity",
            Error::InvalidExponent { .. } => "InvalidExponent",
            Error::DomainError(_) => "DomainError",
            Error::ParseError(_) => "ParseError",
            Error::ValidationError(_) => "ValidationError",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::IntegrabilityViolated { .. } => "IntegrabilityViolated",
            Error::DegenerateBase { .. } => "DegenerateBase",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::UnknownKernel(_) => "UnknownKernel",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
