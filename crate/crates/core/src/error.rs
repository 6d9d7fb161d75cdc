use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("algebra needs at least one block")]
    EmptyBlocks,
    #[error("block dimensions must be positive")]
    NonPositiveDim,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("state is not faithful (min eigenvalue {min_eigenvalue:e})")]
    NonFaithful { min_eigenvalue: f64 },
    #[error(
        "support of the numerator state is not contained in the support of the reference state"
    )]
    SupportViolation,
    #[error("density is not positive (min eigenvalue {min_eigenvalue:e})")]
    NonPositiveDensity { min_eigenvalue: f64 },
    #[error("exponents {p} and {q} are not conjugate")]
    ExponentMismatch { p: f64, q: f64 },
    #[error("exponent p = {0} is not supported here")]
    ExponentUnsupported(f64),
    #[error("vector is not positive")]
    NotPositive,
    #[error("subalgebra is not invariant under the modular flow (defect {defect:e})")]
    NotInvariant { defect: f64 },
    #[error("invalid data: {0}")]
    DataInvalid(String),
    #[error("map is not an isometry of the required form (defect {defect:e})")]
    NotAnIsometry { defect: f64 },
    #[error("image of the reference density vanishes")]
    ZeroImage,
    #[error("trace condition fails at basis element {witness} (defect {defect:e})")]
    TraceConditionViolated { witness: String, defect: f64 },
    #[error("not a subalgebra: {0}")]
    NotSubalgebra(String),
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
