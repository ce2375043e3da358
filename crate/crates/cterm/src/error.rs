use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CtermError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("exponents {0} and {1} are within the clustering tolerance but classify differently")]
    ClusterAmbiguity(String, String),
    #[error("spectral gap {gap} is below the required {required}")]
    GapViolated { gap: f64, required: f64 },
    #[error("quadrature did not reach tolerance {tol} (estimate {estimate})")]
    QuadratureFailure { tol: f64, estimate: f64 },
    #[error("tail bound cannot be made small: decay rate {rate}")]
    TailBoundUnreachable { rate: f64 },
    #[error("limit depends on the direction: difference {0}")]
    DirectionDependence(f64),
    #[error("exponent {re}+{im}i is off the unitary line by {offset}")]
    NonUnitaryCharacter { re: f64, im: f64, offset: f64 },
    #[error("model order {found} exceeds the maximum {max}")]
    OrderOverflow { found: usize, max: usize },
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("no decay: fitted rate {0}")]
    NoDecay(f64),
    #[error("distance to the limit does not decrease on the tail")]
    LimitMismatch,
    #[error("factorization failed at s = {0}")]
    FactorizationFailure(f64),
}

pub type Result<T> = std::result::Result<T, CtermError>;
