use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("torus does not act semisimply with rational eigenvalues: {0}")]
    NonSemisimpleAction(String),
    #[error("no generic element found up to sup-norm {cap}")]
    NoGenericElement { cap: i64 },
    #[error("adapted parabolic failed verification: {0}")]
    AdaptedParabolicUnverified(String),
    #[error("h + lh_perp + u is not a direct sum decomposition of g: {0}")]
    DecompositionFailure(String),
    #[error("monoid generator does not vanish on a_H: {0}")]
    MonoidElementNotOnAH(String),
    #[error("the algebra carries no involution theta")]
    MissingInvolution,
    #[error("point lies outside every cone of the fan")]
    ChartMismatch,
    #[error("functional is not nonnegative on the cone")]
    NotSupporting,
    #[error("sample point is not in the open cone a_I^--")]
    NotInInteriorCone,
    #[error("index set I equals S; the maximum over S \\ I is empty")]
    EmptyIndexSet,
    #[error("degree {degree} exceeds the cap {cap}")]
    CapExceeded { degree: usize, cap: usize },
    #[error("maximal weight set is not {{0}}: {0}")]
    MaxWeightNotZero(String),
    #[error("invariant form is degenerate")]
    DegenerateForm,
    #[error("element is not in the subalgebra: {0}")]
    NotInSubalgebra(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
