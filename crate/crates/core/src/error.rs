use thiserror::Error;

/// Every fallible operation in the library returns this error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("similarity transform is singular (|det| = {det:e})")]
    SingularTransform { det: f64 },

    #[error("unknown builtin potential `{0}`")]
    UnknownBuiltin(String),

    #[error("builtin `{name}` expects {expected} parameters, got {got}")]
    ArityMismatch { name: String, expected: String, got: usize },

    #[error("cannot parse expression `{input}`: {reason}")]
    ExpressionParse { input: String, reason: String },

    #[error("commutator probe set is empty")]
    EmptyProbeSet,

    #[error("invalid axis: {0}")]
    InvalidAxis(String),

    #[error("coordinate x{0} is not an axis of this grid")]
    CoordinateMismatch(usize),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("mass must be positive, got {0}")]
    ZeroMass(f64),

    #[error("field has zero norm")]
    ZeroNorm,

    #[error("potential is not longitudinal: {0}")]
    InvalidPotential(String),

    #[error("operation not supported for this field representation: {0}")]
    Unsupported(String),

    #[error("assembled operator is not Hermitian (deviation {0:e})")]
    NonHermitian(f64),

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("m^2 + lambda^2 = {0} is not positive")]
    TachyonicMode(f64),

    #[error("incompatible parameters: {0}")]
    IncompatibleParameters(String),

    #[error("requested {requested} modes but the operator has dimension {dim}")]
    TooManyModes { requested: usize, dim: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
