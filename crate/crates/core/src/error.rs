use thiserror::Error;

/// Invariant violated by a candidate density operator.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum StateViolation {
    #[error("not Hermitian: max |rho - rho^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("trace is {found} (expected 1)")]
    Trace { found: f64 },
    #[error("not positive semidefinite: minimum eigenvalue {min_eigenvalue}")]
    Negative { min_eigenvalue: f64 },
    #[error("matrix dimension {found} does not match dims product {expected}")]
    Dimension { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subsystem index {index} out of range for {parties} parties")]
    IndexOutOfRange { index: usize, parties: usize },
    #[error("dimension {dim} exceeds the maximum of {max}")]
    Oversized { dim: usize, max: usize },
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("state vector not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("expected {expected} parties, found {found}")]
    WrongPartyCount { expected: usize, found: usize },
    #[error("parameter {value} outside [0, 1]")]
    ParameterOutOfRange { value: f64 },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid density operator: {0}")]
    InvalidState(StateViolation),
    #[error("Tr(W rho) has imaginary part {imag:e}")]
    ImaginaryPart { imag: f64 },
    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },
    #[error("linear program failure: {0}")]
    Lp(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0} requires a bipartition")]
    NeedsBipartition(String),
    #[error("unknown state family `{0}`")]
    UnknownFamily(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
