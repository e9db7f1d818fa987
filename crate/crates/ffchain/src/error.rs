use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("dimension {dim} exceeds the dense cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("kernel vector {index} not annihilated (residual {residual:.3e})")]
    KernelNotAnnihilated { index: usize, residual: f64 },
    #[error("iterative solver did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("forbidden state is a product state")]
    ProductState,
    #[error("invalid chain spec: {0}")]
    InvalidSpec(String),
    #[error("region {start}..{end} is not a consecutive sub-range of {n} sites")]
    NonConsecutiveRegion { start: usize, end: usize, n: usize },
    #[error("analytic basis unavailable: {0}")]
    MethodUnavailable(String),
    #[error("ground-space basis lost rank: expected {expected}, got {got}")]
    Conditioning { expected: usize, got: usize },
    #[error("region {start}..{end} does not embed in {n} qubits")]
    EmbeddingMismatch { start: usize, end: usize, n: usize },
    #[error("no kernel available for {0}")]
    KernelUnavailable(String),
    #[error("invalid range: {0}")]
    RangeViolation(String),
    #[error("state is not in the gapless class")]
    NotGaplessClass,
    #[error("observables collide on site {0}")]
    SiteCollision(usize),
    #[error("gauge unavailable: eigenvalue moduli are equal")]
    GaugeUnavailable,
    #[error("invalid partition: {0}")]
    PartitionInvalid(String),
    #[error("non-positive value {0} in decay fit")]
    NonPositiveValue(f64),
    #[error("matrix is not idempotent (deviation {0:.3e})")]
    NotIdempotent(f64),
    #[error("wrong projector rank: expected {expected}, got {got}")]
    WrongRank { expected: usize, got: usize },
    #[error("projector acts on a single site")]
    OneLocalProjector,
    #[error("case {0} is frustrated")]
    FrustratedCase(u8),
    #[error("|f| = {0} is not 1")]
    NotUnitModulus(f64),
    #[error("no entangled spanning pair found in the projector range")]
    NoEntangledPair,
    #[error("ill-conditioned system (condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("linear algebra backend failure: {0}")]
    Backend(String),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
