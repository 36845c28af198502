use thiserror::Error;

/// Errors raised by the algebraic, combinatorial and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("arity mismatch: operator takes {expected} arguments, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension {0} is outside the supported range 1..=16")]
    UnsupportedDimension(usize),

    #[error("series has a nonzero hbar^0 part")]
    NonzeroConstantTerm,

    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("gauge generator does not annihilate constants")]
    GeneratorOnConstants,

    #[error("expected arity {expected}, found {found}")]
    WrongArity { expected: usize, found: usize },

    #[error("expected a {expected}-vector field, found degree {found}")]
    WrongDegree { expected: usize, found: usize },

    #[error("diamond product needs a left factor of degree at least 1")]
    DiamondOfFunction,

    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,

    #[error("malformed permutation: {0}")]
    InvalidPermutation(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("coincident points in angle evaluation")]
    CoincidentPoints,

    #[error("point lies below the real axis")]
    BelowRealAxis,

    #[error("no gauge for {0} ground points (supported: 1, 2)")]
    UnsupportedGround(usize),

    #[error("vanishing check supports n = 2 or 3 aerial points, got {0}")]
    UnsupportedAerial(usize),

    #[error("sample count must be positive")]
    ZeroSamples,

    #[error("bivector is not Poisson: [pi, pi] has {0} nonzero components")]
    NotPoisson(usize),

    #[error("no weight available for graph {0}")]
    MissingWeight(String),

    #[error("order {0} exceeds the supported maximum of 3")]
    OrderTooLarge(usize),

    #[error("unsupported formality case: {0}")]
    UnsupportedFormality(String),

    #[error("operator is not a bivector: {0}")]
    NotABivector(String),

    #[error("unknown suite '{0}'; expected one of dgla, mc, hkr, bracket, groenewold, moyal, oracles or all")]
    UnknownSuite(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
