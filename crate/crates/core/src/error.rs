use thiserror::Error;

use crate::mesh::{Family, TbuId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeshError {
    #[error("invalid mesh spec: {0}")]
    InvalidSpec(String),
    #[error("unknown TBU {0}")]
    UnknownTbu(TbuId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("bitstring has {got} bits, mesh has {expected} TBUs")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid character {0:?} in bitstring (expected '0' or '1')")]
    InvalidBit(char),
    #[error("mesh has {tbus} TBUs; enumeration is capped at {cap} without an explicit override")]
    TooLarge { tbus: usize, cap: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("path sum {sum} is not of the form {base} + {step}k")]
    MalformedSum { sum: u64, base: u64, step: u64 },
    #[error("operation is not defined for the {0:?} family")]
    UnsupportedFamily(Family),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoryError {
    #[error("path length must be at least 1")]
    InvalidLength,
    #[error("k0 = {k0} is outside 0..={max}")]
    OutOfRange { k0: u64, max: u64 },
    #[error("operation is not defined for the {0:?} family")]
    UnsupportedFamily(Family),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("length {x} is not realizable: {reason}")]
    NotRealizable { x: u64, reason: String },
    #[error("k0 = {k0} is outside 0..={max}")]
    OutOfRange { k0: u64, max: u64 },
    #[error("construction is not available for the {0:?} family at this size")]
    UnsupportedFamily(Family),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharacterizationError {
    #[error("measurement set is empty")]
    EmptyMeasurements,
    #[error("measured path sum {measured} disagrees with k0 = {k0} (expects {expected})")]
    InconsistentK { k0: u64, measured: u64, expected: u64 },
    #[error("expected {expected} measurements (one per path), got {got}")]
    MeasurementCount { expected: usize, got: usize },
    #[error("no length candidate in window [{min}, {max}] m")]
    NoCandidateInWindow { min: f64, max: f64 },
    #[error("mesh has no non-peripheral TBU")]
    NoInteriorTbu,
    #[error("no gauge-equivalent TBU set found in this mesh")]
    NoGaugeFound,
    #[error("invalid physical parameter: {0}")]
    InvalidParameter(String),
    #[error("variation map has {got} entries, mesh has {expected} TBUs")]
    VariationSize { expected: usize, got: usize },
    #[error("measurement import failed: {0}")]
    Import(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdvisorError {
    #[error("length multiset must be nonempty with entries >= 1")]
    InvalidLambda,
    #[error("no square size up to {cap} passes the necessary conditions")]
    NoSizeWithinCap { cap: u32 },
    #[error("no (N, M) pair within {nmax}x{mmax} passes the necessary conditions")]
    EmptyFrontier { nmax: u32, mmax: u32 },
}
