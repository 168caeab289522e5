use std::io;

use thiserror::Error;

/// Errors produced by the coding library, channel models and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("extension degree {0} outside supported range 2..=16")]
    BadFieldDegree(u32),

    #[error("polynomial {poly:#x} does not have degree {m}")]
    PolynomialDegree { poly: u32, m: u32 },

    #[error("polynomial {poly:#x} is not primitive: alpha has order {order}")]
    NonPrimitivePolynomial { poly: u32, order: usize },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("symbol {value} is not an element of GF(2^{m})")]
    InvalidSymbol { value: u32, m: u32 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameters: {0}")]
    BadParameters(String),

    #[error("no girth-6 graph found after {attempts} attempts")]
    GirthUnachievable { attempts: usize },

    #[error("parity-check matrix is rank deficient: rank {rank} of {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("likelihood vector at position {position} carries no probability mass")]
    DegenerateLikelihood { position: usize },

    #[error("cannot puncture {requested} symbols, schedule holds {available}")]
    PunctureTooLarge { requested: usize, available: usize },

    #[error("threshold bracket invalid: {0}")]
    BracketInvalid(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
