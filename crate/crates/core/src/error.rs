//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size out of range: {0}")]
    Size(String),

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("not a valid partition: {0}")]
    InvalidPartition(String),

    #[error("partition is not in the {lattice} lattice")]
    NotInLattice { lattice: &'static str },

    #[error("{lower} is not below {upper} in the lattice")]
    NotComparable { lower: String, upper: String },

    #[error("unknown symbol `{0}` in alphabet")]
    UnknownSymbol(String),

    #[error("letter `{0}` has no side but the operation needs sided letters")]
    UnsidedLetter(String),

    #[error("alphabet collision on symbol `{0}`")]
    AlphabetCollision(String),

    #[error("word of length {len} exceeds the degree cap {cap}")]
    DegreeOverflow { len: usize, cap: usize },

    #[error("moment missing for word `{0}` (table is total, not sparse)")]
    MissingMoment(String),

    #[error("cumulant entry missing for word `{0}`")]
    MissingCumulant(String),

    #[error("determining-sequence entry missing for pattern `{0}`")]
    MissingSequenceEntry(String),

    #[error("table is not tracial: phi(`{word}`) != phi(`{rotated}`)")]
    NonTracial { word: String, rotated: String },

    #[error("table is not star-symmetric at word `{0}`")]
    NotStarSymmetric(String),

    #[error("covariance matrix is not admissible: {0}")]
    InvalidCovariance(String),

    #[error("expected a pair alphabet (one left and one right symbol), got {0}")]
    WrongAlphabetShape(String),

    #[error("input distribution is not R-diagonal (witness `{0}`)")]
    NotRDiagonal(String),

    #[error("input distribution is not eta-diagonal (witness `{0}`)")]
    NotEtaDiagonal(String),

    #[error("chain does not alternate between the two algebras at position {0}")]
    ChainNotAlternating(usize),

    #[error("grouping does not cover symbol `{0}`")]
    UncoveredSymbol(String),

    #[error("zero denominator in scalar literal")]
    ZeroDenominator,

    #[error("parse error at {at}: {msg}")]
    Parse { at: String, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
