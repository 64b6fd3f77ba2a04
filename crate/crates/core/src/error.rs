use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid {family} motif: {reason}")]
    InvalidMotif { family: &'static str, reason: String },

    #[error("family mismatch: {left} vs {right}")]
    FamilyMismatch { left: String, right: String },

    #[error("ket outside unitary domain: {0}")]
    OutsideDomain(String),

    #[error("evaluation at zero with negative exponent {0}")]
    ZeroEvaluation(i64),

    #[error("exponent {exponent} not divisible as required for conversion to {target}")]
    Divisibility { exponent: i64, target: &'static str },

    #[error("polynomial division left a nonzero remainder")]
    InexactDivision,

    #[error("{what} = {value} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("invalid move `{name}`: {reason}")]
    InvalidMove { name: String, reason: String },

    #[error("move precondition failed: {0}")]
    Precondition(String),

    #[error("|q| = {0} is not on the unit circle")]
    NotUnitCircle(f64),

    #[error("unknown invariant `{0}`")]
    UnknownInvariant(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not a bijection: {0}")]
    NotBijection(String),
}

pub type Result<T> = std::result::Result<T, Error>;
