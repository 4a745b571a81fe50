//! Forbidden sets of rational difference equations.
//!
//! The crate is organised in layers:
//!
//! * exact and floating arithmetic ([`scalar`], [`poly`], [`ratfunc`], [`mobius`]),
//! * equations, pole-aware evaluation and iteration ([`map`], [`definition`]),
//! * closed forms for Riccati equations ([`riccati`]),
//! * semiconjugacies, changes of variables and invariants ([`reductions`]),
//! * enumeration and estimation where no closed form exists ([`enumeration`]),
//! * forbidden-set descriptions and a file-backed catalog ([`fsdesc`], [`catalog`]).

pub mod catalog;
pub mod cyclo;
pub mod definition;
pub mod enumeration;
pub mod fsdesc;
pub mod map;
pub mod mobius;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod reductions;
pub mod riccati;
pub mod rootfind;
pub mod scalar;
pub mod upoly;

pub use definition::EquationDef;
pub use map::{
    evaluate, iterate, CrashReason, DifferenceEquation, DomainPolicy, Eval, IterOptions,
    OrbitOutcome, OutcomeKind, RationalMap,
};
pub use mobius::Mobius;
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use scalar::{Field, Scalar};

/// Exact rational numbers.
pub type Q = num_rational::BigRational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("arity mismatch: expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("unbound symbols: {0}")]
    UnboundSymbols(String),
    #[error("term budget exceeded: {0}")]
    Budget(String),
    #[error("transformation is not invertible")]
    NotInvertible,
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("method not applicable: {0}")]
    NotApplicable(String),
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("catalog: {0}")]
    Catalog(String),
    #[error("stale result: equation hash {found} does not match {expected}")]
    StaleResult { expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }
}
