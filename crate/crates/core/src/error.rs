//! Crate-wide error type.

use crate::nat::Nat;
use crate::residue::ResidueClass;
use crate::symbols::Symbol;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("even input {0}: operation requires an odd integer")]
    EvenInput(Nat),

    #[error("odd input {0}: operation requires an even integer")]
    OddInput(Nat),

    #[error("{0}")]
    Domain(String),

    #[error("segment out of bounds: start {start}, length {len} in a string of length {within}")]
    OutOfBounds {
        start: usize,
        len: usize,
        within: usize,
    },

    #[error("parity mismatch at step {step}: symbol {symbol} does not match value {value}")]
    ParityMismatch {
        /// 1-based position of the offending symbol.
        step: usize,
        symbol: Symbol,
        value: Nat,
    },

    #[error("non-integral intermediate: prefix of length {prefix_len} does not divide exactly")]
    NonIntegral { prefix_len: usize },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("inadmissible dynamics string: prefix of length {first_violation} leaves the admissible region")]
    InadmissibleString { first_violation: usize },

    #[error("class {class} is already terminal: its reduced dynamics is complete")]
    AlreadyTerminal { class: ResidueClass },

    #[error("not odd: {0}")]
    NotOdd(Nat),

    #[error("cycle anomaly: trajectory of {start} returned to its start after {steps} steps")]
    CycleAnomaly { start: Nat, steps: u64 },

    #[error("corrupt checkpoint state: {0}")]
    CorruptState(String),

    #[error("enumeration mismatch: {0}")]
    EnumerationMismatch(Box<crate::enumerate::MismatchReport>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable error code, used by the CLI's JSON output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EvenInput(_) => "even-input",
            Error::OddInput(_) => "odd-input",
            Error::Domain(_) => "domain",
            Error::OutOfBounds { .. } => "out-of-bounds",
            Error::ParityMismatch { .. } => "parity-mismatch",
            Error::NonIntegral { .. } => "non-integral",
            Error::Syntax { .. } => "syntax",
            Error::InadmissibleString { .. } => "inadmissible-string",
            Error::AlreadyTerminal { .. } => "already-terminal",
            Error::NotOdd(_) => "not-odd",
            Error::CycleAnomaly { .. } => "cycle-anomaly",
            Error::CorruptState(_) => "corrupt-state",
            Error::EnumerationMismatch(_) => "enumeration-mismatch",
            Error::Io(_) => "io",
        }
    }
}
