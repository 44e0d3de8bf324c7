use thiserror::Error;

use crate::network::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid variable `{name}`: {reason}")]
    InvalidVariable { name: String, reason: String },

    #[error("variable `{0}` appears more than once")]
    DuplicateVariable(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: String, found: String },

    #[error("frame {domain} has {cardinality} configurations, limit is {cap}")]
    FrameTooLarge {
        domain: String,
        cardinality: usize,
        cap: usize,
    },

    #[error("frame {domain} has {cardinality} configurations, dense transforms support at most {cap}")]
    DenseTooLarge {
        domain: String,
        cardinality: usize,
        cap: usize,
    },

    #[error("invalid mass {mass} on {subset}")]
    InvalidMass { subset: String, mass: f64 },

    #[error("masses sum to {sum}, expected 1")]
    MassSum { sum: f64 },

    #[error("discount rate {0} is outside [0, 1]")]
    InvalidDiscount(f64),

    #[error("difference step {0} is outside (0, 0.1]")]
    InvalidDelta(f64),

    #[error("belief function is dogmatic (no mass on the frame); {0}")]
    Dogmatic(String),

    #[error("information content is infinite: {0} is dogmatic")]
    InfiniteInformation(String),

    #[error("result is not a belief function: mass {mass} on {subset}")]
    NotABeliefFunction { subset: String, mass: f64 },

    #[error("unknown evidence id `{0}`")]
    UnknownEvidence(String),

    #[error("marginal target is empty")]
    EmptyTarget,

    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),

    #[error("network has no evidence")]
    NoEvidence,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid network document: {}", format_diagnostics(.0))]
    InvalidNetwork(Vec<Diagnostic>),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
