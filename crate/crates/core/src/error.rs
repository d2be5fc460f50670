use std::fmt;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid modulus at coordinate {0}: must be 0 (free) or at least 2")]
    InvalidModulus(usize),
    #[error("a group needs at least one coordinate")]
    EmptyGroup,
    #[error("coordinate count mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("operands belong to different groups")]
    SpecMismatch,
    #[error("set is empty")]
    EmptySet,
    #[error("unsupported group for convolution: {0}")]
    UnsupportedGroup(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("part {0} is empty")]
    EmptyPart(usize),
    #[error("hypergraph has no edges")]
    NoEdges,
    #[error("leg and good-pair queries need two distinct vertices")]
    SameVertex,
    #[error("enumeration budget exceeded: about {estimate} candidates, budget {budget}")]
    BudgetExceeded { estimate: String, budget: u64 },
    #[error("no verified witness found: {0}")]
    NoWitness(String),
    #[error("density precondition fails: {0}")]
    DensityTooLow(String),
    #[error("epsilon {0} is not below 1/4")]
    InfeasibleEpsilon(String),
    #[error("epsilon {eps} must lie strictly between 0 and {bound}")]
    EpsilonTooLarge { eps: String, bound: String },
    #[error("parts must all have the same size")]
    UnequalParts,
    #[error("restricted sumset hypothesis violated for C^r = {0}")]
    HypothesisViolated(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("result was produced in mode {found}, not {expected}")]
    ModeMismatch { expected: String, found: String },
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(what: impl fmt::Display) -> Error {
    Error::IndexOutOfRange(what.to_string())
}
