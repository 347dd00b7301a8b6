use thiserror::Error;

use crate::terms::{Position, Sort};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("position {position} is not a position of {term}")]
    PositionOutOfRange { term: String, position: Position },
    #[error("sort mismatch in {context}: expected {expected}, found {found}")]
    SortMismatch {
        context: String,
        expected: Sort,
        found: Sort,
    },
    #[error("{symbol} expects {expected} arguments, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("undeclared symbol {0}")]
    UndeclaredSymbol(String),
    #[error("symbol {0} declared twice with different types")]
    ConflictingSymbol(String),
    #[error("invalid rule {label}: {reason}")]
    InvalidRule { label: String, reason: String },
    #[error("duplicate rule label {0}")]
    DuplicateLabel(String),
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("rule {rule} does not match at position {position} of {term}")]
    NoMatch {
        rule: String,
        term: String,
        position: Position,
    },
    #[error("no rule applies at position {position} of {term}")]
    NotARedex { term: String, position: Position },
    #[error("rule is not left-linear: {0}")]
    NotLeftLinear(String),
    #[error("positions {0} and {1} are not parallel")]
    OverlappingPositions(Position, Position),
    #[error("the rewrite system is not orthogonal: {0}")]
    NotOrthogonal(String),
    #[error("invalid reduction: {0}")]
    InvalidTrace(String),
    #[error("missing parallel step for variable {0}")]
    MissingVariableStep(String),
    #[error("trace surgery exceeded its work budget of {0} swaps")]
    SurgeryBudget(usize),
    #[error("symbol {0} is reserved")]
    ReservedSymbol(String),
    #[error("cannot unfold: {0}")]
    Unfold(String),
    #[error("term {0} is not a ground stream term")]
    NotGroundStream(String),
    #[error("scheduler invariant violated: {0}")]
    Scheduler(String),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid stream specification: {0}")]
    InvalidSpec(String),
    #[error("cannot export: {0}")]
    Export(String),
}
