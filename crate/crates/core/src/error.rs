use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model has no worlds")]
    Empty,
    #[error("edge ({0}, {1}) mentions an unknown world")]
    UnknownWorld(usize, usize),
    #[error("duplicate world id {0}")]
    DuplicateWorld(usize),
    #[error("atom `{atom}` is true at world {from} but false at its successor {to}")]
    NotPersistent {
        atom: String,
        from: usize,
        to: usize,
    },
    #[error("world {0} does not exist")]
    NoSuchWorld(usize),
    #[error("malformed model JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule {rule} is not applicable: {reason}")]
    NotApplicable { rule: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("node budget of {0} expansions exceeded")]
    BudgetExceeded(usize),
    #[error("root sequent contains extended formulas")]
    ExtendedRoot,
    #[error("countermodel construction: {0}")]
    Construction(String),
    #[error("countermodel failed verification: {0}")]
    Unverified(String),
}
