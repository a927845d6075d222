use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("action is not enabled at the given ID")]
    NotEnabled,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: undeclared symbol `{token}`")]
    UndeclaredSymbol { line: usize, token: String },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { line, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActreeError {
    #[error("malformed quasi-run: {0}")]
    MalformedRun(String),
    #[error("root action is not enabled at the start ID")]
    NotEnabled,
    #[error("invalid actree: {0}")]
    InvalidTree(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("family parameters need n >= 1 and k >= 1 (got n={n}, k={k})")]
    InvalidParams { n: u32, k: u32 },
    #[error("cycle detected while expanding subtree of {0}")]
    CycleDetected(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("tree has {size} nodes, over the materialization budget of {budget}")]
    BudgetExceeded { size: String, budget: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("rule budget exceeded at action {action}: {cost} rule instances (budget {budget})")]
    BudgetExceeded { action: String, cost: u128, budget: u128 },
    #[error("PDA is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("PDA is not unary: input alphabet has {0} symbols")]
    NotUnary(usize),
    #[error("wrong acceptance mode: expected {expected}")]
    WrongAcceptance { expected: &'static str },
    #[error("grammar is not in 2-1 normal form: {0}")]
    Not21Nf(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration of {0} is incomplete at the requested bound")]
    IncompleteEnumeration(&'static str),
}
