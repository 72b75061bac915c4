use thiserror::Error;

/// Errors raised by the series engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("monomial group mismatch: {0} vs {1}")]
    GroupMismatch(String, String),
    #[error("computation budget exhausted")]
    BudgetExhausted,
    #[error("cannot invert the zero series")]
    ZeroSeries,
    #[error("stream order violated: {0}")]
    StreamOrder(String),
    #[error("{0} is not a rational number")]
    Irrational(String),
    #[error("series is not p-composable: {0}")]
    NotPComposable(String),
    #[error("variable {0} is not classical")]
    NotClassical(String),
    #[error("series is not infinitesimal: {0}")]
    NotInfinitesimal(String),
    #[error("restricted series is not composable: {0}")]
    NotComposable(String),
    #[error("monomial division failed: {0}")]
    Divisibility(String),
    #[error("input is not an antichain")]
    NotAntichain,
    #[error("normal form violation: {0}")]
    NormalForm(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("support is not finite at this budget: {0}")]
    InfiniteSupport(String),
    #[error("oracle refused {0}")]
    Oracle(String),
    #[error("witness recursion limit exceeded: {0}")]
    RecursionLimit(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
