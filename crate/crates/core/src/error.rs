use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration budget exceeded: {size} > {limit}")]
    BudgetExceeded { size: u64, limit: u64 },
    #[error("initial condition not admissible: {0}")]
    NotAdmissible(String),
    #[error("route mismatch: {0}")]
    RouteMismatch(String),
    #[error("degenerate start: {0}")]
    Degenerate(String),
    #[error("acceptance rate below {rate:e}: increase separation or shrink horizon")]
    LowAcceptance { rate: f64 },
    #[error("numerical instability: {0}; reduce δ")]
    Unstable(String),
    #[error("empty sample")]
    EmptySample,
    #[error("unknown test id `{0}`")]
    UnknownTest(String),
    #[error("unknown model id `{0}`")]
    UnknownModel(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
