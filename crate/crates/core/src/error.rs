use thiserror::Error;

/// Errors raised by the solvers and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("regime error: {0}")]
    Regime(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("root bracketing failed for {what} on [{lo}, {hi}]")]
    RootBracket { what: String, lo: f64, hi: f64 },
    #[error("singular linear system at row {0}")]
    Singular(usize),
    #[error("degenerate profile: {0}")]
    Degenerate(String),
    #[error("no connection: {0}")]
    NoConnection(String),
    #[error("no convergence after {iterations} iterations (measure {measure:e})")]
    NonConvergence { iterations: usize, measure: f64 },
    #[error("no negative bracket for 𝒥(c): {0}")]
    NoBracket(String),
    #[error("newton divergence: {0}")]
    NewtonDivergence(String),
    #[error("simulation blow-up at tau = {tau}: {detail}")]
    BlowUp { tau: f64, detail: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
