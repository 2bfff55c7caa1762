use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no units")]
    NoUnits,
    #[error("population has no respondent units")]
    NoRespondents,
    #[error("population mean of auxiliary variable is zero")]
    ZeroAuxiliaryMean,
    #[error("non-finite value in unit {index}")]
    NonFinite { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("infeasible synthesis target: {0}")]
    InfeasibleTarget(String),
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("estimator undefined: {0}")]
    Undefined(String),
    #[error("slope undefined")]
    SlopeUndefined,
    #[error("class estimator pole")]
    ClassPole,
    #[error("sample has no phase-one auxiliary values")]
    MissingPhaseOne,
    #[error("population mean of auxiliary variable required")]
    XbarRequired,
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
