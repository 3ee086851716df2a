use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("argument outside its domain: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("non-positive input: {0}")]
    NonPositiveInput(String),
    #[error("feasibility check at t = {t} was inconclusive after {iters} iterations (residual {residual:e})")]
    InconclusiveSolve { t: f64, iters: usize, residual: f64 },
    #[error("no gap instance found in {trials} trials")]
    SearchExhausted { trials: usize },
}
