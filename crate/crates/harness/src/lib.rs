//! Monte Carlo census of random p-adic polynomials, with exact-theory
//! comparisons and the acceptance suite.

pub mod acceptance;
pub mod census;
pub mod config;
pub mod histogram;
pub mod report;
pub mod sample;
pub mod stats;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] padic_roots::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
