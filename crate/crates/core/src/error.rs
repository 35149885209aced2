use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate remainder estimate: term a[{index}] is zero")]
    DegenerateTerm { index: usize },

    #[error("not enough terms: order {order} needs {needed}, sequence has {have}")]
    TooFewTerms {
        order: usize,
        needed: usize,
        have: usize,
    },

    #[error("range error: order {k} exceeds table maximum {k_max}")]
    Range { k: usize, k_max: usize },

    #[error("no convergence after {iterations} iterations (last residual {last_residual})")]
    NoConvergence {
        iterations: usize,
        last_residual: String,
        trace: Vec<String>,
    },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
