use thiserror::Error;

use crate::netcore::Dyad;

#[derive(Debug, Error)]
pub enum Error {
    /// Networks, layers or decompositions that do not fit together.
    #[error("structural error: {0}")]
    Structural(String),

    /// Model terms, parameter vectors or configuration values that are invalid.
    #[error("specification error: {0}")]
    Spec(String),

    /// An operation was asked about a dyad outside the layer's support.
    #[error("dyad ({}, {}) is not in the support of the layer", .0.i, .0.j)]
    Support(Dyad),

    #[error("inference error: {0}")]
    Inference(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
