use thiserror::Error;

/// Errors raised by the lattice toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, dimensions or grid sides do not line up.
    #[error("structural error: {0}")]
    Structural(String),

    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A finitely supported function does not fit in the grid without aliasing.
    #[error("padding error: support radius {radius} plus margin {margin} does not fit side {side}; minimal side is {required_side}")]
    Padding {
        radius: i64,
        margin: i64,
        side: usize,
        required_side: usize,
    },

    /// A configured size cap would be exceeded.
    #[error("capacity error: {what} needs {requested}, cap is {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    /// A spectral operator was applied where its symbol is singular.
    #[error("singularity error: {0}")]
    Singularity(String),

    /// The configuration violates a precondition of the experiment.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// An iterative refinement did not settle.
    #[error("no convergence after side {side}: last value {last}, previous {previous}")]
    NonConvergence {
        side: usize,
        last: f64,
        previous: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
