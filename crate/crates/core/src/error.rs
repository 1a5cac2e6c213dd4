use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("outside the domain of definition: {0}")]
    Domain(String),

    /// The finite-difference oracle did not reach its asymptotic regime.
    #[error("convergence failure (measured order {order:.3}): {reason}")]
    Convergence { order: f64, reason: String },

    /// A time sequence left the range where the spectral cutoff controls truncation.
    #[error("t = {t} leaves the stability window (t * lambda_cut^2 = {product:.3} < {bound})")]
    Window { t: f64, product: f64, bound: f64 },

    #[error("index indeterminate: {0}")]
    Indeterminate(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
