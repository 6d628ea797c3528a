use std::path::PathBuf;

/// Errors produced by the kernels, bounds, estimators and harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error in {function}: argument {value} is outside the valid domain")]
    Domain { function: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular Fisher information at zeta={zeta}, alpha={alpha} (determinant {determinant:e})")]
    Singular {
        zeta: f64,
        alpha: f64,
        determinant: f64,
    },

    #[error(
        "quadrature failure at alpha={alpha}, sigma2={sigma2}: plus/minus expectations {plus} and {minus} disagree"
    )]
    Quadrature {
        alpha: f64,
        sigma2: f64,
        plus: f64,
        minus: f64,
    },

    /// `E[1/phi]` under the prior is infinite: the integrand grows like
    /// `exp(zeta²/2)` against a prior decaying like `exp(-zeta²/(2 sigma2))`.
    #[error("expected bound diverges at alpha={alpha}, sigma2={sigma2}: it is finite only for sigma2 < 1")]
    Divergent { alpha: f64, sigma2: f64 },

    #[error(
        "solver did not converge after {iterations} iterations (last iterate zeta={zeta}, alpha={alpha}, gradient norm {grad_norm:e})"
    )]
    Convergence {
        zeta: f64,
        alpha: f64,
        grad_norm: f64,
        iterations: usize,
    },

    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error("at grid point alpha={alpha}, snr_db={snr_db}: {source}")]
    Grid {
        alpha: f64,
        snr_db: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed table {}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
