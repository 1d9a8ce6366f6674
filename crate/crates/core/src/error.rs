//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid substance parameters: {0}")]
    InvalidParams(String),

    #[error("invalid thermal state: {0}")]
    InvalidState(String),

    #[error("relative tolerance {0:e} outside (0, 1e-3]")]
    InvalidTolerance(f64),

    #[error("invalid finite-difference step: {0}")]
    InvalidStep(String),

    #[error("partition sum not certified within {cap} levels")]
    Divergence { cap: u64 },

    #[error("closed form requires gamma > 0; use partition_sum")]
    ClosedFormRequiresNoncommutative,

    #[error("invalid cycle spec: {0}")]
    InvalidCycleSpec(String),

    /// The cycle closed but exchanged no resolvable net work (or heat input),
    /// so the figure of merit is undefined.
    #[error("degenerate cycle: {reason}")]
    DegenerateCycle {
        reason: String,
        heats: [f64; 4],
        w_total: f64,
    },

    /// The working substance dumped heat into the cold bath instead of
    /// extracting it. The sign is reported so sweeps can mask the region.
    #[error("not a refrigerator: Q_cold = {q_cold:e} <= 0")]
    NotARefrigerator {
        q_cold: f64,
        heats: [f64; 4],
        w_total: f64,
    },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("nothing to plot: {0}")]
    EmptyPlot(String),

    #[error("malformed CSV: {0}")]
    MalformedCsv(String),

    #[error("failed writing {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
