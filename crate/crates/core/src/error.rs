use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("cannot build cluster partition: {0}")]
    ClusterPartition(String),

    #[error("field/grid size mismatch: expected {expected} cells, got {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("scheme {0} requires a cluster partition")]
    MissingPartition(&'static str),

    #[error("stabilization parameter must be positive, got {0}")]
    InvalidLambda(f64),

    #[error("singular system ({kind}): reciprocal condition estimate {rcond:.3e}")]
    Singular { kind: SingularityKind, rcond: f64 },

    #[error("solver did not reach tolerance: relative residual {residual:.3e} > {tol:.3e}")]
    NotConverged { residual: f64, tol: f64 },

    #[error("dense eigensolve limited to {cap} pressure unknowns, got {dim}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("checkerboard field needs an even uniform grid: {0}")]
    Checkerboard(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("linear algebra failure: {0}")]
    Factorization(String),
}

/// Which factorization revealed a singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    /// The assembled saddle system itself.
    System,
    /// The companion system without boundary pressure fluxes: a zero-mean
    /// pressure mode is seen by the discrete gradient only through the
    /// domain boundary (checkerboard mode).
    BoundaryOnlyPressureMode,
}

impl std::fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SingularityKind::System => f.write_str("system matrix"),
            SingularityKind::BoundaryOnlyPressureMode => {
                f.write_str("pressure mode controlled only by boundary fluxes")
            }
        }
    }
}

impl Error {
    /// Numerical failures (singular, unconverged) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::NotConverged { .. } | Error::Factorization(_)
        )
    }
}
