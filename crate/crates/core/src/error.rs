use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T> = std::result::Result<T, SwError>;

#[derive(Debug, Error)]
pub enum SwError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("source has nonzero mean {mean:e}; the Laplacian is not invertible on it")]
    NonZeroMean { mean: f64 },

    #[error("explicit solution with c2 = {c2} is not periodic on a torus of side {side} (2*c2*side/2pi must be an integer)")]
    NonPeriodicParameter { c2: f64, side: f64 },

    #[error("spinor pairing has nonzero mean {mean:e}; no Higgs field solves the Higgs equation")]
    ObstructedSource { mean: f64 },

    #[error("not a vortex configuration: {0}")]
    NotVortexConfiguration(String),

    #[error("base configuration is not a solution (energy {energy:e})")]
    NotASolution { energy: f64 },

    #[error("singular value gap ratio {gap:e} is below the threshold {threshold:e}; refine the grid")]
    UntrustworthyGap { gap: f64, threshold: f64 },

    #[error("line search stalled after {} iterations (energy {:e})", .0.iterations, .0.final_energy)]
    StalledLineSearch(Box<SolveReport>),

    #[error("no convergence within {} iterations (energy {:e})", .0.iterations, .0.final_energy)]
    MaxItersExceeded(Box<SolveReport>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
