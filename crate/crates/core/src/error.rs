use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid of size {grid} cannot resolve {modes} modes without aliasing (need at least {needed})")]
    GridTooSmall {
        grid: usize,
        modes: usize,
        needed: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid size mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("invalid conjugator: {0}")]
    InvalidConjugator(String),

    #[error("inverse solve of the conjugator lift failed at x = {x} (residual {residual:e})")]
    InverseSolve { x: f64, residual: f64 },

    #[error("invalid rotation parameter alpha = {0}")]
    InvalidAlpha(f64),

    #[error("Radon-Nikodym density is not positive (min {0:e})")]
    NonPositiveDensity(f64),

    #[error("deformation mismatch: {0} vs {1}")]
    AlphaMismatch(f64, f64),

    #[error("index ({k}, {l}) outside the truncation box")]
    OutOfBox { k: i64, l: i64 },

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("spectral tail mass {tail:e} exceeds tolerance {tol:e} ({context})")]
    Aliasing {
        tail: f64,
        tol: f64,
        context: &'static str,
    },

    #[error("the two evaluation routes disagree by {deviation:e} ({context})")]
    RouteDisagreement {
        deviation: f64,
        context: &'static str,
    },

    #[error("singular Dirac block n = {n} (sigma_min = {sigma:e})")]
    SingularBlock { n: i64, sigma: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
