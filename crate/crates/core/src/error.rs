use thiserror::Error;

pub type Result<T> = std::result::Result<T, QnsError>;

/// Failures of the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QnsError {
    #[error("grid size {0} must be even and at least 8")]
    InvalidGrid(usize),
    #[error("fields live on different grids ({0} vs {1} points per axis)")]
    GridMismatch(usize, usize),
    #[error("value count {got} does not match grid ({expected} expected)")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("derivative order ({0}, {1}) exceeds total order 3")]
    UnsupportedOrder(u32, u32),
    #[error("norm exponent p = {0} is below 1")]
    InvalidExponent(f64),
    #[error("norm derivative order k = {0} exceeds 2")]
    InvalidNormOrder(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-positive density {value} at grid point ({i}, {j})")]
    NonPositiveDensity { i: usize, j: usize, value: f64 },
    #[error("density below floor: min n = {min}")]
    BelowFloor { min: f64 },
    #[error("initial density too close to vacuum: min n = {min} < 0.5")]
    InitialVacuum { min: f64 },
    #[error("initial data norm {norm} exceeds declared bound {bound}")]
    BoundExceeded { norm: f64, bound: f64 },
    #[error("reference density 1 + eps*sigma = {value} is non-positive at grid point ({i}, {j})")]
    ReferenceVacuum { i: usize, j: usize, value: f64 },
    #[error("vacuum event at t = {time}: n = {value} at grid point ({i}, {j})")]
    Vacuum { time: f64, i: usize, j: usize, value: f64 },
    #[error("non-finite value detected at t = {time}")]
    NonFinite { time: f64 },
    #[error("time step {dt} violates stability bound {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("vorticity blow-up at t = {time}: max |omega| = {max} (initial {initial})")]
    BlowUp { time: f64, max: f64, initial: f64 },
    #[error("rate fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("rate fit input invalid: {0}")]
    InvalidFitData(String),
}
