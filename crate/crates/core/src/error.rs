use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("point outside the profile support: {0}")]
    DomainError(String),
    #[error("ODE step-size underflow at t = {t}: dt = {dt}")]
    StepSizeUnderflow { t: f64, dt: f64 },
    #[error("phase-plane pattern not found: {0}")]
    PatternNotFound(String),
    #[error("time span too short: {0}")]
    InsufficientSpan(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("Lagrangian map degenerate at t = {t}: min eta_x = {eta_x_min}")]
    MapDegenerate { t: f64, eta_x_min: f64 },
    #[error("CFL time step underflow at t = {t}: dt = {dt}")]
    CflUnderflow { t: f64, dt: f64 },
    #[error("unknown initial-data preset: {0}")]
    UnknownPreset(String),
    #[error("acceleration history too short for backward differencing ({have} < {need})")]
    HistoryTooShort { have: usize, need: usize },
    #[error("Hardy weight exponent theta must exceed 1, got {0}")]
    InvalidTheta(f64),
    #[error("not enough samples in fit window: {have} < {need}")]
    InsufficientSamples { have: usize, need: usize },
    #[error("all samples in fit window are non-positive")]
    AllNonpositive,
    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
