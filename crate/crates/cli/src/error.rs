use thiserror::Error;

/// Harness-level errors; each maps to a process exit code so sweeps and CI
/// can triage outcomes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation: {0}")]
    Validation(String),
    #[error("run terminated: Lagrangian map degenerate at t = {t}")]
    Degenerate { t: f64, eta_x_min: f64 },
    #[error("io: {0}")]
    Io(String),
    #[error("{0}")]
    Core(vacuumgas::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Degenerate { .. } => 3,
            CliError::Io(_) => 4,
            CliError::Core(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<vacuumgas::Error> for CliError {
    fn from(e: vacuumgas::Error) -> Self {
        match e {
            vacuumgas::Error::MapDegenerate { t, eta_x_min } => {
                CliError::Degenerate { t, eta_x_min }
            }
            vacuumgas::Error::InvalidParameters(m) => CliError::Validation(m),
            other => CliError::Core(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
