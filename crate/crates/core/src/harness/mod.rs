//! Runs, sweeps and their on-disk artifacts.

pub mod checks;
pub mod config;
pub mod csv;
pub mod profiles;
pub mod run;
pub mod snapshot;
pub mod sweep;

use thiserror::Error;

use crate::error::QnsError;
pub use config::{parse_config, DtPolicy, Epsilon, Profile, RunConfig};
pub use run::{run_single, simulate, RunOutput};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SnapshotError};
pub use sweep::{run_sweep, SweepResult};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(QnsError),
    #[error("sweep failed: {0}")]
    SweepAborted(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

impl From<QnsError> for HarnessError {
    fn from(e: QnsError) -> Self {
        match e {
            QnsError::InvalidGrid(_)
            | QnsError::InvalidParameter(_)
            | QnsError::BoundExceeded { .. }
            | QnsError::InitialVacuum { .. } => HarnessError::Config(e.to_string()),
            e => HarnessError::Numerical(e),
        }
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numerical(_) | HarnessError::SweepAborted(_) => 3,
            HarnessError::Io(_) | HarnessError::Snapshot(_) => 4,
        }
    }
}
