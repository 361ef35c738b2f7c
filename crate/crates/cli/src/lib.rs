//! Batch driver for the `lieminimal-core` analyses: TOML run configurations,
//! JSON reports, CSV tables and OBJ meshes.

use std::path::{Path, PathBuf};

pub mod analysis;
pub mod config;
pub mod output;
pub mod report;

pub use analysis::{analyze_patch, build_patch, run};
pub use config::AnalysisConfig;
pub use report::SurfaceReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Geometry(#[from] lieminimal_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// 2 for failed preconditions (bad configuration, unsuitable surface), 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => 3,
            _ => 2,
        }
    }
}
