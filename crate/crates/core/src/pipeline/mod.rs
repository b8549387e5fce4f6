//! Dataset manifests, run configuration and the render / run / fuse /
//! evaluate / gradcheck stages.
//!
//! Stages communicate through files: PNG views plus an index CSV, score
//! CSVs, text reports. A run directory holds everything needed to
//! reproduce it (`run_config.toml`, `run_info.toml`).

mod config;
mod manifest;
mod render;
mod run;
mod synthetic;

use std::path::Path;

use thiserror::Error;

use crate::cnn::CnnError;
use crate::fusion::FusionError;
use crate::multiview::MultiviewError;
use crate::pdb::PdbError;
use crate::raster::RasterError;
use crate::repr::{ReprError, RepresentationType};

pub use config::{default_ensembles, RunConfig, ORACLE, STANDARD_ENSEMBLES};
pub use manifest::{DatasetManifest, ManifestEntry, MANIFEST_HEADER};
pub use render::{
    cmd_render, index_path, load_render_index, render_protein_views, IndexRow, RenderSummary, FAILURES_FILE,
    INDEX_FILE,
};
pub use run::{
    cmd_evaluate, cmd_fuse, cmd_gradcheck, cmd_run, read_summary, RunSummary, SummaryRow, SweepRow, SUMMARY_FILE,
    SWEEP_FILE,
};
pub use synthetic::{synthetic_structure, write_synthetic_dataset, SyntheticConfig, SYNTHETIC_CLASSES};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{protein}: {source}")]
    Pdb { protein: String, source: PdbError },
    #[error("{protein} ({representation}): {source}")]
    Repr {
        protein: String,
        representation: RepresentationType,
        source: ReprError,
    },
    #[error("{context}: {source}")]
    Multiview { context: String, source: MultiviewError },
    #[error("{context}: {source}")]
    Raster { context: String, source: RasterError },
    #[error("fold {fold}, {representation}: {source}")]
    Train {
        fold: usize,
        representation: String,
        source: CnnError,
    },
    #[error(transparent)]
    Cnn(#[from] CnnError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error("{count} render failure(s), listed in {path}")]
    RenderFailures { count: usize, path: String },
    #[error("gradient check failed: max relative error {0:e}")]
    GradCheckFailed(f64),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
