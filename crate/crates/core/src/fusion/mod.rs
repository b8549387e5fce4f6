//! Test-time view averaging, sum-rule and oracle ensembles, stratified
//! k-fold plans, macro AUC and evaluation reports.

mod auc;
mod eval;
mod folds;
mod io;
mod scores;

use thiserror::Error;

pub use auc::{auc_macro_ovr, binary_auc, midranks, AUC_METHOD};
pub use eval::{confusion_matrix, evaluate, EvalReport, FoldMetrics};
pub use folds::{stratified_kfold, FoldPlan};
pub use io::{read_score_csv, write_score_csv, ScoreFile};
pub use scores::{
    accuracy, argmax, average_views, oracle_accuracy, sum_rule_fuse, EnsembleSpec, ScoreMatrix, ROW_SUM_TOLERANCE,
};

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("row {id} is not a probability distribution")]
    NotProbabilityRow { id: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("view {0} has no protein in the grouping")]
    OrphanView(String),
    #[error("misaligned ensemble members: {0}")]
    MisalignedMembers(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("AUC needs at least two classes among the labels")]
    SingleClass,
    #[error("no prediction for protein {0}")]
    MissingPrediction(String),
    #[error("no fold for protein {0}")]
    MissingFold(String),
    #[error("invalid fold plan: {0}")]
    InvalidFolds(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
