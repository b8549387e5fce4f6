//! Score files: CSV with header `protein_id,fold,true_class,score_0,...,score_{k-1}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{FoldPlan, FusionError, ScoreMatrix};

/// Contents of one score CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFile {
    pub scores: ScoreMatrix,
    pub labels: BTreeMap<String, usize>,
    pub folds: BTreeMap<String, usize>,
}

impl ScoreFile {
    /// Labels in score-row order.
    pub fn label_vec(&self) -> Vec<usize> {
        self.scores.row_ids().iter().map(|id| self.labels[id]).collect()
    }

    /// Fold plan reconstructed from the fold column (`k` = largest fold + 1).
    pub fn plan(&self) -> FoldPlan {
        let k = self.folds.values().max().map_or(1, |m| m + 1);
        FoldPlan {
            k,
            seed: 0,
            assignment: self.folds.clone(),
        }
    }
}

/// Writes scores in row order. Every row needs a label and a fold.
pub fn write_score_csv(
    path: &Path,
    scores: &ScoreMatrix,
    labels: &BTreeMap<String, usize>,
    plan: &FoldPlan,
) -> Result<(), FusionError> {
    let mut out = String::from("protein_id,fold,true_class");
    for c in 0..scores.n_classes() {
        out.push_str(&format!(",score_{c}"));
    }
    out.push('\n');
    for (i, id) in scores.row_ids().iter().enumerate() {
        let label = labels.get(id).ok_or_else(|| FusionError::MissingPrediction(id.clone()))?;
        let fold = plan.fold_of(id).ok_or_else(|| FusionError::MissingFold(id.clone()))?;
        out.push_str(&format!("{id},{fold},{label}"));
        for v in scores.row(i) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_score_csv(path: &Path) -> Result<ScoreFile, FusionError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.len() < 4 || &headers[0] != "protein_id" || &headers[1] != "fold" || &headers[2] != "true_class" {
        return Err(FusionError::Parse(format!(
            "{}: expected header protein_id,fold,true_class,score_0,...",
            path.display()
        )));
    }
    let k = headers.len() - 3;
    let mut ids = Vec::new();
    let mut values = Vec::new();
    let mut labels = BTreeMap::new();
    let mut folds = BTreeMap::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let bad = |what: &str| FusionError::Parse(format!("{}: row {}: bad {what}", path.display(), line + 2));
        let id = record[0].to_string();
        let fold: usize = record[1].parse().map_err(|_| bad("fold"))?;
        let label: usize = record[2].parse().map_err(|_| bad("true_class"))?;
        for c in 0..k {
            values.push(record[3 + c].parse::<f64>().map_err(|_| bad("score"))?);
        }
        labels.insert(id.clone(), label);
        folds.insert(id.clone(), fold);
        ids.push(id);
    }
    Ok(ScoreFile {
        scores: ScoreMatrix::new(ids, k, values)?,
        labels,
        folds,
    })
}
