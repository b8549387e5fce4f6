use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::FusionError;

/// Rows must sum to one within this tolerance.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Class-probability rows keyed by sample id (a view or a protein).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    row_ids: Vec<String>,
    n_classes: usize,
    values: Vec<f64>,
}

impl ScoreMatrix {
    /// `values` is row-major, `row_ids.len() * n_classes` long.
    pub fn new(row_ids: Vec<String>, n_classes: usize, values: Vec<f64>) -> Result<Self, FusionError> {
        if n_classes == 0 {
            return Err(FusionError::Shape("score matrix needs at least one class".into()));
        }
        if values.len() != row_ids.len() * n_classes {
            return Err(FusionError::Shape(format!(
                "{} rows x {} classes needs {} values, got {}",
                row_ids.len(),
                n_classes,
                row_ids.len() * n_classes,
                values.len()
            )));
        }
        for (r, row) in values.chunks(n_classes).enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) || (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(FusionError::NotProbabilityRow {
                    id: row_ids[r].clone(),
                });
            }
        }
        Ok(Self {
            row_ids,
            n_classes,
            values,
        })
    }

    pub fn from_rows(row_ids: Vec<String>, n_classes: usize, rows: &[Vec<f64>]) -> Result<Self, FusionError> {
        if let Some(bad) = rows.iter().position(|r| r.len() != n_classes) {
            return Err(FusionError::Shape(format!(
                "row {bad} has {} entries, expected {n_classes}",
                rows[bad].len()
            )));
        }
        Self::new(row_ids, n_classes, rows.iter().flatten().copied().collect())
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_classes..(i + 1) * self.n_classes]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n_classes)
    }

    pub fn row_index(&self, id: &str) -> Option<usize> {
        self.row_ids.iter().position(|r| r == id)
    }

    /// Predicted class of row `i`; ties go to the lowest class index.
    pub fn argmax(&self, i: usize) -> usize {
        argmax(self.row(i))
    }

    pub fn with_row_ids(mut self, row_ids: Vec<String>) -> Result<Self, FusionError> {
        if row_ids.len() != self.row_ids.len() {
            return Err(FusionError::Shape(format!(
                "{} ids for {} rows",
                row_ids.len(),
                self.row_ids.len()
            )));
        }
        self.row_ids = row_ids;
        Ok(self)
    }

    /// Rows reordered as `ids`.
    pub fn select(&self, ids: &[String]) -> Result<Self, FusionError> {
        let index: HashMap<&str, usize> = self.row_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut values = Vec::with_capacity(ids.len() * self.n_classes);
        for id in ids {
            let &i = index.get(id.as_str()).ok_or_else(|| FusionError::MissingPrediction(id.clone()))?;
            values.extend_from_slice(self.row(i));
        }
        Ok(Self {
            row_ids: ids.to_vec(),
            n_classes: self.n_classes,
            values,
        })
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate().skip(1) {
        if *v > row[best] {
            best = i;
        }
    }
    best
}

/// Test-time augmentation: averages view rows into one row per protein.
///
/// `grouping` maps view id to protein id. Output rows are sorted by protein id.
pub fn average_views(view_scores: &ScoreMatrix, grouping: &HashMap<String, String>) -> Result<ScoreMatrix, FusionError> {
    let k = view_scores.n_classes;
    let mut acc: BTreeMap<&str, (Vec<f64>, usize)> = BTreeMap::new();
    for (i, view) in view_scores.row_ids.iter().enumerate() {
        let protein = grouping.get(view).ok_or_else(|| FusionError::OrphanView(view.clone()))?;
        let entry = acc.entry(protein.as_str()).or_insert_with(|| (vec![0.0; k], 0));
        for (a, v) in entry.0.iter_mut().zip(view_scores.row(i)) {
            *a += v;
        }
        entry.1 += 1;
    }
    let mut ids = Vec::with_capacity(acc.len());
    let mut values = Vec::with_capacity(acc.len() * k);
    for (protein, (sum, n)) in acc {
        ids.push(protein.to_string());
        values.extend(sum.into_iter().map(|s| s / n as f64));
    }
    ScoreMatrix::new(ids, k, values)
}

/// A named sum-rule ensemble over representation (or run) identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub name: String,
    pub members: Vec<String>,
}

impl EnsembleSpec {
    pub fn new(name: impl Into<String>, members: impl IntoIterator<Item = impl Into<String>>) -> Result<Self, FusionError> {
        let spec = Self {
            name: name.into(),
            members: members.into_iter().map(Into::into).collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        if self.members.is_empty() {
            return Err(FusionError::InvalidEnsemble(format!("{} has no members", self.name)));
        }
        let mut seen = HashSet::new();
        for m in &self.members {
            if !seen.insert(m) {
                return Err(FusionError::InvalidEnsemble(format!("{} lists {m} twice", self.name)));
            }
        }
        Ok(())
    }
}

fn check_aligned(members: &[ScoreMatrix]) -> Result<(), FusionError> {
    let first = members
        .first()
        .ok_or_else(|| FusionError::InvalidEnsemble("no member score matrices".into()))?;
    for (i, m) in members.iter().enumerate().skip(1) {
        if m.n_classes != first.n_classes || m.row_ids != first.row_ids {
            return Err(FusionError::MisalignedMembers(format!(
                "member {i} does not share rows/classes with member 0"
            )));
        }
    }
    Ok(())
}

/// Sum rule, normalised by the member count so rows stay probabilities.
pub fn sum_rule_fuse(members: &[ScoreMatrix], spec: &EnsembleSpec) -> Result<ScoreMatrix, FusionError> {
    spec.validate()?;
    if members.len() != spec.members.len() {
        return Err(FusionError::MisalignedMembers(format!(
            "{} lists {} members, got {} score matrices",
            spec.name,
            spec.members.len(),
            members.len()
        )));
    }
    check_aligned(members)?;
    let first = &members[0];
    let n = members.len() as f64;
    let values = (0..first.values.len())
        .map(|i| members.iter().map(|m| m.values[i]).sum::<f64>() / n)
        .collect();
    ScoreMatrix::new(first.row_ids.clone(), first.n_classes, values)
}

/// Fraction of samples that at least one member classifies correctly.
pub fn oracle_accuracy(members: &[ScoreMatrix], labels: &[usize]) -> Result<f64, FusionError> {
    check_aligned(members)?;
    let n = members[0].n_rows();
    if labels.len() != n {
        return Err(FusionError::MisalignedMembers(format!("{} labels for {n} rows", labels.len())));
    }
    if n == 0 {
        return Err(FusionError::EmptyDataset);
    }
    let correct = (0..n)
        .filter(|&i| members.iter().any(|m| m.argmax(i) == labels[i]))
        .count();
    Ok(correct as f64 / n as f64)
}

/// Fraction of rows whose argmax equals the label.
pub fn accuracy(scores: &ScoreMatrix, labels: &[usize]) -> Result<f64, FusionError> {
    if labels.len() != scores.n_rows() {
        return Err(FusionError::Shape(format!(
            "{} labels for {} rows",
            labels.len(),
            scores.n_rows()
        )));
    }
    if labels.is_empty() {
        return Err(FusionError::EmptyDataset);
    }
    let correct = labels.iter().enumerate().filter(|(i, l)| scores.argmax(*i) == **l).count();
    Ok(correct as f64 / labels.len() as f64)
}
