use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FusionError;

/// Protein-level fold assignment. Views always inherit the fold of their protein.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, protein_id: &str) -> Option<usize> {
        self.assignment.get(protein_id).copied()
    }

    pub fn test_ids(&self, fold: usize) -> Vec<String> {
        self.assignment
            .iter()
            .filter(|(_, f)| **f == fold)
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn train_ids(&self, fold: usize) -> Vec<String> {
        self.assignment
            .iter()
            .filter(|(_, f)| **f != fold)
            .map(|(id, _)| id.clone())
            .collect()
    }
}

/// Stratified k-fold split.
///
/// Each class is sorted by id, shuffled with a seeded RNG and dealt
/// round-robin to the folds. Dealing continues across classes from where the
/// previous class stopped, so per-class and total fold sizes both differ by
/// at most one. Classes smaller than `k` leave some folds without that class.
pub fn stratified_kfold(labels: &BTreeMap<String, usize>, k: usize, seed: u64) -> Result<FoldPlan, FusionError> {
    if labels.is_empty() {
        return Err(FusionError::EmptyDataset);
    }
    if k < 2 {
        return Err(FusionError::InvalidFolds(format!("k must be >= 2, got {k}")));
    }
    let mut by_class: BTreeMap<usize, Vec<&String>> = BTreeMap::new();
    for (id, class) in labels {
        by_class.entry(*class).or_default().push(id);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = BTreeMap::new();
    let mut next = 0usize;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for id in members.iter() {
            assignment.insert((*id).clone(), next);
            next = (next + 1) % k;
        }
    }
    Ok(FoldPlan { k, seed, assignment })
}
