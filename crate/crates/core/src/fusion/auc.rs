use super::{FusionError, ScoreMatrix};

/// How multi-class AUC is averaged. Written into every report header.
pub const AUC_METHOD: &str = "macro one-vs-rest, Mann-Whitney with midranks";

/// Midranks (1-based) of `values`; tied values share the mean of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j share their mean
        let mean = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = mean;
        }
        i = j;
    }
    ranks
}

/// Binary AUC as a fraction; `None` when either side is empty.
pub fn binary_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let n_pos = positive.iter().filter(|p| **p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let ranks = midranks(scores);
    let rank_sum: f64 = ranks.iter().zip(positive).filter(|(_, p)| **p).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos as f64 * n_neg as f64))
}

/// Macro one-vs-rest AUC in percent, averaged over the classes present in `labels`.
pub fn auc_macro_ovr(scores: &ScoreMatrix, labels: &[usize]) -> Result<f64, FusionError> {
    if labels.len() != scores.n_rows() {
        return Err(FusionError::Shape(format!(
            "{} labels for {} score rows",
            labels.len(),
            scores.n_rows()
        )));
    }
    if let Some(&bad) = labels.iter().find(|l| **l >= scores.n_classes()) {
        return Err(FusionError::Shape(format!("label {bad} >= {} classes", scores.n_classes())));
    }
    let mut present: Vec<usize> = labels.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(FusionError::SingleClass);
    }
    let total: f64 = present
        .iter()
        .map(|&c| {
            let column: Vec<f64> = scores.rows().map(|r| r[c]).collect();
            let positive: Vec<bool> = labels.iter().map(|l| *l == c).collect();
            binary_auc(&column, &positive).expect("class present with at least one negative")
        })
        .sum();
    Ok(100.0 * total / present.len() as f64)
}
