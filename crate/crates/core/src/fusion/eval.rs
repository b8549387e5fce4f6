use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{auc_macro_ovr, FoldPlan, FusionError, ScoreMatrix, AUC_METHOD};

#[derive(Debug, Clone, PartialEq)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_samples: usize,
    pub accuracy: f64,
    /// `None` when the fold's test set holds a single class.
    pub auc: Option<f64>,
    pub confusion: Vec<Vec<u64>>,
}

/// Pooled out-of-fold metrics plus the per-fold breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n_classes: usize,
    pub n_samples: usize,
    pub accuracy: f64,
    /// Macro one-vs-rest AUC, percent.
    pub auc: f64,
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<u64>>,
    pub per_fold: Vec<FoldMetrics>,
}

pub fn confusion_matrix(scores: &ScoreMatrix, labels: &[usize]) -> Vec<Vec<u64>> {
    let k = scores.n_classes();
    let mut m = vec![vec![0u64; k]; k];
    for (i, &l) in labels.iter().enumerate() {
        m[l][scores.argmax(i)] += 1;
    }
    m
}

fn trace_accuracy(confusion: &[Vec<u64>]) -> f64 {
    let total: u64 = confusion.iter().flatten().sum();
    let diag: u64 = (0..confusion.len()).map(|i| confusion[i][i]).sum();
    diag as f64 / total as f64
}

/// Evaluates protein-level scores against `labels` under `plan`.
///
/// Every labelled protein needs a score row and a fold.
pub fn evaluate(scores: &ScoreMatrix, labels: &BTreeMap<String, usize>, plan: &FoldPlan) -> Result<EvalReport, FusionError> {
    if labels.is_empty() {
        return Err(FusionError::EmptyDataset);
    }
    let ids: Vec<String> = labels.keys().cloned().collect();
    let aligned = scores.select(&ids)?;
    let y: Vec<usize> = labels.values().copied().collect();
    if let Some(&bad) = y.iter().find(|l| **l >= scores.n_classes()) {
        return Err(FusionError::Shape(format!("label {bad} >= {} classes", scores.n_classes())));
    }
    let folds: Vec<usize> = ids
        .iter()
        .map(|id| plan.fold_of(id).ok_or_else(|| FusionError::MissingFold(id.clone())))
        .collect::<Result<_, _>>()?;

    let confusion = confusion_matrix(&aligned, &y);
    let auc = auc_macro_ovr(&aligned, &y)?;
    let mut per_fold = Vec::new();
    for fold in 0..plan.k {
        let members: Vec<usize> = (0..ids.len()).filter(|&i| folds[i] == fold).collect();
        if members.is_empty() {
            continue;
        }
        let fold_ids: Vec<String> = members.iter().map(|&i| ids[i].clone()).collect();
        let fold_scores = aligned.select(&fold_ids)?;
        let fold_y: Vec<usize> = members.iter().map(|&i| y[i]).collect();
        let fc = confusion_matrix(&fold_scores, &fold_y);
        per_fold.push(FoldMetrics {
            fold,
            n_samples: members.len(),
            accuracy: trace_accuracy(&fc),
            auc: auc_macro_ovr(&fold_scores, &fold_y).ok(),
            confusion: fc,
        });
    }
    Ok(EvalReport {
        n_classes: scores.n_classes(),
        n_samples: ids.len(),
        accuracy: trace_accuracy(&confusion),
        auc,
        confusion,
        per_fold,
    })
}

impl EvalReport {
    /// Plain-text report with a header naming the AUC method.
    pub fn to_text(&self, title: &str, class_names: &[String]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {title}");
        let _ = writeln!(out, "# auc: {AUC_METHOD}");
        let _ = writeln!(out, "samples: {}", self.n_samples);
        let _ = writeln!(out, "accuracy: {:.4}", self.accuracy);
        let _ = writeln!(out, "auc: {:.2}", self.auc);
        let _ = writeln!(out, "confusion (rows = true class):");
        for (i, row) in self.confusion.iter().enumerate() {
            let name = class_names.get(i).map_or("", String::as_str);
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>5}")).collect();
            let _ = writeln!(out, "  {i:>2} {name:<16}{}", cells.join(""));
        }
        let _ = writeln!(out, "per fold:");
        for f in &self.per_fold {
            let auc = f.auc.map_or_else(|| "-".to_string(), |a| format!("{a:.2}"));
            let _ = writeln!(out, "  fold {:>2}  n={:<4} accuracy={:.4} auc={auc}", f.fold, f.n_samples, f.accuracy);
        }
        out
    }

    /// Confusion matrix as CSV with a `true_class` column and one column per predicted class.
    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("true_class");
        for j in 0..self.n_classes {
            let _ = write!(out, ",pred_{j}");
        }
        out.push('\n');
        for (i, row) in self.confusion.iter().enumerate() {
            let _ = write!(out, "{i}");
            for c in row {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::stratified_kfold;

    fn onehot(ids: &[String], preds: &[usize], k: usize) -> ScoreMatrix {
        let rows: Vec<Vec<f64>> = preds
            .iter()
            .map(|&p| (0..k).map(|c| if c == p { 1.0 } else { 0.0 }).collect())
            .collect();
        ScoreMatrix::from_rows(ids.to_vec(), k, &rows).unwrap()
    }

    fn labelled(y: &[usize]) -> (Vec<String>, BTreeMap<String, usize>) {
        let ids: Vec<String> = (0..y.len()).map(|i| format!("p{i}")).collect();
        let labels = ids.iter().cloned().zip(y.iter().copied()).collect();
        (ids, labels)
    }

    #[test]
    fn all_correct() {
        let y = [0, 1, 2, 0, 1, 2];
        let (ids, labels) = labelled(&y);
        let plan = stratified_kfold(&labels, 2, 0).unwrap();
        let r = evaluate(&onehot(&ids, &y, 3), &labels, &plan).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.confusion, vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]);
        assert_eq!(r.auc, 100.0);
    }

    #[test]
    fn nine_samples_two_errors() {
        let y = [0, 0, 0, 1, 1, 1, 2, 2, 2];
        // p1: true 0 predicted 2; p5: true 1 predicted 0
        let pred = [0, 2, 0, 1, 1, 0, 2, 2, 2];
        let (ids, labels) = labelled(&y);
        let plan = stratified_kfold(&labels, 3, 1).unwrap();
        let r = evaluate(&onehot(&ids, &pred, 3), &labels, &plan).unwrap();
        assert!((r.accuracy - 7.0 / 9.0).abs() < 1e-15);
        assert_eq!(r.confusion, vec![vec![2, 0, 1], vec![1, 2, 0], vec![0, 0, 3]]);
        for (c, row) in r.confusion.iter().enumerate() {
            assert_eq!(row.iter().sum::<u64>(), y.iter().filter(|l| **l == c).count() as u64);
        }
        assert_eq!(r.per_fold.iter().map(|f| f.n_samples).sum::<usize>(), 9);
    }

    #[test]
    fn missing_prediction() {
        let (ids, labels) = labelled(&[0, 1, 0]);
        let plan = stratified_kfold(&labels, 2, 0).unwrap();
        let partial = onehot(&ids[..2], &[0, 1], 2);
        assert!(matches!(evaluate(&partial, &labels, &plan), Err(FusionError::MissingPrediction(id)) if id == "p2"));
    }

    #[test]
    fn text_report_names_auc_method() {
        let y = [0, 1];
        let (ids, labels) = labelled(&y);
        let plan = stratified_kfold(&labels, 2, 0).unwrap();
        let r = evaluate(&onehot(&ids, &y, 2), &labels, &plan).unwrap();
        let text = r.to_text("demo", &["a".into(), "b".into()]);
        assert!(text.contains(AUC_METHOD));
        assert_eq!(r.confusion_csv(), "true_class,pred_0,pred_1\n0,1,0\n1,0,1\n");
    }
}
