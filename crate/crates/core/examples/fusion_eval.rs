//! Sum-rule fusion, oracle accuracy and stratified evaluation on made-up
//! classifier scores.

use std::collections::BTreeMap;

use protview::fusion::{
    accuracy, evaluate, oracle_accuracy, stratified_kfold, sum_rule_fuse, EnsembleSpec, ScoreMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rows leaning toward the true class by `skill`, with noise.
fn noisy_scores(ids: &[String], labels: &[usize], skill: f64, rng: &mut ChaCha8Rng) -> ScoreMatrix {
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&l| {
            let mut row: Vec<f64> = (0..3).map(|c| rng.gen::<f64>() + if c == l { skill } else { 0.0 }).collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
            row
        })
        .collect();
    ScoreMatrix::from_rows(ids.to_vec(), 3, &rows).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ids: Vec<String> = (0..60).map(|i| format!("p{i:02}")).collect();
    let labels: Vec<usize> = (0..60).map(|i| i % 3).collect();
    let label_map: BTreeMap<String, usize> = ids.iter().cloned().zip(labels.iter().copied()).collect();
    let plan = stratified_kfold(&label_map, 5, 0)?;

    let a = noisy_scores(&ids, &labels, 0.4, &mut rng);
    let b = noisy_scores(&ids, &labels, 0.3, &mut rng);
    let spec = EnsembleSpec::new("A+B", ["a", "b"])?;
    let fused = sum_rule_fuse(&[a.clone(), b.clone()], &spec)?;

    for (name, m) in [("a", &a), ("b", &b), ("A+B", &fused)] {
        let r = evaluate(m, &label_map, &plan)?;
        println!("{name:<4} accuracy {:.3}  AUC {:.2}", accuracy(m, &labels)?, r.auc);
    }
    println!("ORACLE accuracy {:.3}", oracle_accuracy(&[a, b], &labels)?);
    let names: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
    print!("{}", evaluate(&fused, &label_map, &plan)?.to_text("A+B", &names));
    Ok(())
}
