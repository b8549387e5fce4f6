use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use image::RgbImage;
use log::info;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cnn::{gradient_check, predict, train, write_checkpoint, write_loss_history, GradCheckReport, NetworkSpec, Sample, TrainConfig};
use crate::fusion::{
    evaluate, oracle_accuracy, read_score_csv, stratified_kfold, sum_rule_fuse, write_score_csv, EnsembleSpec,
    EvalReport, FoldPlan, ScoreMatrix, AUC_METHOD,
};
use crate::repr::RepresentationType;

use super::config::{default_ensembles, RunConfig, ORACLE};
use super::manifest::DatasetManifest;
use super::render::{cmd_render, IndexRow};
use super::PipelineError;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
const CONFIG_FILE: &str = "run_config.toml";
const INFO_FILE: &str = "run_info.toml";

/// One line of the summary table. AUC is percent, accuracy a fraction;
/// the oracle row has no AUC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub name: String,
    pub auc: Option<f64>,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub views: usize,
    pub name: String,
    pub auc: Option<f64>,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    /// Rows of the plain run; empty in sweep mode.
    pub rows: Vec<SummaryRow>,
    pub sweep: Vec<SweepRow>,
}

impl RunSummary {
    pub fn row(&self, name: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

#[derive(Serialize)]
struct RunInfo<'a> {
    seed: u64,
    dataset: &'a str,
    manifest_sha256: String,
    proteins: usize,
    classes: Vec<String>,
    auc_method: &'a str,
    version: &'a str,
}

fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

fn mkdir(path: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(path).map_err(|e| PipelineError::io(path, e))
}

/// Per-(representation, fold) training seed.
fn derive_seed(seed: u64, rep: &str, fold: usize) -> u64 {
    let digest = Sha256::digest(format!("{seed}/{rep}/{fold}"));
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Trains and evaluates every representation over every fold, then fuses.
///
/// With a non-empty `sweep` each view count gets a sub-run in
/// `views_<n>/`, all sharing one image tree, and `sweep.csv` collects their
/// summaries.
pub fn cmd_run(manifest: &DatasetManifest, config: &RunConfig) -> Result<RunSummary, PipelineError> {
    config.validate()?;
    if config.sweep.is_empty() {
        return run_single(manifest, config);
    }
    mkdir(&config.output_dir)?;
    config.write(&config.output_dir.join(CONFIG_FILE))?;
    let mut sweep = Vec::new();
    for &n in &config.sweep {
        let sub = RunConfig {
            views: Some(n),
            sweep: Vec::new(),
            output_dir: config.output_dir.join(format!("views_{n}")),
            render_dir: Some(config.render_root()),
            ..config.clone()
        };
        info!("sweep: {n} views");
        let s = run_single(manifest, &sub)?;
        sweep.extend(s.rows.into_iter().map(|r| SweepRow {
            views: n,
            name: r.name,
            auc: r.auc,
            accuracy: r.accuracy,
        }));
    }
    let mut w = csv::Writer::from_path(config.output_dir.join(SWEEP_FILE))?;
    for row in &sweep {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    write_text(&config.output_dir.join("sweep.txt"), &sweep_table(&sweep))?;
    Ok(RunSummary {
        output_dir: config.output_dir.clone(),
        rows: Vec::new(),
        sweep,
    })
}

fn run_single(manifest: &DatasetManifest, config: &RunConfig) -> Result<RunSummary, PipelineError> {
    let out = &config.output_dir;
    mkdir(out)?;
    config.write(&out.join(CONFIG_FILE))?;
    let info = RunInfo {
        seed: config.seed,
        dataset: &manifest.name,
        manifest_sha256: manifest.content_hash()?,
        proteins: manifest.entries.len(),
        classes: manifest.class_names(),
        auc_method: AUC_METHOD,
        version: env!("CARGO_PKG_VERSION"),
    };
    write_text(&out.join(INFO_FILE), &toml::to_string(&info).expect("run info serializes"))?;

    let rendered = cmd_render(manifest, config)?;
    let labels = manifest.labels();
    let plan = stratified_kfold(&labels, config.folds, config.seed)?;
    let spec = config.network_spec(manifest.n_classes());
    let class_names = manifest.class_names();
    for d in ["scores", "reports", "models"] {
        mkdir(&out.join(d))?;
    }

    let mut by_rep: BTreeMap<&str, BTreeMap<&str, Vec<&IndexRow>>> = BTreeMap::new();
    for row in &rendered.rows {
        by_rep
            .entry(&row.representation)
            .or_default()
            .entry(&row.protein_id)
            .or_default()
            .push(row);
    }

    let mut rows = Vec::new();
    let mut matrices: HashMap<String, ScoreMatrix> = HashMap::new();
    let mut ranked: Vec<(RepresentationType, f64)> = Vec::new();
    for &rep in &config.representations {
        let views = by_rep.get(rep.name()).cloned().unwrap_or_default();
        let scores = cross_validate(rep, &views, &labels, &plan, &spec, config)?;
        let report = report_for(rep.name(), &scores, &labels, &plan, &class_names, out)?;
        ranked.push((rep, report.auc));
        rows.push(SummaryRow {
            name: rep.name().to_string(),
            auc: Some(report.auc),
            accuracy: report.accuracy,
        });
        matrices.insert(rep.name().to_string(), scores);
    }

    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    let ranking: Vec<RepresentationType> = ranked.iter().map(|r| r.0).collect();
    let ensembles = config
        .ensembles
        .clone()
        .unwrap_or_else(|| default_ensembles(&config.representations, &ranking));
    for e in &ensembles {
        let members = ensemble_members(e, &matrices)?;
        let fused = sum_rule_fuse(&members, e)?;
        let report = report_for(&e.name, &fused, &labels, &plan, &class_names, out)?;
        rows.push(SummaryRow {
            name: e.name.clone(),
            auc: Some(report.auc),
            accuracy: report.accuracy,
        });
    }
    if config.representations.len() >= 2 {
        let all: Vec<ScoreMatrix> = config.representations.iter().map(|r| matrices[r.name()].clone()).collect();
        let label_vec: Vec<usize> = all[0].row_ids().iter().map(|id| labels[id]).collect();
        rows.push(SummaryRow {
            name: ORACLE.into(),
            auc: None,
            accuracy: oracle_accuracy(&all, &label_vec)?,
        });
    }

    let mut w = csv::Writer::from_path(out.join(SUMMARY_FILE))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    write_text(&out.join("summary.txt"), &summary_table(&rows))?;
    Ok(RunSummary {
        output_dir: out.clone(),
        rows,
        sweep: Vec::new(),
    })
}

fn ensemble_members(e: &EnsembleSpec, matrices: &HashMap<String, ScoreMatrix>) -> Result<Vec<ScoreMatrix>, PipelineError> {
    e.members
        .iter()
        .map(|m| {
            let key = m
                .parse::<RepresentationType>()
                .map(|r| r.name().to_string())
                .unwrap_or_else(|_| m.clone());
            matrices
                .get(&key)
                .cloned()
                .ok_or_else(|| PipelineError::Config(format!("{}: member {m} was not run", e.name)))
        })
        .collect()
}

fn load_views(rows: &[&IndexRow]) -> Result<Vec<(String, RgbImage)>, PipelineError> {
    rows.iter()
        .map(|r| {
            let s = Sample::load(&r.path, 0)?;
            Ok((format!("{}#{}", r.protein_id, r.pose), s.image))
        })
        .collect()
}

/// Out-of-fold protein scores for one representation, sorted by protein id.
fn cross_validate(
    rep: RepresentationType,
    views: &BTreeMap<&str, Vec<&IndexRow>>,
    labels: &BTreeMap<String, usize>,
    plan: &FoldPlan,
    spec: &NetworkSpec,
    config: &RunConfig,
) -> Result<ScoreMatrix, PipelineError> {
    let name = rep.name();
    let mut images: BTreeMap<&str, Vec<(String, RgbImage)>> = BTreeMap::new();
    for (pid, rows) in views {
        images.insert(pid, load_views(rows)?);
    }
    let missing = |pid: &str| PipelineError::Config(format!("{pid} has no {name} images"));
    let mut merged: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let out = &config.output_dir;
    for fold in 0..plan.k {
        let train_error = |source| PipelineError::Train {
            fold,
            representation: name.to_string(),
            source,
        };
        let mut samples = Vec::new();
        for pid in plan.train_ids(fold) {
            let v = images.get(pid.as_str()).ok_or_else(|| missing(&pid))?;
            samples.extend(v.iter().map(|(_, img)| Sample {
                image: img.clone(),
                label: labels[&pid],
            }));
        }
        let train_config = TrainConfig {
            seed: derive_seed(config.seed, name, fold),
            ..config.train.clone()
        };
        info!("{name} fold {}/{}: training on {} views", fold + 1, plan.k, samples.len());
        let outcome = train(&samples, spec, &train_config).map_err(train_error)?;
        drop(samples);
        write_checkpoint(&outcome.network, &out.join("models").join(format!("{name}_fold{fold}.toml")))
            .map_err(train_error)?;
        write_loss_history(&outcome.loss_history, &out.join("models").join(format!("{name}_fold{fold}_loss.csv")))
            .map_err(train_error)?;

        let mut view_ids = Vec::new();
        let mut test_images = Vec::new();
        let mut grouping = HashMap::new();
        for pid in plan.test_ids(fold) {
            let v = images.get(pid.as_str()).ok_or_else(|| missing(&pid))?;
            for (vid, img) in v {
                view_ids.push(vid.clone());
                test_images.push(img.clone());
                grouping.insert(vid.clone(), pid.clone());
            }
        }
        if view_ids.is_empty() {
            continue;
        }
        let scores = predict(&outcome.network, &test_images)
            .map_err(train_error)?
            .with_row_ids(view_ids)?;
        let proteins = crate::fusion::average_views(&scores, &grouping)?;
        for (i, id) in proteins.row_ids().iter().enumerate() {
            merged.insert(id.clone(), proteins.row(i).to_vec());
        }
    }
    let ids: Vec<String> = merged.keys().cloned().collect();
    let rows: Vec<Vec<f64>> = merged.into_values().collect();
    Ok(ScoreMatrix::from_rows(ids, spec.n_classes()?, &rows)?)
}

fn report_for(
    name: &str,
    scores: &ScoreMatrix,
    labels: &BTreeMap<String, usize>,
    plan: &FoldPlan,
    class_names: &[String],
    out: &Path,
) -> Result<EvalReport, PipelineError> {
    write_score_csv(&out.join("scores").join(format!("{name}.csv")), scores, labels, plan)?;
    let report = evaluate(scores, labels, plan)?;
    write_text(&out.join("reports").join(format!("{name}.txt")), &report.to_text(name, class_names))?;
    write_text(&out.join("reports").join(format!("{name}_confusion.csv")), &report.confusion_csv())?;
    info!("{name}: AUC {:.2}, accuracy {:.4}", report.auc, report.accuracy);
    Ok(report)
}

fn fmt_auc(auc: Option<f64>) -> String {
    auc.map_or_else(|| "-".into(), |a| format!("{a:.2}"))
}

fn summary_table(rows: &[SummaryRow]) -> String {
    let mut s = format!("{:<16} {:>8} {:>9}\n", "", "AUC", "accuracy");
    for r in rows {
        let _ = writeln!(s, "{:<16} {:>8} {:>9.4}", r.name, fmt_auc(r.auc), r.accuracy);
    }
    let _ = writeln!(s, "AUC: {AUC_METHOD}");
    s
}

/// Rows are view counts, columns names, cells AUC.
fn sweep_table(rows: &[SweepRow]) -> String {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.name.as_str()) {
            names.push(&r.name);
        }
    }
    let mut s = format!("{:<8}", "views");
    for n in &names {
        let _ = write!(s, " {n:>10}");
    }
    s.push('\n');
    let mut counts: Vec<usize> = rows.iter().map(|r| r.views).collect();
    counts.dedup();
    for c in counts {
        let _ = write!(s, "{c:<8}");
        for n in &names {
            let cell = rows
                .iter()
                .find(|r| r.views == c && r.name == *n)
                .map_or_else(|| "-".into(), |r| if r.auc.is_some() { fmt_auc(r.auc) } else { format!("{:.4}", r.accuracy) });
            let _ = write!(s, " {cell:>10}");
        }
        s.push('\n');
    }
    s
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, PipelineError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Sum-rule fusion of existing score files. Rows are aligned on the first
/// file's protein order; labels and folds come from it too.
pub fn cmd_fuse(inputs: &[PathBuf], name: &str, output: &Path) -> Result<EvalReport, PipelineError> {
    let files = inputs
        .iter()
        .map(|p| read_score_csv(p))
        .collect::<Result<Vec<_>, _>>()?;
    let first = files
        .first()
        .ok_or_else(|| PipelineError::Config("fuse needs at least one score file".into()))?;
    let ids = first.scores.row_ids().to_vec();
    let members = files.iter().map(|f| f.scores.select(&ids)).collect::<Result<Vec<_>, _>>()?;
    let spec = EnsembleSpec::new(name, inputs.iter().map(|p| p.display().to_string()))?;
    let fused = sum_rule_fuse(&members, &spec)?;
    let plan = first.plan();
    write_score_csv(output, &fused, &first.labels, &plan)?;
    Ok(evaluate(&fused, &first.labels, &plan)?)
}

/// Metrics recomputed from a score file alone.
pub fn cmd_evaluate(path: &Path) -> Result<EvalReport, PipelineError> {
    let f = read_score_csv(path)?;
    Ok(evaluate(&f.scores, &f.labels, &f.plan())?)
}

/// Errors with [`PipelineError::GradCheckFailed`] past the tolerance.
pub fn cmd_gradcheck(spec: &NetworkSpec, seed: u64) -> Result<GradCheckReport, PipelineError> {
    let report = gradient_check(spec, seed)?;
    if !report.passed() {
        return Err(PipelineError::GradCheckFailed(report.max_relative_error));
    }
    Ok(report)
}
