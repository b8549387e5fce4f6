use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use image::RgbImage;
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::multiview::{fit_pose_camera, pose_scene, ViewPose};
use crate::pdb::{parse_pdb, ProteinStructure};
use crate::raster::{render, write_image, RenderConfig};
use crate::repr::{build_scene, RepresentationType, StyleConfig};

use super::config::RunConfig;
use super::manifest::{DatasetManifest, ManifestEntry};
use super::PipelineError;

pub const INDEX_FILE: &str = "index.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const HASH_FILE: &str = "hashes.csv";
// bump when rendering output changes for identical inputs
const RENDER_VERSION: &str = "protview-render-1";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexRow {
    pub protein_id: String,
    pub representation: String,
    pub pose: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct FailureRow {
    protein_id: String,
    representation: String,
    error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct HashRow {
    path: PathBuf,
    sha256: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RenderSummary {
    pub rendered: usize,
    pub skipped: usize,
    pub rows: Vec<IndexRow>,
    pub failures: Vec<(String, RepresentationType, String)>,
}

pub fn index_path(output_dir: &Path) -> PathBuf {
    output_dir.join(INDEX_FILE)
}

/// Every view of one structure in one style, in pose order, all through one camera.
pub fn render_protein_views(
    structure: &ProteinStructure,
    representation: RepresentationType,
    style: &StyleConfig,
    poses: &[ViewPose],
    config: &RenderConfig,
    margin: f64,
) -> Result<Vec<RgbImage>, PipelineError> {
    let scene = build_scene(structure, representation, style).map_err(|source| PipelineError::Repr {
        protein: structure.id.clone(),
        representation,
        source,
    })?;
    let center = structure.centroid();
    let context = || format!("{} ({representation})", structure.id);
    let camera = fit_pose_camera(&scene, &center, config.image_size, margin)
        .map_err(|source| PipelineError::Multiview { context: context(), source })?;
    poses
        .iter()
        .map(|pose| {
            render(&pose_scene(&scene, pose, &center), &camera, config)
                .map_err(|source| PipelineError::Raster { context: context(), source })
        })
        .collect()
}

fn image_file(root: &Path, protein_id: &str, rep: RepresentationType, pose: &ViewPose) -> PathBuf {
    root.join(rep.name()).join(format!("{protein_id}_{}_{}.png", rep.name(), pose.name()))
}

/// Hash of everything that determines the images of one (protein, style) pair.
fn job_hash(pdb: &[u8], rep: RepresentationType, config: &RunConfig) -> Sha256 {
    let mut h = Sha256::new();
    h.update(RENDER_VERSION);
    h.update(Sha256::digest(pdb));
    h.update(rep.name());
    h.update(toml::to_string(&config.style).expect("style serializes"));
    h.update(toml::to_string(&config.render_config()).expect("render config serializes"));
    h.update(config.margin.to_le_bytes());
    h
}

struct JobResult {
    rows: Vec<IndexRow>,
    hashes: Vec<(PathBuf, String)>,
    rendered: usize,
}

fn render_job(
    entry: &ManifestEntry,
    rep: RepresentationType,
    config: &RunConfig,
    poses: &[ViewPose],
    root: &Path,
    known: &BTreeMap<PathBuf, String>,
) -> Result<JobResult, PipelineError> {
    let pdb = fs::read(&entry.pdb_path).map_err(|e| PipelineError::io(&entry.pdb_path, e))?;
    let base = job_hash(&pdb, rep, config);
    let targets: Vec<(PathBuf, String)> = poses
        .iter()
        .map(|p| {
            let mut h = base.clone();
            h.update(p.name());
            (image_file(root, &entry.protein_id, rep, p), hex::encode(h.finalize()))
        })
        .collect();
    let stale: Vec<usize> = (0..poses.len())
        .filter(|&i| {
            let (path, hash) = &targets[i];
            known.get(path) != Some(hash) || !path.is_file()
        })
        .collect();
    if !stale.is_empty() {
        let text = String::from_utf8_lossy(&pdb);
        let structure = parse_pdb(&text, &entry.protein_id).map_err(|source| PipelineError::Pdb {
            protein: entry.protein_id.clone(),
            source,
        })?;
        let wanted: Vec<ViewPose> = stale.iter().map(|&i| poses[i]).collect();
        let images =
            render_protein_views(&structure, rep, &config.style, &wanted, &config.render_config(), config.margin)?;
        let dir = root.join(rep.name());
        fs::create_dir_all(&dir).map_err(|e| PipelineError::io(&dir, e))?;
        for (&i, img) in stale.iter().zip(&images) {
            write_image(img, &targets[i].0).map_err(|source| PipelineError::Raster {
                context: entry.protein_id.clone(),
                source,
            })?;
        }
    }
    let rows = poses
        .iter()
        .zip(&targets)
        .map(|(p, (path, _))| IndexRow {
            protein_id: entry.protein_id.clone(),
            representation: rep.name().to_string(),
            pose: p.name(),
            path: path.clone(),
        })
        .collect();
    Ok(JobResult {
        rows,
        hashes: targets,
        rendered: stale.len(),
    })
}

fn read_hashes(path: &Path) -> BTreeMap<PathBuf, String> {
    let Ok(mut r) = csv::Reader::from_path(path) else {
        return BTreeMap::new();
    };
    r.deserialize::<HashRow>()
        .filter_map(Result::ok)
        .map(|h| (h.path, h.sha256))
        .collect()
}

/// Renders every protein x representation x pose that is missing or stale.
///
/// Writes `index.csv` and `failures.csv` into the output directory; image
/// files and their input hashes live under `RunConfig::render_root`.
pub fn cmd_render(manifest: &DatasetManifest, config: &RunConfig) -> Result<RenderSummary, PipelineError> {
    config.validate()?;
    let poses = config.poses()?;
    let root = config.render_root();
    fs::create_dir_all(&root).map_err(|e| PipelineError::io(&root, e))?;
    fs::create_dir_all(&config.output_dir).map_err(|e| PipelineError::io(&config.output_dir, e))?;
    let hash_path = root.join(HASH_FILE);
    let mut known = read_hashes(&hash_path);

    let jobs: Vec<(&ManifestEntry, RepresentationType)> = manifest
        .entries
        .iter()
        .flat_map(|e| config.representations.iter().map(move |&r| (e, r)))
        .collect();
    let results: Vec<Result<JobResult, PipelineError>> = jobs
        .par_iter()
        .map(|(e, r)| render_job(e, *r, config, &poses, &root, &known))
        .collect();

    let mut summary = RenderSummary::default();
    for ((entry, rep), result) in jobs.iter().zip(results) {
        match result {
            Ok(job) => {
                summary.rendered += job.rendered;
                summary.skipped += job.rows.len() - job.rendered;
                summary.rows.extend(job.rows);
                known.extend(job.hashes);
            }
            Err(e) => {
                warn!("render failed for {} ({rep}): {e}", entry.protein_id);
                summary.failures.push((entry.protein_id.clone(), *rep, e.to_string()));
            }
        }
    }

    let mut w = csv::Writer::from_path(&hash_path)?;
    for (path, sha256) in &known {
        w.serialize(HashRow {
            path: path.clone(),
            sha256: sha256.clone(),
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    let mut w = csv::Writer::from_path(index_path(&config.output_dir))?;
    for row in &summary.rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    let failures_path = config.output_dir.join(FAILURES_FILE);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&failures_path)?;
    w.write_record(["protein_id", "representation", "error"])?;
    for (protein_id, rep, error) in &summary.failures {
        w.serialize(FailureRow {
            protein_id: protein_id.clone(),
            representation: rep.name().to_string(),
            error: error.clone(),
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    info!(
        "rendered {} image(s), {} up to date, {} failure(s)",
        summary.rendered,
        summary.skipped,
        summary.failures.len()
    );
    if !summary.failures.is_empty() {
        return Err(PipelineError::RenderFailures {
            count: summary.failures.len(),
            path: failures_path.display().to_string(),
        });
    }
    Ok(summary)
}

pub fn load_render_index(path: &Path) -> Result<Vec<IndexRow>, PipelineError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
