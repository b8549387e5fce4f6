//! Two-class synthetic dataset: helix bundles versus sheet barrels.
//!
//! Both classes are alpha-carbon traces dressed with N, C, O and CB atoms,
//! randomly sized, rotated, shifted and jittered, and written as PDB files
//! with HELIX/SHEET records. File names carry no class information.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;

use nalgebra::UnitQuaternion;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::pdb::{Atom, ProteinStructure, SecondaryStructureSpan, SsKind};
use crate::Vec3;

use super::manifest::{DatasetManifest, ManifestEntry};
use super::PipelineError;

pub const SYNTHETIC_CLASSES: [&str; 2] = ["helix_bundle", "sheet_barrel"];

const MAX_STEP: f64 = 3.9;
const HELIX_RADIUS: f64 = 2.3;
const HELIX_RISE: f64 = 1.5;
const HELIX_TWIST: f64 = 100.0;
const STRAND_RISE: f64 = 3.3;
const STRAND_PLEAT: f64 = 0.9;
const STRAND_SPACING: f64 = 4.8;

const HELIX_RESIDUES: &[&str] = &["ALA", "LEU", "GLU", "LYS", "MET", "GLN", "ARG"];
const SHEET_RESIDUES: &[&str] = &["VAL", "ILE", "THR", "TYR", "PHE", "TRP"];
const LOOP_RESIDUES: &[&str] = &["GLY", "PRO", "SER", "ASN", "ASP"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub per_class: usize,
    pub seed: u64,
    /// Standard deviation of per-atom jitter, angstroms.
    pub noise: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            per_class: 20,
            seed: 0,
            noise: 0.2,
        }
    }
}

struct Residue {
    ca: Vec3,
    ss: Option<SsKind>,
    name: &'static str,
}

#[derive(Default)]
struct Trace {
    residues: Vec<Residue>,
}

impl Trace {
    fn push_element(&mut self, points: Vec<Vec3>, ss: SsKind, rng: &mut ChaCha8Rng) {
        let pool = if ss == SsKind::Helix { HELIX_RESIDUES } else { SHEET_RESIDUES };
        if let Some(last) = self.residues.last().map(|r| r.ca) {
            self.bridge(last, points[0], rng);
        }
        for ca in points {
            self.residues.push(Residue {
                ca,
                ss: Some(ss),
                name: pool.choose(rng).expect("non-empty"),
            });
        }
    }

    /// Loop residues between two elements, bulging away from the origin's z axis.
    fn bridge(&mut self, from: Vec3, to: Vec3, rng: &mut ChaCha8Rng) {
        let mid = (from + to) * 0.5;
        let radial = Vec3::new(mid.x, mid.y, 0.0);
        let bulge = if radial.norm() > 1e-6 { radial.normalize() } else { Vec3::x() } * 2.0;
        let mut n = ((to - from).norm() / 3.0).ceil() as usize;
        loop {
            let pts: Vec<Vec3> = (1..n)
                .map(|k| {
                    let t = k as f64 / n as f64;
                    from + (to - from) * t + bulge * (PI * t).sin()
                })
                .collect();
            let ok = std::iter::once(from)
                .chain(pts.iter().copied())
                .zip(pts.iter().copied().chain(std::iter::once(to)))
                .all(|(a, b)| (b - a).norm() <= MAX_STEP);
            if ok {
                for ca in pts {
                    self.residues.push(Residue {
                        ca,
                        ss: None,
                        name: LOOP_RESIDUES.choose(rng).expect("non-empty"),
                    });
                }
                return;
            }
            n += 1;
        }
    }
}

fn helix_bundle(rng: &mut ChaCha8Rng) -> Trace {
    let k = rng.gen_range(3..=5);
    let ring = 10.0 / (2.0 * (PI / k as f64).sin());
    let mut trace = Trace::default();
    for h in 0..k {
        let len = rng.gen_range(14..=20);
        let theta = TAU * h as f64 / k as f64;
        let base = Vec3::new(ring * theta.cos(), ring * theta.sin(), 0.0);
        let up = h % 2 == 0;
        let phase = rng.gen_range(0.0..TAU);
        let top = HELIX_RISE * (len - 1) as f64;
        let pts = (0..len)
            .map(|i| {
                let a = phase + (i as f64 * HELIX_TWIST).to_radians();
                let z = if up { HELIX_RISE * i as f64 } else { top - HELIX_RISE * i as f64 };
                base + Vec3::new(HELIX_RADIUS * a.cos(), HELIX_RADIUS * a.sin(), z)
            })
            .collect();
        trace.push_element(pts, SsKind::Helix, rng);
    }
    trace
}

fn sheet_barrel(rng: &mut ChaCha8Rng) -> Trace {
    let n = rng.gen_range(6..=10);
    let radius = STRAND_SPACING * n as f64 / TAU;
    let mut trace = Trace::default();
    for s in 0..n {
        let len = rng.gen_range(8..=12);
        let theta = TAU * s as f64 / n as f64;
        let dir = Vec3::new(theta.cos(), theta.sin(), 0.0);
        let up = s % 2 == 0;
        let top = STRAND_RISE * (len - 1) as f64;
        let pts = (0..len)
            .map(|i| {
                let r = radius + if i % 2 == 0 { STRAND_PLEAT } else { -STRAND_PLEAT };
                let z = if up { STRAND_RISE * i as f64 } else { top - STRAND_RISE * i as f64 };
                dir * r + Vec3::new(0.0, 0.0, z)
            })
            .collect();
        trace.push_element(pts, SsKind::Sheet, rng);
    }
    trace
}

fn unit(v: Vec3, fallback: Vec3) -> Vec3 {
    if v.norm() > 1e-9 {
        v.normalize()
    } else {
        fallback
    }
}

fn perpendicular(f: &Vec3) -> Vec3 {
    let e = if f.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    f.cross(&e).normalize()
}

fn atom(serial: usize, name: &str, element: &str, res: &Residue, seq: usize, position: Vec3) -> Atom {
    Atom {
        serial: serial as i64,
        name: format!(" {name:<3}"),
        element: element.into(),
        residue_name: res.name.into(),
        residue_seq: seq as i32,
        chain_id: 'A',
        position,
        is_hetero: false,
    }
}

/// Full-atom backbone (plus CB) around the trace, ready for rigid placement.
fn dress(trace: &Trace) -> (Vec<Atom>, Vec<SecondaryStructureSpan>) {
    let r = &trace.residues;
    let n = r.len();
    let mut atoms = Vec::with_capacity(5 * n);
    for (i, res) in r.iter().enumerate() {
        let seq = i + 1;
        let fwd = if i + 1 < n { r[i + 1].ca - res.ca } else { res.ca - r[i - 1].ca };
        let back = if i > 0 { res.ca - r[i - 1].ca } else { fwd };
        let f = unit(fwd, Vec3::z());
        let bend = if i > 0 && i + 1 < n {
            res.ca - (r[i - 1].ca + r[i + 1].ca) * 0.5
        } else {
            Vec3::zeros()
        };
        let p = unit(bend - f * bend.dot(&f), perpendicular(&f));
        let side = f.cross(&p) * if i % 2 == 0 { 1.0 } else { -1.0 };
        let c = res.ca + fwd * 0.36;
        atoms.push(atom(atoms.len() + 1, "N", "N", res, seq, res.ca - back * 0.36));
        atoms.push(atom(atoms.len() + 1, "CA", "C", res, seq, res.ca));
        atoms.push(atom(atoms.len() + 1, "C", "C", res, seq, c));
        atoms.push(atom(atoms.len() + 1, "O", "O", res, seq, c + side * 1.23));
        if res.name != "GLY" {
            atoms.push(atom(atoms.len() + 1, "CB", "C", res, seq, res.ca + unit(p - side * 0.5, p) * 1.53));
        }
    }
    let mut spans = Vec::new();
    let mut i = 0;
    while i < n {
        match r[i].ss {
            Some(kind) => {
                let mut e = i;
                while e + 1 < n && r[e + 1].ss == Some(kind) && !element_break(r, e) {
                    e += 1;
                }
                spans.push(SecondaryStructureSpan {
                    kind,
                    chain_id: 'A',
                    start_residue_seq: i as i32 + 1,
                    end_residue_seq: e as i32 + 1,
                });
                i = e + 1;
            }
            None => i += 1,
        }
    }
    (atoms, spans)
}

// Adjacent residues of the same kind belong to different elements when far apart.
fn element_break(r: &[Residue], e: usize) -> bool {
    (r[e + 1].ca - r[e].ca).norm() > MAX_STEP
}

fn random_rotation(rng: &mut ChaCha8Rng) -> UnitQuaternion<f64> {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let v = nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]);
    if v.norm() < 1e-9 {
        return UnitQuaternion::identity();
    }
    UnitQuaternion::new_normalize(v)
}

/// One structure of class `label` (0 helix bundle, 1 sheet barrel).
pub fn synthetic_structure(id: &str, label: usize, noise: f64, rng: &mut ChaCha8Rng) -> ProteinStructure {
    let trace = if label == 0 { helix_bundle(rng) } else { sheet_barrel(rng) };
    let (mut atoms, spans) = dress(&trace);
    let centroid = atoms.iter().fold(Vec3::zeros(), |acc, a| acc + a.position) / atoms.len() as f64;
    let rot = random_rotation(rng);
    let shift = Vec3::from_fn(|_, _| rng.gen_range(-20.0..20.0));
    let jitter = Normal::new(0.0, noise.max(0.0)).expect("finite sigma");
    for a in &mut atoms {
        // alpha carbons move less so the trace never breaks
        let k = if a.is_alpha_carbon() { 0.25 } else { 1.0 };
        let j = Vec3::from_fn(|_, _| jitter.sample(rng)) * k;
        a.position = rot * (a.position - centroid) + shift + j;
    }
    ProteinStructure::from_parts(id, atoms, spans).expect("generated structures have atoms")
}

/// Writes `per_class` structures of each class plus `manifest.csv` into `dir`.
pub fn write_synthetic_dataset(dir: &Path, config: &SyntheticConfig) -> Result<DatasetManifest, PipelineError> {
    if config.per_class == 0 {
        return Err(PipelineError::Manifest("synthetic dataset needs at least one protein per class".into()));
    }
    let pdb_dir = dir.join("pdb");
    fs::create_dir_all(&pdb_dir).map_err(|e| PipelineError::io(&pdb_dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut labels: Vec<usize> = (0..2 * config.per_class).map(|i| i % 2).collect();
    labels.shuffle(&mut rng);
    let mut entries = Vec::with_capacity(labels.len());
    for (i, &label) in labels.iter().enumerate() {
        let id = format!("syn{:03}", i + 1);
        let s = synthetic_structure(&id, label, config.noise, &mut rng);
        let path = pdb_dir.join(format!("{id}.pdb"));
        fs::write(&path, s.to_pdb()).map_err(|e| PipelineError::io(&path, e))?;
        entries.push(ManifestEntry {
            protein_id: id,
            pdb_path: path,
            class_label: label,
            class_name: SYNTHETIC_CLASSES[label].into(),
        });
    }
    let manifest = DatasetManifest::new("synthetic", entries)?;
    manifest.write(&dir.join("manifest.csv"))?;
    Ok(manifest)
}
