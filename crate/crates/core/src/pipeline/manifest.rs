use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;

pub const MANIFEST_HEADER: [&str; 4] = ["protein_id", "pdb_path", "class_label", "class_name"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub protein_id: String,
    pub pdb_path: PathBuf,
    pub class_label: usize,
    pub class_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub name: String,
    pub entries: Vec<ManifestEntry>,
}

fn invalid(msg: impl Into<String>) -> PipelineError {
    PipelineError::Manifest(msg.into())
}

impl DatasetManifest {
    /// Checks ids are unique, labels run 0..k with one name each, and there is at least one entry.
    pub fn new(name: &str, entries: Vec<ManifestEntry>) -> Result<Self, PipelineError> {
        if entries.is_empty() {
            return Err(invalid("manifest has no entries"));
        }
        let mut seen = HashSet::new();
        let mut names: BTreeMap<usize, &str> = BTreeMap::new();
        for e in &entries {
            if e.protein_id.is_empty() || e.protein_id.contains(['/', '\\', ',']) {
                return Err(invalid(format!("bad protein id {:?}", e.protein_id)));
            }
            if !seen.insert(e.protein_id.as_str()) {
                return Err(invalid(format!("duplicate protein id {}", e.protein_id)));
            }
            match names.insert(e.class_label, &e.class_name) {
                Some(prev) if prev != e.class_name => {
                    return Err(invalid(format!(
                        "class {} is named both {prev:?} and {:?}",
                        e.class_label, e.class_name
                    )))
                }
                _ => {}
            }
        }
        if let Some((gap, _)) = names.keys().enumerate().find(|(i, &l)| *i != l) {
            return Err(invalid(format!("class labels are not contiguous from 0 (missing {gap})")));
        }
        Ok(Self {
            name: name.to_string(),
            entries,
        })
    }

    /// Reads the CSV; relative PDB paths resolve against the manifest's directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let base = path.parent().unwrap_or(Path::new("."));
        let mut reader = csv::Reader::from_path(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header != MANIFEST_HEADER {
            return Err(invalid(format!(
                "{}: header must be {}, found {}",
                path.display(),
                MANIFEST_HEADER.join(","),
                header.join(",")
            )));
        }
        let mut entries = Vec::new();
        for row in reader.deserialize::<ManifestEntry>() {
            let mut e = row?;
            if e.pdb_path.is_relative() {
                e.pdb_path = base.join(&e.pdb_path);
            }
            if !e.pdb_path.is_file() {
                return Err(invalid(format!(
                    "{}: pdb file of {} not found",
                    e.pdb_path.display(),
                    e.protein_id
                )));
            }
            entries.push(e);
        }
        let name = path.file_stem().map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned());
        Self::new(&name, entries)
    }

    /// Writes the CSV with paths relative to the manifest when possible.
    pub fn write(&self, path: &Path) -> Result<(), PipelineError> {
        let base = path.parent().unwrap_or(Path::new("."));
        let mut w = csv::Writer::from_path(path)?;
        for e in &self.entries {
            let rel = e.pdb_path.strip_prefix(base).unwrap_or(&e.pdb_path);
            w.serialize(ManifestEntry {
                pdb_path: rel.to_path_buf(),
                ..e.clone()
            })?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn labels(&self) -> BTreeMap<String, usize> {
        self.entries.iter().map(|e| (e.protein_id.clone(), e.class_label)).collect()
    }

    pub fn n_classes(&self) -> usize {
        self.entries.iter().map(|e| e.class_label).max().map_or(0, |m| m + 1)
    }

    pub fn class_names(&self) -> Vec<String> {
        let mut names = vec![String::new(); self.n_classes()];
        for e in &self.entries {
            names[e.class_label].clone_from(&e.class_name);
        }
        names
    }

    /// SHA-256 over the entries and the bytes of every PDB file, in manifest order.
    pub fn content_hash(&self) -> Result<String, PipelineError> {
        let mut h = Sha256::new();
        for e in &self.entries {
            h.update(format!("{}\t{}\t{}\n", e.protein_id, e.class_label, e.class_name));
            let bytes = fs::read(&e.pdb_path).map_err(|source| PipelineError::io(&e.pdb_path, source))?;
            h.update(Sha256::digest(&bytes));
        }
        Ok(hex::encode(h.finalize()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, label: usize, name: &str) -> ManifestEntry {
        ManifestEntry {
            protein_id: id.into(),
            pdb_path: PathBuf::from(format!("{id}.pdb")),
            class_label: label,
            class_name: name.into(),
        }
    }

    #[test]
    fn validation() {
        assert!(DatasetManifest::new("d", vec![]).is_err());
        assert!(DatasetManifest::new("d", vec![entry("a", 0, "x"), entry("a", 1, "y")]).is_err());
        assert!(DatasetManifest::new("d", vec![entry("a", 0, "x"), entry("b", 2, "y")]).is_err());
        assert!(DatasetManifest::new("d", vec![entry("a", 0, "x"), entry("b", 0, "y")]).is_err());
        let m = DatasetManifest::new("d", vec![entry("a", 1, "y"), entry("b", 0, "x")]).unwrap();
        assert_eq!(m.n_classes(), 2);
        assert_eq!(m.class_names(), vec!["x", "y"]);
    }

    #[test]
    fn write_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let entries: Vec<ManifestEntry> = ["p1", "p2"]
            .iter()
            .enumerate()
            .map(|(i, id)| {
                let path = dir.path().join(format!("{id}.pdb"));
                fs::write(&path, "END\n").unwrap();
                ManifestEntry {
                    pdb_path: path,
                    ..entry(id, i, if i == 0 { "a" } else { "b" })
                }
            })
            .collect();
        let m = DatasetManifest::new("set", entries).unwrap();
        let path = dir.path().join("set.csv");
        m.write(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("protein_id,pdb_path,class_label,class_name\np1,p1.pdb,0,a\n"));
        let back = DatasetManifest::load(&path).unwrap();
        assert_eq!(back, m);
        let before = m.content_hash().unwrap();
        assert_eq!(back.content_hash().unwrap(), before);
        fs::write(dir.path().join("p2.pdb"), "END\nEND\n").unwrap();
        assert_ne!(back.content_hash().unwrap(), before);
    }

    #[test]
    fn missing_pdb_and_bad_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        fs::write(&path, "protein_id,pdb_path,class_label,class_name\nq,nope.pdb,0,a\n").unwrap();
        assert!(matches!(DatasetManifest::load(&path), Err(PipelineError::Manifest(_))));
        fs::write(&path, "id,path\n").unwrap();
        assert!(matches!(DatasetManifest::load(&path), Err(PipelineError::Manifest(_))));
    }
}
