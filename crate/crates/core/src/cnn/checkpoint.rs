//! Model checkpoints are TOML documents:
//!
//! ```toml
//! format = "protview-checkpoint"
//! version = 1
//! tensors = [[...], [...]]   # parameter tensors in Network::parameters() order
//!
//! [spec]
//! input = { channels = 3, height = 64, width = 64 }
//! layers = [{ type = "conv", kernel = 3, filters = 8, stride = 1, pad = 1 }, ...]
//! ```
//!
//! Floats are written in shortest round-trip form, so reading a checkpoint
//! back gives bit-identical parameters.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CnnError, Network, NetworkSpec};

pub const CHECKPOINT_FORMAT: &str = "protview-checkpoint";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    tensors: Vec<Vec<f64>>,
    spec: NetworkSpec,
}

pub fn write_checkpoint(network: &Network, path: &Path) -> Result<(), CnnError> {
    let doc = Checkpoint {
        format: CHECKPOINT_FORMAT.to_string(),
        version: VERSION,
        tensors: network.parameters().iter().map(|t| t.to_vec()).collect(),
        spec: network.spec().clone(),
    };
    let text = toml::to_string(&doc).map_err(|e| CnnError::Checkpoint(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Network, CnnError> {
    let text = fs::read_to_string(path)?;
    let doc: Checkpoint = toml::from_str(&text).map_err(|e| CnnError::Checkpoint(e.to_string()))?;
    if doc.format != CHECKPOINT_FORMAT || doc.version != VERSION {
        return Err(CnnError::Checkpoint(format!(
            "unsupported checkpoint {} v{}",
            doc.format, doc.version
        )));
    }
    let mut network = Network::zeros(&doc.spec)?;
    let params = network.parameters_mut();
    if params.len() != doc.tensors.len() {
        return Err(CnnError::Checkpoint(format!(
            "spec has {} parameter tensors, file has {}",
            params.len(),
            doc.tensors.len()
        )));
    }
    for (dst, src) in params.into_iter().zip(doc.tensors) {
        if dst.len() != src.len() {
            return Err(CnnError::Checkpoint("parameter tensor length mismatch".into()));
        }
        *dst = src;
    }
    Ok(network)
}

/// Writes `epoch,loss` rows, epochs counted from 1.
pub fn write_loss_history(history: &[f64], path: &Path) -> Result<(), CnnError> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "epoch,loss")?;
    for (i, loss) in history.iter().enumerate() {
        writeln!(f, "{},{}", i + 1, loss)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnn::Shape;

    #[test]
    fn checkpoint_round_trip_is_exact() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 4);
        let net = Network::init(&spec, 77).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.toml");
        write_checkpoint(&net, &path).unwrap();
        let back = read_checkpoint(&path).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn rejects_foreign_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 2);
        let doc = Checkpoint {
            format: "other".into(),
            version: 1,
            tensors: vec![],
            spec,
        };
        fs::write(&path, toml::to_string(&doc).unwrap()).unwrap();
        assert!(matches!(read_checkpoint(&path), Err(CnnError::Checkpoint(_))));
    }

    #[test]
    fn loss_history_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("loss.csv");
        write_loss_history(&[0.5, 0.25], &path).unwrap();
        assert_eq!(fs::read_to_string(path).unwrap(), "epoch,loss\n1,0.5\n2,0.25\n");
    }
}
