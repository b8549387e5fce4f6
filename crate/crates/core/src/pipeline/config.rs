use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cnn::{NetworkSpec, Shape, TrainConfig};
use crate::fusion::EnsembleSpec;
use crate::multiview::{pose_grid, view_budget, RotationGrid, ViewPose, DEFAULT_MARGIN};
use crate::raster::RenderConfig;
use crate::repr::{RepresentationType, StyleConfig};

use super::PipelineError;

/// Name of the oracle row in summaries.
pub const ORACLE: &str = "ORACLE";

/// Sum-rule ensembles over the best stand-alone styles.
pub const STANDARD_ENSEMBLES: [(&str, &[RepresentationType]); 4] = {
    use RepresentationType::*;
    [
        ("TOP2", &[Ribbons, Strands]),
        ("TOP3", &[Ribbons, Rockets, Strands]),
        ("TOP3b", &[Ribbons, Cartoon, Strands]),
        ("TOP4", &[Ribbons, Rockets, Cartoon, Strands]),
    ]
};

/// Everything a run depends on besides the manifest. Written verbatim into
/// every run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub representations: Vec<RepresentationType>,
    /// Pose budget drawn by `view_budget`; when unset the grid is used.
    pub views: Option<usize>,
    /// View counts for a sweep; each gets its own sub-run.
    pub sweep: Vec<usize>,
    pub image_size: u32,
    pub supersample: bool,
    pub margin: f64,
    pub folds: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Image tree; defaults to `<output_dir>/renders`. Sweep sub-runs share the parent's.
    pub render_dir: Option<PathBuf>,
    pub grid: RotationGrid,
    pub train: TrainConfig,
    pub style: StyleConfig,
    /// Defaults to the desk-scale stack for the image size.
    pub network: Option<NetworkSpec>,
    /// Defaults to [`default_ensembles`].
    pub ensembles: Option<Vec<EnsembleSpec>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            representations: vec![RepresentationType::Ribbons, RepresentationType::Strands],
            views: None,
            sweep: Vec::new(),
            image_size: 64,
            supersample: false,
            margin: DEFAULT_MARGIN,
            folds: 10,
            seed: 0,
            output_dir: PathBuf::from("out"),
            render_dir: None,
            grid: RotationGrid::default(),
            train: TrainConfig::default(),
            style: StyleConfig::default(),
            network: None,
            ensembles: None,
        }
    }
}

fn config_err(msg: impl Into<String>) -> PipelineError {
    PipelineError::Config(msg.into())
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.representations.is_empty() {
            return Err(config_err("at least one representation is required"));
        }
        let mut seen = HashSet::new();
        if let Some(r) = self.representations.iter().find(|r| !seen.insert(**r)) {
            return Err(config_err(format!("representation {r} listed twice")));
        }
        if self.folds < 2 {
            return Err(config_err("folds must be at least 2"));
        }
        self.render_config()
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        self.train.validate()?;
        self.style.validate().map_err(|e| config_err(e.to_string()))?;
        self.poses()?;
        for &n in &self.sweep {
            view_budget(n, self.seed).map_err(|e| config_err(e.to_string()))?;
        }
        if let Some(spec) = &self.network {
            let want = Shape::new(3, self.image_size as usize, self.image_size as usize);
            if spec.input != want {
                return Err(config_err(format!(
                    "network input {:?} does not match {}x{} RGB images",
                    spec.input, self.image_size, self.image_size
                )));
            }
            spec.shapes()?;
        }
        for e in self.ensembles.iter().flatten() {
            e.validate()?;
            for m in &e.members {
                let rep: RepresentationType = m.parse().map_err(|_| config_err(format!("{}: unknown member {m}", e.name)))?;
                if !self.representations.contains(&rep) {
                    return Err(config_err(format!("{}: member {m} is not a selected representation", e.name)));
                }
            }
        }
        Ok(())
    }

    pub fn poses(&self) -> Result<Vec<ViewPose>, PipelineError> {
        let r = match self.views {
            Some(n) => view_budget(n, self.seed),
            None => pose_grid(&self.grid),
        };
        r.map_err(|e| config_err(e.to_string()))
    }

    pub fn render_root(&self) -> PathBuf {
        self.render_dir.clone().unwrap_or_else(|| self.output_dir.join("renders"))
    }

    pub fn render_config(&self) -> RenderConfig {
        RenderConfig {
            supersample: self.supersample,
            ..RenderConfig::with_size(self.image_size)
        }
    }

    pub fn network_spec(&self, n_classes: usize) -> NetworkSpec {
        self.network.clone().unwrap_or_else(|| {
            let s = self.image_size as usize;
            NetworkSpec::desk_default(Shape::new(3, s, s), n_classes)
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), PipelineError> {
        fs::write(path, self.to_toml()).map_err(|e| PipelineError::io(path, e))
    }
}

/// Standard ensembles whose members were all run. When TOP2 does not fit, the
/// two best stand-alone styles in `ranking` (best first) form it instead.
pub fn default_ensembles(reps: &[RepresentationType], ranking: &[RepresentationType]) -> Vec<EnsembleSpec> {
    let mut out: Vec<EnsembleSpec> = STANDARD_ENSEMBLES
        .iter()
        .filter(|(_, members)| members.iter().all(|m| reps.contains(m)))
        .map(|(name, members)| EnsembleSpec {
            name: (*name).into(),
            members: members.iter().map(|m| m.name().to_string()).collect(),
        })
        .collect();
    if reps.len() >= 2 && !out.iter().any(|e| e.name == "TOP2") && ranking.len() >= 2 {
        out.insert(
            0,
            EnsembleSpec {
                name: "TOP2".into(),
                members: ranking[..2].iter().map(|m| m.name().to_string()).collect(),
            },
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use RepresentationType::*;

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig {
            views: Some(30),
            sweep: vec![30, 125],
            ensembles: Some(vec![EnsembleSpec {
                name: "pair".into(),
                members: vec!["ribbons".into(), "strands".into()],
            }]),
            ..RunConfig::default()
        };
        c.network = Some(c.network_spec(2));
        c.validate().unwrap();
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
        assert!(RunConfig::from_toml("colour = 1").is_err());
    }

    #[test]
    fn validation_catches_mistakes() {
        let bad = |c: RunConfig| c.validate().is_err();
        assert!(bad(RunConfig {
            representations: vec![],
            ..RunConfig::default()
        }));
        assert!(bad(RunConfig {
            representations: vec![Ribbons, Ribbons],
            ..RunConfig::default()
        }));
        assert!(bad(RunConfig {
            folds: 1,
            ..RunConfig::default()
        }));
        assert!(bad(RunConfig {
            image_size: 8,
            ..RunConfig::default()
        }));
        assert!(bad(RunConfig {
            sweep: vec![500],
            ..RunConfig::default()
        }));
        assert!(bad(RunConfig {
            ensembles: Some(vec![EnsembleSpec {
                name: "x".into(),
                members: vec!["cartoon".into()],
            }]),
            ..RunConfig::default()
        }));
        RunConfig::default().validate().unwrap();
        assert_eq!(RunConfig::default().poses().unwrap().len(), 125);
    }

    #[test]
    fn ensembles_follow_available_members() {
        let names = |v: Vec<EnsembleSpec>| v.into_iter().map(|e| e.name).collect::<Vec<_>>();
        assert_eq!(names(default_ensembles(&[Ribbons, Strands], &[Strands, Ribbons])), ["TOP2"]);
        assert_eq!(
            names(default_ensembles(&[Ribbons, Rockets, Cartoon, Strands], &[])),
            ["TOP2", "TOP3", "TOP3b", "TOP4"]
        );
        let fallback = default_ensembles(&[Trace, Backbone, Spacefill], &[Spacefill, Trace, Backbone]);
        assert_eq!(fallback[0].members, ["spacefill", "trace"]);
        assert!(default_ensembles(&[Trace], &[Trace]).is_empty());
    }
}
