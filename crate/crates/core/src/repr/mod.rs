//! Scenes of colored primitives for the 13 representation styles.

mod build;
mod spline;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::palette::{Palette, Rgb};
use crate::pdb::{Atom, ProteinStructure, SecondaryStructure};
use crate::Vec3;

pub use build::{backbone_runs, build_scene, BackboneRun, CA_BREAK_DISTANCE};
pub use spline::{ribbon_frames, spline_through, Frame};

#[derive(Debug, Error, PartialEq)]
pub enum ReprError {
    #[error("no renderable geometry for {0}")]
    EmptyScene(RepresentationType),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid style: {0}")]
    InvalidStyle(String),
    #[error("unknown representation {0:?}")]
    UnknownRepresentation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationType {
    BallAndStick,
    Spacefill,
    Wireframe,
    Backbone,
    Cartoon,
    Ribbons,
    Rockets,
    Strands,
    Trace,
    Amino,
    Chain,
    Charge,
    Structure,
}

impl RepresentationType {
    pub const ALL: [RepresentationType; 13] = [
        Self::BallAndStick,
        Self::Spacefill,
        Self::Wireframe,
        Self::Backbone,
        Self::Cartoon,
        Self::Ribbons,
        Self::Rockets,
        Self::Strands,
        Self::Trace,
        Self::Amino,
        Self::Chain,
        Self::Charge,
        Self::Structure,
    ];

    /// Lower-case token used in file names and config files.
    pub fn name(self) -> &'static str {
        match self {
            Self::BallAndStick => "ball_and_stick",
            Self::Spacefill => "spacefill",
            Self::Wireframe => "wireframe",
            Self::Backbone => "backbone",
            Self::Cartoon => "cartoon",
            Self::Ribbons => "ribbons",
            Self::Rockets => "rockets",
            Self::Strands => "strands",
            Self::Trace => "trace",
            Self::Amino => "amino",
            Self::Chain => "chain",
            Self::Charge => "charge",
            Self::Structure => "structure",
        }
    }

    /// Upper-case label for report tables.
    pub fn label(self) -> &'static str {
        match self {
            Self::BallAndStick => "BALL&STICK",
            Self::Spacefill => "SPACEFILL",
            Self::Wireframe => "WIREFRAME",
            Self::Backbone => "BACKBONE",
            Self::Cartoon => "CARTOON",
            Self::Ribbons => "RIBBONS",
            Self::Rockets => "ROCKETS",
            Self::Strands => "STRANDS",
            Self::Trace => "TRACE",
            Self::Amino => "AMINO",
            Self::Chain => "CHAIN",
            Self::Charge => "CHARGE",
            Self::Structure => "STRUCTURE",
        }
    }

    /// Atom-level scheme; backbone-family styles use `StyleConfig::backbone_scheme`.
    pub fn color_scheme(self) -> ColorScheme {
        match self {
            Self::Amino => ColorScheme::Amino,
            Self::Chain => ColorScheme::Chain,
            Self::Charge => ColorScheme::Charge,
            Self::Structure => ColorScheme::Structure,
            _ => ColorScheme::Cpk,
        }
    }

    /// Styles drawn from the alpha-carbon trace rather than from atoms and bonds.
    pub fn is_backbone_family(self) -> bool {
        matches!(
            self,
            Self::Backbone | Self::Cartoon | Self::Ribbons | Self::Rockets | Self::Strands | Self::Trace
        )
    }
}

impl fmt::Display for RepresentationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RepresentationType {
    type Err = ReprError;

    /// Accepts the file-name token or the report label, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Self::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(t) || r.label().eq_ignore_ascii_case(t))
            .ok_or_else(|| ReprError::UnknownRepresentation(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorScheme {
    Cpk,
    Amino,
    Chain,
    Charge,
    Structure,
}

impl ColorScheme {
    pub const ALL: [ColorScheme; 5] = [Self::Cpk, Self::Amino, Self::Chain, Self::Charge, Self::Structure];
}

/// Thickness settings. `*_units` are in 1/250 angstrom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StyleConfig {
    pub spacefill_units: f64,
    pub wireframe_units: f64,
    pub backbone_units: f64,
    pub strands_units: f64,
    pub trace_units: f64,
    pub unit_to_angstrom: f64,
    pub ballstick_sphere_fraction: f64,
    pub ballstick_stick_radius: f64,
    pub ribbon_width: f64,
    pub strands_thread_count: usize,
    /// Cap spacefill radii at `spacefill_units`; off by default.
    pub spacefill_cap: bool,
    pub strands_thread_radius: f64,
    pub rocket_radius: f64,
    pub coil_radius: f64,
    pub sheet_width_factor: f64,
    pub spline_samples: usize,
    pub backbone_scheme: ColorScheme,
}

impl Default for StyleConfig {
    fn default() -> Self {
        Self {
            spacefill_units: 200.0,
            wireframe_units: 60.0,
            backbone_units: 150.0,
            strands_units: 300.0,
            trace_units: 300.0,
            unit_to_angstrom: 1.0 / 250.0,
            ballstick_sphere_fraction: 0.25,
            ballstick_stick_radius: 0.15,
            ribbon_width: 1.5,
            strands_thread_count: 5,
            spacefill_cap: false,
            strands_thread_radius: 0.3,
            rocket_radius: 1.25,
            coil_radius: 0.3,
            sheet_width_factor: 2.0,
            spline_samples: 4,
            backbone_scheme: ColorScheme::Cpk,
        }
    }
}

impl StyleConfig {
    pub fn validate(&self) -> Result<(), ReprError> {
        let positive = [
            ("spacefill_units", self.spacefill_units),
            ("wireframe_units", self.wireframe_units),
            ("backbone_units", self.backbone_units),
            ("strands_units", self.strands_units),
            ("trace_units", self.trace_units),
            ("unit_to_angstrom", self.unit_to_angstrom),
            ("ballstick_sphere_fraction", self.ballstick_sphere_fraction),
            ("ballstick_stick_radius", self.ballstick_stick_radius),
            ("ribbon_width", self.ribbon_width),
            ("strands_thread_radius", self.strands_thread_radius),
            ("rocket_radius", self.rocket_radius),
            ("coil_radius", self.coil_radius),
            ("sheet_width_factor", self.sheet_width_factor),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ReprError::InvalidStyle(format!("{name} must be positive, got {v}")));
            }
        }
        if self.strands_thread_count == 0 {
            return Err(ReprError::InvalidStyle("strands_thread_count must be positive".into()));
        }
        if self.spline_samples < 2 {
            return Err(ReprError::InvalidStyle("spline_samples must be at least 2".into()));
        }
        Ok(())
    }

    pub fn angstrom(&self, units: f64) -> f64 {
        units * self.unit_to_angstrom
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScenePrimitive {
    Sphere {
        center: Vec3,
        radius: f64,
        color: Rgb,
    },
    Cylinder {
        end_a: Vec3,
        end_b: Vec3,
        radius: f64,
        color: Rgb,
        capped: bool,
    },
    TriMesh {
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
        colors: Vec<Rgb>,
    },
}

impl ScenePrimitive {
    /// Applies `f` to every position; radii and colors are kept.
    pub fn map_points(&self, f: impl Fn(&Vec3) -> Vec3) -> Self {
        match self {
            Self::Sphere { center, radius, color } => Self::Sphere {
                center: f(center),
                radius: *radius,
                color: *color,
            },
            Self::Cylinder {
                end_a,
                end_b,
                radius,
                color,
                capped,
            } => Self::Cylinder {
                end_a: f(end_a),
                end_b: f(end_b),
                radius: *radius,
                color: *color,
                capped: *capped,
            },
            Self::TriMesh {
                vertices,
                triangles,
                colors,
            } => Self::TriMesh {
                vertices: vertices.iter().map(f).collect(),
                triangles: triangles.clone(),
                colors: colors.clone(),
            },
        }
    }

    /// Axis-aligned bounds including radii.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let pad = |p: &Vec3, r: f64| (p.add_scalar(-r), p.add_scalar(r));
        match self {
            Self::Sphere { center, radius, .. } => pad(center, *radius),
            Self::Cylinder {
                end_a, end_b, radius, ..
            } => {
                let (a0, a1) = pad(end_a, *radius);
                let (b0, b1) = pad(end_b, *radius);
                (a0.inf(&b0), a1.sup(&b1))
            }
            Self::TriMesh { vertices, .. } => {
                let mut lo = Vec3::repeat(f64::INFINITY);
                let mut hi = Vec3::repeat(f64::NEG_INFINITY);
                for v in vertices {
                    lo = lo.inf(v);
                    hi = hi.sup(v);
                }
                (lo, hi)
            }
        }
    }

    /// Representative point: sphere center, cylinder midpoint, mesh vertex mean.
    pub fn anchor(&self) -> Vec3 {
        match self {
            Self::Sphere { center, .. } => *center,
            Self::Cylinder { end_a, end_b, .. } => (end_a + end_b) * 0.5,
            Self::TriMesh { vertices, .. } => {
                vertices.iter().fold(Vec3::zeros(), |acc, v| acc + v) / vertices.len().max(1) as f64
            }
        }
    }

    pub fn validate(&self) -> Result<(), ReprError> {
        let finite = |p: &Vec3| p.iter().all(|c| c.is_finite());
        let ok = match self {
            Self::Sphere { center, radius, .. } => *radius > 0.0 && finite(center),
            Self::Cylinder {
                end_a, end_b, radius, ..
            } => *radius > 0.0 && finite(end_a) && finite(end_b),
            Self::TriMesh {
                vertices,
                triangles,
                colors,
            } => {
                colors.len() == triangles.len()
                    && vertices.iter().all(finite)
                    && triangles.iter().flatten().all(|&i| i < vertices.len())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(ReprError::InvalidStyle(format!("malformed primitive {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub primitives: Vec<ScenePrimitive>,
    pub source_id: String,
    pub representation: RepresentationType,
}

impl Scene {
    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    pub fn map_points(&self, f: impl Fn(&Vec3) -> Vec3) -> Self {
        Self {
            primitives: self.primitives.iter().map(|p| p.map_points(&f)).collect(),
            source_id: self.source_id.clone(),
            representation: self.representation,
        }
    }

    /// Bounds over all primitives, `None` for an empty scene.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        self.primitives.iter().map(ScenePrimitive::bounds).reduce(|(a0, a1), (b0, b1)| (a0.inf(&b0), a1.sup(&b1)))
    }

    pub fn count(&self, pred: impl Fn(&ScenePrimitive) -> bool) -> usize {
        self.primitives.iter().filter(|p| pred(p)).count()
    }
}

/// Residue formal charge: ASP/GLU -1, LYS/ARG +1, everything else 0.
pub fn residue_charge(residue_name: &str) -> f64 {
    match residue_name.trim().to_ascii_uppercase().as_str() {
        "ASP" | "GLU" => -1.0,
        "LYS" | "ARG" => 1.0,
        _ => 0.0,
    }
}

pub fn color_for(atom: &Atom, scheme: ColorScheme, structure: &ProteinStructure) -> Rgb {
    color_with(Palette::builtin(), atom, scheme, structure)
}

pub fn color_with(palette: &Palette, atom: &Atom, scheme: ColorScheme, structure: &ProteinStructure) -> Rgb {
    match scheme {
        ColorScheme::Cpk => palette.cpk(&atom.element),
        ColorScheme::Amino => palette.amino(&atom.residue_name),
        ColorScheme::Chain => palette.chain(structure.chain_index(atom.chain_id).unwrap_or(0)),
        ColorScheme::Charge => palette.charge(residue_charge(&atom.residue_name)),
        ColorScheme::Structure => match structure.ss_class(atom.chain_id, atom.residue_seq) {
            SecondaryStructure::Helix => palette.helix,
            SecondaryStructure::Sheet => palette.sheet,
            SecondaryStructure::Coil => palette.coil,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdb::parse_pdb;

    const HELIX_GLY: &str = "\
HELIX    1   1 GLY A    1  GLY A    2  1                                   2
ATOM      1  N   GLY A   1       0.000   0.000   0.000  1.00  0.00           N
ATOM      2  CA  GLY A   1       1.458   0.000   0.000  1.00  0.00           C
ATOM      3  O   LYS A   3       9.000   0.000   0.000  1.00  0.00           O
";

    #[test]
    fn thirteen_representations_round_trip() {
        assert_eq!(RepresentationType::ALL.len(), 13);
        for r in RepresentationType::ALL {
            assert_eq!(r.name().parse::<RepresentationType>().unwrap(), r);
            assert_eq!(r.label().parse::<RepresentationType>().unwrap(), r);
        }
        assert!("nope".parse::<RepresentationType>().is_err());
    }

    #[test]
    fn reference_colors() {
        let s = parse_pdb(HELIX_GLY, "t").unwrap();
        let p = Palette::builtin();
        assert_eq!(color_for(&s.atoms[2], ColorScheme::Cpk, &s), Rgb([255, 13, 13]));
        assert_eq!(color_for(&s.atoms[0], ColorScheme::Charge, &s), Rgb::WHITE);
        assert_eq!(color_for(&s.atoms[2], ColorScheme::Charge, &s), Rgb([0, 0, 255]));
        assert_eq!(color_for(&s.atoms[1], ColorScheme::Structure, &s), p.helix);
        assert_eq!(color_for(&s.atoms[2], ColorScheme::Structure, &s), p.coil);
        assert_eq!(p.helix, Rgb([255, 0, 128]));
    }

    #[test]
    fn default_style_is_valid_and_converts_units() {
        let s = StyleConfig::default();
        s.validate().unwrap();
        assert!((s.angstrom(s.wireframe_units) - 0.24).abs() < 1e-12);
        assert!((s.angstrom(s.backbone_units) - 0.6).abs() < 1e-12);
        let bad = StyleConfig {
            ribbon_width: 0.0,
            ..StyleConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
