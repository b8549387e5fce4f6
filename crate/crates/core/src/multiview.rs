//! Pose grids, rotation about the centroid and orthographic camera fitting.

use std::fmt;

use nalgebra::{Matrix3, Vector2};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repr::{Scene, ScenePrimitive};
use crate::Vec3;

#[derive(Debug, Error, PartialEq)]
pub enum MultiviewError {
    #[error("rotation grid axis {0} has no angles")]
    EmptyAxis(char),
    #[error("angle {0} is not finite")]
    InvalidAngle(f64),
    #[error("cannot fit a camera to an empty scene")]
    EmptyScene,
    #[error("no view budget of {0} poses (supported: 1 to 216)")]
    UnsupportedBudget(usize),
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
}

/// Rotation in degrees about x, y and z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewPose {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl ViewPose {
    pub const IDENTITY: ViewPose = ViewPose {
        rx: 0.0,
        ry: 0.0,
        rz: 0.0,
    };

    pub fn new(rx: f64, ry: f64, rz: f64) -> Self {
        Self { rx, ry, rz }
    }

    /// `rx{a}_ry{b}_rz{c}` with angles rounded to whole degrees.
    pub fn name(&self) -> String {
        format!(
            "rx{}_ry{}_rz{}",
            self.rx.round() as i64,
            self.ry.round() as i64,
            self.rz.round() as i64
        )
    }
}

impl fmt::Display for ViewPose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationGrid {
    pub angles_x: Vec<f64>,
    pub angles_y: Vec<f64>,
    pub angles_z: Vec<f64>,
}

impl Default for RotationGrid {
    fn default() -> Self {
        Self::uniform(45.0)
    }
}

impl RotationGrid {
    /// `0, step, 2*step, ...` up to and including 180 on every axis.
    pub fn uniform(step: f64) -> Self {
        let mut angles = Vec::new();
        if step.is_finite() && step > 0.0 {
            let mut k = 0u32;
            while f64::from(k) * step <= 180.0 + 1e-9 {
                angles.push(f64::from(k) * step);
                k += 1;
            }
        }
        Self {
            angles_x: angles.clone(),
            angles_y: angles.clone(),
            angles_z: angles,
        }
    }

    pub fn pose_count(&self) -> usize {
        self.angles_x.len() * self.angles_y.len() * self.angles_z.len()
    }
}

/// Cartesian product in lexicographic (x, y, z) order.
pub fn pose_grid(grid: &RotationGrid) -> Result<Vec<ViewPose>, MultiviewError> {
    for (axis, angles) in [('x', &grid.angles_x), ('y', &grid.angles_y), ('z', &grid.angles_z)] {
        if angles.is_empty() {
            return Err(MultiviewError::EmptyAxis(axis));
        }
        if let Some(&a) = angles.iter().find(|a| !a.is_finite()) {
            return Err(MultiviewError::InvalidAngle(a));
        }
    }
    let mut poses = Vec::with_capacity(grid.pose_count());
    for &rx in &grid.angles_x {
        for &ry in &grid.angles_y {
            for &rz in &grid.angles_z {
                poses.push(ViewPose { rx, ry, rz });
            }
        }
    }
    Ok(poses)
}

/// `Rz(rz) * Ry(ry) * Rx(rx)`, right-handed, counterclockwise about each axis.
pub fn rotation_matrix(pose: &ViewPose) -> Matrix3<f64> {
    let (sx, cx) = pose.rx.to_radians().sin_cos();
    let (sy, cy) = pose.ry.to_radians().sin_cos();
    let (sz, cz) = pose.rz.to_radians().sin_cos();
    let rx = Matrix3::new(1.0, 0.0, 0.0, 0.0, cx, -sx, 0.0, sx, cx);
    let ry = Matrix3::new(cy, 0.0, sy, 0.0, 1.0, 0.0, -sy, 0.0, cy);
    let rz = Matrix3::new(cz, -sz, 0.0, sz, cz, 0.0, 0.0, 0.0, 1.0);
    rz * ry * rx
}

/// Rotates every primitive about `center`.
pub fn pose_scene(scene: &Scene, pose: &ViewPose, center: &Vec3) -> Scene {
    let r = rotation_matrix(pose);
    scene.map_points(|p| r * (p - center) + center)
}

/// Orthographic projection: pixel column `offset.x + x * scale`, row
/// `offset.y + y * scale`; z is depth, smaller is nearer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthoCamera {
    pub scale: f64,
    pub offset: Vector2<f64>,
    pub image_size: (u32, u32),
    pub margin_fraction: f64,
}

pub const DEFAULT_MARGIN: f64 = 0.05;

impl OrthoCamera {
    pub fn project(&self, p: &Vec3) -> Vector2<f64> {
        Vector2::new(self.offset.x + p.x * self.scale, self.offset.y + p.y * self.scale)
    }

    pub fn validate(&self) -> Result<(), MultiviewError> {
        let (w, h) = self.image_size;
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(MultiviewError::InvalidCamera(format!("scale {}", self.scale)));
        }
        if w == 0 || h == 0 || !self.offset.iter().all(|c| c.is_finite()) {
            return Err(MultiviewError::InvalidCamera(format!("image {w}x{h}, offset {:?}", self.offset)));
        }
        if !(0.0..0.5).contains(&self.margin_fraction) {
            return Err(MultiviewError::InvalidCamera(format!("margin {}", self.margin_fraction)));
        }
        Ok(())
    }

    fn centered(center_x: f64, center_y: f64, scale: f64, image_size: (u32, u32), margin_fraction: f64) -> Self {
        let (w, h) = image_size;
        Self {
            scale,
            offset: Vector2::new(f64::from(w) / 2.0 - center_x * scale, f64::from(h) / 2.0 - center_y * scale),
            image_size,
            margin_fraction,
        }
    }
}

fn usable(image_size: (u32, u32), margin_fraction: f64) -> (f64, f64) {
    let k = 1.0 - 2.0 * margin_fraction;
    (f64::from(image_size.0) * k, f64::from(image_size.1) * k)
}

/// Fits the scene's x/y bounding box (radii included) into the image minus margins.
pub fn fit_camera(scene: &Scene, image_size: (u32, u32), margin_fraction: f64) -> Result<OrthoCamera, MultiviewError> {
    let (lo, hi) = scene.bounds().ok_or(MultiviewError::EmptyScene)?;
    let (uw, uh) = usable(image_size, margin_fraction);
    let (ex, ey) = (hi.x - lo.x, hi.y - lo.y);
    let candidates = [(ex, uw), (ey, uh)];
    let scale = candidates
        .iter()
        .filter(|(e, _)| *e > 0.0)
        .map(|(e, u)| u / e)
        .fold(f64::INFINITY, f64::min);
    let scale = if scale.is_finite() { scale } else { 1.0 };
    let cam = OrthoCamera::centered((lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0, scale, image_size, margin_fraction);
    cam.validate()?;
    Ok(cam)
}

/// Radius about `center` that contains the scene under every rotation about `center`.
pub fn bounding_radius(scene: &Scene, center: &Vec3) -> f64 {
    scene
        .primitives
        .iter()
        .map(|p| match p {
            ScenePrimitive::Sphere { center: c, radius, .. } => (c - center).norm() + radius,
            ScenePrimitive::Cylinder {
                end_a, end_b, radius, ..
            } => (end_a - center).norm().max((end_b - center).norm()) + radius,
            ScenePrimitive::TriMesh { vertices, .. } => {
                vertices.iter().map(|v| (v - center).norm()).fold(0.0, f64::max)
            }
        })
        .fold(0.0, f64::max)
}

/// One camera for all poses of a scene rotated about `center`: the bounding
/// sphere fills the usable square, so zoom carries no pose information.
pub fn fit_pose_camera(
    scene: &Scene,
    center: &Vec3,
    image_size: (u32, u32),
    margin_fraction: f64,
) -> Result<OrthoCamera, MultiviewError> {
    if scene.is_empty() {
        return Err(MultiviewError::EmptyScene);
    }
    let r = bounding_radius(scene, center);
    let (uw, uh) = usable(image_size, margin_fraction);
    let scale = if r > 0.0 { uw.min(uh) / (2.0 * r) } else { 1.0 };
    let cam = OrthoCamera::centered(center.x, center.y, scale, image_size, margin_fraction);
    cam.validate()?;
    Ok(cam)
}

/// Seed-dependent pose set of the requested size.
///
/// 125 is the default grid. Smaller budgets are subsets of it; 126 to 216
/// come from the 36-degree grid (216 poses) with poses removed.
pub fn view_budget(count: usize, seed: u64) -> Result<Vec<ViewPose>, MultiviewError> {
    let base = match count {
        1..=125 => pose_grid(&RotationGrid::default())?,
        126..=216 => pose_grid(&RotationGrid::uniform(36.0))?,
        _ => return Err(MultiviewError::UnsupportedBudget(count)),
    };
    if count == base.len() {
        return Ok(base);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ count as u64);
    let mut keep = sample(&mut rng, base.len(), count).into_vec();
    keep.sort_unstable();
    Ok(keep.into_iter().map(|i| base[i]).collect())
}
