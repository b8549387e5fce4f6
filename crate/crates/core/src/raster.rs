//! Z-buffer rasterizer for posed scenes.
//!
//! A scene is flattened into [`Shape`]s (mesh triangles become individual
//! shapes, in order). Each shape answers one question per pixel center,
//! [`Shape::fragment`]; the renderer only decides which pixels to ask.

use std::path::Path;

use image::{ImageFormat, RgbImage};
use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiview::OrthoCamera;
use crate::palette::Rgb;
use crate::repr::{Scene, ScenePrimitive};
use crate::Vec3;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("scene extends past camera bounds: {0}")]
    CameraMismatch(String),
    #[error("invalid render config: {0}")]
    InvalidConfig(String),
    #[error("cannot write {path}: {reason}")]
    Io { path: String, reason: String },
}

pub const MIN_IMAGE_SIZE: u32 = 16;
pub const MAX_IMAGE_SIZE: u32 = 227;
/// Allowed overshoot of projected scene bounds, as a fraction of image size.
pub const CAMERA_SLACK: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderConfig {
    pub image_size: (u32, u32),
    pub background: Rgb,
    pub ambient: f64,
    pub diffuse: f64,
    /// Direction from surfaces toward the light.
    pub light_direction: Vec3,
    /// Render at twice the resolution and box-filter down.
    pub supersample: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            image_size: (64, 64),
            background: Rgb::WHITE,
            ambient: 0.3,
            diffuse: 0.7,
            light_direction: Vec3::new(0.0, 0.0, -1.0),
            supersample: false,
        }
    }
}

impl RenderConfig {
    pub fn with_size(size: u32) -> Self {
        Self {
            image_size: (size, size),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), RasterError> {
        let (w, h) = self.image_size;
        let bad = |m: String| Err(RasterError::InvalidConfig(m));
        if !(MIN_IMAGE_SIZE..=MAX_IMAGE_SIZE).contains(&w) || !(MIN_IMAGE_SIZE..=MAX_IMAGE_SIZE).contains(&h) {
            return bad(format!("image size {w}x{h} outside {MIN_IMAGE_SIZE}..={MAX_IMAGE_SIZE}"));
        }
        if !(self.ambient >= 0.0 && self.diffuse >= 0.0 && self.ambient + self.diffuse <= 1.0 + 1e-12) {
            return bad(format!("ambient {} + diffuse {} must lie in [0, 1]", self.ambient, self.diffuse));
        }
        if !(self.light_direction.norm() > 0.0 && self.light_direction.iter().all(|c| c.is_finite())) {
            return bad("light direction must be a finite non-zero vector".into());
        }
        Ok(())
    }
}

/// Color and depth planes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Framebuffer {
    pub width: u32,
    pub height: u32,
    pub color: Vec<[u8; 3]>,
    pub depth: Vec<f64>,
}

/// Depth of pixels nothing was drawn on.
pub const FAR_DEPTH: f64 = f64::MAX;

impl Framebuffer {
    pub fn new(width: u32, height: u32, background: Rgb) -> Self {
        let n = width as usize * height as usize;
        Self {
            width,
            height,
            color: vec![background.0; n],
            depth: vec![FAR_DEPTH; n],
        }
    }

    fn index(&self, col: u32, row: u32) -> usize {
        row as usize * self.width as usize + col as usize
    }

    pub fn depth_at(&self, col: u32, row: u32) -> f64 {
        self.depth[self.index(col, row)]
    }

    pub fn color_at(&self, col: u32, row: u32) -> [u8; 3] {
        self.color[self.index(col, row)]
    }

    /// Z-test: strictly nearer fragments replace, ties keep the first.
    #[inline]
    pub fn offer(&mut self, col: u32, row: u32, depth: f64, color: [u8; 3]) {
        let i = self.index(col, row);
        if depth < self.depth[i] {
            self.depth[i] = depth;
            self.color[i] = color;
        }
    }

    pub fn into_image(self) -> RgbImage {
        let data = self.color.into_iter().flatten().collect();
        RgbImage::from_raw(self.width, self.height, data).expect("buffer matches dimensions")
    }
}

/// Visible surface point under one pixel center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fragment {
    pub depth: f64,
    pub normal: Vec3,
}

/// Renderable unit: a sphere, a finite cylinder or one triangle.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Sphere {
        center: Vec3,
        radius: f64,
        color: Rgb,
    },
    Cylinder {
        a: Vec3,
        axis: Vec3,
        length: f64,
        radius: f64,
        capped: bool,
        color: Rgb,
    },
    Triangle {
        v: [Vec3; 3],
        normal: Vec3,
        color: Rgb,
    },
}

/// Scene primitives as shapes, preserving order.
pub fn flatten(scene: &Scene) -> Vec<Shape> {
    let mut out = Vec::with_capacity(scene.primitives.len());
    for p in &scene.primitives {
        match p {
            ScenePrimitive::Sphere { center, radius, color } => out.push(Shape::Sphere {
                center: *center,
                radius: *radius,
                color: *color,
            }),
            ScenePrimitive::Cylinder {
                end_a,
                end_b,
                radius,
                color,
                capped,
            } => {
                let d = end_b - end_a;
                let length = d.norm();
                if length > 0.0 {
                    out.push(Shape::Cylinder {
                        a: *end_a,
                        axis: d / length,
                        length,
                        radius: *radius,
                        capped: *capped,
                        color: *color,
                    });
                }
            }
            ScenePrimitive::TriMesh {
                vertices,
                triangles,
                colors,
            } => {
                for (t, color) in triangles.iter().zip(colors) {
                    let v = [vertices[t[0]], vertices[t[1]], vertices[t[2]]];
                    let n = (v[1] - v[0]).cross(&(v[2] - v[0]));
                    let normal = if n.norm() > 0.0 { n.normalize() } else { Vec3::z() };
                    out.push(Shape::Triangle { v, normal, color: *color });
                }
            }
        }
    }
    out
}

impl Shape {
    pub fn color(&self) -> Rgb {
        match self {
            Shape::Sphere { color, .. } | Shape::Cylinder { color, .. } | Shape::Triangle { color, .. } => *color,
        }
    }

    /// World-space x/y bounds.
    fn xy_bounds(&self) -> (f64, f64, f64, f64) {
        match self {
            Shape::Sphere { center, radius, .. } => (
                center.x - radius,
                center.x + radius,
                center.y - radius,
                center.y + radius,
            ),
            Shape::Cylinder {
                a, axis, length, radius, ..
            } => {
                let b = a + axis * *length;
                (
                    a.x.min(b.x) - radius,
                    a.x.max(b.x) + radius,
                    a.y.min(b.y) - radius,
                    a.y.max(b.y) + radius,
                )
            }
            Shape::Triangle { v, .. } => (
                v[0].x.min(v[1].x).min(v[2].x),
                v[0].x.max(v[1].x).max(v[2].x),
                v[0].y.min(v[1].y).min(v[2].y),
                v[0].y.max(v[1].y).max(v[2].y),
            ),
        }
    }

    /// Nearest surface point along the view ray through world `(x, y)`.
    pub fn fragment(&self, x: f64, y: f64) -> Option<Fragment> {
        match self {
            Shape::Sphere { center, radius, .. } => {
                let (dx, dy) = (x - center.x, y - center.y);
                let h = radius * radius - (dx * dx + dy * dy);
                if h < 0.0 {
                    return None;
                }
                let dz = -h.sqrt();
                Some(Fragment {
                    depth: center.z + dz,
                    normal: Vec3::new(dx, dy, dz) / *radius,
                })
            }
            Shape::Cylinder {
                a,
                axis,
                length,
                radius,
                capped,
                ..
            } => cylinder_fragment(a, axis, *length, *radius, *capped, x, y),
            Shape::Triangle { v, normal, .. } => {
                let e = |p: &Vec3, q: &Vec3| (q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x);
                let area = (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[1].y - v[0].y) * (v[2].x - v[0].x);
                if area == 0.0 {
                    return None;
                }
                let w0 = e(&v[1], &v[2]) / area;
                let w1 = e(&v[2], &v[0]) / area;
                let w2 = e(&v[0], &v[1]) / area;
                if w0 < 0.0 || w1 < 0.0 || w2 < 0.0 {
                    return None;
                }
                Some(Fragment {
                    depth: w0 * v[0].z + w1 * v[1].z + w2 * v[2].z,
                    normal: *normal,
                })
            }
        }
    }
}

fn cylinder_fragment(a: &Vec3, u: &Vec3, length: f64, r: f64, capped: bool, x: f64, y: f64) -> Option<Fragment> {
    // ray (x, y, t), t increasing away from the viewer
    let w = Vec3::new(x - a.x, y - a.y, -a.z);
    let d = Vec3::z();
    let du = u.z;
    let wu = w.dot(u);
    let dp = d - u * du;
    let wp = w - u * wu;
    let qa = dp.dot(&dp);
    let mut best: Option<Fragment> = None;
    let mut consider = |f: Fragment| {
        if best.is_none_or(|b| f.depth < b.depth) {
            best = Some(f);
        }
    };
    if qa > 1e-12 {
        let qb = 2.0 * dp.dot(&wp);
        let qc = wp.dot(&wp) - r * r;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // the far root is the inside wall, visible through an open end
            for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                let s = wu + t * du;
                if (0.0..=length).contains(&s) {
                    let radial = w + d * t - u * s;
                    consider(Fragment {
                        depth: t,
                        normal: radial / r,
                    });
                }
            }
        }
    }
    if capped && du != 0.0 {
        for s_cap in [0.0, length] {
            // plane through a + u * s_cap
            let t = (s_cap - wu) / du;
            let radial = w + d * t - u * s_cap;
            if radial.dot(&radial) <= r * r {
                let n = if s_cap == 0.0 { -u } else { *u };
                consider(Fragment {
                    depth: t,
                    normal: n,
                });
            }
        }
    }
    best
}

/// Two-sided Lambert with a flat per-shape color.
pub fn shade(color: Rgb, normal: &Vec3, config: &RenderConfig) -> [u8; 3] {
    let l = config.light_direction.normalize();
    let n = normal.normalize();
    let k = config.ambient + config.diffuse * n.dot(&l).abs();
    color.0.map(|c| (f64::from(c) * k).round().clamp(0.0, 255.0) as u8)
}

/// World x/y of the center of pixel `(col, row)`.
pub fn pixel_center(camera: &OrthoCamera, col: u32, row: u32) -> (f64, f64) {
    (
        (f64::from(col) + 0.5 - camera.offset.x) / camera.scale,
        (f64::from(row) + 0.5 - camera.offset.y) / camera.scale,
    )
}

/// Fails when projected bounds exceed the image by more than [`CAMERA_SLACK`].
pub fn check_camera(scene: &Scene, camera: &OrthoCamera) -> Result<(), RasterError> {
    let Some((lo, hi)) = scene.bounds() else {
        return Ok(());
    };
    let (w, h) = (f64::from(camera.image_size.0), f64::from(camera.image_size.1));
    let p0 = camera.project(&lo);
    let p1 = camera.project(&hi);
    let (sx, sy) = (w * CAMERA_SLACK, h * CAMERA_SLACK);
    let inside = p0.x.min(p1.x) >= -sx && p0.x.max(p1.x) <= w + sx && p0.y.min(p1.y) >= -sy && p0.y.max(p1.y) <= h + sy;
    if inside {
        Ok(())
    } else {
        Err(RasterError::CameraMismatch(format!(
            "projected x {:.2}..{:.2}, y {:.2}..{:.2} in a {w}x{h} image",
            p0.x, p1.x, p0.y, p1.y
        )))
    }
}

/// Renders into a framebuffer at the camera's image size.
pub fn render_framebuffer(scene: &Scene, camera: &OrthoCamera, config: &RenderConfig) -> Result<Framebuffer, RasterError> {
    config.validate()?;
    check_camera(scene, camera)?;
    let (w, h) = camera.image_size;
    let mut fb = Framebuffer::new(w, h, config.background);
    for shape in flatten(scene) {
        let (x0, x1, y0, y1) = shape.xy_bounds();
        let Some((c0, c1)) = pixel_span(camera.offset.x + x0 * camera.scale, camera.offset.x + x1 * camera.scale, w)
        else {
            continue;
        };
        let Some((r0, r1)) = pixel_span(camera.offset.y + y0 * camera.scale, camera.offset.y + y1 * camera.scale, h)
        else {
            continue;
        };
        let color = shape.color();
        for row in r0..=r1 {
            for col in c0..=c1 {
                let (x, y) = pixel_center(camera, col, row);
                if let Some(f) = shape.fragment(x, y) {
                    if f.depth < fb.depth_at(col, row) {
                        fb.offer(col, row, f.depth, shade(color, &f.normal, config));
                    }
                }
            }
        }
    }
    Ok(fb)
}

// Conservative pixel range (one pixel of slack) covering `lo..hi`.
fn pixel_span(lo: f64, hi: f64, n: u32) -> Option<(u32, u32)> {
    let a = (lo.floor() - 1.0).max(0.0);
    let b = (hi.ceil() + 1.0).min(f64::from(n) - 1.0);
    (a <= b).then_some((a as u32, b as u32))
}

pub fn render(scene: &Scene, camera: &OrthoCamera, config: &RenderConfig) -> Result<RgbImage, RasterError> {
    if camera.image_size != config.image_size {
        return Err(RasterError::InvalidConfig(format!(
            "camera image size {:?} differs from config {:?}",
            camera.image_size, config.image_size
        )));
    }
    if !config.supersample {
        return Ok(render_framebuffer(scene, camera, config)?.into_image());
    }
    config.validate()?;
    let (w, h) = config.image_size;
    let big = OrthoCamera {
        scale: camera.scale * 2.0,
        offset: camera.offset * 2.0,
        image_size: (2 * w, 2 * h),
        ..*camera
    };
    // the doubled size may exceed MAX_IMAGE_SIZE, so skip re-validation
    check_camera(scene, &big)?;
    let mut fb = Framebuffer::new(2 * w, 2 * h, config.background);
    for shape in flatten(scene) {
        for row in 0..2 * h {
            for col in 0..2 * w {
                let (x, y) = pixel_center(&big, col, row);
                if let Some(f) = shape.fragment(x, y) {
                    fb.offer(col, row, f.depth, shade(shape.color(), &f.normal, config));
                }
            }
        }
    }
    let mut out = RgbImage::new(w, h);
    for (col, row, px) in out.enumerate_pixels_mut() {
        let mut acc = [0u32; 3];
        for (dc, dr) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let c = fb.color_at(2 * col + dc, 2 * row + dr);
            for k in 0..3 {
                acc[k] += u32::from(c[k]);
            }
        }
        px.0 = acc.map(|s| ((s + 2) / 4) as u8);
    }
    Ok(out)
}

/// Lossless 8-bit RGB PNG.
pub fn write_image(image: &RgbImage, path: &Path) -> Result<(), RasterError> {
    image
        .save_with_format(path, ImageFormat::Png)
        .map_err(|e| RasterError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
}

/// Pixel position of a world point, for tests and tooling.
pub fn to_pixel(camera: &OrthoCamera, p: &Vec3) -> Vector2<f64> {
    camera.project(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiview::{fit_camera, DEFAULT_MARGIN};
    use crate::repr::RepresentationType;

    fn scene(primitives: Vec<ScenePrimitive>) -> Scene {
        Scene {
            primitives,
            source_id: "t".into(),
            representation: RepresentationType::Spacefill,
        }
    }

    fn sphere(c: Vec3, r: f64, color: Rgb) -> ScenePrimitive {
        ScenePrimitive::Sphere {
            center: c,
            radius: r,
            color,
        }
    }

    #[test]
    fn empty_scene_is_white() {
        let cam = OrthoCamera {
            scale: 1.0,
            offset: Vector2::new(16.0, 16.0),
            image_size: (32, 32),
            margin_fraction: DEFAULT_MARGIN,
        };
        let img = render(&scene(vec![]), &cam, &RenderConfig::with_size(32)).unwrap();
        assert!(img.pixels().all(|p| p.0 == [255, 255, 255]));
    }

    #[test]
    fn sphere_depth_and_peak_brightness() {
        let s = scene(vec![sphere(Vec3::new(0.0, 0.0, 3.0), 2.0, Rgb([200, 100, 50]))]);
        let cam = fit_camera(&s, (64, 64), DEFAULT_MARGIN).unwrap();
        let cfg = RenderConfig::default();
        let fb = render_framebuffer(&s, &cam, &cfg).unwrap();
        let quantum = 1.0 / cam.scale;
        assert!((fb.depth_at(32, 32) - 1.0).abs() <= 0.5 * quantum);
        assert!((fb.depth_at(31, 31) - 1.0).abs() <= 0.5 * quantum);
        let brightness = |p: [u8; 3]| p.iter().map(|&c| u32::from(c)).sum::<u32>();
        let peak = fb
            .color
            .iter()
            .zip(&fb.depth)
            .filter(|(_, &d)| d < FAR_DEPTH)
            .map(|(&p, _)| brightness(p))
            .max()
            .unwrap();
        for (c, r) in [(31, 31), (32, 32), (31, 32), (32, 31)] {
            assert_eq!(brightness(fb.color_at(c, r)), peak);
        }
    }

    #[test]
    fn nearer_sphere_wins() {
        let red = Rgb([255, 0, 0]);
        let blue = Rgb([0, 0, 255]);
        let s = scene(vec![
            sphere(Vec3::new(5.0, 0.0, 5.0), 3.0, blue),
            sphere(Vec3::new(2.0, 0.0, 0.0), 3.0, red),
        ]);
        let cam = fit_camera(&s, (32, 32), DEFAULT_MARGIN).unwrap();
        let cfg = RenderConfig::with_size(32);
        let fb = render_framebuffer(&s, &cam, &cfg).unwrap();
        let shapes = flatten(&s);
        let mut overlap = 0;
        for row in 0..32 {
            for col in 0..32 {
                let (x, y) = pixel_center(&cam, col, row);
                if shapes.iter().all(|sh| sh.fragment(x, y).is_some()) {
                    overlap += 1;
                    let c = fb.color_at(col, row);
                    assert!(c[0] > 0 && c[2] == 0, "pixel {col},{row} is {c:?}");
                }
            }
        }
        assert!(overlap > 20);
    }

    #[test]
    fn cylinder_side_and_caps() {
        let cyl = |capped| Shape::Cylinder {
            a: Vec3::new(0.0, 0.0, 0.0),
            axis: Vec3::z(),
            length: 4.0,
            radius: 1.0,
            capped,
        color: Rgb::WHITE,
        };
        // looking straight down the axis only the cap (or the far inside wall) shows
        assert_eq!(cyl(true).fragment(0.2, 0.1).unwrap().depth, 0.0);
        assert!(cyl(false).fragment(0.2, 0.1).is_none());
        let side = Shape::Cylinder {
            a: Vec3::new(-2.0, 0.0, 5.0),
            axis: Vec3::x(),
            length: 4.0,
            radius: 1.0,
            capped: false,
            color: Rgb::WHITE,
        };
        let f = side.fragment(0.0, 0.0).unwrap();
        assert!((f.depth - 4.0).abs() < 1e-12);
        assert!((f.normal - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-12);
        assert!(side.fragment(2.5, 0.0).is_none());
        assert!(side.fragment(0.0, 1.01).is_none());
    }

    #[test]
    fn camera_mismatch() {
        let s = scene(vec![sphere(Vec3::zeros(), 1.0, Rgb::WHITE)]);
        let mut cam = fit_camera(&s, (32, 32), DEFAULT_MARGIN).unwrap();
        cam.scale *= 1.5;
        assert!(matches!(
            render(&s, &cam, &RenderConfig::with_size(32)),
            Err(RasterError::CameraMismatch(_))
        ));
    }

    #[test]
    fn config_limits() {
        assert!(RenderConfig::with_size(8).validate().is_err());
        assert!(RenderConfig::with_size(227).validate().is_ok());
        let bright = RenderConfig {
            ambient: 0.5,
            diffuse: 0.7,
            ..RenderConfig::default()
        };
        assert!(bright.validate().is_err());
    }

    #[test]
    fn supersampling_blends_edges() {
        let s = scene(vec![sphere(Vec3::zeros(), 1.0, Rgb([0, 0, 0]))]);
        let cam = fit_camera(&s, (32, 32), DEFAULT_MARGIN).unwrap();
        let cfg = RenderConfig {
            supersample: true,
            ..RenderConfig::with_size(32)
        };
        let img = render(&s, &cam, &cfg).unwrap();
        assert!(img.pixels().any(|p| p.0[0] > 0 && p.0[0] < 255));
        assert_eq!(img.get_pixel(16, 16).0, [0, 0, 0]);
    }

    #[test]
    fn png_round_trip_and_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut img = RgbImage::new(64, 64);
        for (i, p) in img.pixels_mut().enumerate() {
            p.0 = [(i * 7) as u8, (i * 13) as u8, (i * 31) as u8];
        }
        let path = dir.path().join("x.png");
        write_image(&img, &path).unwrap();
        assert_eq!(image::open(&path).unwrap().to_rgb8(), img);
        let white = RgbImage::from_pixel(16, 16, image::Rgb([255, 255, 255]));
        let wpath = dir.path().join("w.png");
        write_image(&white, &wpath).unwrap();
        let back = image::open(&wpath).unwrap().to_rgb8();
        assert_eq!(back.pixels().filter(|p| p.0 == [255, 255, 255]).count(), 256);
        assert!(matches!(
            write_image(&img, &dir.path().join("missing/dir/x.png")),
            Err(RasterError::Io { .. })
        ));
    }
}
