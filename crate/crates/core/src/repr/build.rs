use crate::palette::{Palette, Rgb};
use crate::pdb::{ProteinStructure, SsKind};
use crate::Vec3;

use super::spline::{orthogonalize, ribbon_frames, spline_through, Frame};
use super::{color_with, ColorScheme, ReprError, RepresentationType, Scene, ScenePrimitive, StyleConfig};

/// Consecutive alpha carbons farther apart than this start a new run.
pub const CA_BREAK_DISTANCE: f64 = 4.2;

const CONE_SEGMENTS: usize = 12;
const PLANK_THICKNESS: f64 = 0.6;

/// Unbroken stretch of alpha carbons in one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct BackboneRun {
    pub chain_id: char,
    /// Atom indices into the structure.
    pub atoms: Vec<usize>,
}

pub fn backbone_runs(structure: &ProteinStructure) -> Vec<BackboneRun> {
    let mut runs = Vec::new();
    for (chain_id, cas) in structure.alpha_carbons() {
        let mut current: Vec<usize> = Vec::new();
        for i in cas {
            if let Some(&last) = current.last() {
                let d = (structure.atoms[i].position - structure.atoms[last].position).norm();
                if d > CA_BREAK_DISTANCE {
                    runs.push(BackboneRun {
                        chain_id,
                        atoms: std::mem::take(&mut current),
                    });
                }
            }
            current.push(i);
        }
        if !current.is_empty() {
            runs.push(BackboneRun { chain_id, atoms: current });
        }
    }
    runs
}

pub fn build_scene(
    structure: &ProteinStructure,
    rep: RepresentationType,
    style: &StyleConfig,
) -> Result<Scene, ReprError> {
    style.validate()?;
    let b = Builder {
        s: structure,
        style,
        palette: Palette::builtin(),
    };
    let primitives = match rep {
        RepresentationType::Spacefill => b.spacefill(),
        RepresentationType::Wireframe => b.sticks(style.angstrom(style.wireframe_units), ColorScheme::Cpk),
        RepresentationType::BallAndStick
        | RepresentationType::Amino
        | RepresentationType::Chain
        | RepresentationType::Charge
        | RepresentationType::Structure => b.ball_and_stick(rep.color_scheme()),
        RepresentationType::Backbone => b.backbone(),
        RepresentationType::Trace => b.trace(),
        RepresentationType::Ribbons => b.ribbons(false),
        RepresentationType::Cartoon => b.ribbons(true),
        RepresentationType::Rockets => b.rockets(),
        RepresentationType::Strands => b.strands(),
    };
    if primitives.is_empty() {
        return Err(ReprError::EmptyScene(rep));
    }
    Ok(Scene {
        primitives,
        source_id: structure.id.clone(),
        representation: rep,
    })
}

struct Builder<'a> {
    s: &'a ProteinStructure,
    style: &'a StyleConfig,
    palette: &'a Palette,
}

fn mean_color(a: Rgb, b: Rgb) -> Rgb {
    a.lerp(b, 0.5)
}

fn cylinder(a: Vec3, b: Vec3, radius: f64, color: Rgb, capped: bool) -> Option<ScenePrimitive> {
    ((b - a).norm() > 1e-9).then_some(ScenePrimitive::Cylinder {
        end_a: a,
        end_b: b,
        radius,
        color,
        capped,
    })
}

/// One run prepared for spline-based styles.
struct SplineRun {
    /// Sample positions.
    points: Vec<Vec3>,
    frames: Vec<Frame>,
    /// Residue (position within the run) each sample belongs to.
    residue_of: Vec<usize>,
}

impl<'a> Builder<'a> {
    fn color(&self, atom: usize, scheme: ColorScheme) -> Rgb {
        color_with(self.palette, &self.s.atoms[atom], scheme, self.s)
    }

    fn ca_color(&self, atom: usize) -> Rgb {
        self.color(atom, self.style.backbone_scheme)
    }

    fn pos(&self, atom: usize) -> Vec3 {
        self.s.atoms[atom].position
    }

    /// Index into `ss_spans` of the span holding this alpha carbon.
    fn span_of(&self, atom: usize) -> Option<usize> {
        let a = &self.s.atoms[atom];
        self.s.ss_spans.iter().position(|sp| sp.contains(a.chain_id, a.residue_seq))
    }

    fn is_sheet(&self, atom: usize) -> bool {
        self.span_of(atom).is_some_and(|i| self.s.ss_spans[i].kind == SsKind::Sheet)
    }

    fn spacefill(&self) -> Vec<ScenePrimitive> {
        let cap = self.style.angstrom(self.style.spacefill_units);
        (0..self.s.atoms.len())
            .map(|i| {
                let vdw = self.s.atoms[i].info().vdw_radius;
                ScenePrimitive::Sphere {
                    center: self.pos(i),
                    radius: if self.style.spacefill_cap { vdw.min(cap) } else { vdw },
                    color: self.color(i, ColorScheme::Cpk),
                }
            })
            .collect()
    }

    fn sticks(&self, radius: f64, scheme: ColorScheme) -> Vec<ScenePrimitive> {
        self.s
            .bonds
            .iter()
            .filter_map(|&(i, j)| {
                let color = mean_color(self.color(i, scheme), self.color(j, scheme));
                cylinder(self.pos(i), self.pos(j), radius, color, false)
            })
            .collect()
    }

    fn ball_and_stick(&self, scheme: ColorScheme) -> Vec<ScenePrimitive> {
        let mut out: Vec<ScenePrimitive> = (0..self.s.atoms.len())
            .map(|i| ScenePrimitive::Sphere {
                center: self.pos(i),
                radius: self.s.atoms[i].info().vdw_radius * self.style.ballstick_sphere_fraction,
                color: self.color(i, scheme),
            })
            .collect();
        out.extend(self.sticks(self.style.ballstick_stick_radius, scheme));
        out
    }

    fn lone(&self, atom: usize, radius: f64) -> ScenePrimitive {
        ScenePrimitive::Sphere {
            center: self.pos(atom),
            radius,
            color: self.ca_color(atom),
        }
    }

    fn backbone(&self) -> Vec<ScenePrimitive> {
        let r = self.style.angstrom(self.style.backbone_units);
        let mut out = Vec::new();
        for run in backbone_runs(self.s) {
            if run.atoms.len() == 1 {
                out.push(self.lone(run.atoms[0], r));
                continue;
            }
            for w in run.atoms.windows(2) {
                let color = mean_color(self.ca_color(w[0]), self.ca_color(w[1]));
                out.extend(cylinder(self.pos(w[0]), self.pos(w[1]), r, color, false));
            }
        }
        out
    }

    /// Spline through the run's alpha carbons.
    fn spline_run(&self, run: &BackboneRun) -> SplineRun {
        let m = self.style.spline_samples;
        let ctrl: Vec<Vec3> = run.atoms.iter().map(|&i| self.pos(i)).collect();
        let points = spline_through(&ctrl, m).expect("runs passed here have two or more points");
        let frames = ribbon_frames(&points).expect("two points and m >= 2 give three samples");
        let residue_of = (0..points.len())
            .map(|q| {
                let (seg, k) = (q / m, q % m);
                if 2 * k < m {
                    seg
                } else {
                    seg + 1
                }
            })
            .collect();
        SplineRun {
            points,
            frames,
            residue_of,
        }
    }

    fn trace(&self) -> Vec<ScenePrimitive> {
        let r = self.style.angstrom(self.style.trace_units);
        let m = self.style.spline_samples;
        let mut out = Vec::new();
        for run in backbone_runs(self.s) {
            let n = run.atoms.len();
            if n == 1 {
                out.push(self.lone(run.atoms[0], r));
                continue;
            }
            let ca: Vec<Vec3> = run.atoms.iter().map(|&i| self.pos(i)).collect();
            // Midpoints between successive alpha carbons; two-residue runs use the atoms.
            let (ctrl, offset): (Vec<Vec3>, usize) = if n >= 3 {
                (ca.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect(), 1)
            } else {
                (ca, 0)
            };
            let pts = spline_through(&ctrl, m).expect("two or more control points");
            let color_at = |q: usize| {
                let res = (q / m + offset).min(n - 1);
                self.ca_color(run.atoms[res])
            };
            for (q, w) in pts.windows(2).enumerate() {
                out.extend(cylinder(w[0], w[1], r, color_at(q), false));
            }
            for (q, p) in pts.iter().enumerate() {
                out.push(ScenePrimitive::Sphere {
                    center: *p,
                    radius: r,
                    color: color_at(q.min(pts.len() - 2)),
                });
            }
        }
        out
    }

    fn ribbons(&self, cartoon: bool) -> Vec<ScenePrimitive> {
        let base = self.style.ribbon_width;
        let sheet_w = base * self.style.sheet_width_factor;
        let mut out = Vec::new();
        let mut arrows = Vec::new();
        for run in backbone_runs(self.s) {
            if run.atoms.len() == 1 {
                out.push(self.lone(run.atoms[0], base * 0.5));
                continue;
            }
            let sr = self.spline_run(&run);
            let width = |q: usize| {
                if cartoon && self.is_sheet(run.atoms[sr.residue_of[q]]) {
                    sheet_w
                } else {
                    base
                }
            };
            let mut vertices = Vec::with_capacity(2 * sr.points.len());
            for (q, (p, f)) in sr.points.iter().zip(&sr.frames).enumerate() {
                let h = f.binormal * (width(q) * 0.5);
                vertices.push(p - h);
                vertices.push(p + h);
            }
            let mut triangles = Vec::new();
            let mut colors = Vec::new();
            for q in 0..sr.points.len() - 1 {
                let color = self.ca_color(run.atoms[sr.residue_of[q]]);
                let (a, b, c, d) = (2 * q, 2 * q + 1, 2 * q + 2, 2 * q + 3);
                triangles.push([a, b, d]);
                triangles.push([a, d, c]);
                colors.extend([color, color]);
            }
            out.push(ScenePrimitive::TriMesh {
                vertices,
                triangles,
                colors,
            });
            if cartoon {
                for (_, last) in self.span_ranges(&run, SsKind::Sheet) {
                    // last sample belonging to the span's final residue
                    let q = sr.residue_of.iter().rposition(|&r| r == last).expect("residue sampled");
                    arrows.push(self.arrowhead(&sr, q, sheet_w * 1.5, self.ca_color(run.atoms[last])));
                }
            }
        }
        out.extend(arrows);
        out
    }

    fn arrowhead(&self, sr: &SplineRun, q: usize, width: f64, color: Rgb) -> ScenePrimitive {
        let f = &sr.frames[q];
        let p = sr.points[q];
        let h = f.binormal * (width * 0.5);
        ScenePrimitive::TriMesh {
            vertices: vec![p - h, p + h, p + f.tangent * (width * 0.6)],
            triangles: vec![[0, 1, 2]],
            colors: vec![color],
        }
    }

    /// `(first, last)` run positions of each span of `kind` with two or more residues here.
    fn span_ranges(&self, run: &BackboneRun, kind: SsKind) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut k = 0;
        while k < run.atoms.len() {
            let span = self.span_of(run.atoms[k]);
            let mut e = k;
            while e + 1 < run.atoms.len() && self.span_of(run.atoms[e + 1]) == span {
                e += 1;
            }
            if let Some(si) = span {
                if self.s.ss_spans[si].kind == kind && e > k {
                    out.push((k, e));
                }
            }
            k = e + 1;
        }
        out
    }

    fn rockets(&self) -> Vec<ScenePrimitive> {
        let rr = self.style.rocket_radius;
        let coil_r = self.style.coil_radius;
        let mut out = Vec::new();
        for run in backbone_runs(self.s) {
            if run.atoms.len() == 1 {
                out.push(self.lone(run.atoms[0], coil_r));
                continue;
            }
            let sr = self.spline_run(&run);
            let m = self.style.spline_samples;
            let helices = self.span_ranges(&run, SsKind::Helix);
            let sheets = self.span_ranges(&run, SsKind::Sheet);
            let mut covered = vec![false; run.atoms.len()];
            for &(a, e) in &helices {
                let (pa, pe) = (self.pos(run.atoms[a]), self.pos(run.atoms[e]));
                let color = self.ca_color(run.atoms[a]);
                let Some(rocket) = cylinder(pa, pe, rr, color, true) else {
                    continue;
                };
                let axis = (pe - pa).normalize();
                let reference = orthogonalize(&sr.frames[e * m].normal, &axis)
                    .or_else(|| orthogonalize(&sr.frames[e * m].binormal, &axis))
                    .expect("frame vectors span the plane normal to any axis");
                out.push(rocket);
                out.push(cone(pe, axis, reference, rr * 1.5, rr * 1.6, color));
                covered[a..e].iter_mut().for_each(|c| *c = true);
            }
            for &(a, e) in &sheets {
                let (pa, pe) = (self.pos(run.atoms[a]), self.pos(run.atoms[e]));
                if (pe - pa).norm() < 1e-9 {
                    continue;
                }
                let axis = (pe - pa).normalize();
                let avg = sr.frames[a * m..=e * m]
                    .iter()
                    .fold(Vec3::zeros(), |acc, f| acc + f.binormal);
                let width_dir = orthogonalize(&avg, &axis)
                    .or_else(|| orthogonalize(&sr.frames[a * m].binormal, &axis))
                    .or_else(|| orthogonalize(&sr.frames[a * m].normal, &axis))
                    .expect("frame vectors span the plane normal to any axis");
                let color = self.ca_color(run.atoms[a]);
                out.push(plank(
                    pa,
                    pe,
                    width_dir,
                    self.style.ribbon_width * self.style.sheet_width_factor,
                    color,
                ));
                covered[a..e].iter_mut().for_each(|c| *c = true);
            }
            // coil pieces join every pair not inside one helix or sheet element
            for k in 0..run.atoms.len() - 1 {
                if covered[k] {
                    continue;
                }
                let (i, j) = (run.atoms[k], run.atoms[k + 1]);
                let color = mean_color(self.ca_color(i), self.ca_color(j));
                out.extend(cylinder(self.pos(i), self.pos(j), coil_r, color, false));
            }
        }
        out
    }

    fn strands(&self) -> Vec<ScenePrimitive> {
        let threads = self.style.strands_thread_count;
        let spread = self.style.angstrom(self.style.strands_units);
        let r = self.style.strands_thread_radius;
        let mut out = Vec::new();
        for run in backbone_runs(self.s) {
            if run.atoms.len() == 1 {
                out.push(self.lone(run.atoms[0], r));
                continue;
            }
            let sr = self.spline_run(&run);
            for t in 0..threads {
                let offset = if threads == 1 {
                    0.0
                } else {
                    -spread + 2.0 * spread * t as f64 / (threads - 1) as f64
                };
                let pts: Vec<Vec3> = sr
                    .points
                    .iter()
                    .zip(&sr.frames)
                    .map(|(p, f)| p + f.binormal * offset)
                    .collect();
                for (q, w) in pts.windows(2).enumerate() {
                    let color = self.ca_color(run.atoms[sr.residue_of[q]]);
                    out.extend(cylinder(w[0], w[1], r, color, false));
                }
            }
        }
        out
    }
}

/// Cone with its base centered at `base` opening along `axis`.
fn cone(base: Vec3, axis: Vec3, reference: Vec3, radius: f64, length: f64, color: Rgb) -> ScenePrimitive {
    let v = axis.cross(&reference);
    let mut vertices: Vec<Vec3> = (0..CONE_SEGMENTS)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / CONE_SEGMENTS as f64;
            base + (reference * a.cos() + v * a.sin()) * radius
        })
        .collect();
    let tip = vertices.len();
    vertices.push(base + axis * length);
    let center = vertices.len();
    vertices.push(base);
    let mut triangles = Vec::with_capacity(2 * CONE_SEGMENTS);
    for k in 0..CONE_SEGMENTS {
        let next = (k + 1) % CONE_SEGMENTS;
        triangles.push([k, next, tip]);
        triangles.push([next, k, center]);
    }
    ScenePrimitive::TriMesh {
        colors: vec![color; triangles.len()],
        vertices,
        triangles,
    }
}

/// Flat box from `a` toward `b` ending in a wedge arrowhead whose tip is `b`.
fn plank(a: Vec3, b: Vec3, width_dir: Vec3, width: f64, color: Rgb) -> ScenePrimitive {
    let axis = (b - a).normalize();
    let len = (b - a).norm();
    let head = (width * 0.8).min(len);
    let neck = b - axis * head;
    let up = axis.cross(&width_dir) * (PLANK_THICKNESS * 0.5);
    let side = width_dir * (width * 0.5);
    let wide = width_dir * (width * 0.75);
    let mut vertices = Vec::with_capacity(14);
    // body: 0..8
    for p in [a, neck] {
        for s in [-1.0, 1.0] {
            for u in [-1.0, 1.0] {
                vertices.push(p + side * s + up * u);
            }
        }
    }
    // arrowhead: 8..14
    for s in [-1.0, 1.0] {
        for u in [-1.0, 1.0] {
            vertices.push(neck + wide * s + up * u);
        }
    }
    vertices.push(b - up);
    vertices.push(b + up);
    let mut triangles = vec![
        // body faces (two triangles each)
        [0, 1, 3],
        [0, 3, 2],
        [4, 6, 7],
        [4, 7, 5],
        [0, 4, 5],
        [0, 5, 1],
        [2, 3, 7],
        [2, 7, 6],
        [0, 2, 6],
        [0, 6, 4],
        [1, 5, 7],
        [1, 7, 3],
    ];
    triangles.extend([
        // arrowhead: bottom, top, two slanted sides, back
        [8, 10, 12],
        [9, 13, 11],
        [8, 12, 13],
        [8, 13, 9],
        [10, 11, 13],
        [10, 13, 12],
        [8, 9, 11],
        [8, 11, 10],
    ]);
    ScenePrimitive::TriMesh {
        colors: vec![color; triangles.len()],
        vertices,
        triangles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdb::{parse_pdb, Atom, ProteinStructure, SecondaryStructureSpan};

    fn ca(serial: i64, seq: i32, p: Vec3) -> Atom {
        Atom {
            serial,
            name: " CA ".into(),
            element: "C".into(),
            residue_name: "ALA".into(),
            residue_seq: seq,
            chain_id: 'A',
            position: p,
            is_hetero: false,
        }
    }

    fn ca_chain(points: &[Vec3], spans: Vec<SecondaryStructureSpan>) -> ProteinStructure {
        let atoms = points
            .iter()
            .enumerate()
            .map(|(i, p)| ca(i as i64 + 1, i as i32 + 1, *p))
            .collect();
        ProteinStructure::from_parts("t", atoms, spans).unwrap()
    }

    fn helix_points(n: usize) -> Vec<Vec3> {
        (0..n)
            .map(|i| {
                let a = i as f64 * 100f64.to_radians();
                Vec3::new(2.3 * a.cos(), 2.3 * a.sin(), 1.5 * i as f64)
            })
            .collect()
    }

    fn cylinders(s: &Scene) -> usize {
        s.count(|p| matches!(p, ScenePrimitive::Cylinder { .. }))
    }

    fn spheres(s: &Scene) -> usize {
        s.count(|p| matches!(p, ScenePrimitive::Sphere { .. }))
    }

    #[test]
    fn wireframe_three_atom_chain() {
        let text = "\
ATOM      1  N   GLY A   1       0.000   0.000   0.000  1.00  0.00           N
ATOM      2  CA  GLY A   1       1.458   0.000   0.000  1.00  0.00           C
ATOM      3  C   GLY A   1       2.009   1.420   0.000  1.00  0.00           C
";
        let s = parse_pdb(text, "g").unwrap();
        let sc = build_scene(&s, RepresentationType::Wireframe, &StyleConfig::default()).unwrap();
        assert_eq!((cylinders(&sc), spheres(&sc)), (2, 0));
        let bs = build_scene(&s, RepresentationType::BallAndStick, &StyleConfig::default()).unwrap();
        assert_eq!((cylinders(&bs), spheres(&bs)), (2, 3));
    }

    #[test]
    fn backbone_straight_line() {
        let pts: Vec<Vec3> = (0..5).map(|i| Vec3::new(3.8 * i as f64, 0.0, 0.0)).collect();
        let sc = build_scene(&ca_chain(&pts, vec![]), RepresentationType::Backbone, &StyleConfig::default()).unwrap();
        assert_eq!(sc.primitives.len(), 4);
        for (k, p) in sc.primitives.iter().enumerate() {
            let ScenePrimitive::Cylinder { end_a, end_b, radius, .. } = p else {
                panic!("expected cylinder");
            };
            assert_eq!((*end_a, *end_b), (pts[k], pts[k + 1]));
            assert!((radius - 0.6).abs() < 1e-12);
        }
    }

    #[test]
    fn lone_alpha_carbon_is_a_sphere() {
        let pts = vec![Vec3::zeros(), Vec3::new(10.0, 0.0, 0.0), Vec3::new(13.8, 0.0, 0.0)];
        let s = ca_chain(&pts, vec![]);
        assert_eq!(backbone_runs(&s).len(), 2);
        let sc = build_scene(&s, RepresentationType::Backbone, &StyleConfig::default()).unwrap();
        assert_eq!((cylinders(&sc), spheres(&sc)), (1, 1));
    }

    #[test]
    fn rockets_one_helix_span() {
        let span = SecondaryStructureSpan {
            kind: SsKind::Helix,
            chain_id: 'A',
            start_residue_seq: 3,
            end_residue_seq: 10,
        };
        let s = ca_chain(&helix_points(12), vec![span]);
        let sc = build_scene(&s, RepresentationType::Rockets, &StyleConfig::default()).unwrap();
        let capped = sc.count(|p| matches!(p, ScenePrimitive::Cylinder { capped: true, .. }));
        let meshes = sc.count(|p| matches!(p, ScenePrimitive::TriMesh { .. }));
        assert_eq!((capped, meshes), (1, 1));
        // two coil joins on each side of the span
        assert_eq!(sc.count(|p| matches!(p, ScenePrimitive::Cylinder { capped: false, .. })), 4);
    }

    #[test]
    fn cartoon_adds_arrowheads_on_sheets() {
        let pts: Vec<Vec3> = (0..10)
            .map(|i| Vec3::new(3.3 * i as f64, if i % 2 == 0 { 0.0 } else { 1.0 }, 0.1 * (i * i) as f64))
            .collect();
        let span = SecondaryStructureSpan {
            kind: SsKind::Sheet,
            chain_id: 'A',
            start_residue_seq: 2,
            end_residue_seq: 7,
        };
        let s = ca_chain(&pts, vec![span]);
        let st = StyleConfig::default();
        let ribbons = build_scene(&s, RepresentationType::Ribbons, &st).unwrap();
        let cartoon = build_scene(&s, RepresentationType::Cartoon, &st).unwrap();
        assert_eq!(ribbons.primitives.len(), 1);
        assert_eq!(cartoon.primitives.len(), 2);
        let ScenePrimitive::TriMesh { triangles, .. } = &ribbons.primitives[0] else {
            panic!("ribbon mesh")
        };
        assert_eq!(triangles.len(), 2 * 9 * st.spline_samples);
        let rockets = build_scene(&s, RepresentationType::Rockets, &st).unwrap();
        assert_eq!(rockets.count(|p| matches!(p, ScenePrimitive::TriMesh { .. })), 1);
    }

    #[test]
    fn strands_thread_count() {
        let s = ca_chain(&helix_points(6), vec![]);
        let st = StyleConfig::default();
        let sc = build_scene(&s, RepresentationType::Strands, &st).unwrap();
        assert_eq!(cylinders(&sc), 5 * 5 * st.spline_samples);
    }

    #[test]
    fn trace_follows_midpoints() {
        let pts: Vec<Vec3> = (0..4).map(|i| Vec3::new(3.8 * i as f64, 0.0, 0.0)).collect();
        let st = StyleConfig::default();
        let sc = build_scene(&ca_chain(&pts, vec![]), RepresentationType::Trace, &st).unwrap();
        let first = sc
            .primitives
            .iter()
            .find_map(|p| match p {
                ScenePrimitive::Cylinder { end_a, .. } => Some(*end_a),
                _ => None,
            })
            .unwrap();
        assert_eq!(first, Vec3::new(1.9, 0.0, 0.0));
        assert_eq!(cylinders(&sc), 2 * st.spline_samples);
    }

    #[test]
    fn empty_scene_errors() {
        let s = ca_chain(&[Vec3::zeros()], vec![]);
        assert_eq!(
            build_scene(&s, RepresentationType::Wireframe, &StyleConfig::default()),
            Err(ReprError::EmptyScene(RepresentationType::Wireframe))
        );
        assert!(build_scene(&s, RepresentationType::Spacefill, &StyleConfig::default()).is_ok());
    }

    #[test]
    fn spacefill_cap_is_optional() {
        let s = ca_chain(&[Vec3::zeros()], vec![]);
        let radius = |cap| {
            let st = StyleConfig {
                spacefill_cap: cap,
                ..StyleConfig::default()
            };
            match &build_scene(&s, RepresentationType::Spacefill, &st).unwrap().primitives[0] {
                ScenePrimitive::Sphere { radius, .. } => *radius,
                _ => unreachable!(),
            }
        };
        assert_eq!(radius(false), 1.7);
        assert!((radius(true) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn all_primitives_validate() {
        let s = ca_chain(&helix_points(15), vec![]);
        for rep in RepresentationType::ALL.into_iter().filter(|r| r.is_backbone_family()) {
            let sc = build_scene(&s, rep, &StyleConfig::default()).unwrap();
            sc.primitives.iter().for_each(|p| p.validate().unwrap());
        }
    }
}
