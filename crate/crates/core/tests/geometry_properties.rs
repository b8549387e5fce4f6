use nalgebra::{Rotation3, Unit};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use protview::multiview::{
    fit_camera, fit_pose_camera, pose_grid, pose_scene, rotation_matrix, RotationGrid, ViewPose, DEFAULT_MARGIN,
};
use protview::pdb::{infer_bonds, parse_pdb, ProteinStructure};
use protview::pipeline::synthetic_structure;
use protview::repr::{build_scene, color_for, ColorScheme, RepresentationType, Scene, ScenePrimitive, StyleConfig};
use protview::Vec3;

fn structure(seed: u64) -> ProteinStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = synthetic_structure("p", (seed % 2) as usize, 0.2, &mut rng);
    // go through text once so coordinates sit on the 3-decimal grid
    parse_pdb(&s.to_pdb(), "p").unwrap()
}

fn close(a: &Vec3, b: &Vec3, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn primitives_close(a: &ScenePrimitive, b: &ScenePrimitive, tol: f64) -> bool {
    use ScenePrimitive::*;
    match (a, b) {
        (
            Sphere { center: c1, radius: r1, color: k1 },
            Sphere { center: c2, radius: r2, color: k2 },
        ) => close(c1, c2, tol) && (r1 - r2).abs() <= tol && k1 == k2,
        (
            Cylinder { end_a: a1, end_b: b1, radius: r1, color: k1, capped: p1 },
            Cylinder { end_a: a2, end_b: b2, radius: r2, color: k2, capped: p2 },
        ) => close(a1, a2, tol) && close(b1, b2, tol) && (r1 - r2).abs() <= tol && k1 == k2 && p1 == p2,
        (
            TriMesh { vertices: v1, triangles: t1, colors: k1 },
            TriMesh { vertices: v2, triangles: t2, colors: k2 },
        ) => v1.len() == v2.len() && v1.iter().zip(v2).all(|(p, q)| close(p, q, tol)) && t1 == t2 && k1 == k2,
        _ => false,
    }
}

fn centroid_of_anchors(scene: &Scene) -> Vec3 {
    let sum = scene.primitives.iter().fold(Vec3::zeros(), |acc, p| acc + p.anchor());
    sum / scene.primitives.len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pdb_text_round_trip(seed in 0u64..1000) {
        let s = structure(seed);
        let again = parse_pdb(&s.to_pdb(), "p").unwrap();
        prop_assert_eq!(&again.atoms, &s.atoms);
        prop_assert_eq!(&again.ss_spans, &s.ss_spans);
        prop_assert_eq!(&again.bonds, &s.bonds);
    }

    #[test]
    fn bonds_are_unique_sorted_pairs(seed in 0u64..1000) {
        let s = structure(seed);
        let bonds = infer_bonds(&s.atoms);
        prop_assert!(bonds.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(bonds.iter().all(|(i, j)| i < j));
        // reversing atom order mirrors the pairs
        let mut rev = s.atoms.clone();
        rev.reverse();
        let n = rev.len();
        let mut mirrored: Vec<(usize, usize)> = infer_bonds(&rev)
            .into_iter()
            .map(|(i, j)| (n - 1 - j, n - 1 - i))
            .collect();
        mirrored.sort_unstable();
        prop_assert_eq!(mirrored, bonds);
    }

    #[test]
    fn removing_atoms_never_adds_bonds(seed in 0u64..1000, keep_every in 2usize..5) {
        let s = structure(seed);
        let kept: Vec<usize> = (0..s.atoms.len()).filter(|i| i % keep_every != 0).collect();
        let sub: Vec<_> = kept.iter().map(|&i| s.atoms[i].clone()).collect();
        let full = infer_bonds(&s.atoms);
        for (i, j) in infer_bonds(&sub) {
            prop_assert!(full.binary_search(&(kept[i], kept[j])).is_ok());
        }
    }

    #[test]
    fn centroid_translates_exactly(seed in 0u64..1000, tx in -64i32..64, ty in -64i32..64, tz in -64i32..64) {
        let s = structure(seed);
        let t = Vec3::new(f64::from(tx) * 0.5, f64::from(ty) * 0.25, f64::from(tz));
        let moved = s.map_positions(|p| p + t);
        let c = s.centroid();
        let m = moved.centroid();
        prop_assert!(close(&m, &(c + t), 1e-9), "{m} vs {}", c + t);
    }

    #[test]
    fn scenes_follow_rigid_motion(
        seed in 0u64..1000,
        axis in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        angle in -3.1f64..3.1,
        shift in (-30.0f64..30.0, -30.0f64..30.0, -30.0f64..30.0),
    ) {
        let axis = Vec3::new(axis.0, axis.1, axis.2);
        prop_assume!(axis.norm() > 0.1);
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        let t = Vec3::new(shift.0, shift.1, shift.2);
        let motion = |p: &Vec3| r * p + t;
        let s = structure(seed);
        let moved = s.map_positions(motion);
        let style = StyleConfig::default();
        for rep in RepresentationType::ALL {
            let a = build_scene(&moved, rep, &style).unwrap();
            let b = build_scene(&s, rep, &style).unwrap().map_points(motion);
            prop_assert_eq!(a.primitives.len(), b.primitives.len());
            for (i, (p, q)) in a.primitives.iter().zip(&b.primitives).enumerate() {
                prop_assert!(primitives_close(p, q, 1e-6), "{rep} primitive {i} differs");
            }
        }
    }

    #[test]
    fn cartoon_has_more_primitives_than_ribbons(seed in 0u64..1000) {
        let s = structure(seed);
        let style = StyleConfig::default();
        let ribbons = build_scene(&s, RepresentationType::Ribbons, &style).unwrap();
        let cartoon = build_scene(&s, RepresentationType::Cartoon, &style).unwrap();
        let has_sheet = s.ss_spans.iter().any(|sp| sp.kind == protview::pdb::SsKind::Sheet);
        if has_sheet {
            prop_assert!(cartoon.primitives.len() > ribbons.primitives.len());
        } else {
            prop_assert!(cartoon.primitives.len() >= ribbons.primitives.len());
        }
    }

    #[test]
    fn pose_count_is_product(nx in 1usize..6, ny in 1usize..6, nz in 1usize..6) {
        let axis = |n: usize| (0..n).map(|i| 30.0 * i as f64).collect::<Vec<_>>();
        let grid = RotationGrid { angles_x: axis(nx), angles_y: axis(ny), angles_z: axis(nz) };
        let poses = pose_grid(&grid).unwrap();
        prop_assert_eq!(poses.len(), nx * ny * nz);
        prop_assert_eq!(grid.pose_count(), nx * ny * nz);
    }

    #[test]
    fn centroid_is_a_fixed_point_of_posing(seed in 0u64..1000, rx in 0.0f64..360.0, ry in 0.0f64..360.0, rz in 0.0f64..360.0) {
        let scene = build_scene(&structure(seed), RepresentationType::BallAndStick, &StyleConfig::default()).unwrap();
        let c = centroid_of_anchors(&scene);
        let posed = pose_scene(&scene, &ViewPose::new(rx, ry, rz), &c);
        prop_assert!(close(&centroid_of_anchors(&posed), &c, 1e-9));
    }

    #[test]
    fn posed_scenes_stay_inside_the_fitted_camera(seed in 0u64..1000, pose_index in 0usize..125, size in 16u32..128) {
        let s = structure(seed);
        let scene = build_scene(&s, RepresentationType::Strands, &StyleConfig::default()).unwrap();
        let center = s.centroid();
        let camera = fit_pose_camera(&scene, &center, (size, size), DEFAULT_MARGIN).unwrap();
        let pose = pose_grid(&RotationGrid::default()).unwrap()[pose_index];
        let posed = pose_scene(&scene, &pose, &center);
        let (lo, hi) = posed.bounds().unwrap();
        for p in [camera.project(&lo), camera.project(&hi)] {
            prop_assert!(p.x >= 0.0 && p.x <= f64::from(size) && p.y >= 0.0 && p.y <= f64::from(size));
        }
        let fitted = fit_camera(&posed, (size, size), DEFAULT_MARGIN).unwrap();
        for p in [fitted.project(&lo), fitted.project(&hi)] {
            prop_assert!(p.x >= -1e-9 && p.x <= f64::from(size) + 1e-9 && p.y >= -1e-9 && p.y <= f64::from(size) + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rotations_are_orthonormal(rx in -720.0f64..720.0, ry in -720.0f64..720.0, rz in -720.0f64..720.0) {
        let r = rotation_matrix(&ViewPose::new(rx, ry, rz));
        let e = r.transpose() * r - nalgebra::Matrix3::identity();
        prop_assert!(e.abs().max() < 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn scenes_are_deterministic() {
    let s = structure(17);
    for rep in RepresentationType::ALL {
        let a = build_scene(&s, rep, &StyleConfig::default()).unwrap();
        let b = build_scene(&structure(17), rep, &StyleConfig::default()).unwrap();
        assert_eq!(a, b, "{rep}");
    }
}

#[test]
fn every_atom_gets_a_color_under_every_scheme() {
    let residues = [
        "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE", "LEU", "LYS", "MET", "PHE", "PRO", "SER",
        "THR", "TRP", "TYR", "VAL", "UNK", "HOH", "XYZ",
    ];
    let elements = ["C", "N", "O", "S", "H", "P", "FE", "ZN", "SE", "QQ"];
    let mut text = String::new();
    let mut serial = 1;
    for (ri, res) in residues.iter().enumerate() {
        for (ei, el) in elements.iter().enumerate() {
            let chain = (b'A' + (ri % 3) as u8) as char;
            text.push_str(&format!(
                "ATOM  {serial:>5} {:<4} {res:>3} {chain}{:>4}    {:>8.3}{:>8.3}{:>8.3}  1.00  0.00          {el:>2}\n",
                format!("{el}{ei}"),
                ri + 1,
                ri as f64 * 4.0,
                ei as f64 * 1.5,
                0.0
            ));
            serial += 1;
        }
    }
    let s = parse_pdb(&text, "corpus").unwrap();
    assert_eq!(s.atoms.len(), residues.len() * elements.len());
    for a in &s.atoms {
        for scheme in ColorScheme::ALL {
            // Rgb holds u8 channels, so being constructed at all means in range
            let c = color_for(a, scheme, &s);
            assert_eq!(c.0.len(), 3);
        }
    }
}
