//! Render a structure in every representation style at one pose, plus a
//! handful of poses of one style.
//!
//! ```text
//! cargo run --release --example render_views -- [file.pdb] [out_dir]
//! ```

use std::path::PathBuf;

use protview::multiview::{fit_pose_camera, pose_scene, ViewPose, DEFAULT_MARGIN};
use protview::pdb::parse_pdb;
use protview::pipeline::synthetic_structure;
use protview::raster::{render, write_image, RenderConfig};
use protview::repr::{build_scene, RepresentationType, StyleConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let structure = match args.next() {
        Some(p) if p.ends_with(".pdb") => parse_pdb(&std::fs::read_to_string(&p)?, "input")?,
        _ => synthetic_structure("barrel", 1, 0.2, &mut ChaCha8Rng::seed_from_u64(3)),
    };
    let out = PathBuf::from(args.next().unwrap_or_else(|| "render_views_out".into()));
    std::fs::create_dir_all(&out)?;

    let style = StyleConfig::default();
    let config = RenderConfig::with_size(128);
    let center = structure.centroid();
    let pose = ViewPose::new(45.0, 45.0, 0.0);
    for rep in RepresentationType::ALL {
        let scene = match build_scene(&structure, rep, &style) {
            Ok(s) => s,
            Err(e) => {
                println!("{:<12} skipped: {e}", rep.label());
                continue;
            }
        };
        let camera = fit_pose_camera(&scene, &center, config.image_size, DEFAULT_MARGIN)?;
        let img = render(&pose_scene(&scene, &pose, &center), &camera, &config)?;
        let path = out.join(format!("{}.png", rep.name()));
        write_image(&img, &path)?;
        println!("{:<12} {:>5} primitives -> {}", rep.label(), scene.primitives.len(), path.display());
    }

    // one camera for every pose keeps the scale fixed
    let scene = build_scene(&structure, RepresentationType::Cartoon, &style)?;
    let camera = fit_pose_camera(&scene, &center, config.image_size, DEFAULT_MARGIN)?;
    for rz in [0.0, 90.0, 180.0] {
        let pose = ViewPose::new(0.0, 90.0, rz);
        let img = render(&pose_scene(&scene, &pose, &center), &camera, &config)?;
        write_image(&img, &out.join(format!("cartoon_{}.png", pose.name())))?;
    }
    Ok(())
}
