//! End to end on a small synthetic dataset: generate structures, render
//! two styles, cross-validate, fuse and print the summary table.
//!
//! ```text
//! cargo run --release --example synthetic_pipeline -- [out_dir]
//! ```
//! Kept small (8 proteins, 8 views, 2 folds) so it runs in well under a minute.

use std::path::PathBuf;

use protview::pipeline::{cmd_run, write_synthetic_dataset, RunConfig, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "synthetic_pipeline_out".into()));
    let manifest = write_synthetic_dataset(
        &out.join("data"),
        &SyntheticConfig {
            per_class: 4,
            ..SyntheticConfig::default()
        },
    )?;
    let mut config = RunConfig {
        views: Some(8),
        folds: 2,
        output_dir: out.join("run"),
        ..RunConfig::default()
    };
    config.train.epochs = 5;
    let summary = cmd_run(&manifest, &config)?;
    print!("{}", std::fs::read_to_string(summary.output_dir.join("summary.txt"))?);
    Ok(())
}
