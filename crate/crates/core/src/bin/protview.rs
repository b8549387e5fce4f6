use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use protview::cnn::{NetworkSpec, Shape};
use protview::multiview::RotationGrid;
use protview::pipeline::{
    cmd_evaluate, cmd_fuse, cmd_gradcheck, cmd_render, cmd_run, DatasetManifest, PipelineError, RunConfig,
};
use protview::repr::RepresentationType;

#[derive(Parser)]
#[command(name = "protview", version, about = "Render protein views, train per-style classifiers, fuse scores")]
struct Cli {
    /// Worker threads for rendering and batch evaluation.
    #[arg(long, global = true, env = "PROTVIEW_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render every protein x representation x pose into PNGs plus index.csv.
    Render(RunArgs),
    /// Render, cross-validate one CNN per representation, fuse and summarize.
    Run(RunArgs),
    /// Sum-rule fuse existing score CSVs.
    Fuse {
        #[arg(required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long, default_value = "fused")]
        name: String,
    },
    /// Recompute metrics from a score CSV.
    Evaluate { scores: PathBuf },
    /// Compare analytic and numerical gradients on random data.
    Gradcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random-network input side length.
        #[arg(long, default_value_t = 8)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        classes: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, short)]
    manifest: PathBuf,
    /// TOML run configuration; flags below override it.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated, e.g. `ribbons,strands` or `BALL&STICK`.
    #[arg(long, value_delimiter = ',')]
    representations: Option<Vec<RepresentationType>>,
    /// Uniform rotation step in degrees.
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    image_size: Option<u32>,
    /// Seeded pose budget instead of the full grid.
    #[arg(long)]
    views: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// View counts to sweep, comma-separated.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
}

impl RunArgs {
    fn resolve(&self) -> Result<(DatasetManifest, RunConfig), PipelineError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(o) = &self.output {
            c.output_dir.clone_from(o);
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(r) = &self.representations {
            c.representations.clone_from(r);
        }
        if let Some(step) = self.grid_step {
            c.grid = RotationGrid::uniform(step);
        }
        if let Some(s) = self.image_size {
            c.image_size = s;
        }
        if self.views.is_some() {
            c.views = self.views;
        }
        if let Some(f) = self.folds {
            c.folds = f;
        }
        if let Some(s) = &self.sweep {
            c.sweep.clone_from(s);
        }
        Ok((DatasetManifest::load(&self.manifest)?, c))
    }
}

fn execute(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Render(args) => {
            let (m, c) = args.resolve()?;
            let s = cmd_render(&m, &c)?;
            println!("{} rendered, {} up to date, {} indexed", s.rendered, s.skipped, s.rows.len());
        }
        Command::Run(args) => {
            let (m, c) = args.resolve()?;
            let s = cmd_run(&m, &c)?;
            let file = if s.sweep.is_empty() { "summary.txt" } else { "sweep.txt" };
            let path = s.output_dir.join(file);
            let text = std::fs::read_to_string(&path).map_err(|e| PipelineError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            print!("{text}");
        }
        Command::Fuse { inputs, output, name } => {
            let r = cmd_fuse(&inputs, &name, &output)?;
            print!("{}", r.to_text(&name, &[]));
        }
        Command::Evaluate { scores } => {
            let r = cmd_evaluate(&scores)?;
            print!("{}", r.to_text(&scores.display().to_string(), &[]));
        }
        Command::Gradcheck { seed, size, classes } => {
            let spec = NetworkSpec::desk_default(Shape::new(3, size, size), classes);
            match cmd_gradcheck(&spec, seed) {
                Ok(r) => println!(
                    "max relative error {:e} over {} parameters (seed {seed}): pass",
                    r.max_relative_error, r.parameters_checked
                ),
                Err(e) => {
                    println!("{e}: fail");
                    return Err(e);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            error!("cannot set worker count: {e}");
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::FAILURE
        }
    }
}
