//! `icdc`: synthesize datasets, generate correspondences, run the pose
//! benchmarks, partition maps into blocks and evaluate loss kernels.

mod commands;
mod config;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::benchmark::{AbsposeArgs, RelposeArgs, Source};
use commands::blocks::BlocksArgs;
use commands::correspond::CorrespondArgs;
use commands::losses::{LossArgs, LossKind};
use config::RunConfig;
use error::{CliError, CliResult};
use run::Run;

#[derive(Parser)]
#[command(name = "icdc", version, about = "Cross-domain correspondences from rendered depth")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed; falls back to the config, then ICDC_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel stages. Outputs do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic dataset: depth PFMs, poses, intrinsics, sparse map.
    Synth {
        #[arg(long)]
        scene: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate correspondences between two frames.
    Correspond {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        reference: u64,
        #[arg(long)]
        query: u64,
        /// icdc, homography or sparse-map.
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        stride: Option<u32>,
        /// Output CSV; the sidecar gets `.meta` appended.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the little-endian f32 form to `<out>.bin`.
        #[arg(long)]
        binary: bool,
    },
    /// Relative or absolute pose benchmark.
    Benchmark {
        #[command(subcommand)]
        mode: BenchmarkMode,
    },
    /// Partition a trajectory into blocks and report alignment.
    Blocks {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        trajectory: String,
        /// Report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Loss kernels.
    Losses {
        #[command(subcommand)]
        action: LossesAction,
    },
}

#[derive(Subcommand)]
enum BenchmarkMode {
    Relpose {
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// icdc, sparse-map, or a directory of `<ref>_<query>.csv` files.
        #[arg(long, default_value = "icdc")]
        source: String,
        #[arg(long)]
        stride: Option<u32>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        reference_trajectory: Option<String>,
        #[arg(long)]
        query_trajectory: Option<String>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Abspose {
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Estimated poses in the pose-file format.
        #[arg(long)]
        estimates: Option<PathBuf>,
        /// Estimates store camera-to-world transforms.
        #[arg(long)]
        world_from_camera: bool,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LossesAction {
    /// Print a loss value and its gradients for CSV input.
    Eval {
        #[arg(long, value_enum)]
        kind: LossKind,
        #[arg(long)]
        input: PathBuf,
        /// Patch side for the peakiness term.
        #[arg(long, default_value_t = 4)]
        patch: usize,
        /// Also write the rows to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn set_opt<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    set_opt(&mut cfg.jobs, cli.jobs);
    let jobs = cfg.jobs;
    let seed = cli.seed;
    let task: Box<dyn FnOnce() -> CliResult<()> + Send> = match cli.command {
        Command::Synth { scene, out } => {
            set_opt(&mut cfg.paths.scene, scene);
            set_opt(&mut cfg.output, out);
            let run = Run::new(cfg, seed, "synth")?;
            Box::new(move || commands::synth::run(&run))
        }
        Command::Correspond { dataset, reference, query, method, alpha, beta, stride, out, binary } => {
            set_opt(&mut cfg.paths.dataset, dataset);
            let c = &mut cfg.correspond;
            set(&mut c.method, method);
            set(&mut c.alpha_px, alpha);
            set(&mut c.beta_m, beta);
            set(&mut c.stride, stride);
            let run = Run::new(cfg, seed, "correspond")?;
            commands::correspond::method(&run)?;
            let args = CorrespondArgs { reference, query, out, binary };
            Box::new(move || commands::correspond::run(&run, &args))
        }
        Command::Benchmark { mode: BenchmarkMode::Relpose { dataset, source, stride, alpha, beta, reference_trajectory, query_trajectory, out } } => {
            set_opt(&mut cfg.paths.dataset, dataset);
            set_opt(&mut cfg.output, out);
            let c = &mut cfg.correspond;
            set(&mut c.stride, stride);
            set(&mut c.alpha_px, alpha);
            set(&mut c.beta_m, beta);
            let run = Run::new(cfg, seed, "benchmark relpose")?;
            let args = RelposeArgs { source: Source::parse(&source), reference_trajectory, query_trajectory };
            Box::new(move || commands::benchmark::relpose(&run, &args))
        }
        Command::Benchmark { mode: BenchmarkMode::Abspose { dataset, estimates, world_from_camera, out } } => {
            set_opt(&mut cfg.paths.dataset, dataset);
            set_opt(&mut cfg.paths.estimates, estimates);
            set_opt(&mut cfg.output, out);
            let run = Run::new(cfg, seed, "benchmark abspose")?;
            let args = AbsposeArgs { world_from_camera };
            Box::new(move || commands::benchmark::abspose(&run, &args))
        }
        Command::Blocks { dataset, trajectory, out } => {
            set_opt(&mut cfg.paths.dataset, dataset);
            let run = Run::new(cfg, seed, "blocks")?;
            let args = BlocksArgs { trajectory, out };
            Box::new(move || commands::blocks::run(&run, &args))
        }
        Command::Losses { action: LossesAction::Eval { kind, input, patch, out } } => {
            let run = Run::new(cfg, seed, "losses eval")?;
            let args = LossArgs { kind, input, patch, out };
            Box::new(move || commands::losses::eval(&run, &args))
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::config("--jobs must be >= 1"));
        }
        pool = pool.num_threads(n);
    }
    pool.build().map_err(CliError::config)?.install(task)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("icdc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
