//! `dgff` — experiment driver for the DGFF library.
//!
//! Subcommands: `green`, `sample`, `maxima`, `tails`, `verify`, `kernel`.
//! Every run writes a manifest next to its outputs; `--replay manifest.json`
//! re-executes a recorded run and reproduces its outputs byte for byte.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage error, 3 resource limit.

mod commands;
mod manifest;
mod options;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifest::RunManifest;
use options::{parse_config_file, CliError, CliResult, OptMap};

#[derive(Parser)]
#[command(name = "dgff", version, about = "Discrete Gaussian free field experiments")]
struct Cli {
    /// Worker thread cap (default: GFF_THREADS env var, else all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Flat key = value config file; command-line flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: current directory)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Re-execute a recorded run from its manifest
    #[arg(long, value_name = "MANIFEST")]
    replay: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Variance profile and covariance pairs of a region's Green operator
    Green(GreenArgs),
    /// Binary dump of field samples on a box
    Sample(SampleArgs),
    /// Per-replicate maxima and moment estimates
    Maxima(CommonBoxArgs),
    /// Empirical tails of the centered maximum with decay-rate fits
    Tails(TailsArgs),
    /// Run the Gaussian comparison suite and print a pass/fail table
    Verify(VerifyArgs),
    /// Potential-kernel table (and optionally a box harmonic kernel) as CSV
    Kernel(KernelArgs),
}

#[derive(Args)]
struct GreenArgs {
    /// Box side length n (grid of (n+1)×(n+1) vertices)
    #[arg(long = "box", value_name = "N")]
    box_side: Option<i32>,
    /// Ball radius (centered at the origin) instead of a box
    #[arg(long, value_name = "R")]
    ball: Option<i32>,
    /// Pairs "a:b[;c:d...]" with each side "x,y" or "center"
    #[arg(long)]
    pairs: Option<String>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long = "box", value_name = "N")]
    box_side: Option<i32>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CommonBoxArgs {
    #[arg(long = "box", value_name = "N")]
    box_side: Option<i32>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TailsArgs {
    #[arg(long = "box", value_name = "N")]
    box_side: Option<i32>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// right, left or both
    #[arg(long)]
    side: Option<String>,
    /// Lambda grid "lo:hi:step"
    #[arg(long)]
    grid: Option<String>,
    /// Fit window "lo:hi" (default: right [1,3], left [0.5,2])
    #[arg(long)]
    window: Option<String>,
    /// mean or median
    #[arg(long)]
    centering: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// fast (exact checks only) or full (adds the Monte Carlo checks)
    #[arg(long)]
    level: Option<String>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long = "max-radius", value_name = "R")]
    max_radius: Option<i32>,
    /// Also dump the harmonic kernel of the side-N box
    #[arg(long = "box", value_name = "N")]
    box_side: Option<i32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Resource(msg)) => {
            eprintln!("error: resource limit: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    init_threads(cli.threads)?;

    if let Some(manifest_path) = cli.replay {
        if cli.command.is_some() {
            return Err(CliError::Usage(
                "--replay cannot be combined with a subcommand".into(),
            ));
        }
        let manifest = RunManifest::load(&manifest_path)
            .map_err(|e| CliError::Usage(format!("cannot load manifest: {e}")))?;
        let out_dir = match cli.out {
            Some(dir) => dir,
            None => manifest_path
                .parent()
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(".")),
        };
        std::fs::create_dir_all(&out_dir)?;
        let opts = OptMap(manifest.config.clone());
        return dispatch(&manifest.command, &opts, &out_dir, false);
    }

    let command = cli
        .command
        .ok_or_else(|| CliError::Usage("a subcommand or --replay is required".into()))?;
    let file_cfg = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => Default::default(),
    };

    let mut opts = OptMap(file_cfg);
    let name = apply_args(&command, &mut opts);
    let out_dir = cli.out.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    dispatch(name, &opts, &out_dir, true)
}

/// Overlay command-line values onto the config-file map; flags win.
fn apply_args<'a>(command: &'a Command, opts: &mut OptMap) -> &'a str {
    match command {
        Command::Green(a) => {
            opts.set_opt("box", a.box_side);
            opts.set_opt("ball", a.ball);
            opts.set_opt("pairs", a.pairs.clone());
            "green"
        }
        Command::Sample(a) => {
            opts.set_opt("box", a.box_side);
            opts.set_opt("reps", a.reps);
            opts.set_opt("seed", a.seed);
            "sample"
        }
        Command::Maxima(a) => {
            opts.set_opt("box", a.box_side);
            opts.set_opt("reps", a.reps);
            opts.set_opt("seed", a.seed);
            "maxima"
        }
        Command::Tails(a) => {
            opts.set_opt("box", a.box_side);
            opts.set_opt("reps", a.reps);
            opts.set_opt("seed", a.seed);
            opts.set_opt("side", a.side.clone());
            opts.set_opt("grid", a.grid.clone());
            opts.set_opt("window", a.window.clone());
            opts.set_opt("centering", a.centering.clone());
            "tails"
        }
        Command::Verify(a) => {
            opts.set_opt("level", a.level.clone());
            opts.set_opt("reps", a.reps);
            opts.set_opt("seed", a.seed);
            "verify"
        }
        Command::Kernel(a) => {
            opts.set_opt("max-radius", a.max_radius);
            opts.set_opt("box", a.box_side);
            "kernel"
        }
    }
}

fn dispatch(name: &str, opts: &OptMap, out_dir: &std::path::Path, manifest: bool) -> CliResult<bool> {
    match name {
        "green" => commands::cmd_green(opts, out_dir, manifest).map(|_| true),
        "sample" => commands::cmd_sample(opts, out_dir, manifest).map(|_| true),
        "maxima" => commands::cmd_maxima(opts, out_dir, manifest).map(|_| true),
        "tails" => commands::cmd_tails(opts, out_dir, manifest).map(|_| true),
        "verify" => commands::cmd_verify(opts, out_dir, manifest),
        "kernel" => commands::cmd_kernel(opts, out_dir, manifest).map(|_| true),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

fn init_threads(flag: Option<usize>) -> CliResult<()> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var("GFF_THREADS") {
            Ok(v) => Some(v.parse().map_err(|_| {
                CliError::Usage(format!("GFF_THREADS must be an integer, got {v:?}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        // results are thread-count invariant; this only caps the worker pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(())
}
