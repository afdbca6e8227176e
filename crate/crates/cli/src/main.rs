//! `horoprod-lab`: reproducible experiments on random trees and their
//! horospheric products.
//!
//! Exit status is 0 on success, 2 when a mathematical check fails and 1 on
//! any other error.

mod config;
mod experiments;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{merge, ConfigDoc, Params, Run};
use experiments::{
    BuildWindowArgs, ConformalArgs, FolnerArgs, InvarianceArgs, MassMeanArgs, SampleTreeArgs,
    WalkArgs,
};
use sweep::SweepArgs;

#[derive(Parser, Debug)]
#[command(name = "horoprod-lab", version, about)]
struct Cli {
    /// JSON config document (`"format": "horoprod-config/1"`); flags given
    /// on the command line take precedence over its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for reports and exports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a Galton–Watson tree and write it as a tree document.
    SampleTree(SampleTreeArgs),
    /// Monte Carlo mean of |S^n|/m^n (augmented by default).
    MassMean(MassMeanArgs),
    /// Exact conformality checks on random trees.
    Conformal(ConformalArgs),
    /// Invariance test of the size-biased augmented measure.
    Invariance(InvarianceArgs),
    /// Build a horospheric product window, check its degrees, export it.
    BuildWindow(BuildWindowArgs),
    /// Killed random walk return probabilities on a window.
    Walk(WalkArgs),
    /// Small-boundary sets on a window.
    Folner(FolnerArgs),
    /// Parameter grid with one CSV row per cell.
    Sweep(SweepArgs),
    /// Run the experiment named in `--config`.
    Run,
}

const DEFAULT_OUT: &str = "horoprod-out";

fn exec<T: Params>(
    name: &str,
    flags: &T,
    cfg: Option<&ConfigDoc>,
    out: Option<PathBuf>,
    body: fn(T, &Run) -> Result<bool>,
) -> Result<bool> {
    let params = merge(flags, cfg, name)?;
    let out = out
        .or_else(|| cfg.and_then(|c| c.out.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let run = Run::new(name, &params, params.seed(), &out)?;
    body(params, &run)
}

fn dispatch(cli: Cli) -> Result<bool> {
    let cfg = cli.config.as_deref().map(ConfigDoc::load).transpose()?;
    let cfg = cfg.as_ref();
    let out = cli.out;
    match cli.command {
        Command::SampleTree(a) => exec("sample-tree", &a, cfg, out, experiments::sample_tree),
        Command::MassMean(a) => exec("mass-mean", &a, cfg, out, experiments::mass_mean),
        Command::Conformal(a) => exec("conformal", &a, cfg, out, experiments::conformal),
        Command::Invariance(a) => exec("invariance", &a, cfg, out, experiments::invariance),
        Command::BuildWindow(a) => exec("build-window", &a, cfg, out, experiments::build_window),
        Command::Walk(a) => exec("walk", &a, cfg, out, experiments::walk),
        Command::Folner(a) => exec("folner", &a, cfg, out, experiments::folner),
        Command::Sweep(a) => exec("sweep", &a, cfg, out, sweep::sweep),
        Command::Run => {
            let doc = cfg.context("`run` needs --config")?;
            match doc.experiment.as_str() {
                "sample-tree" => exec(
                    "sample-tree",
                    &SampleTreeArgs::default(),
                    cfg,
                    out,
                    experiments::sample_tree,
                ),
                "mass-mean" => exec(
                    "mass-mean",
                    &MassMeanArgs::default(),
                    cfg,
                    out,
                    experiments::mass_mean,
                ),
                "conformal" => exec(
                    "conformal",
                    &ConformalArgs::default(),
                    cfg,
                    out,
                    experiments::conformal,
                ),
                "invariance" => exec(
                    "invariance",
                    &InvarianceArgs::default(),
                    cfg,
                    out,
                    experiments::invariance,
                ),
                "build-window" => exec(
                    "build-window",
                    &BuildWindowArgs::default(),
                    cfg,
                    out,
                    experiments::build_window,
                ),
                "walk" => exec("walk", &WalkArgs::default(), cfg, out, experiments::walk),
                "folner" => exec(
                    "folner",
                    &FolnerArgs::default(),
                    cfg,
                    out,
                    experiments::folner,
                ),
                "sweep" => exec("sweep", &SweepArgs::default(), cfg, out, sweep::sweep),
                other => Err(config::ConfigError::Schema {
                    path: doc.path.clone(),
                    message: format!("unknown experiment `{other}`"),
                }
                .into()),
            }
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("HOROPROD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("HOROPROD_THREADS={v} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| dispatch(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
