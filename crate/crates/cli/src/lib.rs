//! Command-line front end for `advdiv`.
//!
//! Three subcommands: `divergence` evaluates one engine on two measure
//! files, `momentmatch` certifies the minimizing set of a linear f-GAN, and
//! `hierarchy` runs the strength experiment and writes JSON, CSV and SVG.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input, 3 solver failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod divergence;
mod error;
mod hierarchy;
mod momentmatch;
pub mod plot;

pub use divergence::{run_divergence, DivergenceArgs, EngineKind};
pub use error::{CliError, CliResult};
pub use hierarchy::{run_hierarchy, HierarchyArgs, HierarchyRun};
pub use momentmatch::{run_momentmatch, MomentmatchArgs};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "advdiv", version, about = "Adversarial divergences on finite metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one divergence between two measure files.
    Divergence(DivergenceArgs),
    /// Certify that a linear f-GAN vanishes exactly on moment-matched measures.
    Momentmatch(MomentmatchArgs),
    /// Trace every engine on the sequence suite and rebuild the strength order.
    Hierarchy(HierarchyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Seed for every random draw.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Directory for report files. Nothing is written when absent, except by
    /// `hierarchy`, which defaults to `advdiv-out`.
    #[arg(long)]
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "json,csv,svg")]
    pub formats: Vec<Format>,
}

impl Common {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// Run a parsed command line and return its exit code.
pub fn run(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Divergence(a) => run_divergence(a),
        Command::Momentmatch(a) => run_momentmatch(a),
        Command::Hierarchy(a) => {
            let r = run_hierarchy(a)?;
            for (k, class) in r.report.classes.iter().enumerate() {
                println!("class {k}: {}", class.join(", "));
            }
            println!("cover edges: {:?}", r.report.hasse);
            println!("matches expected order: {}", r.report.matches_expected);
            println!("weak-convergence violations: {}", r.weak_rows.iter().filter(|w| w.violation).count());
            for path in &r.written {
                println!("wrote {}", path.display());
            }
            Ok(r.exit_code)
        }
    }
}

/// Report envelope: every JSON document carries the version and the flags.
#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    version: &'static str,
    config_echo: &'a C,
    #[serde(flatten)]
    body: R,
}

fn to_json<C: Serialize, R: Serialize>(config: &C, body: R) -> CliResult<String> {
    let env = Envelope { version: VERSION, config_echo: config, body };
    serde_json::to_string_pretty(&env).map(|s| s + "\n").map_err(|source| CliError::Json { path: PathBuf::from("<report>"), source })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn read_measure(path: &Path) -> CliResult<advdiv::DiscreteMeasure> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let doc: advdiv::measures::MeasureDoc =
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    Ok(doc.to_measure()?)
}

/// Feature map from a flag: `coordinates`, `one-hot`, or `monomials:D`.
fn parse_psi(spec: &str, space: std::sync::Arc<advdiv::FiniteMetricSpace>) -> CliResult<advdiv::FeatureMap> {
    let psi = match spec.split_once(':') {
        None if spec == "coordinates" => advdiv::FeatureMap::coordinates(space)?,
        None if spec == "one-hot" => advdiv::FeatureMap::one_hot(space)?,
        Some(("monomials", d)) => {
            let degree = d.parse().map_err(|_| CliError::Usage(format!("bad monomial degree {d:?}")))?;
            advdiv::FeatureMap::monomials(space, degree)?
        }
        _ => return Err(CliError::Usage(format!("unknown feature map {spec:?}; use coordinates, one-hot or monomials:D"))),
    };
    Ok(psi)
}

/// Thread pool honoring `ADVDIV_THREADS`; the global pool when unset.
fn thread_pool() -> CliResult<Option<rayon::ThreadPool>> {
    let Ok(raw) = std::env::var("ADVDIV_THREADS") else { return Ok(None) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("ADVDIV_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))
}
