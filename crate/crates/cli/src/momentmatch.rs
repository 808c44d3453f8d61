use std::path::PathBuf;

use advdiv::generators::catalog_by_name;
use advdiv::measures::{make_space, Metric};
use advdiv::momentmatch::{sample_matched, sample_unmatched, verify_optset, MomentPolytope, VerificationReport};
use advdiv::{DiscreteMeasure, SolveStatusKind, SolverConfig};
use clap::Args;
use serde::Serialize;

use crate::{parse_psi, read_measure, to_json, write_file, CliResult, Common, Format};

#[derive(Debug, Clone, Args, Serialize)]
pub struct MomentmatchArgs {
    /// f-divergence generator: kl, js, sqhellinger or tv.
    #[arg(long, default_value = "kl")]
    pub generator: String,
    /// Feature map: coordinates, one-hot or monomials:D.
    #[arg(long, default_value = "coordinates")]
    pub psi: String,
    /// Target measure JSON; defaults to the uniform measure on {0, 1, 2}.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Number of moment-matched measures to sample.
    #[arg(long, default_value_t = 8)]
    pub matched: usize,
    /// Number of unmatched measures to sample.
    #[arg(long, default_value_t = 4)]
    pub unmatched: usize,
    /// Minimum moment deviation of the unmatched measures.
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iters)]
    pub max_iters: usize,
    #[command(flatten)]
    pub common: Common,
}

/// Sample both classes, run the linear f-GAN on each, and report.
///
/// Matched measures use `seed`; unmatched measure `i` uses `seed + 1 + i`.
pub fn run_momentmatch(a: &MomentmatchArgs) -> CliResult<i32> {
    let target = match &a.target {
        Some(path) => read_measure(path)?,
        None => DiscreteMeasure::uniform(make_space(vec![vec![0.0], vec![1.0], vec![2.0]], Metric::Euclidean)?),
    };
    let g = catalog_by_name(&a.generator)?;
    let psi = parse_psi(&a.psi, target.space().clone())?;
    let polytope = MomentPolytope::new(psi, target)?;
    let matched = sample_matched(&polytope, a.matched, a.common.seed);
    let unmatched = (0..a.unmatched as u64)
        .map(|i| sample_unmatched(&polytope, a.margin, a.common.seed.wrapping_add(1 + i)))
        .collect::<advdiv::Result<Vec<_>>>()?;
    let cfg = SolverConfig { max_iters: a.max_iters, ..SolverConfig::default() };
    let report = verify_optset(&g, &polytope, &matched, &unmatched, &cfg)?;

    #[derive(Serialize)]
    struct Body<'a> {
        moments: &'a [f64],
        singleton: bool,
        report: &'a VerificationReport,
    }
    let body = Body { moments: polytope.moments(), singleton: polytope.is_singleton(), report: &report };
    let json = to_json(a, body)?;
    print!("{json}");
    if let Some(dir) = &a.common.output_dir {
        if a.common.wants(Format::Json) {
            write_file(dir, "momentmatch.json", &json)?;
        }
    }
    // A value read off an unfinished ascent certifies nothing.
    let stalled = report.rows.iter().any(|r| r.status.kind == SolveStatusKind::IterationLimit);
    Ok(if stalled {
        eprintln!("error: the ascent hit the iteration limit on at least one measure");
        3
    } else if report.passed {
        0
    } else {
        1
    })
}
