use std::fmt::Write as _;
use std::path::PathBuf;

use advdiv::convergence::{
    default_suite, delta_to_one, expected_structure, hierarchy_from_traces, strict_specs, trace,
    weak_convergence_check, HierarchyReport, SequenceTrace, WeakConvergenceRow, TOL_CONV,
};
use advdiv::{DivergenceSpec, ExtendedReal, MeasureSequence};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use crate::{plot, thread_pool, to_json, write_file, CliError, CliResult, Common, Format};

#[derive(Debug, Clone, Args, Serialize)]
pub struct HierarchyArgs {
    #[arg(long, default_value_t = 32)]
    pub n_terms: usize,
    #[arg(long, default_value_t = 256)]
    pub n_grid: usize,
    #[arg(long, default_value_t = TOL_CONV)]
    pub tol_conv: f64,
    /// Kernel bandwidth of the MMD engine.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[command(flatten)]
    pub common: Common,
}

/// Everything a hierarchy run produced.
#[derive(Debug)]
pub struct HierarchyRun {
    pub report: HierarchyReport,
    pub weak_rows: Vec<WeakConvergenceRow>,
    pub failures: Vec<String>,
    pub json: String,
    pub csv: String,
    pub svg: String,
    pub written: Vec<PathBuf>,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct Body<'a> {
    matches_expected: bool,
    weak_convergence_violations: usize,
    expected: advdiv::convergence::Structure,
    report: &'a HierarchyReport,
    weak_convergence: &'a [WeakConvergenceRow],
    failures: &'a [String],
}

/// Trace the strict engines on the suite plus `delta_to_one`, build the
/// strength order from the diagram engines, and check that no engine
/// converges where the Wasserstein oracle does not.
///
/// Exit code 0 when the order matches and there are no violations, 1 when
/// either check fails, 3 when any engine failed on any item.
pub fn run_hierarchy(a: &HierarchyArgs) -> CliResult<HierarchyRun> {
    if a.n_terms < 2 || a.n_grid < a.n_terms || !(a.tol_conv > 0.0) || !(a.sigma > 0.0) {
        return Err(CliError::Usage("need n_terms ≥ 2, n_grid ≥ n_terms, tol_conv > 0 and sigma > 0".into()));
    }
    let suite = default_suite(a.n_terms, a.n_grid)?;
    let mut checked: Vec<MeasureSequence> = suite.clone();
    checked.push(delta_to_one(a.n_terms, a.n_grid)?);
    let specs = strict_specs(a.sigma);

    let jobs: Vec<(usize, usize)> =
        (0..specs.len()).flat_map(|e| (0..checked.len()).map(move |s| (e, s))).collect();
    let compute = || jobs.par_iter().map(|&(e, s)| trace(&specs[e], &checked[s])).collect::<advdiv::Result<Vec<_>>>();
    let flat = match thread_pool()? {
        Some(pool) => pool.install(compute),
        None => compute(),
    }?;
    let mut all: Vec<Vec<SequenceTrace>> = vec![Vec::with_capacity(checked.len()); specs.len()];
    for ((e, _), t) in jobs.iter().zip(flat) {
        all[*e].push(t);
    }

    let failures: Vec<String> = all
        .iter()
        .flatten()
        .flat_map(|t| t.failures.iter().map(move |(k, msg)| format!("{} on {} item {k}: {msg}", t.divergence.label(), t.sequence)))
        .collect();
    let weak_rows = weak_convergence_check(&all, &checked, a.tol_conv)?;
    let violations = weak_rows.iter().filter(|r| r.violation).count();

    let diagram: Vec<Vec<SequenceTrace>> = all
        .iter()
        .filter(|row| !matches!(row[0].divergence, DivergenceSpec::GanObjective))
        .map(|row| row[..suite.len()].to_vec())
        .collect();
    let report = hierarchy_from_traces(diagram, a.tol_conv)?;

    let body = Body {
        matches_expected: report.matches_expected,
        weak_convergence_violations: violations,
        expected: expected_structure(),
        report: &report,
        weak_convergence: &weak_rows,
        failures: &failures,
    };
    let json = to_json(a, body)?;
    let csv = trace_csv(&report.traces);
    let svg = plot::gap_grid(&report.engines, &report.sequences, &report.traces);

    let dir = a.common.output_dir.clone().unwrap_or_else(|| PathBuf::from("advdiv-out"));
    let mut written = Vec::new();
    for (fmt, name, contents) in
        [(Format::Json, "hierarchy.json", &json), (Format::Csv, "traces.csv", &csv), (Format::Svg, "hierarchy.svg", &svg)]
    {
        if a.common.wants(fmt) {
            written.push(write_file(&dir, name, contents)?);
        }
    }

    let exit_code = if !failures.is_empty() {
        3
    } else if report.matches_expected && violations == 0 {
        0
    } else {
        1
    };
    Ok(HierarchyRun { report, weak_rows, failures, json, csv, svg, written, exit_code })
}

fn fmt_ext(x: ExtendedReal) -> String {
    match x {
        ExtendedReal::Finite(v) => format!("{v:e}"),
        ExtendedReal::PosInfinity => "inf".into(),
    }
}

/// One row per (engine, sequence, n): `engine,sequence,n,value,gap`.
pub fn trace_csv(traces: &[Vec<SequenceTrace>]) -> String {
    let mut out = String::from("engine,sequence,n,value,gap\n");
    for t in traces.iter().flatten() {
        let label = t.divergence.label();
        for ((n, v), g) in t.steps.iter().zip(&t.values).zip(t.gaps()) {
            let _ = writeln!(out, "{label},{},{n},{},{}", t.sequence, fmt_ext(*v), fmt_ext(g));
        }
    }
    out
}
