use std::path::PathBuf;

use advdiv::generators::catalog_by_name;
use advdiv::{evaluate, DivergenceSpec, SolverConfig};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::{parse_psi, read_measure, to_json, write_file, CliResult, Common, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    Kl,
    #[value(alias = "rkl")]
    ReverseKl,
    Tv,
    Js,
    #[value(alias = "hellinger")]
    SqHellinger,
    Gan,
    LinearFgan,
    Mmd,
    Wasserstein1,
    Sinkhorn,
    WganGp,
    Trivial,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DivergenceArgs {
    #[arg(long, value_enum)]
    pub kind: EngineKind,
    /// Generator for `linear-fgan`.
    #[arg(long, default_value = "kl")]
    pub generator: String,
    /// Feature map for `linear-fgan`: coordinates, one-hot or monomials:D.
    #[arg(long, default_value = "one-hot")]
    pub psi: String,
    /// Lipschitz constant for `wasserstein1`.
    #[arg(long = "K", default_value_t = 1.0)]
    pub lipschitz: f64,
    /// Kernel bandwidth for `mmd`.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Entropic regularization for `sinkhorn`; 0 gives exact transport.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Penalty weight for `wgan-gp`.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Equality tolerance for `trivial`.
    #[arg(long, default_value_t = 1e-12)]
    pub tol_eq: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iters)]
    pub max_iters: usize,
    #[command(flatten)]
    pub common: Common,
    /// Measure JSON for μ.
    pub mu: PathBuf,
    /// Measure JSON for ν.
    pub nu: PathBuf,
}

fn closed(name: &str) -> CliResult<DivergenceSpec> {
    Ok(DivergenceSpec::ClosedFormF { generator: catalog_by_name(name)? })
}

/// Print the report for `τ(μ‖ν)` and optionally save it.
pub fn run_divergence(a: &DivergenceArgs) -> CliResult<i32> {
    let mu = read_measure(&a.mu)?;
    let nu = read_measure(&a.nu)?;
    let solver = SolverConfig { max_iters: a.max_iters, ..SolverConfig::default() };
    let spec = match a.kind {
        EngineKind::Kl => closed("kl")?,
        EngineKind::ReverseKl => closed("reversekl")?,
        EngineKind::Tv => closed("tv")?,
        EngineKind::Js => closed("js")?,
        EngineKind::SqHellinger => closed("sqhellinger")?,
        EngineKind::Gan => DivergenceSpec::GanObjective,
        EngineKind::LinearFgan => DivergenceSpec::LinearFGan {
            generator: catalog_by_name(&a.generator)?,
            features: parse_psi(&a.psi, mu.space().clone())?,
            solver,
        },
        EngineKind::Mmd => DivergenceSpec::Mmd { sigma: a.sigma },
        EngineKind::Wasserstein1 => DivergenceSpec::Wasserstein1 { lipschitz: a.lipschitz },
        EngineKind::Sinkhorn => DivergenceSpec::SinkhornOt { eps: a.eps, cost: None, solver },
        EngineKind::WganGp => DivergenceSpec::LinearWganGp { eta: a.eta },
        EngineKind::Trivial => DivergenceSpec::Trivial { tol_eq: a.tol_eq },
    };
    let report = evaluate(&spec, &mu, &nu)?;

    #[derive(Serialize)]
    struct Body<'a> {
        spec: &'a DivergenceSpec,
        report: &'a advdiv::DivergenceReport,
    }
    let json = to_json(a, Body { spec: &spec, report: &report })?;
    print!("{json}");
    if let Some(dir) = &a.common.output_dir {
        if a.common.wants(Format::Json) {
            write_file(dir, "divergence.json", &json)?;
        }
    }
    Ok(0)
}
