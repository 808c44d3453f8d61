//! # Divergence engines
//!
//! One engine per objective family. Every engine returns a
//! [`DivergenceReport`] carrying the value, the global minimum of `τ(μ‖·)`
//! (so callers can form the gap), an optional optimal discriminator and the
//! solver status.
//!
//! | Spec | Value | Minimum |
//! |------|-------|---------|
//! | `ClosedFormF` | `Σ νᵢ f(μᵢ/νᵢ)` | 0 |
//! | `GanObjective` | `sup_u E_μ log u + E_ν log(1 − u)` | `−log 4` |
//! | `LinearFGan` | `sup_θ E_μ[θᵀ(ψ,1)] − E_ν[f*(θᵀ(ψ,1))]` | 0 |
//! | `Mmd` | `‖E_μ k(·,x) − E_ν k(·,y)‖` (Gaussian k) | 0 |
//! | `Wasserstein1` | `sup_{‖f‖_Lip ≤ K} E_μ f − E_ν f` | 0 |
//! | `SinkhornOt` | entropic transport dual | `τ(μ‖μ)` |
//! | `LinearWganGp` | `a + a²/(4η)`, `a = ‖E_μ x − E_ν x‖` | 0 |
//! | `Trivial` | 0 if `μ = ν`, else `+∞` | 0 |

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{closed_form_fdiv, ExtendedReal, FGenerator, GeneratorKind};
use crate::measures::{same_space, DiscreteMeasure, FiniteMetricSpace};
use crate::solvers::{
    maximize_concave, sinkhorn_iterate, solve_lp, solve_transport_lp, LpOutcome, SolveStatus, SolveStatusKind,
    SolverConfig,
};

const LN4: f64 = 2.0 * std::f64::consts::LN_2;

/// Feature values `ψⱼ(xᵢ)` as an `n × d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    space: Arc<FiniteMetricSpace>,
    values: Array2<f64>,
}

impl FeatureMap {
    pub fn new(space: Arc<FiniteMetricSpace>, values: Array2<f64>) -> Result<Self> {
        if values.nrows() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), got: values.nrows() });
        }
        if values.ncols() == 0 {
            return Err(Error::InvalidParameter("feature map needs at least one feature".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("feature values must be finite".into()));
        }
        Ok(Self { space, values })
    }

    /// `ψ(x) = x`, the coordinate embedding.
    pub fn coordinates(space: Arc<FiniteMetricSpace>) -> Result<Self> {
        Self::monomials(space, 1)
    }

    /// Indicator of each point; spans every function on the space.
    pub fn one_hot(space: Arc<FiniteMetricSpace>) -> Result<Self> {
        let n = space.len();
        Self::new(space, Array2::eye(n))
    }

    /// Powers `x_k^p` for every coordinate `k` and `1 ≤ p ≤ degree`.
    pub fn monomials(space: Arc<FiniteMetricSpace>, degree: u32) -> Result<Self> {
        let dim = space.coord_dim();
        if dim == 0 || degree == 0 {
            return Err(Error::InvalidParameter("monomial features need coordinates and degree ≥ 1".into()));
        }
        let values = Array2::from_shape_fn((space.len(), dim * degree as usize), |(i, j)| {
            space.points()[i][j % dim].powi((j / dim) as i32 + 1)
        });
        Self::new(space, values)
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    /// `[ψ | 1]`, the design matrix of the affine discriminator.
    pub fn augmented(&self) -> Array2<f64> {
        let (n, d) = self.values.dim();
        Array2::from_shape_fn((n, d + 1), |(i, j)| if j < d { self.values[[i, j]] } else { 1.0 })
    }

    /// `E_m[ψ]`.
    pub fn moments(&self, m: &DiscreteMeasure) -> Result<Vec<f64>> {
        if !same_space(&self.space, m.space()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.values.columns().into_iter().map(|c| c.iter().zip(m.weights()).map(|(v, w)| v * w).sum()).collect())
    }
}

impl Serialize for FeatureMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("dim", &self.dim())?;
        map.serialize_entry("values", &rows(&self.values))?;
        map.end()
    }
}

fn rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// Which divergence to compute, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum DivergenceSpec {
    ClosedFormF { generator: FGenerator },
    GanObjective,
    LinearFGan { generator: FGenerator, features: FeatureMap, solver: SolverConfig },
    Mmd { sigma: f64 },
    Wasserstein1 { lipschitz: f64 },
    /// `cost: None` uses the space's metric.
    SinkhornOt { eps: f64, cost: Option<Array2<f64>>, solver: SolverConfig },
    LinearWganGp { eta: f64 },
    Trivial { tol_eq: f64 },
}

impl DivergenceSpec {
    /// Short engine name used in reports and trace tables.
    pub fn label(&self) -> String {
        match self {
            Self::ClosedFormF { generator } => generator.name().to_string(),
            Self::GanObjective => "Gan".into(),
            Self::LinearFGan { generator, .. } => format!("LinearFGan({})", generator.name()),
            Self::Mmd { .. } => "Mmd".into(),
            Self::Wasserstein1 { .. } => "Wasserstein1".into(),
            Self::SinkhornOt { .. } => "SinkhornOt".into(),
            Self::LinearWganGp { .. } => "LinearWganGp".into(),
            Self::Trivial { .. } => "Trivial".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
            }
        };
        match self {
            Self::ClosedFormF { .. } | Self::GanObjective => Ok(()),
            Self::LinearFGan { generator, solver, .. } => {
                if generator.kind == GeneratorKind::ReverseKl {
                    return Err(Error::UnsupportedGenerator(generator.name().into()));
                }
                solver.validate()
            }
            Self::Mmd { sigma } => positive("sigma", *sigma),
            Self::Wasserstein1 { lipschitz } => positive("lipschitz", *lipschitz),
            Self::SinkhornOt { eps, cost, solver } => {
                if !(*eps >= 0.0) || !eps.is_finite() {
                    return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {eps}")));
                }
                if cost.as_ref().is_some_and(|c| c.iter().any(|x| !x.is_finite())) {
                    return Err(Error::InvalidParameter("cost entries must be finite".into()));
                }
                solver.validate()
            }
            Self::LinearWganGp { eta } => positive("eta", *eta),
            Self::Trivial { tol_eq } => {
                if *tol_eq >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("tol_eq must be nonnegative, got {tol_eq}")))
                }
            }
        }
    }
}

impl Serialize for DivergenceSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("kind", &self.label())?;
        match self {
            Self::ClosedFormF { generator } => map.serialize_entry("generator", &generator.kind)?,
            Self::GanObjective => {}
            Self::LinearFGan { generator, features, solver } => {
                map.serialize_entry("generator", &generator.kind)?;
                map.serialize_entry("features", features)?;
                map.serialize_entry("solver", solver)?;
            }
            Self::Mmd { sigma } => map.serialize_entry("sigma", sigma)?,
            Self::Wasserstein1 { lipschitz } => map.serialize_entry("lipschitz", lipschitz)?,
            Self::SinkhornOt { eps, cost, solver } => {
                map.serialize_entry("eps", eps)?;
                map.serialize_entry("cost", &cost.as_ref().map(rows))?;
                map.serialize_entry("solver", solver)?;
            }
            Self::LinearWganGp { eta } => map.serialize_entry("eta", eta)?,
            Self::Trivial { tol_eq } => map.serialize_entry("tol_eq", tol_eq)?,
        }
        map.end()
    }
}

/// An optimal (or limiting) discriminator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// Pointwise optimal discriminator values.
    Pointwise { u: Vec<f64> },
    /// Parameters of an affine discriminator.
    Theta { theta: Vec<f64> },
    /// Values of a function on the space.
    Witness { values: Vec<f64> },
    /// Transport dual potentials.
    Potentials { u: Vec<f64>, v: Vec<f64> },
    /// The bank member attaining a supremum over linear f-GANs.
    BankMember { index: usize, label: String, theta: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub kind: String,
    pub value: ExtendedReal,
    pub min_value: f64,
    pub certificate: Option<Certificate>,
    pub status: SolveStatus,
}

impl DivergenceReport {
    /// `value − min_value`.
    pub fn gap(&self) -> ExtendedReal {
        self.value.minus(self.min_value)
    }
}

impl Serialize for DivergenceReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(6))?;
        map.serialize_entry("kind", &self.kind)?;
        map.serialize_entry("value", &self.value)?;
        map.serialize_entry("min_value", &self.min_value)?;
        map.serialize_entry("gap", &self.gap())?;
        map.serialize_entry("status", &self.status)?;
        map.serialize_entry("certificate", &self.certificate)?;
        map.end()
    }
}

fn check_pair(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
    if mu.same_space(nu) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

fn exact(kind: impl Into<String>, value: ExtendedReal, min_value: f64, certificate: Option<Certificate>) -> DivergenceReport {
    DivergenceReport { kind: kind.into(), value, min_value, certificate, status: SolveStatus::exact() }
}

/// `D_f(μ‖ν)` from the definition.
pub fn closed_form(g: &FGenerator, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DivergenceReport> {
    Ok(exact(g.name(), closed_form_fdiv(g, mu, nu)?, 0.0, None))
}

/// The original GAN objective with the discriminator optimized pointwise.
pub fn gan_objective(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DivergenceReport> {
    check_pair(mu, nu)?;
    let mut u = Vec::with_capacity(mu.len());
    let mut value = 0.0;
    for (&p, &q) in mu.weights().iter().zip(nu.weights()) {
        let s = p + q;
        if s == 0.0 {
            u.push(0.5);
            continue;
        }
        if p > 0.0 {
            value += p * (p / s).ln();
        }
        if q > 0.0 {
            value += q * (q / s).ln();
        }
        u.push(p / s);
    }
    Ok(exact("Gan", ExtendedReal::Finite(value), -LN4, Some(Certificate::Pointwise { u })))
}

/// Linear f-GAN: the variational f-divergence restricted to discriminators
/// `θᵀ(ψ, 1)`.
///
/// TV has a bounded conjugate domain and a linear objective, so it is solved
/// exactly as an LP. The others run concave ascent from `(0, …, 0, x₀)`,
/// which has value 0; an objective still growing past the norm cap is
/// reported as `+∞`.
pub fn linear_fgan(
    g: &FGenerator,
    psi: &FeatureMap,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cfg: &SolverConfig,
) -> Result<DivergenceReport> {
    if g.kind == GeneratorKind::ReverseKl {
        return Err(Error::UnsupportedGenerator(g.name().into()));
    }
    check_pair(mu, nu)?;
    if !same_space(psi.space(), mu.space()) {
        return Err(Error::SpaceMismatch);
    }
    let a = psi.augmented();
    let kind = format!("LinearFGan({})", g.name());
    if g.kind == GeneratorKind::Tv {
        return linear_tv(&a, mu, nu).map(|(value, theta)| {
            exact(kind, ExtendedReal::Finite(value), 0.0, Some(Certificate::Theta { theta }))
        });
    }

    let (n, k) = a.dim();
    let (mw, nw) = (mu.weights(), nu.weights());
    let dom = g.dom_conj();
    let apply = |theta: &[f64]| -> Vec<f64> { (0..n).map(|i| (0..k).map(|j| a[[i, j]] * theta[j]).sum()).collect() };
    // Points without ν-mass feel the domain bound only as a hard wall, so
    // they get a log barrier `β log(hi − t)` that is driven to zero. The
    // barrier costs at most `n·β` in value.
    let walled: Vec<bool> = (0..n).map(|i| nw[i] == 0.0 && dom.hi.is_some()).collect();
    let hi = dom.hi.unwrap_or(f64::INFINITY);
    let objective = |theta: &[f64], beta: f64| {
        let t = apply(theta);
        let mut value = 0.0;
        let mut resid = vec![0.0; n];
        for i in 0..n {
            value += mw[i] * t[i];
            resid[i] = mw[i];
            if nw[i] > 0.0 {
                value -= nw[i] * g.f_conj(t[i]).to_f64();
                resid[i] -= nw[i] * g.f_conj_deriv(t[i]);
            } else if walled[i] && beta > 0.0 {
                value += beta * (hi - t[i]).ln();
                resid[i] -= beta / (hi - t[i]);
            }
        }
        let grad = (0..k).map(|j| (0..n).map(|i| a[[i, j]] * resid[i]).sum()).collect();
        (value, grad)
    };
    let feasible = |theta: &[f64]| apply(theta).iter().all(|&t| dom.contains(t));
    let mut theta = vec![0.0; k];
    theta[k - 1] = g.x0();
    let schedule: &[f64] = if walled.iter().any(|&w| w) { &[1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12] } else { &[0.0] };
    let mut iters = 0;
    let mut last = None;
    for &beta in schedule {
        let sol = maximize_concave(|th: &[f64]| objective(th, beta), theta, feasible, cfg)?;
        iters += sol.status.iters;
        theta = sol.theta;
        let stop = sol.status.kind == SolveStatusKind::Unbounded;
        last = Some((sol.value, sol.status));
        if stop {
            break;
        }
    }
    let (value, mut status) = last.expect("non-empty schedule");
    if status.kind != SolveStatusKind::Unbounded {
        // Gradient steps crawl when the supremum is only approached as some
        // `tᵢ → −∞` (a point with ν-mass but no μ-mass), since the gap then
        // decays like a power of `tᵢ`. Newton steps grow `tᵢ` geometrically.
        let beta = *schedule.last().expect("non-empty schedule");
        let curvature = |t: &[f64]| -> Option<(Vec<f64>, Vec<f64>)> {
            let mut r = vec![0.0; n];
            let mut w = vec![0.0; n];
            for i in 0..n {
                r[i] = mw[i];
                if nw[i] > 0.0 {
                    r[i] -= nw[i] * g.f_conj_deriv(t[i]);
                    w[i] = nw[i] * g.f_conj_second(t[i]);
                } else if walled[i] && beta > 0.0 {
                    r[i] -= beta / (hi - t[i]);
                    w[i] = beta / ((hi - t[i]) * (hi - t[i]));
                }
                if !(w[i] > 0.0) && r[i] != 0.0 {
                    return None;
                }
            }
            Some((r, w))
        };
        let (th, steps, settled) =
            newton_polish(&a, theta, |th: &[f64]| objective(th, beta).0, &apply, &feasible, curvature, cfg.max_iters);
        theta = th;
        iters += steps;
        status.final_grad_norm = objective(&theta, beta).1.iter().map(|x| x * x).sum::<f64>().sqrt();
        if settled {
            status.kind = SolveStatusKind::Converged;
        }
    }
    status.iters = iters;
    let value = match value {
        ExtendedReal::Finite(_) => ExtendedReal::Finite(objective(&theta, 0.0).0),
        inf => inf,
    };
    Ok(DivergenceReport { kind, value, min_value: 0.0, certificate: Some(Certificate::Theta { theta }), status })
}

/// Damped Newton ascent for `J(θ) = Σ φᵢ((Aθ)ᵢ)` with `φᵢ' = rᵢ`,
/// `φᵢ'' = −wᵢ`. The step solves the weighted least-squares problem
/// `W^{1/2} A d ≈ W^{-1/2} r` by SVD, which squares the conditioning less
/// than forming `AᵀWA`. Returns the iterate, the step count, and whether the
/// Newton decrement fell to rounding level.
fn newton_polish(
    a: &Array2<f64>,
    mut theta: Vec<f64>,
    value_of: impl Fn(&[f64]) -> f64,
    apply: &impl Fn(&[f64]) -> Vec<f64>,
    feasible: &impl Fn(&[f64]) -> bool,
    curvature: impl Fn(&[f64]) -> Option<(Vec<f64>, Vec<f64>)>,
    max_iters: usize,
) -> (Vec<f64>, usize, bool) {
    let (n, k) = a.dim();
    let mut value = value_of(&theta);
    for it in 0..max_iters {
        let Some((r, w)) = curvature(&apply(&theta)) else { return (theta, it, false) };
        let rows: Vec<usize> = (0..n).filter(|&i| w[i] > 0.0).collect();
        let m = DMatrix::from_fn(rows.len(), k, |p, j| w[rows[p]].sqrt() * a[[rows[p], j]]);
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|&i| r[i] / w[i].sqrt()));
        let svd = m.svd(true, true);
        let cutoff = 1e-15 * svd.singular_values.max();
        let Ok(d) = svd.solve(&b, cutoff) else { return (theta, it, false) };
        let grad: Vec<f64> = (0..k).map(|j| (0..n).map(|i| a[[i, j]] * r[i]).sum()).collect();
        let slope: f64 = grad.iter().zip(d.iter()).map(|(g, d)| g * d).sum();
        if !(slope > 1e-15 * (1.0 + value.abs())) {
            return (theta, it, true);
        }
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-12 {
            let cand: Vec<f64> = theta.iter().zip(d.iter()).map(|(x, d)| x + step * d).collect();
            if feasible(&cand) {
                let v = value_of(&cand);
                if v > value && v >= value + 1e-4 * step * slope {
                    theta = cand;
                    value = v;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            return (theta, it, slope < 1e-12 * (1.0 + value.abs()));
        }
    }
    (theta, max_iters, false)
}

/// `max (μ − ν)ᵀAθ` subject to `|Aθ| ≤ ½`, with `θ = θ⁺ − θ⁻` and slacks.
fn linear_tv(a: &Array2<f64>, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<(f64, Vec<f64>)> {
    let (n, k) = a.dim();
    let cols = 2 * k + 2 * n;
    let mut lhs = Array2::<f64>::zeros((2 * n, cols));
    for i in 0..n {
        for j in 0..k {
            lhs[[i, j]] = a[[i, j]];
            lhs[[i, k + j]] = -a[[i, j]];
            lhs[[n + i, j]] = -a[[i, j]];
            lhs[[n + i, k + j]] = a[[i, j]];
        }
        lhs[[i, 2 * k + i]] = 1.0;
        lhs[[n + i, 2 * k + n + i]] = 1.0;
    }
    let diff: Vec<f64> = mu.weights().iter().zip(nu.weights()).map(|(p, q)| p - q).collect();
    let mut c = vec![0.0; cols];
    for j in 0..k {
        let cj: f64 = (0..n).map(|i| diff[i] * a[[i, j]]).sum();
        c[j] = cj;
        c[k + j] = -cj;
    }
    match solve_lp(&lhs, &vec![0.5; 2 * n], &c) {
        LpOutcome::Optimal { x, value } => Ok((value, (0..k).map(|j| x[j] - x[k + j]).collect())),
        other => Err(Error::SolverFailure(format!("bounded TV program reported {other:?}"))),
    }
}

fn coordinates(space: &FiniteMetricSpace) -> Result<&[Vec<f64>]> {
    if space.coord_dim() == 0 {
        return Err(Error::InvalidParameter("engine needs a coordinate embedding".into()));
    }
    Ok(space.points())
}

/// Maximum mean discrepancy under the Gaussian kernel of bandwidth `sigma`.
pub fn mmd(sigma: f64, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DivergenceReport> {
    DivergenceSpec::Mmd { sigma }.validate()?;
    check_pair(mu, nu)?;
    let pts = coordinates(mu.space())?;
    let n = pts.len();
    let delta: Vec<f64> = mu.weights().iter().zip(nu.weights()).map(|(p, q)| p - q).collect();
    let kernel = |x: &[f64], y: &[f64]| {
        let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        (-d2 / (2.0 * sigma * sigma)).exp()
    };
    let k_delta: Vec<f64> = (0..n).map(|i| (0..n).map(|j| kernel(&pts[i], &pts[j]) * delta[j]).sum()).collect();
    let quad: f64 = delta.iter().zip(&k_delta).map(|(a, b)| a * b).sum();
    let value = quad.max(0.0).sqrt();
    let certificate = (value > 0.0).then(|| Certificate::Witness { values: k_delta.iter().map(|x| x / value).collect() });
    Ok(exact("Mmd", ExtendedReal::Finite(value), 0.0, certificate))
}

/// `K · W₁(μ, ν)`, with a `K`-Lipschitz optimal critic as certificate.
///
/// The critic is the c-transform `f(x) = minⱼ (d(x, yⱼ) − vⱼ)` of the
/// transport dual, scaled by `K`. A minimum of 1-Lipschitz functions is
/// 1-Lipschitz, and `E_μ f − E_ν f` equals the transport cost.
pub fn wasserstein1(lipschitz: f64, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DivergenceReport> {
    DivergenceSpec::Wasserstein1 { lipschitz }.validate()?;
    check_pair(mu, nu)?;
    let dist = mu.space().dist();
    let sol = solve_transport_lp(dist, mu.weights(), nu.weights())?;
    let n = mu.len();
    let critic: Vec<f64> =
        (0..n).map(|i| lipschitz * (0..n).map(|j| dist[[i, j]] - sol.v[j]).fold(f64::INFINITY, f64::min)).collect();
    Ok(exact("Wasserstein1", ExtendedReal::Finite(lipschitz * sol.value), 0.0, Some(Certificate::Witness { values: critic })))
}

/// Transport with optional entropic regularization.
///
/// `eps = 0` is the exact transport LP; `eps > 0` runs Sinkhorn. The minimum
/// is defined as `τ(μ‖μ)` from the same routine.
pub fn sinkhorn_ot(
    eps: f64,
    cost: Option<&Array2<f64>>,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cfg: &SolverConfig,
) -> Result<DivergenceReport> {
    check_pair(mu, nu)?;
    let n = mu.len();
    let cost = cost.unwrap_or(mu.space().dist());
    if cost.dim() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, got: cost.nrows() });
    }
    DivergenceSpec::SinkhornOt { eps, cost: None, solver: *cfg }.validate()?;
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter("cost entries must be finite".into()));
    }
    let solve = |a: &[f64], b: &[f64]| -> Result<(f64, Vec<f64>, Vec<f64>, SolveStatus)> {
        if eps == 0.0 {
            let sol = solve_transport_lp(cost, a, b)?;
            return Ok((sol.value, sol.u, sol.v, SolveStatus::exact()));
        }
        let sol = sinkhorn_iterate(cost, eps, a, b, cfg)?;
        if sol.status.kind == SolveStatusKind::IterationLimit {
            return Err(Error::IterationLimit { iters: sol.status.iters, residual: sol.status.final_grad_norm });
        }
        Ok((sol.value, sol.u, sol.v, sol.status))
    };
    let (value, u, v, status) = solve(mu.weights(), nu.weights())?;
    let min_value = if mu.weights() == nu.weights() { value } else { solve(mu.weights(), mu.weights())?.0 };
    Ok(DivergenceReport {
        kind: "SinkhornOt".into(),
        value: ExtendedReal::Finite(value),
        min_value,
        certificate: Some(Certificate::Potentials { u, v }),
        status,
    })
}

/// WGAN-GP restricted to affine critics with the two-sided penalty `η(‖θ‖ − 1)²`.
pub fn linear_wgan_gp(eta: f64, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DivergenceReport> {
    DivergenceSpec::LinearWganGp { eta }.validate()?;
    check_pair(mu, nu)?;
    let pts = coordinates(mu.space())?;
    let dim = pts[0].len();
    let delta: Vec<f64> = (0..dim)
        .map(|k| pts.iter().zip(mu.weights().iter().zip(nu.weights())).map(|(x, (p, q))| x[k] * (p - q)).sum())
        .collect();
    let a = delta.iter().map(|x| x * x).sum::<f64>().sqrt();
    let theta = if a > 0.0 {
        let s = 1.0 + a / (2.0 * eta);
        delta.iter().map(|x| s * x / a).collect()
    } else {
        let mut e = vec![0.0; dim];
        e[0] = 1.0;
        e
    };
    Ok(exact("LinearWganGp", ExtendedReal::Finite(a + a * a / (4.0 * eta)), 0.0, Some(Certificate::Theta { theta })))
}

/// 0 when the measures agree to within `tol_eq` in sup norm, `+∞` otherwise.
pub fn trivial_divergence(tol_eq: f64, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DivergenceReport> {
    DivergenceSpec::Trivial { tol_eq }.validate()?;
    check_pair(mu, nu)?;
    let value = if mu.sup_distance(nu) <= tol_eq { ExtendedReal::Finite(0.0) } else { ExtendedReal::PosInfinity };
    Ok(exact("Trivial", value, 0.0, None))
}

/// Dispatch to the engine selected by `spec`.
pub fn evaluate(spec: &DivergenceSpec, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DivergenceReport> {
    spec.validate()?;
    match spec {
        DivergenceSpec::ClosedFormF { generator } => closed_form(generator, mu, nu),
        DivergenceSpec::GanObjective => gan_objective(mu, nu),
        DivergenceSpec::LinearFGan { generator, features, solver } => linear_fgan(generator, features, mu, nu, solver),
        DivergenceSpec::Mmd { sigma } => mmd(*sigma, mu, nu),
        DivergenceSpec::Wasserstein1 { lipschitz } => wasserstein1(*lipschitz, mu, nu),
        DivergenceSpec::SinkhornOt { eps, cost, solver } => sinkhorn_ot(*eps, cost.as_ref(), mu, nu, solver),
        DivergenceSpec::LinearWganGp { eta } => linear_wgan_gp(*eta, mu, nu),
        DivergenceSpec::Trivial { tol_eq } => trivial_divergence(*tol_eq, mu, nu),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::catalog;
    use crate::measures::{make_space, Metric};
    use approx::assert_abs_diff_eq;

    fn line(xs: &[f64]) -> Arc<FiniteMetricSpace> {
        make_space(xs.iter().map(|&x| vec![x]).collect(), Metric::Euclidean).unwrap()
    }

    fn m(space: &Arc<FiniteMetricSpace>, w: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(space.clone(), w.to_vec()).unwrap()
    }

    #[test]
    fn gan_examples() {
        let s = line(&[0.0, 1.0]);
        let r = gan_objective(&m(&s, &[0.3, 0.7]), &m(&s, &[0.3, 0.7])).unwrap();
        assert_abs_diff_eq!(r.value.to_f64(), -LN4, epsilon = 1e-15);
        assert_abs_diff_eq!(r.gap().to_f64(), 0.0, epsilon = 1e-15);
        let r = gan_objective(&m(&s, &[1.0, 0.0]), &m(&s, &[0.0, 1.0])).unwrap();
        assert_eq!(r.value, ExtendedReal::Finite(0.0));
        assert_eq!(r.certificate, Some(Certificate::Pointwise { u: vec![1.0, 0.0] }));
    }

    #[test]
    fn linear_fgan_mean_matching_example() {
        let s = line(&[0.0, 1.0, 2.0]);
        let psi = FeatureMap::coordinates(s.clone()).unwrap();
        let third = 1.0 / 3.0;
        let r = linear_fgan(&catalog(GeneratorKind::Kl), &psi, &m(&s, &[third, third, third]), &m(&s, &[0.5, 0.0, 0.5]), &SolverConfig::default())
            .unwrap();
        assert_abs_diff_eq!(r.value.to_f64(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_fgan_self_value_at_fixed_point() {
        let s = line(&[0.0, 0.5, 2.0]);
        let psi = FeatureMap::coordinates(s.clone()).unwrap();
        let mu = m(&s, &[0.2, 0.5, 0.3]);
        for kind in [GeneratorKind::Kl, GeneratorKind::Js, GeneratorKind::SqHellinger, GeneratorKind::Tv] {
            let g = catalog(kind);
            let r = linear_fgan(&g, &psi, &mu, &mu, &SolverConfig::default()).unwrap();
            assert_abs_diff_eq!(r.value.to_f64(), 0.0, epsilon = 1e-12);
            if kind != GeneratorKind::Tv {
                assert_eq!(r.certificate, Some(Certificate::Theta { theta: vec![0.0, g.x0()] }));
            }
        }
    }

    #[test]
    fn linear_fgan_rejects_reverse_kl_and_detects_unbounded_kl() {
        let s = line(&[0.0, 1.0]);
        let psi = FeatureMap::coordinates(s.clone()).unwrap();
        let (a, b) = (m(&s, &[1.0, 0.0]), m(&s, &[0.0, 1.0]));
        let cfg = SolverConfig::default();
        assert!(matches!(linear_fgan(&catalog(GeneratorKind::ReverseKl), &psi, &a, &b, &cfg), Err(Error::UnsupportedGenerator(_))));
        let r = linear_fgan(&catalog(GeneratorKind::Kl), &psi, &a, &b, &cfg).unwrap();
        assert_eq!(r.value, ExtendedReal::PosInfinity);
        assert_eq!(r.status.kind, SolveStatusKind::Unbounded);
        // JS stays bounded by log 4 on disjoint supports.
        let r = linear_fgan(&catalog(GeneratorKind::Js), &psi, &a, &b, &cfg).unwrap();
        assert!(r.value.to_f64() <= LN4 + 1e-9 && r.value.to_f64() > LN4 - 1e-6, "{r:?}");
    }

    #[test]
    fn mmd_two_point() {
        let s = line(&[0.0, 1.0]);
        let r = mmd(1.0, &m(&s, &[1.0, 0.0]), &m(&s, &[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(r.value.to_f64(), (2.0 - 2.0 * (-0.5f64).exp()).sqrt(), epsilon = 1e-14);
        let r = mmd(1.0, &m(&s, &[0.4, 0.6]), &m(&s, &[0.4, 0.6])).unwrap();
        assert_eq!(r.value, ExtendedReal::Finite(0.0));
        assert!(r.certificate.is_none());
    }

    #[test]
    fn wasserstein_examples() {
        let s = line(&[0.0, 1.0]);
        let (a, b) = (m(&s, &[1.0, 0.0]), m(&s, &[0.0, 1.0]));
        assert_abs_diff_eq!(wasserstein1(1.0, &a, &b).unwrap().value.to_f64(), 1.0);
        assert_abs_diff_eq!(wasserstein1(2.0, &a, &b).unwrap().value.to_f64(), 2.0);
        assert_abs_diff_eq!(wasserstein1(1.0, &a, &a).unwrap().value.to_f64(), 0.0);
    }

    #[test]
    fn sinkhorn_examples() {
        let cfg = SolverConfig::default();
        let s = line(&[0.0]);
        let one = m(&s, &[1.0]);
        let r = sinkhorn_ot(1.0, Some(&Array2::zeros((1, 1))), &one, &one, &cfg).unwrap();
        assert_abs_diff_eq!(r.value.to_f64(), -1.0, epsilon = 1e-12);
        assert_eq!(r.gap(), ExtendedReal::Finite(0.0));

        let s = line(&[0.0, 1.0]);
        let (a, b) = (m(&s, &[1.0, 0.0]), m(&s, &[0.0, 1.0]));
        let exact = sinkhorn_ot(0.0, None, &a, &b, &cfg).unwrap().value.to_f64();
        assert_abs_diff_eq!(exact, wasserstein1(1.0, &a, &b).unwrap().value.to_f64(), epsilon = 1e-12);
        let smooth = sinkhorn_ot(0.005, None, &a, &b, &cfg).unwrap().value.to_f64();
        assert!((smooth - exact).abs() <= 0.02);
    }

    #[test]
    fn wgan_gp_examples() {
        let s = line(&[0.0, 1.0]);
        let (a, b) = (m(&s, &[0.0, 1.0]), m(&s, &[1.0, 0.0]));
        let r = linear_wgan_gp(1.0, &a, &b).unwrap();
        assert_abs_diff_eq!(r.value.to_f64(), 1.25, epsilon = 1e-15);
        assert_eq!(r.certificate, Some(Certificate::Theta { theta: vec![1.5] }));
        let r = linear_wgan_gp(1.0, &a, &a).unwrap();
        assert_eq!(r.value, ExtendedReal::Finite(0.0));
        assert_eq!(r.certificate, Some(Certificate::Theta { theta: vec![1.0] }));
    }

    #[test]
    fn trivial_boundary() {
        let s = line(&[0.0, 1.0]);
        let a = m(&s, &[0.5, 0.5]);
        assert_eq!(trivial_divergence(0.0, &a, &a).unwrap().value, ExtendedReal::Finite(0.0));
        let b = m(&s, &[0.4, 0.6]);
        assert_eq!(trivial_divergence(1e-12, &a, &b).unwrap().value, ExtendedReal::PosInfinity);
        let tol = a.sup_distance(&b);
        assert_eq!(trivial_divergence(tol, &a, &b).unwrap().value, ExtendedReal::Finite(0.0));
    }

    #[test]
    fn evaluate_dispatch_and_mismatch() {
        let s = line(&[0.0, 1.0]);
        let a = m(&s, &[0.5, 0.5]);
        let kl = DivergenceSpec::ClosedFormF { generator: catalog(GeneratorKind::Kl) };
        assert_eq!(evaluate(&kl, &a, &a).unwrap().value, ExtendedReal::Finite(0.0));
        let other = m(&line(&[0.0, 2.0]), &[0.5, 0.5]);
        assert_eq!(evaluate(&DivergenceSpec::GanObjective, &a, &other), Err(Error::SpaceMismatch));
        assert!(evaluate(&DivergenceSpec::Mmd { sigma: 0.0 }, &a, &a).is_err());
    }

    #[test]
    fn report_json_shape() {
        let s = line(&[0.0, 1.0]);
        let (a, b) = (m(&s, &[1.0, 0.0]), m(&s, &[0.0, 1.0]));
        let r = closed_form(&catalog(GeneratorKind::Kl), &a, &b).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["value"], "inf");
        assert_eq!(json["gap"], "inf");
        assert_eq!(json["kind"], "KL");
        assert_eq!(json["status"]["kind"], "converged");
        let r = gan_objective(&a, &b).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["certificate"]["type"], "pointwise");
    }
}
