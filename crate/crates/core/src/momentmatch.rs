//! # Moment matching
//!
//! A linear f-GAN only sees a measure through its feature expectations
//! `E[ψ]`, so its minimizers are exactly the measures matching the target's
//! moments. This module samples both sides of that set and checks the
//! engine's verdict on each sample, and evaluates the supremum of several
//! linear f-GANs over a bank of feature maps.

use std::sync::Arc;

use ndarray::Array2;
use serde::Serialize;

use crate::divergences::{linear_fgan, Certificate, DivergenceReport, FeatureMap};
use crate::error::{Error, Result};
use crate::generators::{ExtendedReal, FGenerator, GeneratorKind};
use crate::measures::{same_space, DiscreteMeasure, FiniteMetricSpace};
use crate::rng;
use crate::solvers::{solve_lp, LpOutcome, SolveStatus, SolverConfig};

/// Largest moment error accepted for a matched sample.
pub const MATCH_TOL: f64 = 1e-10;
/// Matched measures must give at most this value.
pub const TOL_ZERO: f64 = 1e-6;
/// Unmatched measures must give at least this value.
pub const TOL_SEP: f64 = 1e-4;

/// Measures whose `ψ`-moments equal those of the target.
#[derive(Debug, Clone)]
pub struct MomentPolytope {
    psi: FeatureMap,
    target: DiscreteMeasure,
    moments: Vec<f64>,
}

impl MomentPolytope {
    pub fn new(psi: FeatureMap, target: DiscreteMeasure) -> Result<Self> {
        let moments = psi.moments(&target)?;
        Ok(Self { psi, target, moments })
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        self.psi.space()
    }

    pub fn psi(&self) -> &FeatureMap {
        &self.psi
    }

    pub fn target(&self) -> &DiscreteMeasure {
        &self.target
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    /// `‖E_w[ψ] − moments‖_∞`.
    pub fn deviation(&self, m: &DiscreteMeasure) -> Result<f64> {
        let got = self.psi.moments(m)?;
        Ok(got.iter().zip(&self.moments).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Equality rows `[ψᵀ; 1ᵀ] w = [moments; 1]`.
    fn constraints(&self) -> (Array2<f64>, Vec<f64>) {
        let values = self.psi.values();
        let (n, d) = values.dim();
        let a = Array2::from_shape_fn((d + 1, n), |(j, i)| if j < d { values[[i, j]] } else { 1.0 });
        let mut b = self.moments.clone();
        b.push(1.0);
        (a, b)
    }

    fn vertex(&self, objective: &[f64]) -> Option<DiscreteMeasure> {
        let (a, b) = self.constraints();
        match solve_lp(&a, &b, objective) {
            LpOutcome::Optimal { x, .. } => {
                let m = DiscreteMeasure::from_unnormalized(self.space().clone(), x).ok()?;
                (self.deviation(&m).ok()? <= MATCH_TOL).then_some(m)
            }
            _ => None,
        }
    }

    /// Whether the polytope is the single point `{μ*}`: every coordinate has
    /// equal minimum and maximum over it.
    pub fn is_singleton(&self) -> bool {
        let n = self.space().len();
        (0..n).all(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let hi = self.vertex(&e).map(|m| m.weights()[i]);
            e[i] = -1.0;
            let lo = self.vertex(&e).map(|m| m.weights()[i]);
            matches!((hi, lo), (Some(h), Some(l)) if h - l <= 1e-12)
        })
    }
}

/// Feature maps on a common space, each with a label.
#[derive(Debug, Clone)]
pub struct FeatureBank {
    members: Vec<(String, FeatureMap)>,
}

impl FeatureBank {
    pub fn new(members: Vec<(String, FeatureMap)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::InvalidParameter("feature bank is empty".into()));
        };
        if members.iter().any(|(_, f)| !same_space(f.space(), first.space())) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(String, FeatureMap)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn same_measure(a: &DiscreteMeasure, b: &DiscreteMeasure) -> bool {
    a.sup_distance(b) <= 1e-9
}

/// `count` measures in the polytope: the target, LP vertices for random
/// objectives, then random convex combinations of those. A polytope that is
/// the single point `{μ*}` yields just `[μ*]`.
pub fn sample_matched(p: &MomentPolytope, count: usize, seed: u64) -> Vec<DiscreteMeasure> {
    if count == 0 {
        return Vec::new();
    }
    let mut out = vec![p.target.clone()];
    if p.is_singleton() {
        return out;
    }
    let n = p.space().len();
    let mut rng = rng::seeded(seed);
    let want_vertices = count.div_ceil(2);
    for _ in 0..4 * count {
        if out.len() >= want_vertices {
            break;
        }
        let objective: Vec<f64> = (0..n).map(|_| rng::uniform(&mut rng, -1.0, 1.0)).collect();
        if let Some(v) = p.vertex(&objective) {
            if !out.iter().any(|m| same_measure(m, &v)) {
                out.push(v);
            }
        }
    }
    let anchors = out.clone();
    let mut attempts = 0;
    while out.len() < count && attempts < 10 * count {
        attempts += 1;
        let lambda = rng::dirichlet_flat(&mut rng, anchors.len());
        let w: Vec<f64> = (0..n).map(|i| anchors.iter().zip(&lambda).map(|(m, l)| l * m.weights()[i]).sum()).collect();
        if let Ok(m) = DiscreteMeasure::from_unnormalized(p.space().clone(), w) {
            if p.deviation(&m).is_ok_and(|d| d <= MATCH_TOL) {
                out.push(m);
            }
        }
    }
    out
}

/// A measure whose moments miss the target's by at least `margin` in some
/// coordinate: `(1 − λ)μ* + λδᵢ` for a point `i` and feature `j` with
/// `|ψⱼ(xᵢ) − mⱼ| ≥ margin`, and `λ` drawn so the miss is at least `margin`.
pub fn sample_unmatched(p: &MomentPolytope, margin: f64, seed: u64) -> Result<DiscreteMeasure> {
    if !(margin > 0.0) {
        return Err(Error::InvalidParameter(format!("margin must be positive, got {margin}")));
    }
    let values = p.psi.values();
    let (n, d) = values.dim();
    let mut candidates = Vec::new();
    let mut max_deviation = 0.0f64;
    for i in 0..n {
        for j in 0..d {
            let dev = (values[[i, j]] - p.moments[j]).abs();
            max_deviation = max_deviation.max(dev);
            if dev >= margin {
                candidates.push((i, dev));
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::InfeasibleMargin { margin, max_deviation });
    }
    let mut rng = rng::seeded(seed);
    let (i, dev) = candidates[rng::index(&mut rng, candidates.len())];
    let lo = (margin / dev * (1.0 + 1e-9)).min(1.0);
    let lambda = rng::uniform(&mut rng, lo, 1.0).max(lo);
    let delta = DiscreteMeasure::point_mass(p.space().clone(), i)?;
    delta.mix(&p.target, lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRow {
    pub measure_id: String,
    /// Whether the measure was supplied as moment-matched.
    pub matched: bool,
    pub value: ExtendedReal,
    /// Whether the engine's value agrees with the expected class.
    pub verdict: bool,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub generator: GeneratorKind,
    pub tol_zero: f64,
    pub tol_sep: f64,
    pub rows: Vec<VerificationRow>,
    pub passed: bool,
}

/// Check that matched measures sit in the minimizing set (value ≤ `TOL_ZERO`)
/// and unmatched ones do not (value ≥ `TOL_SEP`).
pub fn verify_optset(
    g: &FGenerator,
    p: &MomentPolytope,
    matched: &[DiscreteMeasure],
    unmatched: &[DiscreteMeasure],
    cfg: &SolverConfig,
) -> Result<VerificationReport> {
    if matched.is_empty() && unmatched.is_empty() {
        return Err(Error::InvalidParameter("nothing to verify".into()));
    }
    let mut rows = Vec::with_capacity(matched.len() + unmatched.len());
    let labelled = matched.iter().map(|m| (true, m)).chain(unmatched.iter().map(|m| (false, m)));
    let (mut n_matched, mut n_unmatched) = (0, 0);
    for (is_matched, nu) in labelled {
        let r = linear_fgan(g, &p.psi, &p.target, nu, cfg)?;
        let gap = r.gap();
        let (measure_id, verdict) = if is_matched {
            n_matched += 1;
            (format!("matched-{}", n_matched - 1), gap.finite().is_some_and(|v| v <= TOL_ZERO))
        } else {
            n_unmatched += 1;
            (format!("unmatched-{}", n_unmatched - 1), gap.to_f64() >= TOL_SEP)
        };
        rows.push(VerificationRow { measure_id, matched: is_matched, value: r.value, verdict, status: r.status });
    }
    let passed = rows.iter().all(|r| r.verdict);
    Ok(VerificationReport { generator: g.kind, tol_zero: TOL_ZERO, tol_sep: TOL_SEP, rows, passed })
}

/// Supremum of linear f-GANs over a feature bank. KL only, since the
/// supremum argument needs `dom f* = ℝ`.
pub fn nn_fgan(
    g: &FGenerator,
    bank: &FeatureBank,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cfg: &SolverConfig,
) -> Result<DivergenceReport> {
    if g.kind != GeneratorKind::Kl {
        return Err(Error::UnsupportedGenerator(g.name().into()));
    }
    let mut best: Option<(usize, DivergenceReport)> = None;
    for (index, (_, psi)) in bank.members.iter().enumerate() {
        let r = linear_fgan(g, psi, mu, nu, cfg)?;
        if best.as_ref().is_none_or(|(_, b)| r.value.to_f64() > b.value.to_f64()) {
            best = Some((index, r));
        }
    }
    let (index, r) = best.expect("bank is non-empty");
    let theta = match r.certificate {
        Some(Certificate::Theta { theta }) => theta,
        _ => Vec::new(),
    };
    Ok(DivergenceReport {
        kind: format!("NnFGan({})", g.name()),
        value: r.value,
        min_value: 0.0,
        certificate: Some(Certificate::BankMember { index, label: bank.members[index].0.clone(), theta }),
        status: r.status,
    })
}
