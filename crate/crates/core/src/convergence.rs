//! # Convergence and relative strength
//!
//! A divergence `τ₁` is stronger than `τ₂` when every sequence converging in
//! `τ₁` also converges in `τ₂`. On a finite suite of sequences that is set
//! inclusion between the suites' convergence sets, so equivalence classes
//! are groups of engines with identical convergence sets and the partial
//! order among them is strict inclusion. A finite suite can refute
//! "stronger" but only supports it, so every relation here is on-suite.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::divergences::{evaluate, DivergenceSpec};
use crate::error::{Error, Result};
use crate::generators::{catalog, ExtendedReal, GeneratorKind};
use crate::measures::{sequence_catalog, DiscreteMeasure, MeasureSequence, SequenceKind};

/// Default convergence tolerance.
pub const TOL_CONV: f64 = 1e-3;
/// Log-gap slope at or below which a shrinking gap counts as converging.
pub const TREND_SLOPE: f64 = -0.5;

/// Divergence values of one engine along one sequence.
#[derive(Debug, Clone)]
pub struct SequenceTrace {
    pub divergence: DivergenceSpec,
    pub sequence: String,
    pub steps: Vec<usize>,
    pub values: Vec<ExtendedReal>,
    pub min_value: f64,
    /// Items whose solve failed; their value is stored as `+∞`.
    pub failures: Vec<(usize, String)>,
}

impl SequenceTrace {
    pub fn gaps(&self) -> Vec<ExtendedReal> {
        self.values.iter().map(|v| v.minus(self.min_value)).collect()
    }
}

/// Evaluate `spec` between the target and every item of `seq`.
///
/// Solver failures on an item are recorded as `+∞`; invalid inputs abort.
pub fn trace(spec: &DivergenceSpec, seq: &MeasureSequence) -> Result<SequenceTrace> {
    let mut values = Vec::with_capacity(seq.len());
    let mut failures = Vec::new();
    let mut min_value = None;
    for (k, item) in seq.items.iter().enumerate() {
        match evaluate(spec, &seq.target, item) {
            Ok(r) => {
                min_value.get_or_insert(r.min_value);
                values.push(r.value);
            }
            Err(e @ (Error::SolverFailure(_) | Error::IterationLimit { .. })) => {
                failures.push((k, e.to_string()));
                values.push(ExtendedReal::PosInfinity);
            }
            Err(e) => return Err(e),
        }
    }
    let min_value = match min_value {
        Some(m) => m,
        None => evaluate(spec, &seq.target, &seq.target)?.min_value,
    };
    Ok(SequenceTrace {
        divergence: spec.clone(),
        sequence: seq.label.clone(),
        steps: seq.steps.clone(),
        values,
        min_value,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Converges,
    Diverges,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub kind: VerdictKind,
    pub final_gap: ExtendedReal,
    /// Slope of log-gap against log-n over the longest finite suffix of the
    /// trace, when that suffix has at least two points.
    pub trend: Option<f64>,
}

/// Classify the tail (last quarter) of a trace.
///
/// 1. Any `+∞` in the tail: diverges.
/// 2. The tail is non-increasing (up to `tol_conv`) and either every tail gap
///    is at most `tol_conv` or the log-log slope of gap against `n`, fitted
///    over the longest finite suffix of the trace, is at most
///    [`TREND_SLOPE`]: converges.
/// 3. Every tail gap is at least `10·tol_conv`: diverges.
/// 4. Otherwise undetermined.
///
/// The slope test is what lets a finite trace with gaps decaying like `1/n`
/// count as converging; a fixed threshold alone cannot separate `1/n` from a
/// small constant.
pub fn classify(t: &SequenceTrace, tol_conv: f64) -> ConvergenceVerdict {
    classify_gaps(&t.steps, &t.gaps(), tol_conv)
}

/// [`classify`] on raw gaps; `steps` are the sequence parameters `n`.
pub fn classify_gaps(steps: &[usize], gaps: &[ExtendedReal], tol_conv: f64) -> ConvergenceVerdict {
    let len = gaps.len();
    let final_gap = gaps.last().copied().unwrap_or(ExtendedReal::PosInfinity);
    let tail_len = len.div_ceil(4).max(1).min(len);
    let tail = &gaps[len - tail_len..];
    let verdict = |kind, trend| ConvergenceVerdict { kind, final_gap, trend };
    if tail.is_empty() || tail.iter().any(|g| !g.is_finite()) {
        return verdict(VerdictKind::Diverges, None);
    }
    let g: Vec<f64> = tail.iter().map(|x| x.to_f64().max(0.0)).collect();
    // The tail of a grid sequence sits within a few cells of the target, where
    // partial-cell weights bend the curve, so the rate comes from the longest
    // finite suffix instead.
    let start = gaps.iter().rposition(|g| !g.is_finite()).map_or(0, |i| i + 1);
    let finite: Vec<f64> = gaps[start..].iter().map(|x| x.to_f64().max(0.0)).collect();
    let trend = log_slope(&steps[start..], &finite);
    let non_increasing = g.windows(2).all(|w| w[1] <= w[0] + tol_conv);
    if non_increasing && (g.iter().all(|&x| x <= tol_conv) || trend.is_some_and(|s| s <= TREND_SLOPE)) {
        return verdict(VerdictKind::Converges, trend);
    }
    if g.iter().all(|&x| x >= 10.0 * tol_conv) {
        return verdict(VerdictKind::Diverges, trend);
    }
    verdict(VerdictKind::Undetermined, trend)
}

/// Least-squares slope of `log g` on `log n`, zeros clamped to `1e-300`.
fn log_slope(steps: &[usize], g: &[f64]) -> Option<f64> {
    if g.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = steps.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = g.iter().map(|&x| x.max(1e-300).ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Stronger,
    Weaker,
    Equivalent,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub sequence: String,
    pub verdict_a: VerdictKind,
    pub verdict_b: VerdictKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthRelation {
    pub a: String,
    pub b: String,
    pub relation: Relation,
    pub evidence: Vec<Evidence>,
}

/// Relation of `a` to `b` from per-sequence verdicts in the same order.
pub fn relation_from_verdicts(a: &[VerdictKind], b: &[VerdictKind]) -> Relation {
    let conv = |v: &VerdictKind| *v == VerdictKind::Converges;
    let a_to_b = a.iter().zip(b).all(|(x, y)| !conv(x) || conv(y));
    let b_to_a = a.iter().zip(b).all(|(x, y)| !conv(y) || conv(x));
    match (a_to_b, b_to_a) {
        (true, true) => Relation::Equivalent,
        (true, false) => Relation::Stronger,
        (false, true) => Relation::Weaker,
        (false, false) => Relation::Incomparable,
    }
}

/// Compare two engines on a suite: `a` is stronger when it converges only
/// where `b` also converges.
pub fn compare_strength(
    a: &DivergenceSpec,
    b: &DivergenceSpec,
    suite: &[MeasureSequence],
    tol_conv: f64,
) -> Result<StrengthRelation> {
    if suite.is_empty() {
        return Err(Error::InvalidParameter("empty suite".into()));
    }
    let mut va = Vec::with_capacity(suite.len());
    let mut vb = Vec::with_capacity(suite.len());
    for seq in suite {
        va.push(classify(&trace(a, seq)?, tol_conv).kind);
        vb.push(classify(&trace(b, seq)?, tol_conv).kind);
    }
    let evidence = suite
        .iter()
        .zip(va.iter().zip(&vb))
        .map(|(s, (&x, &y))| Evidence { sequence: s.label.clone(), verdict_a: x, verdict_b: y })
        .collect();
    Ok(StrengthRelation { a: a.label(), b: b.label(), relation: relation_from_verdicts(&va, &vb), evidence })
}

#[derive(Debug, Clone, Serialize)]
pub struct HierarchyReport {
    pub engines: Vec<String>,
    pub sequences: Vec<String>,
    /// `verdicts[e][s]` for engine `e` on sequence `s`.
    pub verdicts: Vec<Vec<ConvergenceVerdict>>,
    /// `relations[a][b]`: how engine `a` relates to engine `b`.
    pub relations: Vec<Vec<Relation>>,
    /// Equivalence classes, strongest first.
    pub classes: Vec<Vec<String>>,
    /// Cover relation between classes: `(stronger, weaker)` class indices.
    pub hasse: Vec<(usize, usize)>,
    pub matches_expected: bool,
    #[serde(skip)]
    pub traces: Vec<Vec<SequenceTrace>>,
}

/// Trace every engine on every sequence, classify, and build the order.
pub fn hierarchy_report(specs: &[DivergenceSpec], suite: &[MeasureSequence], tol_conv: f64) -> Result<HierarchyReport> {
    let traces = specs
        .iter()
        .map(|spec| suite.iter().map(|seq| trace(spec, seq)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    hierarchy_from_traces(traces, tol_conv)
}

/// Build the report from precomputed traces (`traces[e][s]`).
pub fn hierarchy_from_traces(traces: Vec<Vec<SequenceTrace>>, tol_conv: f64) -> Result<HierarchyReport> {
    if traces.len() < 2 {
        return Err(Error::InvalidParameter("a hierarchy needs at least two engines".into()));
    }
    let n_seq = traces[0].len();
    if n_seq == 0 || traces.iter().any(|row| row.len() != n_seq) {
        return Err(Error::InvalidParameter("every engine needs a trace for every sequence".into()));
    }
    let engines: Vec<String> = traces.iter().map(|row| row[0].divergence.label()).collect();
    let sequences: Vec<String> = traces[0].iter().map(|t| t.sequence.clone()).collect();
    let verdicts: Vec<Vec<ConvergenceVerdict>> =
        traces.iter().map(|row| row.iter().map(|t| classify(t, tol_conv)).collect()).collect();
    let kinds: Vec<Vec<VerdictKind>> = verdicts.iter().map(|row| row.iter().map(|v| v.kind).collect()).collect();
    let relations: Vec<Vec<Relation>> =
        kinds.iter().map(|a| kinds.iter().map(|b| relation_from_verdicts(a, b)).collect()).collect();

    // Classes are engines with equal convergence sets.
    let conv_sets: Vec<BTreeSet<usize>> =
        kinds.iter().map(|row| (0..n_seq).filter(|&s| row[s] == VerdictKind::Converges).collect()).collect();
    let mut class_sets: Vec<BTreeSet<usize>> = Vec::new();
    let mut members: Vec<Vec<String>> = Vec::new();
    for (e, set) in conv_sets.iter().enumerate() {
        match class_sets.iter().position(|c| c == set) {
            Some(k) => members[k].push(engines[e].clone()),
            None => {
                class_sets.push(set.clone());
                members.push(vec![engines[e].clone()]);
            }
        }
    }
    // Strongest first: smaller convergence sets, then first appearance.
    let mut order: Vec<usize> = (0..class_sets.len()).collect();
    order.sort_by_key(|&k| class_sets[k].len());
    let class_sets: Vec<BTreeSet<usize>> = order.iter().map(|&k| class_sets[k].clone()).collect();
    let classes: Vec<Vec<String>> = order.iter().map(|&k| members[k].clone()).collect();
    let hasse = cover_edges(&class_sets);
    let matches_expected = matches_structure(&classes, &hasse, &expected_structure());
    Ok(HierarchyReport { engines, sequences, verdicts, relations, classes, hasse, matches_expected, traces })
}

fn cover_edges(sets: &[BTreeSet<usize>]) -> Vec<(usize, usize)> {
    let below = |a: usize, b: usize| sets[a].is_subset(&sets[b]) && sets[a] != sets[b];
    let mut edges = Vec::new();
    for a in 0..sets.len() {
        for b in 0..sets.len() {
            if below(a, b) && !(0..sets.len()).any(|c| below(a, c) && below(c, b)) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Classes and cover edges `(stronger, weaker)` of a strength order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Structure {
    pub classes: Vec<Vec<String>>,
    pub hasse: Vec<(usize, usize)>,
}

/// Trivial ≻ {KL}, {ReverseKL} ≻ {TV, JS, SqHellinger} ≻ {Wasserstein1, Mmd},
/// with KL and ReverseKL incomparable.
pub fn expected_structure() -> Structure {
    let names = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    Structure {
        classes: vec![
            names(&["Trivial"]),
            names(&["KL"]),
            names(&["ReverseKL"]),
            names(&["TV", "JS", "SqHellinger"]),
            names(&["Wasserstein1", "Mmd"]),
        ],
        hasse: vec![(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)],
    }
}

/// Equal up to renumbering of classes and ordering within them.
pub fn matches_structure(classes: &[Vec<String>], hasse: &[(usize, usize)], expected: &Structure) -> bool {
    let key = |c: &[String]| c.iter().cloned().collect::<BTreeSet<_>>();
    let got: Vec<BTreeSet<String>> = classes.iter().map(|c| key(c)).collect();
    let want: Vec<BTreeSet<String>> = expected.classes.iter().map(|c| key(c)).collect();
    if got.len() != want.len() || want.iter().any(|w| !got.contains(w)) {
        return false;
    }
    let edges = |cls: &[BTreeSet<String>], e: &[(usize, usize)]| {
        e.iter().map(|&(a, b)| (cls[a].clone(), cls[b].clone())).collect::<BTreeSet<_>>()
    };
    edges(&got, hasse) == edges(&want, &expected.hasse)
}

/// Ground truth for weak convergence: the Wasserstein-1 trace to the target.
pub fn weak_convergence_oracle(seq: &MeasureSequence, tol: f64) -> Result<ConvergenceVerdict> {
    Ok(classify(&trace(&DivergenceSpec::Wasserstein1 { lipschitz: 1.0 }, seq)?, tol))
}

/// The engines of the strength diagram, in display order.
pub fn default_specs(sigma: f64) -> Vec<DivergenceSpec> {
    let f = |k| DivergenceSpec::ClosedFormF { generator: catalog(k) };
    vec![
        DivergenceSpec::Trivial { tol_eq: 1e-12 },
        f(GeneratorKind::Kl),
        f(GeneratorKind::ReverseKl),
        f(GeneratorKind::Tv),
        f(GeneratorKind::Js),
        f(GeneratorKind::SqHellinger),
        DivergenceSpec::Wasserstein1 { lipschitz: 1.0 },
        DivergenceSpec::Mmd { sigma },
    ]
}

/// Engines covered by the weak-convergence check: the strength diagram plus
/// the GAN objective, which converges in its gap to `−log 4`.
pub fn strict_specs(sigma: f64) -> Vec<DivergenceSpec> {
    let mut specs = default_specs(sigma);
    specs.insert(6, DivergenceSpec::GanObjective);
    specs
}

/// The four catalog sequences plus a constant `U(0, 1)` sequence and a
/// constant `δ₀` sequence on the same grids.
pub fn default_suite(n_terms: usize, n_grid: usize) -> Result<Vec<MeasureSequence>> {
    let mut suite =
        SequenceKind::ALL.iter().map(|&k| sequence_catalog(k, n_terms, n_grid)).collect::<Result<Vec<_>>>()?;
    let uniform_target = suite[1].target.clone();
    let delta_target = suite[0].target.clone();
    suite.push(MeasureSequence::constant(uniform_target, n_terms, "constant_uniform")?);
    suite.push(MeasureSequence::constant(delta_target, n_terms, "constant_delta")?);
    Ok(suite)
}

/// `δ_{1/n}` against the target `δ₁`, which does not converge weakly.
pub fn delta_to_one(n_terms: usize, n_grid: usize) -> Result<MeasureSequence> {
    let shrink = sequence_catalog(SequenceKind::DeltaShrink, n_terms, n_grid)?;
    let last = shrink.target.len() - 1;
    let target = DiscreteMeasure::point_mass(shrink.target.space().clone(), last)?;
    shrink.with_target(target, "delta_to_one")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakConvergenceRow {
    pub engine: String,
    pub sequence: String,
    pub engine_verdict: VerdictKind,
    pub oracle_verdict: VerdictKind,
    pub violation: bool,
}

/// Pairs where the engine converges but the weak-convergence oracle says the
/// sequence diverges. `traces[e][s]` must line up with `suite`.
pub fn weak_convergence_check(
    traces: &[Vec<SequenceTrace>],
    suite: &[MeasureSequence],
    tol_conv: f64,
) -> Result<Vec<WeakConvergenceRow>> {
    let oracle = suite.iter().map(|s| weak_convergence_oracle(s, tol_conv)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for row in traces {
        for (t, o) in row.iter().zip(&oracle) {
            let v = classify(t, tol_conv).kind;
            rows.push(WeakConvergenceRow {
                engine: t.divergence.label(),
                sequence: t.sequence.clone(),
                engine_verdict: v,
                oracle_verdict: o.kind,
                violation: v == VerdictKind::Converges && o.kind == VerdictKind::Diverges,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExtendedReal::{Finite, PosInfinity};

    fn steps(n: usize) -> Vec<usize> {
        (1..=n).collect()
    }

    #[test]
    fn classify_examples() {
        let g = [1.0, 0.5, 0.25, 1e-9, 1e-10, 1e-11].map(Finite);
        assert_eq!(classify_gaps(&steps(6), &g, 1e-6).kind, VerdictKind::Converges);
        assert_eq!(classify_gaps(&steps(6), &[PosInfinity; 6], 1e-6).kind, VerdictKind::Diverges);
        let osc: Vec<ExtendedReal> = (0..16).map(|k| Finite(0.5 + 0.05 * if k % 2 == 0 { 1.0 } else { -1.0 })).collect();
        assert_eq!(classify_gaps(&steps(16), &osc, 1e-3).kind, VerdictKind::Diverges);
    }

    #[test]
    fn harmonic_decay_converges_and_constant_does_not() {
        let h: Vec<ExtendedReal> = (1..=32).map(|n| Finite(1.0 / n as f64)).collect();
        let v = classify_gaps(&steps(32), &h, 1e-3);
        assert_eq!(v.kind, VerdictKind::Converges);
        assert!((v.trend.unwrap() + 1.0).abs() < 1e-9);
        let c = vec![Finite(0.02); 32];
        assert_eq!(classify_gaps(&steps(32), &c, 1e-3).kind, VerdictKind::Diverges);
        let small = vec![Finite(0.005); 32];
        assert_eq!(classify_gaps(&steps(32), &small, 1e-3).kind, VerdictKind::Undetermined);
    }

    #[test]
    fn tail_infinity_dominates() {
        let mut g: Vec<ExtendedReal> = (1..=8).map(|n| Finite(1.0 / n as f64)).collect();
        g[7] = PosInfinity;
        assert_eq!(classify_gaps(&steps(8), &g, 1e-3).kind, VerdictKind::Diverges);
    }

    #[test]
    fn relations() {
        use VerdictKind::*;
        assert_eq!(relation_from_verdicts(&[Diverges, Converges], &[Converges, Converges]), Relation::Stronger);
        assert_eq!(relation_from_verdicts(&[Converges, Diverges], &[Diverges, Converges]), Relation::Incomparable);
        assert_eq!(relation_from_verdicts(&[Converges, Undetermined], &[Converges, Diverges]), Relation::Equivalent);
        assert_eq!(relation_from_verdicts(&[Converges], &[Diverges]), Relation::Weaker);
    }

    #[test]
    fn expected_structure_matches_itself_under_relabeling() {
        let e = expected_structure();
        assert!(matches_structure(&e.classes, &e.hasse, &e));
        let mut classes = e.classes.clone();
        classes.swap(1, 2);
        classes[3].reverse();
        let hasse = vec![(0, 2), (0, 1), (2, 3), (1, 3), (3, 4)];
        assert!(matches_structure(&classes, &hasse, &e));
        assert!(!matches_structure(&classes, &[(0, 2), (0, 1), (2, 3), (1, 3)], &e));
    }

    #[test]
    fn cover_edges_skip_transitive_pairs() {
        let sets: Vec<BTreeSet<usize>> = vec![[0].into(), [0, 1].into(), [0, 1, 2].into()];
        assert_eq!(cover_edges(&sets), vec![(0, 1), (1, 2)]);
    }
}
