//! Finite metric spaces and discrete probability measures.
//!
//! Continuous distributions are represented by histograms on an equispaced
//! grid: each grid point owns a cell of equal width and receives mass
//! proportional to the length of the overlap between its cell and the
//! support. This keeps total-variation and support-disjointness structure
//! intact, which is what the counterexample sequences depend on.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for metric axioms.
pub const METRIC_TOL: f64 = 1e-9;
/// Tolerance on the total mass of a measure.
pub const MASS_TOL: f64 = 1e-12;

/// How pairwise distances are obtained.
#[derive(Debug, Clone)]
pub enum Metric {
    Euclidean,
    Explicit(Array2<f64>),
}

/// `n` points with coordinates and a validated distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    points: Vec<Vec<f64>>,
    dist: Array2<f64>,
}

impl FiniteMetricSpace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dist(&self) -> &Array2<f64> {
        &self.dist
    }

    /// Coordinate dimension (0 if points carry no coordinates).
    pub fn coord_dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }
}

/// Build and validate a finite metric space.
pub fn make_space(coords: Vec<Vec<f64>>, metric: Metric) -> Result<Arc<FiniteMetricSpace>> {
    let n = coords.len();
    if n == 0 {
        return Err(Error::InvalidParameter("a space needs at least one point".into()));
    }
    let k = coords[0].len();
    if let Some(bad) = coords.iter().find(|c| c.len() != k) {
        return Err(Error::DimensionMismatch { expected: k, got: bad.len() });
    }
    if coords.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite coordinate".into()));
    }
    let dist = match metric {
        Metric::Euclidean => {
            let d = Array2::from_shape_fn((n, n), |(i, j)| euclidean(&coords[i], &coords[j]));
            check_metric(&d, false)?;
            d
        }
        Metric::Explicit(d) => {
            if d.dim() != (n, n) {
                return Err(Error::DimensionMismatch { expected: n, got: d.nrows() });
            }
            check_metric(&d, true)?;
            d
        }
    };
    Ok(Arc::new(FiniteMetricSpace { points: coords, dist }))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_metric(d: &Array2<f64>, triangle: bool) -> Result<()> {
    let n = d.nrows();
    for i in 0..n {
        if !d[[i, i]].is_finite() || d[[i, i]].abs() > METRIC_TOL {
            return Err(Error::MetricViolation(format!("dist[{i}][{i}] = {} is not zero", d[[i, i]])));
        }
        for j in (i + 1)..n {
            let (a, b) = (d[[i, j]], d[[j, i]]);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::MetricViolation(format!("dist[{i}][{j}] is not finite")));
            }
            if (a - b).abs() > METRIC_TOL {
                return Err(Error::MetricViolation(format!("dist[{i}][{j}] = {a} but dist[{j}][{i}] = {b}")));
            }
            if a <= 0.0 {
                return Err(Error::MetricViolation(format!("points {i} and {j} coincide")));
            }
        }
    }
    if triangle {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d[[i, k]] > d[[i, j]] + d[[j, k]] + METRIC_TOL {
                        return Err(Error::MetricViolation(format!(
                            "triangle inequality fails for ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Whether two spaces are the same object or structurally identical.
pub fn same_space(a: &Arc<FiniteMetricSpace>, b: &Arc<FiniteMetricSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A probability vector over a finite metric space.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    space: Arc<FiniteMetricSpace>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(space: Arc<FiniteMetricSpace>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), got: weights.len() });
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("weight {i} = {w} is negative or not finite")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(Self { space, weights })
    }

    /// Clamp tiny negatives from floating-point round-off and renormalize.
    pub fn from_unnormalized(space: Arc<FiniteMetricSpace>, mut weights: Vec<f64>) -> Result<Self> {
        weights.iter_mut().for_each(|w| *w = w.max(0.0));
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidMeasure(format!("total mass {total} cannot be normalized")));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(space, weights)
    }

    pub fn point_mass(space: Arc<FiniteMetricSpace>, index: usize) -> Result<Self> {
        if index >= space.len() {
            return Err(Error::InvalidParameter(format!("point {index} out of range")));
        }
        let mut w = vec![0.0; space.len()];
        w[index] = 1.0;
        Self::new(space, w)
    }

    pub fn uniform(space: Arc<FiniteMetricSpace>) -> Self {
        let n = space.len();
        Self { space, weights: vec![1.0 / n as f64; n] }
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn same_space(&self, other: &DiscreteMeasure) -> bool {
        same_space(&self.space, &other.space)
    }

    /// `λ·self + (1 − λ)·other`.
    pub fn mix(&self, other: &DiscreteMeasure, lambda: f64) -> Result<Self> {
        if !self.same_space(other) {
            return Err(Error::SpaceMismatch);
        }
        let w = self.weights.iter().zip(&other.weights).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        Self::from_unnormalized(self.space.clone(), w)
    }

    pub fn sup_distance(&self, other: &DiscreteMeasure) -> f64 {
        self.weights.iter().zip(&other.weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `Σᵢ wᵢ·valuesᵢ`.
pub fn expectation(m: &DiscreteMeasure, values: &[f64]) -> Result<f64> {
    if values.len() != m.len() {
        return Err(Error::DimensionMismatch { expected: m.len(), got: values.len() });
    }
    Ok(m.weights.iter().zip(values).map(|(w, v)| w * v).sum())
}

/// `Σᵢⱼ μᵢ νⱼ valuesᵢⱼ`, the integral against the product measure.
pub fn product_expectation(mu: &DiscreteMeasure, nu: &DiscreteMeasure, values: &Array2<f64>) -> Result<f64> {
    if !mu.same_space(nu) {
        return Err(Error::SpaceMismatch);
    }
    let n = mu.len();
    if values.dim() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, got: values.nrows() });
    }
    let mut total = 0.0;
    for (i, &a) in mu.weights.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in nu.weights.iter().enumerate() {
            total += a * b * values[[i, j]];
        }
    }
    Ok(total)
}

/// Equispaced 1-D grid of `n_grid` cells over `[lo, hi]`; points sit at the
/// cell centers.
pub fn cell_grid(lo: f64, hi: f64, n_grid: usize) -> Result<Arc<FiniteMetricSpace>> {
    if n_grid < 2 || !(lo < hi) {
        return Err(Error::InvalidParameter(format!("grid [{lo}, {hi}] with {n_grid} cells")));
    }
    let width = (hi - lo) / n_grid as f64;
    let coords = (0..n_grid).map(|i| vec![lo + (i as f64 + 0.5) * width]).collect();
    make_space(coords, Metric::Euclidean)
}

/// Raw cell weights (overlap length over cell width) before normalization.
fn cell_overlaps(lo: f64, hi: f64, support_lo: f64, support_hi: f64, n_grid: usize) -> Vec<f64> {
    let width = (hi - lo) / n_grid as f64;
    (0..n_grid)
        .map(|i| {
            let a = lo + i as f64 * width;
            let b = if i + 1 == n_grid { hi } else { lo + (i + 1) as f64 * width };
            (b.min(support_hi) - a.max(support_lo)).max(0.0) / width
        })
        .collect()
}

/// Histogram discretization of `U(support_lo, support_hi)` on the cell grid
/// over `[lo, hi]`.
pub fn grid_uniform(lo: f64, hi: f64, support_lo: f64, support_hi: f64, n_grid: usize) -> Result<DiscreteMeasure> {
    let space = cell_grid(lo, hi, n_grid)?;
    grid_uniform_on(&space, lo, hi, support_lo, support_hi)
}

fn grid_uniform_on(
    space: &Arc<FiniteMetricSpace>,
    lo: f64,
    hi: f64,
    support_lo: f64,
    support_hi: f64,
) -> Result<DiscreteMeasure> {
    if !(lo <= support_lo && support_lo < support_hi && support_hi <= hi) {
        return Err(Error::InvalidParameter(format!(
            "support [{support_lo}, {support_hi}] must lie inside [{lo}, {hi}]"
        )));
    }
    let raw = cell_overlaps(lo, hi, support_lo, support_hi, space.len());
    if raw.iter().all(|w| *w <= 0.0) {
        return Err(Error::EmptySupport { lo: support_lo, hi: support_hi });
    }
    DiscreteMeasure::from_unnormalized(space.clone(), raw)
}

/// The catalog of test sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    /// `δ_{1/n}` snapped to a grid on `[0, 1]`, target `δ₀`.
    DeltaShrink,
    /// `U(1/n, 1 + 1/n)` on a grid over `[0, 2]`, target `U(0, 1)`.
    UniformShift,
    /// `U(0, 1 − 1/n)`, target `U(0, 1)`.
    UniformShrink,
    /// `U(0, 1 + 1/n)`, target `U(0, 1)`.
    UniformStretch,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 4] =
        [Self::DeltaShrink, Self::UniformShift, Self::UniformShrink, Self::UniformStretch];

    pub fn label(self) -> &'static str {
        match self {
            Self::DeltaShrink => "delta_shrink",
            Self::UniformShift => "uniform_shift",
            Self::UniformShrink => "uniform_shrink",
            Self::UniformStretch => "uniform_stretch",
        }
    }
}

/// An ordered list of measures compared against a common target.
#[derive(Debug, Clone)]
pub struct MeasureSequence {
    pub target: DiscreteMeasure,
    pub items: Vec<DiscreteMeasure>,
    pub label: String,
    /// Sequence parameter `n` for each item (the `1/n` in the definitions).
    pub steps: Vec<usize>,
}

impl MeasureSequence {
    pub fn new(
        target: DiscreteMeasure,
        items: Vec<DiscreteMeasure>,
        label: impl Into<String>,
        steps: Vec<usize>,
    ) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidParameter("a sequence needs at least one item".into()));
        }
        if steps.len() != items.len() {
            return Err(Error::DimensionMismatch { expected: items.len(), got: steps.len() });
        }
        if items.iter().any(|m| !m.same_space(&target)) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { target, items, label: label.into(), steps })
    }

    /// `len` copies of `measure`, with `measure` as the target.
    pub fn constant(measure: DiscreteMeasure, len: usize, label: impl Into<String>) -> Result<Self> {
        let items = vec![measure.clone(); len];
        Self::new(measure, items, label, (1..=len).collect())
    }

    /// Same items, different target.
    pub fn with_target(&self, target: DiscreteMeasure, label: impl Into<String>) -> Result<Self> {
        Self::new(target, self.items.clone(), label, self.steps.clone())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Index of the grid point nearest `x` on a 1-D space; ties go to the
/// smaller coordinate.
pub fn snap_to_grid(space: &FiniteMetricSpace, x: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    let mut best_c = f64::INFINITY;
    for (i, p) in space.points().iter().enumerate() {
        let c = p[0];
        let d = (c - x).abs();
        if d < best_d || (d == best_d && c < best_c) {
            best = i;
            best_d = d;
            best_c = c;
        }
    }
    best
}

/// Build one of the catalog sequences.
///
/// `delta_shrink` uses `n_grid` points placed at `i/(n_grid − 1)` so that
/// `0` is a grid point, and item `k` is `δ_{1/k}`. The uniform sequences use
/// `n_grid` cells over `[0, 2]`; item `k` uses `n = s·k` where
/// `s = max(1, n_grid / (2·n_terms))`, so the finest perturbation is at
/// least one cell wide and the support structure is never blurred by the
/// grid. `uniform_shrink` never uses `n < 2`.
pub fn sequence_catalog(kind: SequenceKind, n_terms: usize, n_grid: usize) -> Result<MeasureSequence> {
    if n_terms < 2 {
        return Err(Error::InvalidParameter("n_terms must be at least 2".into()));
    }
    if n_grid < n_terms {
        return Err(Error::InvalidParameter(format!("n_grid ({n_grid}) must be at least n_terms ({n_terms})")));
    }
    match kind {
        SequenceKind::DeltaShrink => {
            let coords = (0..n_grid).map(|i| vec![i as f64 / (n_grid - 1) as f64]).collect();
            let space = make_space(coords, Metric::Euclidean)?;
            let target = DiscreteMeasure::point_mass(space.clone(), 0)?;
            let steps: Vec<usize> = (1..=n_terms).collect();
            let items = steps
                .iter()
                .map(|&n| DiscreteMeasure::point_mass(space.clone(), snap_to_grid(&space, 1.0 / n as f64)))
                .collect::<Result<Vec<_>>>()?;
            MeasureSequence::new(target, items, kind.label(), steps)
        }
        _ => {
            let (lo, hi) = (0.0, 2.0);
            let space = cell_grid(lo, hi, n_grid)?;
            let target = grid_uniform_on(&space, lo, hi, 0.0, 1.0)?;
            let stride = (n_grid / (2 * n_terms)).max(1);
            let steps: Vec<usize> = (1..=n_terms)
                .map(|k| {
                    let n = stride * k;
                    if kind == SequenceKind::UniformShrink { n.max(2) } else { n }
                })
                .collect();
            let items = steps
                .iter()
                .map(|&n| {
                    let h = 1.0 / n as f64;
                    let (a, b) = match kind {
                        SequenceKind::UniformShift => (h, 1.0 + h),
                        SequenceKind::UniformShrink => (0.0, 1.0 - h),
                        _ => (0.0, 1.0 + h),
                    };
                    grid_uniform_on(&space, lo, hi, a, b)
                })
                .collect::<Result<Vec<_>>>()?;
            MeasureSequence::new(target, items, kind.label(), steps)
        }
    }
}

/// JSON document for a measure and its space:
/// `{"points": [[...]], "dist": optional, "weights": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDoc {
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<Vec<f64>>>,
    pub weights: Vec<f64>,
}

impl MeasureDoc {
    pub fn from_measure(m: &DiscreteMeasure, with_dist: bool) -> Self {
        let dist = with_dist.then(|| m.space().dist().rows().into_iter().map(|r| r.to_vec()).collect());
        Self { points: m.space().points().to_vec(), dist, weights: m.weights().to_vec() }
    }

    pub fn to_space(&self) -> Result<Arc<FiniteMetricSpace>> {
        let metric = match &self.dist {
            None => Metric::Euclidean,
            Some(rows) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::MetricViolation("distance matrix is not square".into()));
                }
                Metric::Explicit(Array2::from_shape_fn((n, n), |(i, j)| rows[i][j]))
            }
        };
        make_space(self.points.clone(), metric)
    }

    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        DiscreteMeasure::new(self.to_space()?, self.weights.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn line(xs: &[f64]) -> Arc<FiniteMetricSpace> {
        make_space(xs.iter().map(|&x| vec![x]).collect(), Metric::Euclidean).unwrap()
    }

    #[test]
    fn euclidean_distances() {
        let s = line(&[0.0, 1.0]);
        assert_eq!(s.dist(), &ndarray::array![[0.0, 1.0], [1.0, 0.0]]);
        let s = line(&[0.0, 1.0, 3.0]);
        assert_eq!(s.dist()[[0, 2]], 3.0);
    }

    #[test]
    fn explicit_metric_accepted_and_rejected() {
        let ok = make_space(vec![vec![0.0], vec![1.0]], Metric::Explicit(ndarray::array![[0.0, 1.0], [1.0, 0.0]]));
        assert!(ok.is_ok());
        let asym = make_space(vec![vec![0.0], vec![1.0]], Metric::Explicit(ndarray::array![[0.0, 1.0], [2.0, 0.0]]));
        assert!(matches!(asym, Err(Error::MetricViolation(_))));
        let diag = make_space(vec![vec![0.0], vec![1.0]], Metric::Explicit(ndarray::array![[0.5, 1.0], [1.0, 0.0]]));
        assert!(matches!(diag, Err(Error::MetricViolation(_))));
        let tri = make_space(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            Metric::Explicit(ndarray::array![[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]]),
        );
        assert!(matches!(tri, Err(Error::MetricViolation(_))));
        let dup = make_space(vec![vec![0.0], vec![0.0]], Metric::Euclidean);
        assert!(matches!(dup, Err(Error::MetricViolation(_))));
        assert!(make_space(vec![], Metric::Euclidean).is_err());
    }

    #[test]
    fn expectations() {
        let s = line(&[0.0, 1.0]);
        assert_eq!(expectation(&DiscreteMeasure::uniform(s.clone()), &[0.0, 1.0]).unwrap(), 0.5);
        let d0 = DiscreteMeasure::point_mass(s.clone(), 0).unwrap();
        assert_eq!(expectation(&d0, &[3.0, 7.0]).unwrap(), 3.0);
        let m = DiscreteMeasure::new(s.clone(), vec![0.25, 0.75]).unwrap();
        assert_eq!(expectation(&m, &[1.0, -1.0]).unwrap(), -0.5);
        assert!(matches!(expectation(&m, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn product_expectations() {
        let s = line(&[0.0, 1.0]);
        let d0 = DiscreteMeasure::point_mass(s.clone(), 0).unwrap();
        let d1 = DiscreteMeasure::point_mass(s.clone(), 1).unwrap();
        let v = ndarray::array![[5.0, 0.0], [0.0, 0.0]];
        assert_eq!(product_expectation(&d0, &d0, &v).unwrap(), 5.0);
        let u = DiscreteMeasure::uniform(s.clone());
        assert_eq!(product_expectation(&u, &u, &Array2::ones((2, 2))).unwrap(), 1.0);
        let v = ndarray::array![[0.0, 2.0], [9.0, 0.0]];
        assert_eq!(product_expectation(&d0, &d1, &v).unwrap(), 2.0);
        let other = DiscreteMeasure::uniform(line(&[0.0, 2.0]));
        assert_eq!(product_expectation(&d0, &other, &v), Err(Error::SpaceMismatch));
    }

    #[test]
    fn grid_uniform_cells() {
        assert_eq!(grid_uniform(0.0, 1.0, 0.0, 1.0, 4).unwrap().weights(), &[0.25; 4]);
        assert_eq!(grid_uniform(0.0, 2.0, 0.0, 1.0, 4).unwrap().weights(), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(grid_uniform(0.0, 1.0, 0.0, 0.5, 2).unwrap().weights(), &[1.0, 0.0]);
        assert!(grid_uniform(0.0, 1.0, 0.5, 0.2, 4).is_err());
    }

    #[test]
    fn grid_uniform_raw_mass_matches_support_length() {
        for &(a, b) in &[(0.1, 0.9), (1.0 / 3.0, 1.5), (0.0, 2.0), (0.37, 0.38)] {
            let raw = cell_overlaps(0.0, 2.0, a, b, 64);
            assert_abs_diff_eq!(raw.iter().sum::<f64>(), (b - a) / (2.0 / 64.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_shrink_snaps() {
        let seq = sequence_catalog(SequenceKind::DeltaShrink, 8, 101).unwrap();
        let x = |m: &DiscreteMeasure| {
            let i = m.weights().iter().position(|w| *w == 1.0).unwrap();
            m.space().points()[i][0]
        };
        assert_abs_diff_eq!(x(&seq.items[3]), 0.25, epsilon = 1e-12);
        assert_eq!(x(&seq.target), 0.0);
        assert_eq!(seq.steps[3], 4);
    }

    #[test]
    fn snapping_ties_go_left() {
        let s = line(&[0.0, 1.0, 2.0]);
        assert_eq!(snap_to_grid(&s, 0.5), 0);
        assert_eq!(snap_to_grid(&s, 1.5), 1);
        assert_eq!(snap_to_grid(&s, 1.6), 2);
    }

    #[test]
    fn uniform_shift_support() {
        let seq = sequence_catalog(SequenceKind::UniformShift, 8, 64).unwrap();
        let n = *seq.steps.last().unwrap();
        assert_eq!(n, 32);
        let last = seq.items.last().unwrap();
        for (p, w) in last.space().points().iter().zip(last.weights()) {
            let (a, b) = (p[0] - 1.0 / 64.0, p[0] + 1.0 / 64.0);
            let overlaps = b > 1.0 / n as f64 && a < 1.0 + 1.0 / n as f64;
            assert_eq!(*w > 0.0, overlaps, "cell at {}", p[0]);
        }
        let target = &seq.target;
        assert_abs_diff_eq!(target.weights()[..32].iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn catalog_targets_and_validation() {
        for kind in SequenceKind::ALL {
            let seq = sequence_catalog(kind, 4, 16).unwrap();
            assert_eq!(seq.len(), 4);
            for m in seq.items.iter().chain(std::iter::once(&seq.target)) {
                assert_abs_diff_eq!(m.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            }
        }
        let shrink = sequence_catalog(SequenceKind::UniformShrink, 4, 16).unwrap();
        assert_eq!(shrink.target.weights(), grid_uniform(0.0, 2.0, 0.0, 1.0, 16).unwrap().weights());
        assert!(sequence_catalog(SequenceKind::DeltaShrink, 1, 16).is_err());
        assert!(sequence_catalog(SequenceKind::DeltaShrink, 8, 4).is_err());
    }

    #[test]
    fn measure_validation() {
        let s = line(&[0.0, 1.0]);
        assert!(DiscreteMeasure::new(s.clone(), vec![0.5, 0.6]).is_err());
        assert!(DiscreteMeasure::new(s.clone(), vec![-0.1, 1.1]).is_err());
        assert!(DiscreteMeasure::new(s.clone(), vec![1.0]).is_err());
        assert!(DiscreteMeasure::new(s, vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn measure_doc_round_trip() {
        let doc: MeasureDoc = serde_json::from_str(r#"{"points": [[0.0], [1.0]], "weights": [0.25, 0.75]}"#).unwrap();
        let m = doc.to_measure().unwrap();
        assert_eq!(m.space().dist()[[0, 1]], 1.0);
        let back = MeasureDoc::from_measure(&m, true);
        assert_eq!(back.to_measure().unwrap().weights(), m.weights());
        assert!(back.to_measure().unwrap().same_space(&m));
    }
}
