#![allow(dead_code)]

use std::sync::Arc;

use advdiv::measures::{make_space, DiscreteMeasure, FiniteMetricSpace, Metric};
use proptest::prelude::*;

pub fn line(xs: &[f64]) -> Arc<FiniteMetricSpace> {
    make_space(xs.iter().map(|&x| vec![x]).collect(), Metric::Euclidean).unwrap()
}

pub fn measure(space: &Arc<FiniteMetricSpace>, raw: &[f64]) -> DiscreteMeasure {
    DiscreteMeasure::from_unnormalized(space.clone(), raw.to_vec()).unwrap()
}

/// Raw weights in `[0, 1)` with roughly a fifth of them zeroed, never all zero.
pub fn raw_weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0.0..1.0f64, 0..5u8), n).prop_map(|v| {
        let mut w: Vec<f64> = v.into_iter().map(|(x, z)| if z == 0 { 0.0 } else { x + 1e-3 }).collect();
        if w.iter().all(|x| *x == 0.0) {
            w[0] = 1.0;
        }
        w
    })
}

/// Strictly positive raw weights.
pub fn positive_weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..1.0f64, n)
}

/// Distinct sorted points in `[0, 1]`.
pub fn points(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, n).prop_map(move |v| {
        let mut xs: Vec<f64> = v;
        xs.sort_by(f64::total_cmp);
        // Spread ties apart so the space is a metric.
        for i in 1..xs.len() {
            if xs[i] - xs[i - 1] < 1e-3 {
                xs[i] = xs[i - 1] + 1e-3;
            }
        }
        xs
    })
}

/// A space with two measures on it.
pub fn pair(n: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    n.prop_flat_map(|n| (points(n), raw_weights(n), raw_weights(n)))
}

pub fn positive_pair(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (points(n), positive_weights(n), positive_weights(n))
}

// Reference formulas, written directly from the definitions.

pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b == 0.0 {
                return f64::INFINITY;
            }
            s += a * (a / b).ln();
        }
    }
    s
}

/// Jensen–Shannon divergence with the ½ normalization, bounded by log 2.
pub fn js_standard(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    0.5 * kl(p, &m) + 0.5 * kl(q, &m)
}

pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn sq_hellinger(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum()
}

/// W₁ on the line from the CDF difference.
pub fn w1_line(xs: &[f64], p: &[f64], q: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut cdf = 0.0;
    let mut total = 0.0;
    for w in order.windows(2) {
        cdf += p[w[0]] - q[w[0]];
        total += cdf.abs() * (xs[w[1]] - xs[w[0]]);
    }
    total
}
