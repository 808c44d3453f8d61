//! Numerical engines shared by the divergences.
//!
//! - [`maximize_concave`]: gradient ascent with backtracking, feasibility by
//!   step shrinking, and an unboundedness detector.
//! - [`solve_lp`]: dense two-phase simplex with Bland's rule.
//! - [`solve_transport_lp`]: transportation simplex on a spanning-tree basis.
//! - [`sinkhorn_iterate`]: log-domain Sinkhorn for entropic transport.

mod concave;
mod lp;
mod sinkhorn;
mod transport;

use serde::Serialize;

pub use concave::{maximize_concave, ConcaveSolution};
pub use lp::{solve_lp, LpOutcome};
pub use sinkhorn::{sinkhorn_iterate, SinkhornSolution};
pub use transport::{solve_transport_lp, TransportSolution};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol_grad: f64,
    pub tol_step: f64,
    pub step_init: f64,
    pub backtrack_factor: f64,
    /// Parameter norm beyond which a still-increasing objective is declared
    /// unbounded.
    pub theta_norm_cap: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            tol_grad: 1e-9,
            tol_step: 1e-14,
            step_init: 1.0,
            backtrack_factor: 0.5,
            theta_norm_cap: 1e6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.tol_grad, self.tol_step, self.step_init, self.backtrack_factor, self.theta_norm_cap];
        if self.max_iters == 0 || positive.iter().any(|x| !(*x > 0.0)) || self.backtrack_factor >= 1.0 {
            return Err(Error::InvalidParameter(format!("bad solver configuration {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatusKind {
    Converged,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveStatus {
    pub kind: SolveStatusKind,
    pub iters: usize,
    pub final_grad_norm: f64,
}

impl SolveStatus {
    /// Status for closed-form engines.
    pub fn exact() -> Self {
        Self { kind: SolveStatusKind::Converged, iters: 0, final_grad_norm: 0.0 }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `log Σ exp(xᵢ)` without overflow.
pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}
