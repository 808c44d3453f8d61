use super::{dot, norm, SolveStatus, SolveStatusKind, SolverConfig};
use crate::error::{Error, Result};
use crate::generators::ExtendedReal;

/// Sufficient-increase constant of the Armijo test.
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveSolution {
    pub theta: Vec<f64>,
    pub value: ExtendedReal,
    pub status: SolveStatus,
}

/// Maximize a concave objective by gradient ascent.
///
/// Each iteration tries a Barzilai–Borwein step (the previous step doubled
/// when curvature information is unusable) and backtracks by
/// `backtrack_factor` until the candidate is feasible and passes the Armijo
/// test. Stops when the gradient norm drops below `tol_grad` or the accepted
/// step would be shorter than `tol_step`. If the iterate leaves the ball of
/// radius `theta_norm_cap` the supremum is reported as `+∞`; every accepted
/// step strictly increases the objective, so this only fires on growth.
pub fn maximize_concave<F, P>(
    mut objective: F,
    start: Vec<f64>,
    feasible: P,
    cfg: &SolverConfig,
) -> Result<ConcaveSolution>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
    P: Fn(&[f64]) -> bool,
{
    cfg.validate()?;
    if !feasible(&start) {
        return Err(Error::InfeasibleStart);
    }
    let mut theta = start;
    let (mut value, mut grad) = objective(&theta);
    if !value.is_finite() || grad.len() != theta.len() {
        return Err(Error::InfeasibleStart);
    }
    let mut step = cfg.step_init;
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;

    for iter in 0..cfg.max_iters {
        let g_norm = norm(&grad);
        let status = |kind| SolveStatus { kind, iters: iter, final_grad_norm: g_norm };
        if g_norm < cfg.tol_grad {
            return Ok(ConcaveSolution { theta, value: ExtendedReal::Finite(value), status: status(SolveStatusKind::Converged) });
        }
        if let Some((prev_theta, prev_grad)) = &previous {
            let s: Vec<f64> = theta.iter().zip(prev_theta).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = grad.iter().zip(prev_grad).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            step = if sy < 0.0 { (dot(&s, &s) / -sy).clamp(1e-12, 1e12) } else { (step * 2.0).min(1e12) };
        }

        let g2 = g_norm * g_norm;
        let mut t = step;
        let accepted = loop {
            if t * g_norm < cfg.tol_step {
                break None;
            }
            let cand: Vec<f64> = theta.iter().zip(&grad).map(|(x, g)| x + t * g).collect();
            if feasible(&cand) {
                let (v, g) = objective(&cand);
                if v.is_finite() && v >= value + ARMIJO * t * g2 {
                    break Some((cand, v, g));
                }
            }
            t *= cfg.backtrack_factor;
        };
        let Some((cand, v, g)) = accepted else {
            // No admissible step remains: stationary up to the step tolerance.
            return Ok(ConcaveSolution { theta, value: ExtendedReal::Finite(value), status: status(SolveStatusKind::Converged) });
        };
        step = t;
        previous = Some((std::mem::replace(&mut theta, cand), std::mem::replace(&mut grad, g)));
        value = v;
        if norm(&theta) > cfg.theta_norm_cap {
            return Ok(ConcaveSolution {
                theta,
                value: ExtendedReal::PosInfinity,
                status: SolveStatus { kind: SolveStatusKind::Unbounded, iters: iter + 1, final_grad_norm: norm(&grad) },
            });
        }
    }
    Ok(ConcaveSolution {
        value: ExtendedReal::Finite(value),
        status: SolveStatus { kind: SolveStatusKind::IterationLimit, iters: cfg.max_iters, final_grad_norm: norm(&grad) },
        theta,
    })
}
