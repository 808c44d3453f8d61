use nalgebra::{DMatrix, DVector};
use ndarray::Array2;

use super::{log_sum_exp, SolveStatus, SolveStatusKind, SolverConfig};
use crate::error::{Error, Result};

/// Plain sweeps at the target `ε` before switching to Newton steps.
const SWEEPS_BEFORE_NEWTON: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornSolution {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Dual objective `E_μ u + E_ν v − ε E_{μ⊗ν}[exp((u ⊕ v − c)/ε)]`.
    pub value: f64,
    pub status: SolveStatus,
    /// Dual objective after each step at the target `ε`.
    pub history: Vec<f64>,
}

/// Entropic transport on the positive-mass points, in the log domain.
struct Problem<'a> {
    cost: &'a Array2<f64>,
    rows: Vec<usize>,
    cols: Vec<usize>,
    a: Vec<f64>,
    b: Vec<f64>,
    la: Vec<f64>,
    lb: Vec<f64>,
}

impl Problem<'_> {
    fn c(&self, i: usize, j: usize) -> f64 {
        self.cost[[self.rows[i], self.cols[j]]]
    }

    /// Soft c-transform: the exact maximizer over `u` for fixed `v`.
    fn u_of(&self, v: &[f64], e: f64) -> Vec<f64> {
        (0..self.rows.len())
            .map(|i| -e * log_sum_exp((0..self.cols.len()).map(|j| (v[j] - self.c(i, j)) / e + self.lb[j])))
            .collect()
    }

    fn v_of(&self, u: &[f64], e: f64) -> Vec<f64> {
        (0..self.cols.len())
            .map(|j| -e * log_sum_exp((0..self.rows.len()).map(|i| (u[i] - self.c(i, j)) / e + self.la[i])))
            .collect()
    }

    fn plan(&self, u: &[f64], v: &[f64], e: f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows.len(), self.cols.len(), |i, j| {
            ((u[i] + v[j] - self.c(i, j)) / e + self.la[i] + self.lb[j]).exp()
        })
    }

    /// Semi-dual `F(v) = max_u D(u, v)`. With `u` optimal the plan has row
    /// marginals `a`, so the entropic term is exactly `ε`.
    fn semi_dual(&self, v: &[f64], e: f64) -> (f64, Vec<f64>) {
        let u = self.u_of(v, e);
        let value = dot(&self.a, &u) + dot(&self.b, v) - e;
        (value, u)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Entropy-regularized transport solved through its dual.
///
/// `ε` is annealed geometrically from the cost scale with a few Sinkhorn
/// sweeps per stage. At the target `ε`, Sinkhorn sweeps run first and damped
/// Newton steps on the semi-dual finish the job, since plain sweeps slow to a
/// crawl when `ε` is small. Each step is an ascent step, so `history` is
/// non-decreasing. Stops when the column-marginal L1 violation falls below
/// `cfg.tol_grad`; rows are matched exactly by construction.
pub fn sinkhorn_iterate(cost: &Array2<f64>, eps: f64, mu: &[f64], nu: &[f64], cfg: &SolverConfig) -> Result<SinkhornSolution> {
    cfg.validate()?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let (n, m) = cost.dim();
    if mu.len() != n || nu.len() != m {
        return Err(Error::DimensionMismatch { expected: n * m, got: mu.len() * nu.len() });
    }
    let rows: Vec<usize> = (0..n).filter(|&i| mu[i] > 0.0).collect();
    let cols: Vec<usize> = (0..m).filter(|&j| nu[j] > 0.0).collect();
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::InvalidMeasure("transport between empty measures".into()));
    }
    let a: Vec<f64> = rows.iter().map(|&i| mu[i]).collect();
    let b: Vec<f64> = cols.iter().map(|&j| nu[j]).collect();
    let p = Problem {
        cost,
        la: a.iter().map(|x| x.ln()).collect(),
        lb: b.iter().map(|x| x.ln()).collect(),
        rows,
        cols,
        a,
        b,
    };

    let scale = p.rows.iter().flat_map(|&i| p.cols.iter().map(move |&j| cost[[i, j]].abs())).fold(0.0f64, f64::max);
    let mut v = vec![0.0; p.cols.len()];
    let mut stage = scale.max(eps);
    while stage > eps {
        for _ in 0..20 {
            let u = p.u_of(&v, stage);
            v = p.v_of(&u, stage);
        }
        stage = (stage / 4.0).max(eps);
    }

    let (mut value, mut u) = p.semi_dual(&v, eps);
    let mut history = vec![value];
    let mut status = SolveStatus { kind: SolveStatusKind::IterationLimit, iters: cfg.max_iters, final_grad_norm: f64::NAN };
    for iter in 0..cfg.max_iters {
        let plan = p.plan(&u, &v, eps);
        let col = plan.row_sum_tr();
        let grad: Vec<f64> = (0..p.cols.len()).map(|j| p.b[j] - col[j]).collect();
        let violation: f64 = grad.iter().map(|g| g.abs()).sum();
        status.final_grad_norm = violation;
        if violation < cfg.tol_grad {
            status = SolveStatus { kind: SolveStatusKind::Converged, iters: iter, final_grad_norm: violation };
            break;
        }
        let newton = if iter < SWEEPS_BEFORE_NEWTON { None } else { newton_step(&p, &plan, &col, &grad, &v, value, eps) };
        match newton {
            Some((nv, nval, nu_)) => {
                v = nv;
                value = nval;
                u = nu_;
            }
            None => {
                v = p.v_of(&u, eps);
                (value, u) = p.semi_dual(&v, eps);
            }
        }
        history.push(value);
    }

    // Soft c-transforms give the dropped points finite potentials.
    let mut u_full = vec![0.0; n];
    let mut v_full = vec![0.0; m];
    for (k, &i) in p.rows.iter().enumerate() {
        u_full[i] = u[k];
    }
    for (k, &j) in p.cols.iter().enumerate() {
        v_full[j] = v[k];
    }
    for i in (0..n).filter(|&i| mu[i] <= 0.0) {
        u_full[i] = -eps * log_sum_exp((0..p.cols.len()).map(|k| (v[k] - cost[[i, p.cols[k]]]) / eps + p.lb[k]));
    }
    for j in (0..m).filter(|&j| nu[j] <= 0.0) {
        v_full[j] = -eps * log_sum_exp((0..p.rows.len()).map(|k| (u[k] - cost[[p.rows[k], j]]) / eps + p.la[k]));
    }
    Ok(SinkhornSolution { u: u_full, v: v_full, value, status, history })
}

/// Damped Newton ascent step on the semi-dual; `None` if no step increases it.
fn newton_step(
    p: &Problem<'_>,
    plan: &DMatrix<f64>,
    col: &DVector<f64>,
    grad: &[f64],
    v: &[f64],
    value: f64,
    eps: f64,
) -> Option<(Vec<f64>, f64, Vec<f64>)> {
    let m = v.len();
    // Negative Hessian: (diag(col) − Πᵀ diag(1/a) Π) / ε, singular along 1.
    let scaled = DMatrix::from_fn(plan.nrows(), m, |i, j| plan[(i, j)] / p.a[i]);
    let mut h = -(plan.transpose() * scaled);
    for j in 0..m {
        h[(j, j)] += col[j];
    }
    h /= eps;
    let ridge = 1e-12 * (1.0 + h.diagonal().max());
    for j in 0..m {
        h[(j, j)] += ridge;
    }
    let dir = h.cholesky()?.solve(&DVector::from_column_slice(grad));
    let slope: f64 = dir.iter().zip(grad).map(|(d, g)| d * g).sum();
    if !(slope > 0.0) {
        return None;
    }
    let mut t = 1.0;
    while t > 1e-10 {
        let cand: Vec<f64> = v.iter().zip(dir.iter()).map(|(x, d)| x + t * d).collect();
        let (val, u) = p.semi_dual(&cand, eps);
        if val >= value + 1e-4 * t * slope {
            return Some((cand, val, u));
        }
        t *= 0.5;
    }
    None
}
