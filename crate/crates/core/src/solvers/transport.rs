use std::collections::VecDeque;

use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TransportSolution {
    pub plan: Array2<f64>,
    /// Minimal cost `Σ πᵢⱼ cᵢⱼ`.
    pub value: f64,
    /// Dual potentials with `uᵢ + vⱼ ≤ cᵢⱼ`, tight on the support of `plan`.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    i: usize,
    j: usize,
    x: f64,
}

/// Optimal transport between two discrete measures of equal mass.
///
/// Transportation simplex: north-west corner start, potentials on the
/// spanning-tree basis, Bland's rule for the entering cell. Zero-mass points
/// are dropped during the solve and receive c-transform potentials afterwards
/// so the returned duals are feasible everywhere.
pub fn solve_transport_lp(cost: &Array2<f64>, mu: &[f64], nu: &[f64]) -> Result<TransportSolution> {
    let (n, m) = cost.dim();
    if mu.len() != n || nu.len() != m {
        return Err(Error::DimensionMismatch { expected: n * m, got: mu.len() * nu.len() });
    }
    let rows: Vec<usize> = (0..n).filter(|&i| mu[i] > 0.0).collect();
    let cols: Vec<usize> = (0..m).filter(|&j| nu[j] > 0.0).collect();
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::InvalidMeasure("transport between empty measures".into()));
    }
    let (r, c) = (rows.len(), cols.len());
    let mass_a: f64 = rows.iter().map(|&i| mu[i]).sum();
    let mass_b: f64 = cols.iter().map(|&j| nu[j]).sum();
    let mut ra: Vec<f64> = rows.iter().map(|&i| mu[i]).collect();
    let mut rb: Vec<f64> = cols.iter().map(|&j| nu[j] * mass_a / mass_b).collect();
    let sub = |i: usize, j: usize| cost[[rows[i], cols[j]]];
    let scale = cost.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
    let tol = 1e-12 * scale;

    let mut basis: Vec<Cell> = Vec::with_capacity(r + c - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        let q = ra[i].min(rb[j]);
        basis.push(Cell { i, j, x: q });
        ra[i] -= q;
        rb[j] -= q;
        if i == r - 1 && j == c - 1 {
            break;
        }
        if (ra[i] <= rb[j] && i < r - 1) || j == c - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }

    let max_pivots = 50 * r * c + 1000;
    let (mut u, mut v);
    let mut pivots = 0;
    loop {
        (u, v) = tree_potentials(&basis, r, c, &sub);
        let mut in_basis = vec![false; r * c];
        for cell in &basis {
            in_basis[cell.i * c + cell.j] = true;
        }
        let entering = (0..r * c).find(|&k| !in_basis[k] && sub(k / c, k % c) - u[k / c] - v[k % c] < -tol);
        let Some(k) = entering else { break };
        if pivots == max_pivots {
            return Err(Error::SolverFailure(format!("transport simplex exceeded {max_pivots} pivots")));
        }
        pivots += 1;
        pivot(&mut basis, r, c, k / c, k % c);
    }

    let mut plan = Array2::<f64>::zeros((n, m));
    for cell in &basis {
        plan[[rows[cell.i], cols[cell.j]]] += cell.x.max(0.0);
    }
    let mut u_full = vec![f64::NAN; n];
    let mut v_full = vec![f64::NAN; m];
    for (a, &i) in rows.iter().enumerate() {
        u_full[i] = u[a];
    }
    for (b, &j) in cols.iter().enumerate() {
        v_full[j] = v[b];
    }
    for i in 0..n {
        if u_full[i].is_nan() {
            u_full[i] = cols.iter().map(|&j| cost[[i, j]] - v_full[j]).fold(f64::INFINITY, f64::min);
        }
    }
    for j in 0..m {
        if v_full[j].is_nan() {
            v_full[j] = (0..n).map(|i| cost[[i, j]] - u_full[i]).fold(f64::INFINITY, f64::min);
        }
    }
    let value = plan.iter().zip(cost.iter()).map(|(p, c)| p * c).sum();
    Ok(TransportSolution { plan, value, u: u_full, v: v_full })
}

/// Row nodes are `0..r`, column nodes `r..r + c`.
fn adjacency(basis: &[Cell], r: usize, c: usize) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); r + c];
    for (k, cell) in basis.iter().enumerate() {
        adj[cell.i].push((r + cell.j, k));
        adj[r + cell.j].push((cell.i, k));
    }
    adj
}

fn tree_potentials(basis: &[Cell], r: usize, c: usize, cost: &impl Fn(usize, usize) -> f64) -> (Vec<f64>, Vec<f64>) {
    let adj = adjacency(basis, r, c);
    let mut pot = vec![f64::NAN; r + c];
    pot[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        for &(next, k) in &adj[node] {
            if pot[next].is_nan() {
                let cell = basis[k];
                pot[next] = cost(cell.i, cell.j) - pot[node];
                queue.push_back(next);
            }
        }
    }
    let v = pot.split_off(r);
    (pot, v)
}

fn pivot(basis: &mut [Cell], r: usize, c: usize, ie: usize, je: usize) {
    // Tree path from the entering row node to the entering column node.
    let adj = adjacency(basis, r, c);
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; r + c];
    let mut seen = vec![false; r + c];
    seen[ie] = true;
    let mut queue = VecDeque::from([ie]);
    while let Some(node) = queue.pop_front() {
        for &(next, k) in &adj[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, k));
                queue.push_back(next);
            }
        }
    }
    // Walking back from the column node, edges alternate minus, plus, ...
    let mut path = Vec::new();
    let mut node = r + je;
    while node != ie {
        let (prev, k) = parent[node].expect("basis is a spanning tree");
        path.push(k);
        node = prev;
    }
    let minus: Vec<usize> = path.iter().step_by(2).copied().collect();
    let plus: Vec<usize> = path.iter().skip(1).step_by(2).copied().collect();
    let leave = *minus
        .iter()
        .min_by(|&&a, &&b| {
            let (ca, cb) = (basis[a], basis[b]);
            ca.x.total_cmp(&cb.x).then((ca.i, ca.j).cmp(&(cb.i, cb.j)))
        })
        .expect("cycle has a minus edge");
    let theta = basis[leave].x;
    for k in minus {
        basis[k].x -= theta;
    }
    for k in plus {
        basis[k].x += theta;
    }
    basis[leave] = Cell { i: ie, j: je, x: theta };
}
