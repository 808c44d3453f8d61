use ndarray::{s, Array2};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// Maximize `cᵀx` subject to `Ax = b`, `x ≥ 0`.
///
/// Dense two-phase tableau simplex. Entering and leaving variables follow
/// Bland's rule, so degenerate problems cannot cycle. Redundant equality
/// rows are detected after phase one and dropped.
pub fn solve_lp(a: &Array2<f64>, b: &[f64], c: &[f64]) -> LpOutcome {
    let (m, n) = a.dim();
    assert_eq!(b.len(), m, "rhs length");
    assert_eq!(c.len(), n, "cost length");

    // Columns: n structural, m artificial, then the rhs.
    let width = n + m + 1;
    let mut t = Array2::<f64>::zeros((m + 1, width));
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[[i, j]] = sign * a[[i, j]];
        }
        t[[i, n + i]] = 1.0;
        t[[i, width - 1]] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut active: Vec<bool> = vec![true; m];

    // Phase one: maximize −Σ artificials.
    for j in 0..width {
        if j >= n && j < n + m {
            continue;
        }
        t[[m, j]] = -(0..m).map(|i| t[[i, j]]).sum::<f64>();
    }
    if run_simplex(&mut t, &mut basis, &active, n + m).is_err() {
        unreachable!("phase one is bounded");
    }
    if -t[[m, width - 1]] > FEAS_TOL {
        return LpOutcome::Infeasible;
    }
    for i in 0..m {
        if basis[i] < n {
            continue;
        }
        match (0..n).find(|&j| t[[i, j]].abs() > PIVOT_TOL) {
            Some(j) => pivot(&mut t, &mut basis, i, j),
            None => active[i] = false,
        }
    }

    // Phase two.
    for j in 0..width {
        let cj = if j < n { c[j] } else { 0.0 };
        let cb: f64 = (0..m).filter(|&i| active[i]).map(|i| c_of(c, n, basis[i]) * t[[i, j]]).sum();
        t[[m, j]] = if j == width - 1 { cb } else { cb - cj };
    }
    if run_simplex(&mut t, &mut basis, &active, n).is_err() {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for i in 0..m {
        if active[i] && basis[i] < n {
            x[basis[i]] = t[[i, width - 1]].max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}

fn c_of(c: &[f64], n: usize, j: usize) -> f64 {
    if j < n {
        c[j]
    } else {
        0.0
    }
}

struct Unbounded;

/// Pivot until no admissible column among the first `cols` has a negative
/// reduced cost.
fn run_simplex(t: &mut Array2<f64>, basis: &mut [usize], active: &[bool], cols: usize) -> Result<(), Unbounded> {
    let m = basis.len();
    let rhs = t.ncols() - 1;
    loop {
        let Some(enter) = (0..cols).find(|&j| t[[m, j]] < -PIVOT_TOL) else {
            return Ok(());
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in (0..m).filter(|&i| active[i]) {
            let a = t[[i, enter]];
            if a > PIVOT_TOL {
                let ratio = t[[i, rhs]] / a;
                leave = match leave {
                    Some((li, lr)) if ratio > lr + PIVOT_TOL => Some((li, lr)),
                    Some((li, lr)) if ratio >= lr - PIVOT_TOL && basis[li] < basis[i] => Some((li, lr)),
                    _ => Some((i, ratio)),
                };
            }
        }
        let Some((row, _)) = leave else {
            return Err(Unbounded);
        };
        pivot(t, basis, row, enter);
    }
}

fn pivot(t: &mut Array2<f64>, basis: &mut [usize], row: usize, col: usize) {
    let p = t[[row, col]];
    t.row_mut(row).mapv_inplace(|v| v / p);
    let pivot_row = t.slice(s![row, ..]).to_owned();
    for i in 0..t.nrows() {
        if i == row {
            continue;
        }
        let f = t[[i, col]];
        if f != 0.0 {
            t.row_mut(i).scaled_add(-f, &pivot_row);
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 (slacks s1..s3).
        let a = array![[1.0, 0.0, 1.0, 0.0, 0.0], [0.0, 2.0, 0.0, 1.0, 0.0], [3.0, 2.0, 0.0, 0.0, 1.0]];
        let LpOutcome::Optimal { x, value } = solve_lp(&a, &[4.0, 12.0, 18.0], &[3.0, 5.0, 0.0, 0.0, 0.0]) else {
            panic!("expected optimum");
        };
        assert_abs_diff_eq!(value, 36.0, epsilon = 1e-10);
        assert_abs_diff_eq!(x[0], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(x[1], 6.0, epsilon = 1e-10);
    }

    #[test]
    fn simplex_vertex_with_moment_constraint() {
        // w ≥ 0, Σw = 1, w₁ + 2w₂ = 1; maximize w₀.
        let a = array![[1.0, 1.0, 1.0], [0.0, 1.0, 2.0]];
        let LpOutcome::Optimal { x, value } = solve_lp(&a, &[1.0, 1.0], &[1.0, 0.0, 0.0]) else {
            panic!("expected optimum");
        };
        assert_abs_diff_eq!(value, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(x[2], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn redundant_rows_and_infeasibility() {
        let a = array![[1.0, 1.0], [2.0, 2.0]];
        assert!(matches!(solve_lp(&a, &[1.0, 2.0], &[1.0, 0.0]), LpOutcome::Optimal { value, .. } if (value - 1.0).abs() < 1e-12));
        assert_eq!(solve_lp(&a, &[1.0, 3.0], &[1.0, 0.0]), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let a = array![[1.0, -1.0]];
        assert_eq!(solve_lp(&a, &[1.0], &[1.0, 0.0]), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs() {
        // −x − y = −2, maximize −x: optimum x = 0.
        let a = array![[-1.0, -1.0]];
        let LpOutcome::Optimal { x, value } = solve_lp(&a, &[-2.0], &[-1.0, 0.0]) else { panic!() };
        assert_abs_diff_eq!(value, 0.0);
        assert_abs_diff_eq!(x[1], 2.0);
    }
}
