//! Dense phase-1 simplex for small feasibility problems `A x = b, x >= 0`.
//!
//! Used for local-polytope membership (16 vertex weights) and convex-hull
//! checks on payoff points. Bland's rule prevents cycling.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Optimal value of the phase-1 objective (sum of artificial variables).
    pub infeasibility: f64,
    /// A nonnegative point minimizing the artificial sum.
    pub solution: Vec<f64>,
}

/// Decide whether `A x = b` has a solution with `x >= 0`, accepting a
/// phase-1 optimum up to `tol`.
pub fn nonnegative_solution(a: &[Vec<f64>], b: &[f64], tol: f64) -> Result<Feasibility> {
    let rows = a.len();
    if rows != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} constraint rows but {} right-hand sides",
            rows,
            b.len()
        )));
    }
    let cols = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch("ragged constraint matrix".into()));
    }

    // Tableau columns: [x_0..x_cols, art_0..art_rows, rhs].
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; rows];
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        for (j, &v) in row.iter().enumerate() {
            t[i][j] = sign * v;
        }
        t[i][cols + i] = 1.0;
        t[i][rhs] = sign * bi;
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // Reduced costs of the phase-1 objective min sum(art).
    let mut cost = vec![0.0; width];
    for row in &t {
        for j in 0..cols {
            cost[j] -= row[j];
        }
        cost[rhs] -= row[rhs];
    }

    let max_iter = 50 * (rows + cols + 1);
    for _ in 0..max_iter {
        let Some(enter) = (0..cols + rows).find(|&j| cost[j] < -PIVOT_EPS) else {
            let mut solution = vec![0.0; cols];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < cols {
                    solution[bv] = t[i][rhs].max(0.0);
                }
            }
            let infeasibility = (-cost[rhs]).max(0.0);
            return Ok(Feasibility {
                feasible: infeasibility <= tol,
                infeasibility,
                solution,
            });
        };

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let col = t[i][enter];
            if col > PIVOT_EPS {
                let ratio = t[i][rhs] / col;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - PIVOT_EPS || ((ratio - lr).abs() <= PIVOT_EPS && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        // Phase 1 is bounded below by zero, so an entering column always has
        // a positive entry unless the tableau has gone numerically bad.
        let Some((pr, _)) = leave else {
            return Err(Error::Solver("unbounded phase-1 direction".into()));
        };

        let p = t[pr][enter];
        for v in t[pr].iter_mut() {
            *v /= p;
        }
        let pivot_row = t[pr].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != pr {
                let f = row[enter];
                if f != 0.0 {
                    for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = cost[enter];
        for (v, &pv) in cost.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        basis[pr] = enter;
    }
    Err(Error::Solver(format!("no convergence after {max_iter} pivots")))
}

/// Is `target` a convex combination of `points`?
pub fn in_convex_hull(points: &[Vec<f64>], target: &[f64], tol: f64) -> Result<Feasibility> {
    let dim = target.len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch("point dimension differs from target".into()));
    }
    let mut a: Vec<Vec<f64>> = (0..dim).map(|k| points.iter().map(|p| p[k]).collect()).collect();
    a.push(vec![1.0; points.len()]);
    let mut b = target.to_vec();
    b.push(1.0);
    nonnegative_solution(&a, &b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_feasible_system() {
        // x + y = 1, x - y = 0.5
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let r = nonnegative_solution(&a, &[1.0, 0.5], 1e-9).unwrap();
        assert!(r.feasible);
        assert!((r.solution[0] - 0.75).abs() < 1e-12);
        assert!((r.solution[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn negative_requirement_is_infeasible() {
        // x + y = -1 has no nonnegative solution.
        let r = nonnegative_solution(&[vec![1.0, 1.0]], &[-1.0], 1e-9).unwrap();
        assert!(!r.feasible);
        assert!((r.infeasibility - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_redundant_rows() {
        let a = vec![vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0], vec![1.0, 0.0, 0.0]];
        let r = nonnegative_solution(&a, &[1.0, 2.0, 0.0], 1e-9).unwrap();
        assert!(r.feasible);
    }

    #[test]
    fn hull_membership() {
        let square = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert!(in_convex_hull(&square, &[0.3, 0.9], 1e-9).unwrap().feasible);
        assert!(!in_convex_hull(&square, &[1.1, 0.5], 1e-9).unwrap().feasible);
    }

    #[test]
    fn shape_errors() {
        assert!(nonnegative_solution(&[vec![1.0]], &[1.0, 2.0], 1e-9).is_err());
        assert!(nonnegative_solution(&[vec![1.0], vec![1.0, 2.0]], &[1.0, 2.0], 1e-9).is_err());
    }
}
