//! Dense simplex for covering/packing LPs.
//!
//! The covering relaxation `min 1'x  s.t. Ax >= 1, x >= 0` is solved
//! through its dual `max 1'y  s.t. A'y <= 1, y >= 0`, which has an
//! immediately feasible slack basis, so no phase-1 is needed. Every
//! simplex iterate is a feasible dual solution, so by weak duality the
//! running objective value is already a valid lower bound on the covering
//! optimum; hitting the iteration cap only costs tightness, never
//! soundness.

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpOutcome {
    /// Feasible dual objective value; equals the LP optimum when `optimal`.
    pub value: f64,
    pub optimal: bool,
}

/// Maximizes `sum(y)` subject to `sum_{c in row} y_c <= 1` per row and
/// `y >= 0`. `rows` lists the column indices of each constraint. Returns
/// `None` when the tableau would be unreasonably large.
pub fn solve_packing_lp(rows: &[Vec<usize>], num_cols: usize) -> Option<LpOutcome> {
    let m = rows.len();
    if m == 0 || num_cols == 0 {
        return Some(LpOutcome { value: 0.0, optimal: true });
    }
    let width = num_cols + m + 1;
    if m.checked_mul(width)? > 40_000_000 {
        return None;
    }

    // tableau[r] = [A' row | slacks | rhs]; obj holds negated reduced costs.
    let mut tableau = vec![vec![0.0f64; width]; m];
    for (r, row) in rows.iter().enumerate() {
        for &c in row {
            debug_assert!(c < num_cols);
            tableau[r][c] = 1.0;
        }
        tableau[r][num_cols + r] = 1.0;
        tableau[r][width - 1] = 1.0;
    }
    let mut obj = vec![0.0f64; width];
    for cell in obj.iter_mut().take(num_cols) {
        *cell = -1.0;
    }
    let mut basis: Vec<usize> = (num_cols..num_cols + m).collect();

    let dantzig_limit = 5 * (m + num_cols) + 50;
    let hard_limit = 50 * (m + num_cols) + 1000;
    for iter in 0..hard_limit {
        // Dantzig's rule first, Bland's rule once degeneracy is likely.
        let entering = if iter < dantzig_limit {
            let mut best = None;
            for (c, &coef) in obj.iter().enumerate().take(width - 1) {
                if coef < -EPS && best.map_or(true, |(bc, _)| coef < bc) {
                    best = Some((coef, c));
                }
            }
            best.map(|(_, c)| c)
        } else {
            obj.iter().take(width - 1).position(|&coef| coef < -EPS)
        };
        let Some(enter) = entering else {
            return Some(LpOutcome { value: obj[width - 1], optimal: true });
        };

        let mut leave: Option<(f64, usize)> = None;
        for r in 0..m {
            let coef = tableau[r][enter];
            if coef > EPS {
                let ratio = tableau[r][width - 1] / coef;
                let better = match leave {
                    None => true,
                    Some((lr, lrow)) => {
                        ratio < lr - EPS || (ratio < lr + EPS && basis[r] < basis[lrow])
                    }
                };
                if better {
                    leave = Some((ratio, r));
                }
            }
        }
        let Some((_, pivot_row)) = leave else {
            // Unbounded cannot happen: every y is capped by some constraint.
            return Some(LpOutcome { value: obj[width - 1], optimal: false });
        };

        let pivot = tableau[pivot_row][enter];
        for cell in tableau[pivot_row].iter_mut() {
            *cell /= pivot;
        }
        for r in 0..m {
            if r != pivot_row {
                let factor = tableau[r][enter];
                if factor.abs() > EPS {
                    for c in 0..width {
                        tableau[r][c] -= factor * tableau[pivot_row][c];
                    }
                }
            }
        }
        let factor = obj[enter];
        if factor.abs() > EPS {
            for c in 0..width {
                obj[c] -= factor * tableau[pivot_row][c];
            }
        }
        basis[pivot_row] = enter;
    }

    Some(LpOutcome { value: obj[width - 1], optimal: false })
}
