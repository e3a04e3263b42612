//! Dense-tableau primal simplex with Bland's rule.
//!
//! Solves `max c'x  s.t.  Ax <= b, x >= 0` starting from the slack basis,
//! so `b` must be componentwise nonnegative. Bland's rule guarantees
//! termination in exact mode; float mode uses the shared numeric tolerance
//! for pivot decisions.

use crate::matrix::MatrixInstance;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub objective: Scalar,
    pub primal: Vec<Scalar>,
    /// One multiplier per constraint, read off the slack reduced costs.
    pub dual: Vec<Scalar>,
}

#[derive(Debug, thiserror::Error)]
pub enum SimplexError {
    #[error("slack basis infeasible: b[{0}] is negative")]
    NegativeRhs(usize),
    #[error("objective unbounded above (entering column {0})")]
    Unbounded(usize),
}

fn is_positive(s: &Scalar) -> bool {
    !s.is_zero() && !s.is_negative()
}

/// Maximizes `c'x` over `Ax <= b, x >= 0`.
pub fn simplex_max(
    a: &MatrixInstance,
    b: &[Scalar],
    c: &[Scalar],
) -> Result<LpSolution, SimplexError> {
    let m = a.n_rows();
    let n = a.n_cols();
    assert_eq!(b.len(), m, "rhs length");
    assert_eq!(c.len(), n, "objective length");
    let mode = a.mode();
    for (i, bi) in b.iter().enumerate() {
        if bi.is_negative() {
            return Err(SimplexError::NegativeRhs(i));
        }
    }

    // Tableau columns: n structural variables then m slacks.
    let total = n + m;
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(m);
    let mut rhs: Vec<Scalar> = b.to_vec();
    for i in 0..m {
        let mut row = Vec::with_capacity(total);
        for j in 0..n {
            row.push(a.get(i, j).clone());
        }
        for k in 0..m {
            row.push(if k == i {
                Scalar::one(mode)
            } else {
                Scalar::zero(mode)
            });
        }
        rows.push(row);
    }
    // reduced[j] = c_j - z_j; entering while any is positive.
    let mut reduced: Vec<Scalar> = c
        .iter()
        .cloned()
        .chain((0..m).map(|_| Scalar::zero(mode)))
        .collect();
    let mut objective = Scalar::zero(mode);
    let mut basis: Vec<usize> = (n..total).collect();

    let cap = 50_000usize.saturating_mul(total.max(1));
    for _ in 0..cap {
        let Some(enter) = (0..total).find(|&j| is_positive(&reduced[j])) else {
            let mut primal = vec![Scalar::zero(mode); n];
            for (r, &var) in basis.iter().enumerate() {
                if var < n {
                    primal[var] = rhs[r].clone();
                }
            }
            let dual = (0..m).map(|k| -&reduced[n + k]).collect();
            return Ok(LpSolution {
                objective,
                primal,
                dual,
            });
        };

        // Ratio test; ties break toward the smallest basis variable index.
        let mut leave: Option<(usize, Scalar)> = None;
        for r in 0..m {
            if !is_positive(&rows[r][enter]) {
                continue;
            }
            let ratio = &rhs[r] / &rows[r][enter];
            let better = match &leave {
                None => true,
                Some((best_r, best)) => match ratio.cmp_raw(best) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Equal => basis[r] < basis[*best_r],
                    std::cmp::Ordering::Greater => false,
                },
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let Some((pivot_row, _)) = leave else {
            return Err(SimplexError::Unbounded(enter));
        };

        let pivot = rows[pivot_row][enter].clone();
        for v in rows[pivot_row].iter_mut() {
            *v = &*v / &pivot;
        }
        rhs[pivot_row] = &rhs[pivot_row] / &pivot;
        for r in 0..m {
            if r == pivot_row || rows[r][enter].is_zero() {
                continue;
            }
            let factor = rows[r][enter].clone();
            for j in 0..total {
                rows[r][j] = &rows[r][j] - &(&factor * &rows[pivot_row][j]);
            }
            rhs[r] = &rhs[r] - &(&factor * &rhs[pivot_row]);
        }
        let factor = reduced[enter].clone();
        for j in 0..total {
            reduced[j] = &reduced[j] - &(&factor * &rows[pivot_row][j]);
        }
        objective = &objective + &(&factor * &rhs[pivot_row]);
        basis[pivot_row] = enter;
    }
    panic!("simplex did not converge within {cap} pivots");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mode;

    fn lp_case(mode: Mode) {
        // max x1 + x2  s.t.  x1 <= 2, x2 <= 3, x1 + x2 <= 4
        let a = MatrixInstance::from_ints(&[&[1, 0], &[0, 1], &[1, 1]], mode);
        let b = vec![
            Scalar::from_int(2, mode),
            Scalar::from_int(3, mode),
            Scalar::from_int(4, mode),
        ];
        let c = vec![Scalar::one(mode), Scalar::one(mode)];
        let sol = simplex_max(&a, &b, &c).unwrap();
        assert_eq!(sol.objective, Scalar::from_int(4, mode));
        // Strong duality: b'y equals the primal objective.
        let mut dual_obj = Scalar::zero(mode);
        for (bi, yi) in b.iter().zip(&sol.dual) {
            assert!(!yi.is_negative());
            dual_obj = &dual_obj + &(bi * yi);
        }
        assert_eq!(dual_obj, Scalar::from_int(4, mode));
    }

    #[test]
    fn bounded_lp_both_modes() {
        lp_case(Mode::Exact);
        lp_case(Mode::Float);
    }

    #[test]
    fn detects_unbounded() {
        // max x1  s.t.  -x1 + x2 <= 1
        let a = MatrixInstance::from_ints(&[&[-1, 1]], Mode::Exact);
        let b = vec![Scalar::one(Mode::Exact)];
        let c = vec![Scalar::one(Mode::Exact), Scalar::zero(Mode::Exact)];
        assert!(matches!(
            simplex_max(&a, &b, &c),
            Err(SimplexError::Unbounded(0))
        ));
    }

    #[test]
    fn rejects_negative_rhs() {
        let a = MatrixInstance::from_ints(&[&[1]], Mode::Exact);
        let b = vec![Scalar::from_int(-1, Mode::Exact)];
        let c = vec![Scalar::one(Mode::Exact)];
        assert!(matches!(
            simplex_max(&a, &b, &c),
            Err(SimplexError::NegativeRhs(0))
        ));
    }
}
