//! Game values, support solving, verification, and brute-force search.

use std::cmp::Ordering;

use crate::matrix::MatrixInstance;
use crate::oracle::QueryOracle;
use crate::scalar::Scalar;
use crate::simplex::simplex_max;
use crate::strategy::{EquilibriumCertificate, MixedStrategy};

#[derive(Debug, thiserror::Error)]
pub enum SupportSolveError {
    #[error("support system has no unique solution")]
    SingularSystem,
    #[error("support system solution has a negative weight")]
    NegativeWeight,
}

#[derive(Debug, thiserror::Error)]
pub enum BruteError {
    #[error("matrix has more than one Nash equilibrium")]
    NotUnique,
    #[error("no support pair passed the equilibrium conditions")]
    NoneFound,
}

/// Minimax value of a fully known matrix.
pub fn solve_value(m: &MatrixInstance) -> Scalar {
    solve_value_and_strategies(m).0
}

/// Value plus one optimal strategy per player, via the standard LP.
///
/// The matrix is shifted so every entry is >= 1, which bounds the column
/// player's program `max 1'u  s.t.  M'u <= 1, u >= 0` and makes its
/// objective equal 1/V'. The row strategy is read off the dual.
pub fn solve_value_and_strategies(m: &MatrixInstance) -> (Scalar, MixedStrategy, MixedStrategy) {
    let mode = m.mode();
    let one = Scalar::one(mode);
    let shift = &one - &m.min_entry();
    let shifted = MatrixInstance::from_fn(m.n_rows(), m.n_cols(), mode, |i, j| {
        m.get(i, j) + &shift
    });
    let b = vec![one.clone(); m.n_rows()];
    let c = vec![one.clone(); m.n_cols()];
    let sol = simplex_max(&shifted, &b, &c).expect("shifted game LP is feasible and bounded");
    // objective = 1/V' > 0 because every shifted entry is >= 1
    let value_shifted = &one / &sol.objective;
    let value = &value_shifted - &shift;
    let col_weights: Vec<Scalar> = sol.primal.iter().map(|u| u * &value_shifted).collect();
    let row_weights: Vec<Scalar> = sol.dual.iter().map(|w| w * &value_shifted).collect();
    let x = MixedStrategy::from_weights(row_weights).expect("dual strategy leaves the simplex");
    let y = MixedStrategy::from_weights(col_weights).expect("primal strategy leaves the simplex");
    (value, x, y)
}

/// Gauss-Jordan solve with magnitude pivoting; `None` when singular.
fn solve_linear(mut a: Vec<Vec<Scalar>>, mut b: Vec<Scalar>) -> Option<Vec<Scalar>> {
    let n = a.len();
    for col in 0..n {
        let mut pivot_row: Option<usize> = None;
        let mut pivot_mag: Option<Scalar> = None;
        for r in col..n {
            if a[r][col].is_zero() {
                continue;
            }
            let mag = a[r][col].abs();
            let better = match &pivot_mag {
                None => true,
                Some(best) => mag.cmp_raw(best) == Ordering::Greater,
            };
            if better {
                pivot_row = Some(r);
                pivot_mag = Some(mag);
            }
        }
        let pr = pivot_row?;
        a.swap(col, pr);
        b.swap(col, pr);
        let pivot = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..n {
                a[r][c] = &a[r][c] - &(&factor * &a[col][c]);
            }
            b[r] = &b[r] - &(&factor * &b[col]);
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Treats the whole square matrix as the support and solves
/// `My = v1, M'x = v1, 1'x = 1'y = 1` by two augmented linear systems.
pub fn solve_full_support_equilibrium(
    m: &MatrixInstance,
) -> Result<EquilibriumCertificate, SupportSolveError> {
    assert_eq!(m.n_rows(), m.n_cols(), "support submatrix must be square");
    let k = m.n_rows();
    let mode = m.mode();
    let one = Scalar::one(mode);
    let zero = Scalar::zero(mode);

    // Unknowns (y_1..y_k, v): rows `M y - v = 0`, last row `1'y = 1`.
    let build = |entry: &dyn Fn(usize, usize) -> Scalar| -> (Vec<Vec<Scalar>>, Vec<Scalar>) {
        let mut a = Vec::with_capacity(k + 1);
        for i in 0..k {
            let mut row: Vec<Scalar> = (0..k).map(|j| entry(i, j)).collect();
            row.push(-&one);
            a.push(row);
        }
        let mut last = vec![one.clone(); k];
        last.push(zero.clone());
        a.push(last);
        let mut rhs = vec![zero.clone(); k];
        rhs.push(one.clone());
        (a, rhs)
    };

    let (ay, by) = build(&|i, j| m.get(i, j).clone());
    let mut y_sol = solve_linear(ay, by).ok_or(SupportSolveError::SingularSystem)?;
    let (ax, bx) = build(&|i, j| m.get(j, i).clone());
    let mut x_sol = solve_linear(ax, bx).ok_or(SupportSolveError::SingularSystem)?;

    let v_y = y_sol.pop().expect("system dimension");
    let v_x = x_sol.pop().expect("system dimension");
    if v_x != v_y {
        return Err(SupportSolveError::SingularSystem);
    }
    if x_sol.iter().chain(&y_sol).any(Scalar::is_negative) {
        return Err(SupportSolveError::NegativeWeight);
    }
    let x = MixedStrategy::from_weights(x_sol).map_err(|_| SupportSolveError::SingularSystem)?;
    let y = MixedStrategy::from_weights(y_sol).map_err(|_| SupportSolveError::SingularSystem)?;
    Ok(EquilibriumCertificate {
        row_strategy: x,
        col_strategy: y,
        value: v_y,
        verified: false,
        unique_claimed: false,
    })
}

/// Best-response payoffs of every row against `y` (and symmetrically for
/// columns) on a fully known matrix.
fn full_matrix_payoffs(
    m: &MatrixInstance,
    x: &MixedStrategy,
    y: &MixedStrategy,
) -> (Vec<Scalar>, Vec<Scalar>, Scalar) {
    let mode = m.mode();
    let row_payoffs: Vec<Scalar> = (0..m.n_rows())
        .map(|i| {
            let mut acc = Scalar::zero(mode);
            for j in y.support() {
                acc = &acc + &(m.get(i, j) * y.weight(j));
            }
            acc
        })
        .collect();
    let col_payoffs: Vec<Scalar> = (0..m.n_cols())
        .map(|j| {
            let mut acc = Scalar::zero(mode);
            for i in x.support() {
                acc = &acc + &(m.get(i, j) * x.weight(i));
            }
            acc
        })
        .collect();
    let mut v = Scalar::zero(mode);
    for i in x.support() {
        v = &v + &(x.weight(i) * &row_payoffs[i]);
    }
    (row_payoffs, col_payoffs, v)
}

/// Equilibrium test on a fully known matrix: no row beats `v` against `y`
/// and no column undercuts `v` against `x`.
pub fn is_equilibrium(m: &MatrixInstance, x: &MixedStrategy, y: &MixedStrategy) -> bool {
    let (rows, cols, v) = full_matrix_payoffs(m, x, y);
    rows.iter().all(|r| r.le_tol(&v)) && cols.iter().all(|c| c.ge_tol(&v))
}

/// Queries the rows of supp(x) and columns of supp(y) in full, then checks
/// the best-response conditions. At most `2ns` distinct queries for
/// `s = max(|supp x|, |supp y|)`.
///
/// Degenerate strategies (empty support, weights off the simplex) are a
/// usage error and panic before any query is spent.
pub fn verify_equilibrium<O: QueryOracle + ?Sized>(
    oracle: &mut O,
    x: &MixedStrategy,
    y: &MixedStrategy,
) -> bool {
    let (n_rows, n_cols) = oracle.shape();
    assert_eq!(x.dimension(), n_rows, "row strategy dimension");
    assert_eq!(y.dimension(), n_cols, "col strategy dimension");
    assert!(x.is_valid_distribution(), "row strategy is degenerate");
    assert!(y.is_valid_distribution(), "col strategy is degenerate");

    let supp_x = x.support();
    let supp_y = y.support();
    let before = oracle.base_distinct();
    let mode = x.mode();

    let mut row_slices: Vec<Vec<Scalar>> = Vec::with_capacity(supp_x.len());
    for &i in &supp_x {
        row_slices.push((0..n_cols).map(|j| oracle.query(i, j)).collect());
    }
    let mut col_slices: Vec<Vec<Scalar>> = Vec::with_capacity(supp_y.len());
    for &j in &supp_y {
        col_slices.push((0..n_rows).map(|i| oracle.query(i, j)).collect());
    }

    // row i's payoff against y; the support columns were queried in full
    let row_payoff = |i: usize| -> Scalar {
        let mut acc = Scalar::zero(mode);
        for (slot, &j) in supp_y.iter().enumerate() {
            acc = &acc + &(&col_slices[slot][i] * y.weight(j));
        }
        acc
    };
    let col_payoff = |j: usize| -> Scalar {
        let mut acc = Scalar::zero(mode);
        for (slot, &i) in supp_x.iter().enumerate() {
            acc = &acc + &(&row_slices[slot][j] * x.weight(i));
        }
        acc
    };

    let mut v = Scalar::zero(mode);
    for &i in &supp_x {
        v = &v + &(x.weight(i) * &row_payoff(i));
    }

    let spent = oracle.base_distinct() - before;
    let s = supp_x.len().max(supp_y.len());
    debug_assert!(
        spent <= 2 * n_rows.max(n_cols) * s,
        "verification query budget exceeded: {spent} > 2*{}*{s}",
        n_rows.max(n_cols)
    );

    (0..n_rows).all(|i| row_payoff(i).le_tol(&v)) && (0..n_cols).all(|j| col_payoff(j).ge_tol(&v))
}

/// Strict saddle test: entry (i, j) is strictly largest in its column and
/// strictly smallest in its row. Raw comparisons, no tolerance.
pub fn check_unique_psne_condition(m: &MatrixInstance, i: usize, j: usize) -> bool {
    let pivot = m.get(i, j);
    (0..m.n_rows()).all(|r| r == i || m.get(r, j).lt_raw(pivot))
        && (0..m.n_cols()).all(|c| c == j || pivot.lt_raw(m.get(i, c)))
}

/// Lexicographic successor of a size-`k` index combination drawn from
/// `0..n`; false once the last combination has been visited.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - (k - i) {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Support enumeration over equal-size support pairs in increasing size,
/// lexicographic within a size. Solves each pair's linear system and keeps
/// pairs passing the full-matrix equilibrium conditions.
///
/// With `audit` false the scan stops after completing the first size class
/// that produced a hit; with `audit` true every class is scanned, which is
/// the mode that can prove uniqueness or refute it across classes.
pub fn brute_force_unique_nash(
    m: &MatrixInstance,
    audit: bool,
) -> Result<EquilibriumCertificate, BruteError> {
    let max_size = m.n_rows().min(m.n_cols());
    let mut found: Vec<EquilibriumCertificate> = Vec::new();

    for size in 1..=max_size {
        let mut rows: Vec<usize> = (0..size).collect();
        loop {
            let mut cols: Vec<usize> = (0..size).collect();
            loop {
                if let Ok(cert) = solve_full_support_equilibrium(&m.submatrix(&rows, &cols)) {
                    let x = MixedStrategy::embed(m.n_rows(), &rows, cert.row_strategy.weights());
                    let y = MixedStrategy::embed(m.n_cols(), &cols, cert.col_strategy.weights());
                    if is_equilibrium(m, &x, &y) {
                        let duplicate = found.iter().any(|c| {
                            c.row_strategy.same_weights(&x) && c.col_strategy.same_weights(&y)
                        });
                        if !duplicate {
                            found.push(EquilibriumCertificate {
                                row_strategy: x,
                                col_strategy: y,
                                value: cert.value,
                                verified: true,
                                unique_claimed: true,
                            });
                        }
                    }
                }
                if !next_combination(&mut cols, m.n_cols()) {
                    break;
                }
            }
            if !next_combination(&mut rows, m.n_rows()) {
                break;
            }
        }
        if found.len() > 1 {
            return Err(BruteError::NotUnique);
        }
        if !found.is_empty() && !audit {
            break;
        }
    }

    match found.len() {
        0 => Err(BruteError::NoneFound),
        1 => Ok(found.pop().expect("len checked")),
        _ => Err(BruteError::NotUnique),
    }
}
