//! Deterministic saddle-point search in at most 3n-2 queries.
//!
//! Phase one walks a shrinking board: it queries the paired "diagonal" of
//! the live submatrix, keeps the extreme entries as candidates, and after
//! each step re-pairs so exactly one queried entry remains per live row
//! and column. Phase two prunes the candidate list and eliminates the
//! rest with one query per step. Both phases only ever discard entries
//! witnessed to be non-saddles, so a strict saddle point always survives.

use std::collections::HashMap;

use crate::oracle::OracleHandle;
use crate::scalar::Scalar;

/// A queried entry still in the running.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub row: usize,
    pub col: usize,
    pub value: Scalar,
}

pub type CandidateSet = Vec<Candidate>;

#[derive(Debug, thiserror::Error)]
pub enum SwordfishError {
    #[error("all saddle candidates were eliminated; no unique pure saddle exists")]
    EmptyCandidates,
}

/// An entry cannot be a strict saddle once some entry in its row is <=
/// some entry in its column: a saddle value must sit strictly above its
/// whole column and strictly below its whole row, and the two witnesses
/// would force value < row_witness <= col_witness < value. One witness may
/// be the candidate itself, but not both.
pub fn is_nullified(
    candidate: (usize, usize),
    row_witness: (usize, usize, &Scalar),
    col_witness: (usize, usize, &Scalar),
) -> bool {
    debug_assert_eq!(row_witness.0, candidate.0, "row witness leaves the row");
    debug_assert_eq!(col_witness.1, candidate.1, "col witness leaves the column");
    debug_assert!(
        (row_witness.0, row_witness.1) != (col_witness.0, col_witness.1),
        "witnesses must be two distinct entries"
    );
    row_witness.2.le_raw(col_witness.2)
}

#[cfg(debug_assertions)]
fn assert_board_pairing(
    oracle: &OracleHandle,
    rows: &[usize],
    cols: &[usize],
) {
    use std::collections::HashSet;
    let live_rows: HashSet<usize> = rows.iter().copied().collect();
    let live_cols: HashSet<usize> = cols.iter().copied().collect();
    let pairing: HashSet<(usize, usize)> = rows.iter().copied().zip(cols.iter().copied()).collect();
    let mut seen = 0usize;
    for &(i, j) in oracle.ledger().sorted_pairs().iter() {
        let (i, j) = (i as usize, j as usize);
        if live_rows.contains(&i) && live_cols.contains(&j) {
            assert!(
                pairing.contains(&(i, j)),
                "stray queried entry ({i},{j}) on the live board"
            );
            seen += 1;
        }
    }
    assert_eq!(seen, rows.len(), "board pairing is not a bijection");
}

/// Shrinking-board sweep. Exactly n diagonal queries plus one query per
/// step; every entry of the matrix ends up either nullified or in the
/// returned candidate set.
pub fn phase_one(oracle: &mut OracleHandle) -> CandidateSet {
    let (n_rows, n_cols) = (oracle.matrix().n_rows(), oracle.matrix().n_cols());
    assert_eq!(n_rows, n_cols, "saddle search needs a square matrix");
    let n = n_rows;

    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut diag: Vec<Scalar> = (0..n).map(|i| oracle.query_entry(i, i)).collect();
    let mut candidates: CandidateSet = Vec::with_capacity(2 * n - 1);

    for _ in 1..n {
        let mut p_min = 0usize;
        let mut p_max = 0usize;
        for p in 1..rows.len() {
            // ties break toward the lowest original row index, which is
            // the iteration order since removals keep `rows` sorted
            if diag[p].lt_raw(&diag[p_min]) {
                p_min = p;
            }
            if diag[p].gt_raw(&diag[p_max]) {
                p_max = p;
            }
        }
        candidates.push(Candidate {
            row: rows[p_min],
            col: cols[p_min],
            value: diag[p_min].clone(),
        });
        if p_max != p_min {
            candidates.push(Candidate {
                row: rows[p_max],
                col: cols[p_max],
                value: diag[p_max].clone(),
            });
        }
        // the crossing entry replaces the two extremes on the board
        let crossing = oracle.query_entry(rows[p_max], cols[p_min]);
        if p_max == p_min {
            rows.remove(p_min);
            cols.remove(p_min);
            diag.remove(p_min);
        } else {
            // min row and max col leave; max row re-pairs with min col
            cols[p_max] = cols[p_min];
            diag[p_max] = crossing;
            rows.remove(p_min);
            cols.remove(p_min);
            diag.remove(p_min);
        }
        #[cfg(debug_assertions)]
        assert_board_pairing(oracle, &rows, &cols);
    }

    candidates.push(Candidate {
        row: rows[0],
        col: cols[0],
        value: diag[0].clone(),
    });
    candidates
}

/// Keeps at most one candidate per row (its unique least entry) and then
/// per column (its unique highest); tied extremes nullify each other and
/// drop out entirely.
fn prune_candidates(candidates: CandidateSet) -> CandidateSet {
    let keep_extreme = |group: Vec<Candidate>, want_least: bool| -> Option<Candidate> {
        let mut extreme = 0usize;
        for idx in 1..group.len() {
            let better = if want_least {
                group[idx].value.lt_raw(&group[extreme].value)
            } else {
                group[idx].value.gt_raw(&group[extreme].value)
            };
            if better {
                extreme = idx;
            }
        }
        let ties = group
            .iter()
            .filter(|c| c.value == group[extreme].value)
            .count();
        (ties == 1).then(|| group[extreme].clone())
    };
    let group_by = |cands: CandidateSet, key: fn(&Candidate) -> usize| -> Vec<Vec<Candidate>> {
        let mut groups: HashMap<usize, Vec<Candidate>> = HashMap::new();
        for c in cands {
            groups.entry(key(&c)).or_default().push(c);
        }
        let mut out: Vec<Vec<Candidate>> = groups.into_values().collect();
        out.sort_by_key(|g| (key(&g[0]), g[0].row, g[0].col));
        out
    };

    let row_survivors: CandidateSet = group_by(candidates, |c| c.row)
        .into_iter()
        .filter_map(|g| keep_extreme(g, true))
        .collect();
    group_by(row_survivors, |c| c.col)
        .into_iter()
        .filter_map(|g| keep_extreme(g, false))
        .collect()
}

/// Candidate elimination: sorts the pruned candidates onto a virtual
/// diagonal and compares the current keeper against each challenger with
/// a single crossing query, discarding every entry the query nullifies.
pub fn phase_two(
    oracle: &mut OracleHandle,
    candidates: CandidateSet,
) -> Result<(usize, usize), SwordfishError> {
    let mut survivors = prune_candidates(candidates);
    survivors.sort_by(|a, b| {
        a.value
            .cmp_raw(&b.value)
            .then(a.row.cmp(&b.row))
            .then(a.col.cmp(&b.col))
    });
    let m = survivors.len();
    if m == 0 {
        return Err(SwordfishError::EmptyCandidates);
    }

    // keeper index, then challengers in ascending value order
    let mut keep = 0usize;
    let mut next = 1usize;
    while next < m {
        let crossing = oracle.query_entry(survivors[next].row, survivors[keep].col);
        let keep_value = &survivors[keep].value;
        let next_value = &survivors[next].value;
        if crossing.lt_raw(keep_value) && crossing.le_raw(next_value) {
            // challenger's own row undercuts it
            next += 1;
        } else if crossing.ge_raw(keep_value) && crossing.gt_raw(next_value) {
            // keeper's column tops it; challenger takes over
            keep = next;
            next += 1;
        } else {
            // sorted order leaves only the mutual case
            debug_assert!(crossing.ge_raw(keep_value) && crossing.le_raw(next_value));
            keep = next + 1;
            next += 2;
        }
    }
    if keep >= m {
        return Err(SwordfishError::EmptyCandidates);
    }
    Ok((survivors[keep].row, survivors[keep].col))
}

/// Full deterministic search; at most 3n-2 distinct queries.
pub fn swordfish(oracle: &mut OracleHandle) -> Result<(usize, usize), SwordfishError> {
    let candidates = phase_one(oracle);
    phase_two(oracle, candidates)
}
