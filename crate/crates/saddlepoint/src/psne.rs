//! Randomized halving search for a unique pure saddle point.
//!
//! Each round probes a random row and column sample, picks a pivot row and
//! column from the probe payoffs, then keeps the better half of the live
//! rows (by pivot-column value) and the worse half of the live columns (by
//! pivot-row value). The live sets halve every round, so the search ends
//! within log2(n)+1 rounds and spends O(n log(n/delta)) distinct queries.

use std::collections::BTreeSet;

use rand::Rng;

use crate::oracle::QueryOracle;
use crate::scalar::Scalar;

/// Probe length: ceil(2 log2(2 n_total^2 / delta)). `n_total` is the full
/// dimension of the square game, not the current live-set size.
pub fn probe_len(n_total: u128, delta: f64) -> usize {
    assert!(delta > 0.0 && delta < 1.0, "delta must be in (0,1)");
    assert!(n_total >= 1);
    let n = n_total as f64;
    (2.0 * (2.0 * n * n / delta).log2()).ceil() as usize
}

/// `count` independent uniform draws from `pool`, with replacement.
/// Duplicates are retained; callers deduplicate before querying.
pub fn sample_probe_set<R: Rng>(pool: &[usize], count: usize, rng: &mut R) -> Vec<usize> {
    assert!(!pool.is_empty(), "probe pool must be nonempty");
    assert!(count >= 1, "probe length must be at least 1");
    (0..count)
        .map(|_| pool[rng.gen_range(0..pool.len())])
        .collect()
}

/// Per-run query accounting, in distinct base entries.
#[derive(Clone, Copy, Debug, Default)]
pub struct PsneStats {
    pub probe_queries: usize,
    pub pivot_queries: usize,
    pub iterations: usize,
}

pub fn find_psne<O, R>(oracle: &mut O, delta: f64, rng: &mut R) -> (usize, usize)
where
    O: QueryOracle + ?Sized,
    R: Rng,
{
    find_psne_with_stats(oracle, delta, rng).0
}

/// Runs the halving search to a single surviving (row, col) pair.
///
/// The result is the unique strict saddle point with probability at least
/// 1 - delta when one exists; on other inputs the pair carries no
/// guarantee and the caller must verify it.
pub fn find_psne_with_stats<O, R>(
    oracle: &mut O,
    delta: f64,
    rng: &mut R,
) -> ((usize, usize), PsneStats)
where
    O: QueryOracle + ?Sized,
    R: Rng,
{
    let (n_rows, n_cols) = oracle.shape();
    assert_eq!(n_rows, n_cols, "halving search needs a square game");
    let probe = probe_len(n_rows as u128, delta);

    let mut live_rows: Vec<usize> = (0..n_rows).collect();
    let mut live_cols: Vec<usize> = (0..n_cols).collect();
    let mut stats = PsneStats::default();

    while live_rows.len() > 1 {
        let half = live_rows.len() / 2;
        // Sampled probes, or the whole pool when that is no larger; the
        // whole-pool path draws nothing so the rng stream stays aligned
        // with the set sizes alone.
        let probe_rows: Vec<usize> = if probe >= live_rows.len() {
            live_rows.clone()
        } else {
            sample_probe_set(&live_rows, probe, rng)
        };
        let probe_cols: Vec<usize> = if probe >= live_cols.len() {
            live_cols.clone()
        } else {
            sample_probe_set(&live_cols, probe, rng)
        };
        let probe_rows: BTreeSet<usize> = probe_rows.into_iter().collect();
        let probe_cols: BTreeSet<usize> = probe_cols.into_iter().collect();

        let before = oracle.base_distinct();
        // pivot row: best worst-case payoff against the probed columns
        let mut pivot_row: Option<(usize, Scalar)> = None;
        for &i in &live_rows {
            let mut worst: Option<Scalar> = None;
            for &j in &probe_cols {
                let v = oracle.query(i, j);
                if worst.as_ref().is_none_or(|w| v.lt_raw(w)) {
                    worst = Some(v);
                }
            }
            let worst = worst.expect("probe set nonempty");
            if pivot_row.as_ref().is_none_or(|(_, best)| worst.gt_raw(best)) {
                pivot_row = Some((i, worst));
            }
        }
        // pivot column: best worst-case payoff against the probed rows
        let mut pivot_col: Option<(usize, Scalar)> = None;
        for &j in &live_cols {
            let mut worst: Option<Scalar> = None;
            for &i in &probe_rows {
                let v = oracle.query(i, j);
                if worst.as_ref().is_none_or(|w| v.gt_raw(w)) {
                    worst = Some(v);
                }
            }
            let worst = worst.expect("probe set nonempty");
            if pivot_col.as_ref().is_none_or(|(_, best)| worst.lt_raw(best)) {
                pivot_col = Some((j, worst));
            }
        }
        let (pivot_row, _) = pivot_row.expect("live rows nonempty");
        let (pivot_col, _) = pivot_col.expect("live cols nonempty");
        let after_probe = oracle.base_distinct();

        let mut col_values: Vec<(usize, Scalar)> = live_rows
            .iter()
            .map(|&i| (i, oracle.query(i, pivot_col)))
            .collect();
        let mut row_values: Vec<(usize, Scalar)> = live_cols
            .iter()
            .map(|&j| (j, oracle.query(pivot_row, j)))
            .collect();
        let after_pivot = oracle.base_distinct();
        stats.probe_queries += after_probe - before;
        stats.pivot_queries += after_pivot - after_probe;

        // keep the rows that look strongest in the pivot column
        col_values.sort_by(|(ia, va), (ib, vb)| vb.cmp_raw(va).then(ia.cmp(ib)));
        live_rows = col_values.into_iter().take(half).map(|(i, _)| i).collect();
        live_rows.sort_unstable();
        // and the columns that look weakest for us in the pivot row
        row_values.sort_by(|(ja, va), (jb, vb)| va.cmp_raw(vb).then(ja.cmp(jb)));
        live_cols = row_values.into_iter().take(half).map(|(j, _)| j).collect();
        live_cols.sort_unstable();
        stats.iterations += 1;
    }

    ((live_rows[0], live_cols[0]), stats)
}
