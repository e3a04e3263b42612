//! Search over subset-indexed games and the unknown-support solver.
//!
//! The lifted game of order k is indexed by the k-subsets of rows and
//! columns; its (i, j) entry is the minimax value of the base submatrix
//! picked out by the subsets at ranks i and j. Entries are computed on
//! demand from base queries and cached, so the lifted matrix is never
//! materialized. A unique equilibrium with support size k shows up in the
//! lifted game of order k as a unique strict saddle, which the halving
//! search can find; verifying the solved certificate against the base
//! matrix then closes the loop without trusting either search.

use std::collections::HashMap;

use rand::Rng;

use crate::matrix::MatrixInstance;
use crate::minimax::{solve_full_support_equilibrium, solve_value, verify_equilibrium};
use crate::oracle::{OracleHandle, QueryOracle};
use crate::psne::find_psne_with_stats;
use crate::scalar::Scalar;
use crate::strategy::{EquilibriumCertificate, MixedStrategy};
use crate::subsets::{binomial, SubsetCodec};

/// Largest subset count the rank sets are allowed to reach; beyond this
/// the explicit live-set bookkeeping would not fit in memory.
pub const MAX_LIFTED_RANKS: usize = 1_000_000;

pub struct LiftedOracle<'a> {
    base: &'a mut OracleHandle,
    codec: SubsetCodec,
    value_cache: HashMap<(usize, usize), Scalar>,
}

impl<'a> LiftedOracle<'a> {
    pub fn new(base: &'a mut OracleHandle, codec: SubsetCodec) -> Self {
        assert!(
            codec.count() <= MAX_LIFTED_RANKS as u128,
            "lifted rank space too large"
        );
        let n = base.matrix().n_rows();
        assert_eq!(n, base.matrix().n_cols(), "base game must be square");
        assert!(codec.ground_size() == n, "codec ground set must match the matrix");
        LiftedOracle {
            base,
            codec,
            value_cache: HashMap::new(),
        }
    }

    pub fn codec(&self) -> &SubsetCodec {
        &self.codec
    }

    /// Value of the base submatrix at the given subset ranks; queries at
    /// most k^2 new base entries, none on a cache hit.
    pub fn lifted_entry(&mut self, i: usize, j: usize) -> Scalar {
        if let Some(v) = self.value_cache.get(&(i, j)) {
            return v.clone();
        }
        let rows = self.codec.unrank(i as u128);
        let cols = self.codec.unrank(j as u128);
        let k = self.codec.subset_size();
        let mode = self.base.matrix().mode();
        let base = &mut *self.base;
        let sub = MatrixInstance::from_fn(k, k, mode, |r, c| base.query_entry(rows[r], cols[c]));
        let value = solve_value(&sub);
        self.value_cache.insert((i, j), value.clone());
        value
    }
}

impl QueryOracle for LiftedOracle<'_> {
    fn shape(&self) -> (usize, usize) {
        let count = self.codec.count() as usize;
        (count, count)
    }

    fn query(&mut self, i: usize, j: usize) -> Scalar {
        self.lifted_entry(i, j)
    }

    fn base_distinct(&self) -> usize {
        self.base.distinct_query_count()
    }
}

/// Distinct base queries spent per stage of the last search.
#[derive(Clone, Copy, Debug, Default)]
pub struct QueryBreakdown {
    pub probe: usize,
    pub pivot: usize,
    pub verification: usize,
    pub total: usize,
    /// Support size at which the verified certificate was found.
    pub stage_reached: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct NashOptions {
    /// Exact support size, when known: skips the outer loop entirely.
    pub known_support: Option<usize>,
    /// Spend delta/n per stage instead of delta per stage, paying for a
    /// union bound over the outer loop.
    pub split_confidence: bool,
    pub max_ranks: usize,
}

impl Default for NashOptions {
    fn default() -> Self {
        NashOptions {
            known_support: None,
            split_confidence: false,
            max_ranks: MAX_LIFTED_RANKS,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum NashSearchError {
    #[error("no verified equilibrium at any support size up to {0}")]
    Exhausted(usize),
    #[error("support size {k} lifts to {count} subset ranks, over the {limit} limit")]
    TooManySubsets { k: usize, count: u128, limit: usize },
}

/// Finds the unique mixed equilibrium of the base game by searching the
/// lifted games of growing order.
///
/// For each candidate support size s the halving search runs on the
/// lifted game of order s, the winning subset pair is solved as a
/// full-support system, and the embedded strategies are verified against
/// the base matrix. Any failure (singular or off-simplex system, failed
/// verification) advances to s + 1; only a verified certificate returns.
pub fn find_unique_nash<R: Rng>(
    oracle: &mut OracleHandle,
    delta: f64,
    rng: &mut R,
    options: &NashOptions,
) -> Result<(EquilibriumCertificate, QueryBreakdown), NashSearchError> {
    let n = oracle.matrix().n_rows();
    assert_eq!(n, oracle.matrix().n_cols(), "base game must be square");
    let start_count = oracle.distinct_query_count();
    let mut breakdown = QueryBreakdown::default();

    let sizes: Vec<usize> = match options.known_support {
        Some(k) => {
            assert!(k >= 1 && k <= n, "known support size out of range");
            vec![k]
        }
        None => (1..=n).collect(),
    };
    let mut deepest = 0usize;
    for &s in &sizes {
        deepest = s;
        let count = binomial(n as u64, s as u64).expect("subset count overflows");
        if count > options.max_ranks as u128 {
            return Err(NashSearchError::TooManySubsets {
                k: s,
                count,
                limit: options.max_ranks,
            });
        }
        let stage_delta = if options.split_confidence {
            delta / n as f64
        } else {
            delta
        };
        let codec = SubsetCodec::new(n, s);
        let (row_rank, col_rank) = {
            let mut lifted = LiftedOracle::new(oracle, codec);
            let (pair, stats) = find_psne_with_stats(&mut lifted, stage_delta, rng);
            breakdown.probe += stats.probe_queries;
            breakdown.pivot += stats.pivot_queries;
            pair
        };
        let rows = codec.unrank(row_rank as u128);
        let cols = codec.unrank(col_rank as u128);

        // re-reads entries already in the ledger; no fresh queries
        let mode = oracle.matrix().mode();
        let handle = &mut *oracle;
        let sub = MatrixInstance::from_fn(s, s, mode, |r, c| {
            handle.query_entry(rows[r], cols[c])
        });
        let Ok(solved) = solve_full_support_equilibrium(&sub) else {
            continue;
        };
        let x = MixedStrategy::embed(n, &rows, solved.row_strategy.weights());
        let y = MixedStrategy::embed(n, &cols, solved.col_strategy.weights());

        let before_verify = oracle.distinct_query_count();
        let good = verify_equilibrium(oracle, &x, &y);
        breakdown.verification += oracle.distinct_query_count() - before_verify;
        if good {
            breakdown.total = oracle.distinct_query_count() - start_count;
            breakdown.stage_reached = s;
            let certificate = EquilibriumCertificate {
                row_strategy: x,
                col_strategy: y,
                value: solved.value,
                verified: true,
                unique_claimed: true,
            };
            return Ok((certificate, breakdown));
        }
    }
    Err(NashSearchError::Exhausted(deepest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mode;

    #[test]
    fn order_one_lift_is_the_base_game() {
        let m = MatrixInstance::from_ints(&[&[1, 2], &[3, 4]], Mode::Exact);
        let mut base = OracleHandle::new(m);
        let mut lifted = LiftedOracle::new(&mut base, SubsetCodec::new(2, 1));
        for i in 0..2 {
            for j in 0..2 {
                let expected = Scalar::from_int((2 * i + j + 1) as i64, Mode::Exact);
                assert_eq!(lifted.lifted_entry(i, j), expected);
            }
        }
    }

    #[test]
    fn cache_hit_spends_no_base_queries() {
        let m = MatrixInstance::from_ints(&[&[1, 2, 0], &[3, 4, 0], &[0, 0, 9]], Mode::Exact);
        let mut base = OracleHandle::new(m);
        let mut lifted = LiftedOracle::new(&mut base, SubsetCodec::new(3, 2));
        lifted.lifted_entry(0, 0);
        let spent = lifted.base_distinct();
        assert_eq!(spent, 4);
        lifted.lifted_entry(0, 0);
        assert_eq!(lifted.base_distinct(), spent);
    }
}
