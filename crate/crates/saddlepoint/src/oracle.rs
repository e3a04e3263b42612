//! The query-counting oracle every solver reads payoffs through.
//!
//! The ledger stores distinct (row, col) coordinates; re-querying a pair
//! never increments the count. Query complexity throughout this crate
//! means the ledger's distinct count.

use std::collections::HashSet;

use crate::matrix::MatrixInstance;
use crate::scalar::Scalar;

/// Set of distinct entry coordinates queried so far.
#[derive(Clone, Debug, Default)]
pub struct QueryLedger {
    queried: HashSet<(u32, u32)>,
}

impl QueryLedger {
    pub fn new() -> Self {
        QueryLedger::default()
    }

    /// Records a query; returns true iff the pair was new.
    pub fn record(&mut self, i: usize, j: usize) -> bool {
        self.queried.insert((i as u32, j as u32))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.queried.contains(&(i as u32, j as u32))
    }

    pub fn distinct_count(&self) -> usize {
        self.queried.len()
    }

    pub fn clear(&mut self) {
        self.queried.clear();
    }

    /// Sorted coordinate pairs, for ledger-equality comparisons.
    pub fn sorted_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .queried
            .iter()
            .map(|&(i, j)| (i as usize, j as usize))
            .collect();
        pairs.sort_unstable();
        pairs
    }
}

/// A matrix hidden behind the query interface.
#[derive(Clone, Debug)]
pub struct OracleHandle {
    matrix: MatrixInstance,
    ledger: QueryLedger,
}

impl OracleHandle {
    pub fn new(matrix: MatrixInstance) -> Self {
        OracleHandle {
            matrix,
            ledger: QueryLedger::new(),
        }
    }

    /// Reads one entry, recording it in the ledger. Out-of-bounds indices
    /// panic (usage error).
    pub fn query_entry(&mut self, i: usize, j: usize) -> Scalar {
        let value = self.matrix.get(i, j).clone();
        self.ledger.record(i, j);
        value
    }

    pub fn distinct_query_count(&self) -> usize {
        self.ledger.distinct_count()
    }

    pub fn reset_ledger(&mut self) {
        self.ledger.clear();
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    /// Direct matrix access for audits and tests; bypasses the ledger.
    pub fn matrix(&self) -> &MatrixInstance {
        &self.matrix
    }

    pub fn into_matrix(self) -> MatrixInstance {
        self.matrix
    }
}

/// Anything a search algorithm can query entries from: a plain oracle, or
/// the lifted view over subset ranks.
pub trait QueryOracle {
    /// (rows, cols) of the (possibly virtual) matrix.
    fn shape(&self) -> (usize, usize);

    fn query(&mut self, i: usize, j: usize) -> Scalar;

    /// Distinct count of the authoritative underlying ledger.
    fn base_distinct(&self) -> usize;
}

impl QueryOracle for OracleHandle {
    fn shape(&self) -> (usize, usize) {
        (self.matrix.n_rows(), self.matrix.n_cols())
    }

    fn query(&mut self, i: usize, j: usize) -> Scalar {
        self.query_entry(i, j)
    }

    fn base_distinct(&self) -> usize {
        self.distinct_query_count()
    }
}
