//! Query-efficient algorithms for the exact (unique) Nash equilibrium of
//! two-player zero-sum matrix games.
//!
//! Everything that reads a payoff goes through an [`oracle::OracleHandle`],
//! which counts distinct entries queried. The solvers are:
//!
//! - [`psne::find_psne`]: randomized halving search for a unique pure
//!   equilibrium, O(n log(n/delta)) distinct queries.
//! - [`swordfish::swordfish`]: deterministic two-phase search for a unique
//!   pure equilibrium, at most 3n-2 distinct queries.
//! - [`lifted::find_unique_nash`]: exact mixed equilibrium via the lifted
//!   game over k-subsets, with certificate verification.
//!
//! Brute-force support enumeration ([`minimax::brute_force_unique_nash`])
//! serves as the ground-truth oracle at small sizes. Indices are 0-based
//! throughout the library; the file format and CLI are 1-based.

pub mod instances;
pub mod lifted;
pub mod matrix;
pub mod minimax;
pub mod oracle;
pub mod psne;
pub mod scalar;
pub mod simplex;
pub mod strategy;
pub mod subsets;
pub mod swordfish;
pub mod trials;

pub use matrix::MatrixInstance;
pub use oracle::{OracleHandle, QueryLedger, QueryOracle};
pub use scalar::{Mode, Scalar};
pub use strategy::{EquilibriumCertificate, MixedStrategy};
