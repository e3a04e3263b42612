//! Mixed strategies and equilibrium certificates.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::scalar::{Mode, Scalar, EPS_NUM};

/// A probability vector over row or column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedStrategy {
    weights: Vec<Scalar>,
}

#[derive(Debug, thiserror::Error)]
pub enum StrategyError {
    #[error("empty weight vector")]
    Empty,
    #[error("negative weight at index {0}")]
    Negative(usize),
    #[error("weights sum to {0}, not 1")]
    BadSum(String),
}

impl MixedStrategy {
    /// Validates nonnegativity and unit sum (exactly in exact mode, within
    /// tolerance in float mode).
    pub fn from_weights(weights: Vec<Scalar>) -> Result<Self, StrategyError> {
        if weights.is_empty() {
            return Err(StrategyError::Empty);
        }
        let mode = weights[0].mode();
        let mut sum = Scalar::zero(mode);
        for (i, w) in weights.iter().enumerate() {
            if w.is_negative() {
                return Err(StrategyError::Negative(i));
            }
            sum = &sum + w;
        }
        if sum != Scalar::one(mode) {
            return Err(StrategyError::BadSum(sum.to_string()));
        }
        Ok(MixedStrategy { weights })
    }

    /// Point mass on one index.
    pub fn pure(dimension: usize, index: usize, mode: Mode) -> Self {
        assert!(index < dimension, "index out of bounds");
        let weights = (0..dimension)
            .map(|i| {
                if i == index {
                    Scalar::one(mode)
                } else {
                    Scalar::zero(mode)
                }
            })
            .collect();
        MixedStrategy { weights }
    }

    /// Embeds weights given on `support` positions into a larger dimension,
    /// zero elsewhere. `support` must be sorted and in range.
    pub fn embed(dimension: usize, support: &[usize], weights: &[Scalar]) -> Self {
        assert_eq!(support.len(), weights.len());
        let mode = weights
            .first()
            .map(Scalar::mode)
            .expect("nonempty support");
        let mut full = vec![Scalar::zero(mode); dimension];
        for (pos, w) in support.iter().zip(weights) {
            assert!(*pos < dimension, "support index out of bounds");
            full[*pos] = w.clone();
        }
        MixedStrategy { weights: full }
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn mode(&self) -> Mode {
        self.weights[0].mode()
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Scalar {
        &self.weights[i]
    }

    /// Indices with nonzero weight (above [`EPS_NUM`] in float mode).
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// The single support index of a point mass, if it is one.
    pub fn as_pure(&self) -> Option<usize> {
        let supp = self.support();
        match supp.as_slice() {
            [i] => Some(*i),
            _ => None,
        }
    }

    /// Componentwise equality in mode semantics.
    pub fn same_weights(&self, other: &MixedStrategy) -> bool {
        self.weights.len() == other.weights.len()
            && self.weights.iter().zip(&other.weights).all(|(a, b)| a == b)
    }

    /// Sanity check used before any oracle queries are spent on a
    /// verification: valid simplex vector with nonempty support.
    pub fn is_valid_distribution(&self) -> bool {
        let mode = self.mode();
        let mut sum = Scalar::zero(mode);
        for w in &self.weights {
            if w.is_negative() {
                return false;
            }
            sum = &sum + w;
        }
        sum == Scalar::one(mode) && !self.support().is_empty()
    }
}

/// A strategy pair with its game value and verification evidence.
#[derive(Clone, Debug)]
pub struct EquilibriumCertificate {
    pub row_strategy: MixedStrategy,
    pub col_strategy: MixedStrategy,
    pub value: Scalar,
    /// True iff the best-response conditions were checked on the
    /// certificate's matrix.
    pub verified: bool,
    /// True iff the producer claims this is the unique equilibrium.
    pub unique_claimed: bool,
}

/// JSON document form of a certificate; supports are 1-based.
#[derive(Serialize)]
struct CertificateDoc {
    mode: String,
    value: String,
    row_strategy: Vec<String>,
    col_strategy: Vec<String>,
    row_support: Vec<usize>,
    col_support: Vec<usize>,
    verified: bool,
    unique_claimed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    queries_used: Option<usize>,
}

impl EquilibriumCertificate {
    pub fn mode(&self) -> Mode {
        self.value.mode()
    }

    /// (row, col) if both strategies are point masses.
    pub fn as_pure_pair(&self) -> Option<(usize, usize)> {
        Some((self.row_strategy.as_pure()?, self.col_strategy.as_pure()?))
    }

    /// Strategy-and-value equality: exact in exact mode, within tolerance
    /// in float mode.
    pub fn same_equilibrium(&self, other: &EquilibriumCertificate) -> bool {
        self.value == other.value
            && self.row_strategy.same_weights(&other.row_strategy)
            && self.col_strategy.same_weights(&other.col_strategy)
    }

    pub fn to_json(&self, queries_used: Option<usize>) -> String {
        let one_based = |v: Vec<usize>| v.into_iter().map(|i| i + 1).collect();
        let doc = CertificateDoc {
            mode: self.mode().to_string(),
            value: self.value.to_string(),
            row_strategy: self
                .row_strategy
                .weights()
                .iter()
                .map(Scalar::to_string)
                .collect(),
            col_strategy: self
                .col_strategy
                .weights()
                .iter()
                .map(Scalar::to_string)
                .collect(),
            row_support: one_based(self.row_strategy.support()),
            col_support: one_based(self.col_strategy.support()),
            verified: self.verified,
            unique_claimed: self.unique_claimed,
            queries_used,
        };
        serde_json::to_string_pretty(&doc).expect("certificate serialization")
    }

    /// Stable digest of the equilibrium content (not the query counts).
    pub fn digest(&self) -> String {
        digest_text(&self.to_json(None))
    }
}

/// Hex-truncated SHA-256, the digest format used in trial records.
pub fn digest_text(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let full = hasher.finalize();
    let mut out = String::with_capacity(16);
    for byte in full.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Float-mode support detection treats |w| <= EPS_NUM as zero, so validity
/// checks in both modes share this tolerance.
pub const SUPPORT_EPS: f64 = EPS_NUM;
