//! Seeded trial batches: generate, solve, account, aggregate.
//!
//! One seed drives one trial end to end: the generator consumes the seed's
//! rng stream first and the solver continues on the same stream, so a
//! (spec, seed) pair pins the whole run. Batches fan seeds out across a
//! worker pool when the `parallel` feature is on; results are collected in
//! seed order either way, so scheduling never shows in the output.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::instances::{
    gen_gap_instance, gen_identity_perturbed, gen_planted_psne, gen_planted_support,
    gen_random_unique, gen_thm1_lower, GroundTruth,
};
use crate::lifted::{find_unique_nash, NashOptions};
use crate::matrix::MatrixInstance;
use crate::minimax::{brute_force_unique_nash, check_unique_psne_condition};
use crate::oracle::OracleHandle;
use crate::psne::find_psne;
use crate::scalar::{Mode, Scalar};
use crate::strategy::{digest_text, EquilibriumCertificate};
use crate::swordfish::swordfish;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Psne,
    Swordfish,
    Nash,
    Brute,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algo::Psne => "psne",
            Algo::Swordfish => "swordfish",
            Algo::Nash => "nash",
            Algo::Brute => "brute",
        })
    }
}

impl std::str::FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "psne" => Ok(Algo::Psne),
            "swordfish" => Ok(Algo::Swordfish),
            "nash" => Ok(Algo::Nash),
            "brute" => Ok(Algo::Brute),
            other => Err(format!("unknown algorithm '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    RandomUnique,
    PlantedPsne,
    Thm1Lower,
    IdentityPerturbed,
    Gap,
    PlantedSupport,
}

impl Family {
    /// Whether trials of this family need the --k parameter.
    pub fn needs_k(self) -> bool {
        matches!(self, Family::Thm1Lower | Family::PlantedSupport)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::RandomUnique => "random_unique",
            Family::PlantedPsne => "planted_psne",
            Family::Thm1Lower => "thm1_lower",
            Family::IdentityPerturbed => "identity_perturbed",
            Family::Gap => "gap",
            Family::PlantedSupport => "planted_support",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random_unique" => Ok(Family::RandomUnique),
            "planted_psne" => Ok(Family::PlantedPsne),
            "thm1_lower" => Ok(Family::Thm1Lower),
            "identity_perturbed" => Ok(Family::IdentityPerturbed),
            "gap" => Ok(Family::Gap),
            "planted_support" => Ok(Family::PlantedSupport),
            other => Err(format!("unknown family '{other}'")),
        }
    }
}

/// Everything that defines a trial except its seed.
#[derive(Clone, Copy, Debug)]
pub struct TrialSpec {
    pub family: Family,
    pub n: usize,
    pub k: Option<usize>,
    pub algo: Algo,
    pub delta: f64,
    pub mode: Mode,
}

/// One row of a batch. The digest fingerprints the produced answer but
/// stays out of the CSV schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub family: String,
    pub n: usize,
    pub k: Option<usize>,
    pub seed: u64,
    pub algo: String,
    pub success: bool,
    pub queries: usize,
    pub micros: u128,
    #[serde(skip)]
    pub digest: String,
}

/// Instantiates the family, drawing any free positions from the rng
/// before the matrix entries. The gap family draws nothing.
pub fn generate_instance<R: Rng>(
    spec: &TrialSpec,
    rng: &mut R,
) -> (MatrixInstance, GroundTruth) {
    let n = spec.n;
    let mode = spec.mode;
    match spec.family {
        Family::RandomUnique => (gen_random_unique(n, rng, mode), GroundTruth::none()),
        Family::PlantedPsne => {
            let star_row = rng.gen_range(0..n);
            let star_col = rng.gen_range(0..n);
            gen_planted_psne(n, star_row, star_col, rng, mode)
        }
        Family::Thm1Lower => {
            let k = spec.k.expect("family needs --k");
            let spike_row = rng.gen_range(k..n);
            let spike_col = rng.gen_range(0..k);
            gen_thm1_lower(n, k, spike_row, spike_col, mode)
        }
        Family::IdentityPerturbed => {
            let bump_row = rng.gen_range(0..n);
            let bump_col = rng.gen_range(0..n);
            gen_identity_perturbed(n, bump_row, bump_col, mode)
        }
        Family::Gap => gen_gap_instance(n, &Scalar::from_ratio(1, 4, mode), mode),
        Family::PlantedSupport => {
            let k = spec.k.expect("family needs --k");
            gen_planted_support(n, k, rng, mode)
        }
    }
}

fn saddle_outcome(
    oracle: &OracleHandle,
    truth: &GroundTruth,
    pair: (usize, usize),
) -> (bool, String) {
    let success = match truth.psne() {
        Some(expected) => expected == pair,
        // no planted answer: grade against the instance itself
        None => check_unique_psne_condition(oracle.matrix(), pair.0, pair.1),
    };
    (success, digest_text(&format!("({},{})", pair.0 + 1, pair.1 + 1)))
}

fn certificate_outcome(truth: &GroundTruth, cert: &EquilibriumCertificate) -> (bool, String) {
    let success = match &truth.certificate {
        Some(expected) => cert.same_equilibrium(expected),
        None => cert.verified,
    };
    (success, cert.digest())
}

/// The repo-wide seeding convention: one independent ChaCha8 stream per
/// seed, used for instance generation and the solver draws that follow.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Runs one seeded trial on a fresh oracle and ledger.
pub fn run_trial(spec: &TrialSpec, seed: u64) -> TrialRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (matrix, truth) = generate_instance(spec, &mut rng);
    let mut oracle = OracleHandle::new(matrix);

    let started = Instant::now();
    let (success, digest) = match spec.algo {
        Algo::Psne => {
            let pair = find_psne(&mut oracle, spec.delta, &mut rng);
            saddle_outcome(&oracle, &truth, pair)
        }
        Algo::Swordfish => match swordfish(&mut oracle) {
            Ok(pair) => saddle_outcome(&oracle, &truth, pair),
            Err(_) => (false, digest_text("eliminated")),
        },
        Algo::Nash => {
            let options = NashOptions {
                known_support: spec.k,
                ..NashOptions::default()
            };
            match find_unique_nash(&mut oracle, spec.delta, &mut rng, &options) {
                Ok((cert, _)) => certificate_outcome(&truth, &cert),
                Err(_) => (false, digest_text("exhausted")),
            }
        }
        Algo::Brute => {
            // full knowledge: charge the whole matrix to the ledger
            for i in 0..spec.n {
                for j in 0..spec.n {
                    oracle.query_entry(i, j);
                }
            }
            match brute_force_unique_nash(oracle.matrix(), false) {
                Ok(cert) => certificate_outcome(&truth, &cert),
                Err(_) => (false, digest_text("not-unique")),
            }
        }
    };
    let micros = started.elapsed().as_micros();

    TrialRecord {
        family: spec.family.to_string(),
        n: spec.n,
        k: spec.k,
        seed,
        algo: spec.algo.to_string(),
        success,
        queries: oracle.distinct_query_count(),
        micros,
        digest,
    }
}

/// Seeds `seed0..seed0+trials`, one trial each, in seed order.
pub fn run_batch_sequential(spec: &TrialSpec, seed0: u64, trials: usize) -> Vec<TrialRecord> {
    (0..trials as u64)
        .map(|t| run_trial(spec, seed0 + t))
        .collect()
}

/// Like [`run_batch_sequential`] but fanned across the rayon pool; the
/// collected order is still by seed.
#[cfg(feature = "parallel")]
pub fn run_batch(spec: &TrialSpec, seed0: u64, trials: usize) -> Vec<TrialRecord> {
    use rayon::prelude::*;
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(spec, seed0 + t))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_batch(spec: &TrialSpec, seed0: u64, trials: usize) -> Vec<TrialRecord> {
    run_batch_sequential(spec, seed0, trials)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Lower median: element at floor((len-1)/2) of the sorted values.
pub fn lower_median(values: &[usize]) -> usize {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted[(sorted.len() - 1) / 2]
}

/// 95th percentile by the nearest-rank rule.
pub fn p95(values: &[usize]) -> usize {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let rank = (0.95 * sorted.len() as f64).ceil() as usize;
    sorted[rank.saturating_sub(1)]
}

#[derive(Clone, Debug)]
pub struct BatchSummary {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub median_queries: usize,
    pub p95_queries: usize,
    pub max_queries: usize,
    pub bound: Option<f64>,
    pub bound_violations: usize,
}

/// Aggregates a batch; `bound` is the per-trial distinct-query ceiling to
/// count violations against, when the algorithm has one.
pub fn summarize(records: &[TrialRecord], bound: Option<f64>) -> BatchSummary {
    assert!(!records.is_empty());
    let successes = records.iter().filter(|r| r.success).count();
    let queries: Vec<usize> = records.iter().map(|r| r.queries).collect();
    let (wilson_low, wilson_high) = wilson_interval(successes, records.len(), 1.96);
    let bound_violations = match bound {
        Some(limit) => queries.iter().filter(|&&q| q as f64 > limit).count(),
        None => 0,
    };
    BatchSummary {
        trials: records.len(),
        successes,
        success_rate: successes as f64 / records.len() as f64,
        wilson_low,
        wilson_high,
        median_queries: lower_median(&queries),
        p95_queries: p95(&queries),
        max_queries: queries.iter().copied().max().unwrap_or(0),
        bound,
        bound_violations,
    }
}
