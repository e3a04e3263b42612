//! Matrix families with known ground truth.
//!
//! Every generator that knows its equilibrium in closed form validates it
//! against the generated matrix before returning, so tests can treat the
//! attached ground truth as an oracle.

use rand::{Rng, RngCore};

use crate::matrix::MatrixInstance;
use crate::minimax::{brute_force_unique_nash, check_unique_psne_condition, is_equilibrium};
use crate::oracle::OracleHandle;
use crate::scalar::{Mode, Scalar};
use crate::strategy::{EquilibriumCertificate, MixedStrategy};

/// What the generator knows about its instance's equilibrium.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub certificate: Option<EquilibriumCertificate>,
    pub support_size: Option<usize>,
}

impl GroundTruth {
    pub fn none() -> Self {
        GroundTruth {
            certificate: None,
            support_size: None,
        }
    }

    /// The planted pure saddle, when the equilibrium is pure.
    pub fn psne(&self) -> Option<(usize, usize)> {
        self.certificate.as_ref()?.as_pure_pair()
    }
}

fn uniform_unit<R: RngCore>(rng: &mut R, mode: Mode) -> Scalar {
    Scalar::unit_from_u32(rng.next_u32(), mode)
}

/// `k` distinct indices from `0..n`, sorted, via partial Fisher-Yates.
fn sample_sorted_subset<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    let mut subset: Vec<usize> = pool.into_iter().take(k).collect();
    subset.sort_unstable();
    subset
}

/// Hard-to-find-support family: a k-block of diagonal ones, a lone 2 at
/// (spike_row, spike_col) outside the block's rows, and columns past the
/// block filled with 3s. The 2 drags one extra row into the support and
/// pushes row spike_col's weight out.
pub fn gen_thm1_lower(
    n: usize,
    k: usize,
    spike_row: usize,
    spike_col: usize,
    mode: Mode,
) -> (MatrixInstance, GroundTruth) {
    assert!(k >= 1 && 2 * k <= n, "block size must be in 1..=n/2");
    assert!(
        spike_row >= k && spike_row < n,
        "spike row must lie outside the block"
    );
    assert!(spike_col < k, "spike column must lie inside the block");

    let matrix = MatrixInstance::from_fn(n, n, mode, |i, j| {
        if (i, j) == (spike_row, spike_col) {
            Scalar::from_int(2, mode)
        } else if j >= k {
            Scalar::from_int(3, mode)
        } else if i == j {
            Scalar::one(mode)
        } else {
            Scalar::zero(mode)
        }
    });

    let denom = 2 * k as i64 - 1;
    let full = Scalar::from_ratio(2, denom, mode);
    let half = Scalar::from_ratio(1, denom, mode);
    let mut x = vec![Scalar::zero(mode); n];
    for i in 0..k {
        if i != spike_col {
            x[i] = full.clone();
        }
    }
    x[spike_row] = half.clone();
    let mut y = vec![Scalar::zero(mode); n];
    for j in 0..k {
        y[j] = if j == spike_col {
            half.clone()
        } else {
            full.clone()
        };
    }
    let x = MixedStrategy::from_weights(x).expect("closed-form row weights");
    let y = MixedStrategy::from_weights(y).expect("closed-form col weights");
    assert!(is_equilibrium(&matrix, &x, &y), "closed form failed its audit");
    let truth = GroundTruth {
        certificate: Some(EquilibriumCertificate {
            row_strategy: x,
            col_strategy: y,
            value: full,
            verified: true,
            unique_claimed: true,
        }),
        support_size: Some(k),
    };
    (matrix, truth)
}

/// Identity plus half a unit at (i1, j1); full-support equilibrium with
/// closed-form weights, different for the on- and off-diagonal bump.
pub fn gen_identity_perturbed(
    n: usize,
    i1: usize,
    j1: usize,
    mode: Mode,
) -> (MatrixInstance, GroundTruth) {
    assert!(i1 < n && j1 < n, "bump position out of range");
    let half = Scalar::from_ratio(1, 2, mode);
    let matrix = MatrixInstance::from_fn(n, n, mode, |i, j| {
        let base = if i == j {
            Scalar::one(mode)
        } else {
            Scalar::zero(mode)
        };
        if (i, j) == (i1, j1) {
            &base + &half
        } else {
            base
        }
    });

    let (x, y, value) = if i1 == j1 {
        let denom = 3 * n as i64 - 1;
        let plain = Scalar::from_ratio(3, denom, mode);
        let bumped = Scalar::from_ratio(2, denom, mode);
        let weights: Vec<Scalar> = (0..n)
            .map(|i| if i == i1 { bumped.clone() } else { plain.clone() })
            .collect();
        let x = MixedStrategy::from_weights(weights.clone()).expect("closed-form weights");
        let y = MixedStrategy::from_weights(weights).expect("closed-form weights");
        (x, y, Scalar::from_ratio(3, denom, mode))
    } else {
        let denom = 2 * n as i64 - 1;
        let plain = Scalar::from_ratio(2, denom, mode);
        let light = Scalar::from_ratio(1, denom, mode);
        let xw: Vec<Scalar> = (0..n)
            .map(|i| if i == j1 { light.clone() } else { plain.clone() })
            .collect();
        let yw: Vec<Scalar> = (0..n)
            .map(|j| if j == i1 { light.clone() } else { plain.clone() })
            .collect();
        let x = MixedStrategy::from_weights(xw).expect("closed-form weights");
        let y = MixedStrategy::from_weights(yw).expect("closed-form weights");
        (x, y, Scalar::from_ratio(2, denom, mode))
    };
    assert!(is_equilibrium(&matrix, &x, &y), "closed form failed its audit");
    let truth = GroundTruth {
        certificate: Some(EquilibriumCertificate {
            row_strategy: x,
            col_strategy: y,
            value,
            verified: true,
            unique_claimed: true,
        }),
        support_size: Some(n),
    };
    (matrix, truth)
}

/// All-ones matrix with row 1 raised by `width` off the corner and column
/// 1 lowered by it, leaving a strict saddle at (1,1) whose strictness gap
/// is exactly `width`. Consumes no randomness.
pub fn gen_gap_instance(n: usize, width: &Scalar, mode: Mode) -> (MatrixInstance, GroundTruth) {
    assert_eq!(width.mode(), mode);
    assert!(
        !width.is_negative() && !width.is_zero() && width.lt_raw(&Scalar::one(mode)),
        "gap width must be in (0,1)"
    );
    let one = Scalar::one(mode);
    let matrix = MatrixInstance::from_fn(n, n, mode, |i, j| {
        if i == 0 && j > 0 {
            &one + width
        } else if j == 0 && i > 0 {
            &one - width
        } else {
            one.clone()
        }
    });
    assert!(check_unique_psne_condition(&matrix, 0, 0));
    let truth = GroundTruth {
        certificate: Some(EquilibriumCertificate {
            row_strategy: MixedStrategy::pure(n, 0, mode),
            col_strategy: MixedStrategy::pure(n, 0, mode),
            value: one,
            verified: true,
            unique_claimed: true,
        }),
        support_size: Some(1),
    };
    (matrix, truth)
}

/// Uniform random matrix reshaped so (star_row, star_col) is a strict
/// saddle with at least `margin` of slack on every comparison.
pub fn gen_planted_psne_with_margin<R: RngCore>(
    n: usize,
    star_row: usize,
    star_col: usize,
    margin: &Scalar,
    rng: &mut R,
    mode: Mode,
) -> (MatrixInstance, GroundTruth) {
    assert!(star_row < n && star_col < n, "saddle position out of range");
    assert!(
        !margin.is_negative() && !margin.is_zero(),
        "strictness needs a positive margin"
    );
    assert!(
        margin.lt_raw(&Scalar::from_ratio(1, 2, mode)),
        "margin must leave room below 1/2"
    );

    // raw field first, always n^2 draws in row-major order
    let raw: Vec<Scalar> = (0..n * n).map(|_| uniform_unit(rng, mode)).collect();
    let one = Scalar::one(mode);
    // squeeze the saddle value into [margin, 1-margin]
    let spread = &one - &(margin + margin);
    let pivot = margin + &(&raw[star_row * n + star_col] * &spread);
    let below = &pivot - margin;
    let above_span = &(&one - &pivot) - margin;

    let matrix = MatrixInstance::from_fn(n, n, mode, |i, j| {
        let u = &raw[i * n + j];
        if (i, j) == (star_row, star_col) {
            pivot.clone()
        } else if i == star_row {
            &(&pivot + margin) + &(u * &above_span)
        } else if j == star_col {
            u * &below
        } else {
            u.clone()
        }
    });
    assert!(check_unique_psne_condition(&matrix, star_row, star_col));
    let truth = GroundTruth {
        certificate: Some(EquilibriumCertificate {
            row_strategy: MixedStrategy::pure(n, star_row, mode),
            col_strategy: MixedStrategy::pure(n, star_col, mode),
            value: pivot,
            verified: true,
            unique_claimed: true,
        }),
        support_size: Some(1),
    };
    (matrix, truth)
}

pub fn gen_planted_psne<R: RngCore>(
    n: usize,
    star_row: usize,
    star_col: usize,
    rng: &mut R,
    mode: Mode,
) -> (MatrixInstance, GroundTruth) {
    let margin = Scalar::from_ratio(1, 8, mode);
    gen_planted_psne_with_margin(n, star_row, star_col, &margin, rng, mode)
}

/// Plants an identity-perturbed core on random row and column subsets and
/// fills the rest so off-support rows pay strictly under the core value
/// and off-support columns strictly over it. The planted pair is then the
/// unique equilibrium; an audit (full for n <= 10) re-checks that and
/// retries with fresh randomness on failure.
pub fn gen_planted_support<R: Rng>(
    n: usize,
    k: usize,
    rng: &mut R,
    mode: Mode,
) -> (MatrixInstance, GroundTruth) {
    assert!(k >= 1 && k <= n, "support size must be in 1..=n");
    for _ in 0..32 {
        let bump_row = rng.gen_range(0..k);
        let bump_col = rng.gen_range(0..k);
        let rows = sample_sorted_subset(n, k, rng);
        let cols = sample_sorted_subset(n, k, rng);
        let (core, core_truth) = gen_identity_perturbed(k, bump_row, bump_col, mode);
        let core_cert = core_truth.certificate.as_ref().expect("core closed form");
        let value = core_cert.value.clone();
        let cushion = &value / &Scalar::from_int(8, mode);
        let low_span = &value - &cushion;
        let high_base = &value + &cushion;

        let row_slot = |i: usize| rows.binary_search(&i).ok();
        let col_slot = |j: usize| cols.binary_search(&j).ok();
        let matrix = MatrixInstance::from_fn(n, n, mode, |i, j| {
            match (row_slot(i), col_slot(j)) {
                (Some(r), Some(c)) => core.get(r, c).clone(),
                (Some(_), None) => &high_base + &(&uniform_unit(rng, mode) * &value),
                (None, Some(_)) => &uniform_unit(rng, mode) * &low_span,
                (None, None) => uniform_unit(rng, mode),
            }
        });

        let x = MixedStrategy::embed(n, &rows, core_cert.row_strategy.weights());
        let y = MixedStrategy::embed(n, &cols, core_cert.col_strategy.weights());
        if !audit_planted_support(&matrix, &x, &y, &value) {
            continue;
        }
        let truth = GroundTruth {
            certificate: Some(EquilibriumCertificate {
                row_strategy: x,
                col_strategy: y,
                value,
                verified: true,
                unique_claimed: true,
            }),
            support_size: Some(k),
        };
        return (matrix, truth);
    }
    panic!("planted-support generation kept failing its audit");
}

/// Equilibrium check plus strict off-support dominance; below the brute
/// force cutoff the entire support enumeration confirms the plant.
fn audit_planted_support(
    matrix: &MatrixInstance,
    x: &MixedStrategy,
    y: &MixedStrategy,
    value: &Scalar,
) -> bool {
    if !is_equilibrium(matrix, x, y) {
        return false;
    }
    let n = matrix.n_rows();
    let mode = matrix.mode();
    for i in 0..n {
        if x.weight(i).is_zero() {
            let mut payoff = Scalar::zero(mode);
            for j in y.support() {
                payoff = &payoff + &(matrix.get(i, j) * y.weight(j));
            }
            if !payoff.lt_raw(value) {
                return false;
            }
        }
    }
    for j in 0..n {
        if y.weight(j).is_zero() {
            let mut payoff = Scalar::zero(mode);
            for i in x.support() {
                payoff = &payoff + &(matrix.get(i, j) * x.weight(i));
            }
            if !payoff.gt_raw(value) {
                return false;
            }
        }
    }
    if n <= 10 {
        match brute_force_unique_nash(matrix, false) {
            Ok(found) => {
                found.row_strategy.same_weights(x) && found.col_strategy.same_weights(y)
            }
            Err(_) => false,
        }
    } else {
        let mut oracle = OracleHandle::new(matrix.clone());
        crate::minimax::verify_equilibrium(&mut oracle, x, y)
    }
}

/// Plain i.i.d. uniform entries; no ground truth attached.
pub fn gen_random_unique<R: RngCore>(n: usize, rng: &mut R, mode: Mode) -> MatrixInstance {
    let raw: Vec<Scalar> = (0..n * n).map(|_| uniform_unit(rng, mode)).collect();
    MatrixInstance::from_fn(n, n, mode, |i, j| raw[i * n + j].clone())
}
