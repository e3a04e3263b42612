//! End-to-end acceptance checks. Each test prints one [PASS]/[FAIL] line
//! with the numbers behind the verdict; thresholds sit next to the
//! assertions they guard.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use saddlepoint::instances::{
    gen_gap_instance, gen_identity_perturbed, gen_planted_psne, gen_planted_support,
    gen_random_unique, gen_thm1_lower,
};
use saddlepoint::lifted::{find_unique_nash, LiftedOracle, NashOptions};
use saddlepoint::minimax::{
    brute_force_unique_nash, check_unique_psne_condition, solve_value, verify_equilibrium,
};
use saddlepoint::psne::find_psne;
use saddlepoint::subsets::SubsetCodec;
use saddlepoint::swordfish::swordfish;
use saddlepoint::trials::lower_median;
use saddlepoint::{
    EquilibriumCertificate, MatrixInstance, MixedStrategy, Mode, OracleHandle, QueryOracle, Scalar,
};

fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::from_ratio(p, q, Mode::Exact)
}

fn report(name: &str, pass: bool, detail: &str) {
    let tag = if pass { "[PASS]" } else { "[FAIL]" };
    println!("{tag} {name}: {detail}");
    assert!(pass, "{name}: {detail}");
}

// --- elimination exactness -------------------------------------------------

#[test]
fn elimination_recovers_every_planted_saddle_within_three_n() {
    let mut failures = 0usize;
    let mut over_budget = 0usize;
    let mut trials = 0usize;
    for n in [2usize, 4, 8, 16, 32, 64] {
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 1_000_003 + seed);
            let star = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (m, truth) = gen_planted_psne(n, star.0, star.1, &mut rng, Mode::Float);
            let planted = truth.psne().unwrap();
            let mut oracle = OracleHandle::new(m);
            let found = swordfish(&mut oracle).ok();
            if found != Some(planted) {
                failures += 1;
            }
            if oracle.distinct_query_count() > 3 * n - 2 {
                over_budget += 1;
            }
            trials += 1;
        }
    }
    report(
        "elimination exactness",
        failures == 0 && over_budget == 0,
        &format!(
            "{trials} planted trials over n in {{2..64}}, {failures} misses, \
             {over_budget} over the 3n-2 budget"
        ),
    );
}

// --- halving search budget and success -------------------------------------

#[test]
fn halving_search_stays_in_budget_at_n_128() {
    let n = 128usize;
    let delta = 0.1f64;
    let budget = (8.0 * n as f64 * (4.0 * (n * n) as f64 / delta).log2()).floor() as usize;
    let mut successes = 0usize;
    let mut worst = 0usize;
    let mut over_budget = 0usize;
    let trials = 200u64;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(7_000_000 + seed);
        let star = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (m, truth) = gen_planted_psne(n, star.0, star.1, &mut rng, Mode::Float);
        let planted = truth.psne().unwrap();
        let mut oracle = OracleHandle::new(m);
        let pair = find_psne(&mut oracle, delta, &mut rng);
        if pair == planted {
            successes += 1;
        }
        let spent = oracle.distinct_query_count();
        worst = worst.max(spent);
        if spent > budget {
            over_budget += 1;
        }
    }
    let rate = successes as f64 / trials as f64;
    report(
        "halving budget and success",
        rate >= 0.90 && over_budget == 0,
        &format!(
            "{successes}/{trials} planted pairs found (need >= 0.90), \
             worst spend {worst} of budget {budget}, {over_budget} over"
        ),
    );
}

// --- gap width independence ------------------------------------------------

#[test]
fn trace_is_independent_of_the_gap_width() {
    let n = 64usize;
    let wide = Scalar::from_ratio(1, 4, Mode::Exact);
    let narrow = Scalar::from_ratio(1, 1 << 20, Mode::Exact);
    let (m_wide, _) = gen_gap_instance(n, &wide, Mode::Exact);
    let (m_narrow, _) = gen_gap_instance(n, &narrow, Mode::Exact);
    let mut mismatches = 0usize;
    let trials = 20u64;
    for seed in 0..trials {
        let mut oracle_w = OracleHandle::new(m_wide.clone());
        let mut rng_w = ChaCha8Rng::seed_from_u64(seed);
        let pair_w = find_psne(&mut oracle_w, 0.1, &mut rng_w);

        let mut oracle_n = OracleHandle::new(m_narrow.clone());
        let mut rng_n = ChaCha8Rng::seed_from_u64(seed);
        let pair_n = find_psne(&mut oracle_n, 0.1, &mut rng_n);

        if pair_w != pair_n
            || oracle_w.ledger().sorted_pairs() != oracle_n.ledger().sorted_pairs()
        {
            mismatches += 1;
        }
    }
    report(
        "gap width independence",
        mismatches == 0,
        &format!("{trials} seeds at n={n}, widths 1/4 vs 2^-20, {mismatches} trace mismatches"),
    );
}

// --- closed-form equilibria ------------------------------------------------

fn expected_bumped_identity_cert() -> (Vec<Scalar>, Vec<Scalar>, Scalar) {
    (
        vec![ratio(2, 5), ratio(1, 5), ratio(2, 5)],
        vec![ratio(1, 5), ratio(2, 5), ratio(2, 5)],
        ratio(2, 5),
    )
}

fn expected_spike_cert() -> (Vec<Scalar>, Vec<Scalar>, Scalar) {
    (
        vec![ratio(0, 1), ratio(2, 3), ratio(1, 3), ratio(0, 1)],
        vec![ratio(1, 3), ratio(2, 3), ratio(0, 1), ratio(0, 1)],
        ratio(2, 3),
    )
}

fn exact_hits(
    make: impl Fn() -> MatrixInstance,
    expected: &(Vec<Scalar>, Vec<Scalar>, Scalar),
    seed_base: u64,
) -> usize {
    let mut hits = 0usize;
    for seed in 0..100u64 {
        let mut oracle = OracleHandle::new(make());
        let mut rng = ChaCha8Rng::seed_from_u64(seed_base + seed);
        let Ok((cert, _)) = find_unique_nash(&mut oracle, 0.1, &mut rng, &NashOptions::default())
        else {
            continue;
        };
        if cert.row_strategy.weights() == expected.0.as_slice()
            && cert.col_strategy.weights() == expected.1.as_slice()
            && cert.value == expected.2
        {
            hits += 1;
        }
    }
    hits
}

#[test]
fn closed_form_equilibria_come_back_exactly() {
    let bumped = exact_hits(
        || gen_identity_perturbed(3, 0, 1, Mode::Exact).0,
        &expected_bumped_identity_cert(),
        50_000,
    );
    let spike = exact_hits(
        || gen_thm1_lower(4, 2, 2, 0, Mode::Exact).0,
        &expected_spike_cert(),
        60_000,
    );
    report(
        "closed-form equilibria",
        bumped >= 95 && spike >= 95,
        &format!(
            "bumped identity {bumped}/100 exact rational hits, \
             spike instance {spike}/100 (need >= 95 each)"
        ),
    );
}

// --- structure suite on audited random instances ---------------------------

fn payoffs(m: &MatrixInstance, x: &MixedStrategy, y: &MixedStrategy) -> (Vec<Scalar>, Vec<Scalar>) {
    let rows = (0..m.n_rows())
        .map(|i| {
            (0..m.n_cols()).fold(Scalar::zero(m.mode()), |acc, j| {
                &acc + &(m.get(i, j) * y.weight(j))
            })
        })
        .collect();
    let cols = (0..m.n_cols())
        .map(|j| {
            (0..m.n_rows()).fold(Scalar::zero(m.mode()), |acc, i| {
                &acc + &(m.get(i, j) * x.weight(i))
            })
        })
        .collect();
    (rows, cols)
}

fn support_structure_holds(m: &MatrixInstance, cert: &EquilibriumCertificate) -> bool {
    let x = &cert.row_strategy;
    let y = &cert.col_strategy;
    if x.support().len() != y.support().len() {
        return false;
    }
    let (rows, cols) = payoffs(m, x, y);
    let v = &cert.value;
    rows.iter().enumerate().all(|(i, p)| {
        if x.weight(i).is_zero() {
            p.lt_raw(v)
        } else {
            p == v
        }
    }) && cols.iter().enumerate().all(|(j, p)| {
        if y.weight(j).is_zero() {
            p.gt_raw(v)
        } else {
            p == v
        }
    })
}

/// Restricting to any index supersets of the supports keeps the pair an
/// equilibrium of the subgame and leaves the subgame value unchanged.
fn superset_restriction_holds<R: Rng>(
    m: &MatrixInstance,
    cert: &EquilibriumCertificate,
    rng: &mut R,
) -> bool {
    let n = m.n_rows();
    let grow = |support: &[usize], rng: &mut R| -> Vec<usize> {
        let mut set = support.to_vec();
        for idx in 0..n {
            if !set.contains(&idx) && rng.gen_bool(0.5) {
                set.push(idx);
            }
        }
        set.sort_unstable();
        set
    };
    for _ in 0..2 {
        let rows = grow(&cert.row_strategy.support(), rng);
        let cols = grow(&cert.col_strategy.support(), rng);
        let sub = m.submatrix(&rows, &cols);
        if solve_value(&sub) != cert.value {
            return false;
        }
        let x = MixedStrategy::from_weights(
            rows.iter()
                .map(|&i| cert.row_strategy.weight(i).clone())
                .collect(),
        )
        .unwrap();
        let y = MixedStrategy::from_weights(
            cols.iter()
                .map(|&j| cert.col_strategy.weight(j).clone())
                .collect(),
        )
        .unwrap();
        let (rp, cp) = payoffs(&sub, &x, &y);
        if !rp.iter().all(|p| p.le_raw(&cert.value)) || !cp.iter().all(|p| p.ge_raw(&cert.value)) {
            return false;
        }
    }
    true
}

/// In the game of subset values at the support order, the support pair is
/// a strict saddle: wrong row subsets fall strictly below the value,
/// wrong column subsets rise strictly above it.
fn subset_value_slices_hold(m: &MatrixInstance, cert: &EquilibriumCertificate) -> bool {
    let n = m.n_rows();
    let supp_x = cert.row_strategy.support();
    let supp_y = cert.col_strategy.support();
    let k = supp_x.len();
    let codec = SubsetCodec::new(n, k);
    let r_star = codec.rank(&supp_x);
    let c_star = codec.rank(&supp_y);
    if solve_value(&m.submatrix(&supp_x, &supp_y)) != cert.value {
        return false;
    }
    for rank in 0..codec.count() {
        let subset = codec.unrank(rank);
        if rank != r_star {
            let v = solve_value(&m.submatrix(&subset, &supp_y));
            if !v.lt_raw(&cert.value) {
                return false;
            }
        }
        if rank != c_star {
            let v = solve_value(&m.submatrix(&supp_x, &subset));
            if !v.gt_raw(&cert.value) {
                return false;
            }
        }
    }
    true
}

#[test]
fn audited_random_instances_satisfy_the_support_structure() {
    let total = 500usize;
    let mut audited = 0usize;
    let mut resampled = 0usize;
    let mut structure_violations = 0usize;
    let mut restriction_violations = 0usize;
    let mut slice_violations = 0usize;
    for idx in 0..total {
        let n = 2 + idx % 5; // sizes 2 through 6
        let mut attempt = 0u64;
        let (m, cert) = loop {
            let mut rng = ChaCha8Rng::seed_from_u64(90_000 + (idx as u64) * 37 + attempt);
            let m = gen_random_unique(n, &mut rng, Mode::Exact);
            match brute_force_unique_nash(&m, true) {
                Ok(cert) => break (m, cert),
                Err(_) => {
                    resampled += 1;
                    attempt += 1;
                    assert!(attempt < 8, "size {n} draw keeps degenerating");
                }
            }
        };
        audited += 1;
        if !support_structure_holds(&m, &cert) {
            structure_violations += 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(400_000 + idx as u64);
        if !superset_restriction_holds(&m, &cert, &mut rng) {
            restriction_violations += 1;
        }
        if !subset_value_slices_hold(&m, &cert) {
            slice_violations += 1;
        }
    }
    report(
        "support structure suite",
        structure_violations == 0 && restriction_violations == 0 && slice_violations == 0,
        &format!(
            "{audited} audited instances (n <= 6, {resampled} degenerate draws resampled): \
             {structure_violations} payoff-structure, {restriction_violations} restriction, \
             {slice_violations} subset-slice violations"
        ),
    );
}

// --- strict saddle of the subset-value game --------------------------------

#[test]
fn planted_supports_give_a_strict_saddle_in_the_subset_game() {
    let shapes = [
        (4usize, 1usize),
        (5, 1),
        (5, 2),
        (6, 2),
        (7, 2),
        (8, 2),
        (6, 3),
        (7, 3),
        (8, 3),
        (4, 2),
    ];
    let mut violations = 0usize;
    let mut instances = 0usize;
    for round in 0..10u64 {
        for (which, &(n, k)) in shapes.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(700_000 + round * 100 + which as u64);
            let (m, truth) = gen_planted_support(n, k, &mut rng, Mode::Exact);
            let cert = truth.certificate.unwrap();
            let codec = SubsetCodec::new(n, k);
            let count = codec.count() as usize;
            let lift = MatrixInstance::from_fn(count, count, Mode::Exact, |r, c| {
                solve_value(&m.submatrix(&codec.unrank(r as u128), &codec.unrank(c as u128)))
            });
            let r_star = codec.rank(&cert.row_strategy.support()) as usize;
            let c_star = codec.rank(&cert.col_strategy.support()) as usize;
            let strict_here = check_unique_psne_condition(&lift, r_star, c_star);
            let nowhere_else = (0..count).all(|r| {
                (0..count).all(|c| {
                    (r, c) == (r_star, c_star) || !check_unique_psne_condition(&lift, r, c)
                })
            });
            if !(strict_here && nowhere_else && lift.get(r_star, c_star) == &cert.value) {
                violations += 1;
            }
            instances += 1;
        }
    }
    report(
        "subset-game saddle structure",
        violations == 0,
        &format!(
            "{instances} planted-support instances (n <= 8, k <= 3) fully materialized, \
             {violations} without a unique strict saddle at the support pair"
        ),
    );
}

// --- generator families stay unique and distinct ---------------------------

#[test]
fn generator_families_are_unique_and_pairwise_distinct() {
    let mut spike_certs: Vec<EquilibriumCertificate> = Vec::new();
    let mut audit_failures = 0usize;
    for k in [2usize, 3] {
        for spike_row in k..8 {
            for spike_col in 0..k {
                let (m, truth) = gen_thm1_lower(8, k, spike_row, spike_col, Mode::Exact);
                let expected = truth.certificate.unwrap();
                match brute_force_unique_nash(&m, true) {
                    Ok(found) if found.same_equilibrium(&expected) => spike_certs.push(found),
                    _ => audit_failures += 1,
                }
            }
        }
    }
    let spike_total = spike_certs.len();
    let mut spike_dups = 0usize;
    for a in 0..spike_total {
        for b in a + 1..spike_total {
            // spikes at different k share nothing; same-k pairs must differ
            if spike_certs[a].same_equilibrium(&spike_certs[b]) {
                spike_dups += 1;
            }
        }
    }

    let mut bump_certs: Vec<EquilibriumCertificate> = Vec::new();
    for i1 in 0..6 {
        for j1 in 0..6 {
            let (m, truth) = gen_identity_perturbed(6, i1, j1, Mode::Exact);
            let expected = truth.certificate.unwrap();
            match brute_force_unique_nash(&m, true) {
                Ok(found) if found.same_equilibrium(&expected) => bump_certs.push(found),
                _ => audit_failures += 1,
            }
        }
    }
    let bump_total = bump_certs.len();
    let mut bump_dups = 0usize;
    for a in 0..bump_total {
        for b in a + 1..bump_total {
            if bump_certs[a].same_equilibrium(&bump_certs[b]) {
                bump_dups += 1;
            }
        }
    }

    report(
        "generator family sanity",
        audit_failures == 0 && spike_dups == 0 && bump_dups == 0,
        &format!(
            "{spike_total} spike instances (n=8, k in {{2,3}}) and {bump_total} bumped-identity \
             instances (n=6) audited; {audit_failures} audit failures, \
             {spike_dups}+{bump_dups} duplicate equilibria"
        ),
    );
}

// --- query growth against the quadratic baseline ---------------------------

#[test]
fn known_support_search_beats_the_quadratic_baseline_asymptotically() {
    let mut ratios = Vec::new();
    let mut detail = String::new();
    for n in [16usize, 32, 64] {
        let mut spends = Vec::new();
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(800_000 + n as u64 * 1000 + seed);
            let (m, _) = gen_planted_support(n, 2, &mut rng, Mode::Float);
            let mut oracle = OracleHandle::new(m);
            let options = NashOptions {
                known_support: Some(2),
                ..NashOptions::default()
            };
            let outcome = find_unique_nash(&mut oracle, 0.1, &mut rng, &options);
            assert!(outcome.is_ok(), "n {n} seed {seed} failed outright");
            spends.push(oracle.distinct_query_count());
        }
        let median = lower_median(&spends);
        let ratio = median as f64 / (n * n) as f64;
        detail.push_str(&format!("n={n}: median {median} ({ratio:.4} of n^2); "));
        ratios.push(ratio);
    }
    let strictly_decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    report(
        "subquadratic query trend",
        strictly_decreasing,
        &format!("{detail}strictly decreasing: {strictly_decreasing}"),
    );
}

// --- query accounting stays inside the declared envelopes ------------------

#[test]
fn query_accounting_respects_the_declared_envelopes() {
    let mut checks = 0usize;
    let mut violations = 0usize;

    // verification spends at most 2 n s distinct entries
    for (n, k, seed) in [(6usize, 2usize, 1u64), (8, 3, 2), (10, 2, 3)] {
        let mut rng = ChaCha8Rng::seed_from_u64(900_000 + seed);
        let (m, truth) = gen_planted_support(n, k, &mut rng, Mode::Exact);
        let cert = truth.certificate.unwrap();
        let mut oracle = OracleHandle::new(m);
        let ok = verify_equilibrium(&mut oracle, &cert.row_strategy, &cert.col_strategy);
        checks += 1;
        if !ok || oracle.distinct_query_count() > 2 * n * k {
            violations += 1;
        }
    }

    // a batch of subset-game entries across one row or column costs at
    // most k * n base entries per batch element
    for (n, k, seed) in [(6usize, 2usize, 4u64), (8, 3, 5)] {
        let mut rng = ChaCha8Rng::seed_from_u64(910_000 + seed);
        let (m, _) = gen_planted_support(n, k, &mut rng, Mode::Exact);
        let mut base = OracleHandle::new(m);
        let codec = SubsetCodec::new(n, k);
        let count = codec.count() as usize;
        let mut lifted = LiftedOracle::new(&mut base, codec);
        let picks: Vec<usize> = (0..count).step_by(3).collect();

        let before = lifted.base_distinct();
        for &c in &picks {
            lifted.query(0, c);
        }
        checks += 1;
        if lifted.base_distinct() - before > k * n * picks.len() {
            violations += 1;
        }

        let before = lifted.base_distinct();
        for &r in &picks {
            lifted.query(r, 1);
        }
        checks += 1;
        if lifted.base_distinct() - before > k * n * picks.len() {
            violations += 1;
        }
    }

    // the full search keeps its verification phase inside the same cap
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(920_000 + seed);
        let (m, truth) = gen_planted_support(7, 2, &mut rng, Mode::Exact);
        let k = truth.support_size.unwrap();
        let mut oracle = OracleHandle::new(m);
        let options = NashOptions {
            known_support: Some(k),
            ..NashOptions::default()
        };
        if let Ok((_, breakdown)) = find_unique_nash(&mut oracle, 0.1, &mut rng, &options) {
            checks += 1;
            if breakdown.verification > 2 * 7 * k {
                violations += 1;
            }
        }
    }

    report(
        "query accounting",
        violations == 0,
        &format!("{checks} envelope checks, {violations} violations"),
    );
}
