use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use saddlepoint::instances::{gen_gap_instance, gen_planted_psne};
use saddlepoint::psne::{find_psne, find_psne_with_stats, probe_len, sample_probe_set};
use saddlepoint::trials::wilson_interval;
use saddlepoint::{MatrixInstance, Mode, OracleHandle, Scalar};

fn query_budget(n: usize, delta: f64) -> usize {
    (8.0 * n as f64 * (4.0 * (n * n) as f64 / delta).log2()).ceil() as usize
}

#[test]
fn trivial_game_needs_no_queries() {
    let m = MatrixInstance::from_ints(&[&[7]], Mode::Exact);
    let mut oracle = OracleHandle::new(m);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (pair, stats) = find_psne_with_stats(&mut oracle, 0.1, &mut rng);
    assert_eq!(pair, (0, 0));
    assert_eq!(oracle.distinct_query_count(), 0);
    assert_eq!(stats.iterations, 0);
}

#[test]
fn gap_instances_are_found_on_every_seed() {
    let width = Scalar::from_ratio(1, 4, Mode::Exact);
    let (m, _) = gen_gap_instance(8, &width, Mode::Exact);
    for seed in 0..500 {
        let mut oracle = OracleHandle::new(m.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        assert_eq!(find_psne(&mut oracle, 0.05, &mut rng), (0, 0));
    }
}

#[test]
fn planted_search_respects_budget_and_iteration_cap() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let star = ((seed as usize * 7) % 64, (seed as usize * 11) % 64);
        let (m, truth) = gen_planted_psne(64, star.0, star.1, &mut rng, Mode::Float);
        let planted = truth.psne().unwrap();
        let mut oracle = OracleHandle::new(m);
        let (pair, stats) = find_psne_with_stats(&mut oracle, 0.1, &mut rng);
        assert_eq!(pair, planted, "seed {seed} missed the planted pair");
        assert!(oracle.distinct_query_count() <= query_budget(64, 0.1));
        assert!(stats.iterations <= 7); // log2(64) + 1
    }
}

#[test]
fn budget_holds_across_sizes() {
    for n in [2usize, 3, 5, 8, 13, 21, 32] {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + seed);
            let star = ((seed as usize * 3) % n, (seed as usize * 5) % n);
            let (m, truth) = gen_planted_psne(n, star.0, star.1, &mut rng, Mode::Float);
            let planted = truth.psne().unwrap();
            let mut oracle = OracleHandle::new(m);
            let (pair, stats) = find_psne_with_stats(&mut oracle, 0.1, &mut rng);
            assert_eq!(pair, planted);
            assert!(oracle.distinct_query_count() <= query_budget(n, 0.1));
            let cap = ((n as f64).log2().floor() as usize) + 1;
            assert!(stats.iterations <= cap);
        }
    }
}

#[test]
fn same_seed_reproduces_the_exact_query_trace() {
    let mut gen_rng = ChaCha8Rng::seed_from_u64(9);
    let (m, _) = gen_planted_psne(32, 20, 11, &mut gen_rng, Mode::Float);

    let run = |seed: u64, m: &MatrixInstance| {
        let mut oracle = OracleHandle::new(m.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = find_psne(&mut oracle, 0.1, &mut rng);
        (pair, oracle.ledger().sorted_pairs())
    };

    assert_eq!(run(7, &m), run(7, &m));
    let (pair_a, trace_a) = run(7, &m);
    let (pair_b, trace_b) = run(8, &m);
    assert_eq!(pair_a, pair_b);
    assert_ne!(trace_a, trace_b, "different seeds should probe differently");
}

// the sampled probe set has to hit the top half of the pool often enough;
// compare the observed frequency against the analytic floor 1 - (2/3)^l
#[test]
fn probe_sets_hit_the_top_half_often_enough() {
    let pool: Vec<usize> = (0..10).collect();
    let trials = 10_000usize;

    for (count, floor) in [(4usize, 0.8025), (40usize, 1.0 - (2.0f64 / 3.0).powi(40))] {
        let mut rng = ChaCha8Rng::seed_from_u64(count as u64);
        let mut hits = 0usize;
        for _ in 0..trials {
            let probe = sample_probe_set(&pool, count, &mut rng);
            assert_eq!(probe.len(), count);
            if probe.iter().any(|&idx| idx < 5) {
                hits += 1;
            }
        }
        let (low, high) = wilson_interval(hits, trials, 1.96);
        assert!(
            high >= floor,
            "count {count}: interval ({low}, {high}) sits below the floor {floor}"
        );
        if count == 4 {
            // far from saturation the lower endpoint must clear it too
            assert!(low >= floor);
        }
    }
}

#[test]
fn probe_length_grows_with_size_and_confidence() {
    assert_eq!(probe_len(10, 0.1), 22);
    assert_eq!(probe_len(1, 0.5), 4);
    assert!(probe_len(1 << 20, 0.01) > probe_len(1 << 20, 0.1));
    assert!(probe_len(1 << 20, 0.1) > probe_len(1 << 4, 0.1));
}

// a wider or narrower gap must not change the trace: only comparison
// outcomes feed the search, and those are identical across gap widths
#[test]
fn trace_depends_only_on_comparisons_not_magnitudes() {
    let wide = Scalar::from_ratio(1, 4, Mode::Exact);
    let narrow = Scalar::from_ratio(1, 1 << 20, Mode::Exact);
    let (m_wide, _) = gen_gap_instance(16, &wide, Mode::Exact);
    let (m_narrow, _) = gen_gap_instance(16, &narrow, Mode::Exact);

    for seed in 0..25 {
        let mut oracle_w = OracleHandle::new(m_wide.clone());
        let mut rng_w = ChaCha8Rng::seed_from_u64(seed);
        let pair_w = find_psne(&mut oracle_w, 0.1, &mut rng_w);

        let mut oracle_n = OracleHandle::new(m_narrow.clone());
        let mut rng_n = ChaCha8Rng::seed_from_u64(seed);
        let pair_n = find_psne(&mut oracle_n, 0.1, &mut rng_n);

        assert_eq!(pair_w, pair_n);
        assert_eq!(
            oracle_w.ledger().sorted_pairs(),
            oracle_n.ledger().sorted_pairs()
        );
    }
}
