mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wiretap_core::oracle::{closed_form_candidates, mc_capacity_with};
use wiretap_core::*;

use common::*;

fn sampling_only(samples: usize, seed: u64) -> OracleConfig {
    OracleConfig { samples, seed, refine_rounds: 0, seed_candidates: false, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn more_samples_never_hurt(seed in any::<u64>(), m in 1usize..=3, n in 100usize..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = ChannelPair::from_gram(random_psd(&mut rng, m, 2.0), random_psd(&mut rng, m, 1.0)).unwrap();
        let a = mc_capacity(&pair, 1.0, Objective::Exact, &sampling_only(n, seed)).unwrap();
        let b = mc_capacity(&pair, 1.0, Objective::Exact, &sampling_only(2 * n, seed)).unwrap();
        prop_assert!(b.best_value >= a.best_value);
    }

    #[test]
    fn best_covariance_is_feasible_and_achieves_value(seed in any::<u64>(), m in 1usize..=3, p in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = ChannelPair::from_gram(random_psd(&mut rng, m, 2.0), random_psd(&mut rng, m, 1.0)).unwrap();
        let cfg = OracleConfig { samples: 2000, seed, refine_samples: 256, ..Default::default() };
        let out = mc_capacity(&pair, p, Objective::Exact, &cfg).unwrap();
        prop_assert!(out.best_covariance.trace() <= p * (1.0 + 1e-12));
        prop_assert!(out.best_covariance.min_eigenvalue() >= -1e-12);
        let direct = secrecy_rate(&pair, &out.best_covariance).unwrap().max(0.0);
        prop_assert!((direct - out.best_value).abs() < 1e-9);
    }
}

#[test]
fn result_independent_of_thread_count() {
    let pair = fig1();
    let cfg = OracleConfig { samples: 50_000, seed: 5, ..Default::default() };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_capacity(&pair, 2.0, Objective::Exact, &cfg).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.best_value.to_bits(), four.best_value.to_bits());
    assert_eq!(one.best_index, four.best_index);
}

#[test]
fn fig1_estimate_inside_weak_bounds() {
    let pair = fig1();
    let b = capacity_bounds_weak(&pair, 1.0, &WeakSolveConfig::default()).unwrap();
    let mc = mc_capacity(&pair, 1.0, Objective::Exact, &OracleConfig::default()).unwrap();
    assert!(mc.best_value >= b.lower_nats && mc.best_value <= b.upper_nats);
}

#[test]
fn candidates_make_the_estimate_one_sided() {
    let pair = fig1();
    let pool = closed_form_candidates(&pair, 3.0);
    assert!(pool.len() >= 3);
    let with = mc_capacity_with(&pair, 3.0, Objective::Exact, &sampling_only(10, 1), &pool).unwrap();
    let weak = solve_weak(&pair, 3.0, &WeakSolveConfig::default()).unwrap();
    let achieved = secrecy_rate(&pair, &weak.covariance).unwrap();
    assert!(with.best_value >= achieved - 1e-12);
}

#[test]
fn real_only_sampling_stays_real() {
    let pair = ChannelPair::from_diagonals(&[2.0, 1.0], &[0.5, 0.1]).unwrap();
    let cfg = OracleConfig { samples: 2000, real_only: true, seed_candidates: false, ..Default::default() };
    let out = mc_capacity(&pair, 1.0, Objective::Exact, &cfg).unwrap();
    assert!(out.best_covariance.as_matrix().iter().all(|z| z.im.abs() < 1e-15));
}
