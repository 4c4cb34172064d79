mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wiretap_core::oracle::separable_allocation;
use wiretap_core::*;

use common::*;

fn s() -> MultiplierSearch {
    MultiplierSearch::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn optimum_commutes_and_matches_separable(seed in any::<u64>(), m in 1usize..=4, p in 0.01f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = random_unitary(&mut rng, m);
        let l1: Vec<f64> = (0..m).map(|_| uniform(&mut rng, 0.0, 5.0)).collect();
        let l2: Vec<f64> = (0..m).map(|_| uniform(&mut rng, 0.0, 3.0)).collect();
        let pair = commuting_pair(&basis, &l1, &l2);
        let ch = detect_common_rsv(&pair, 1e-8).unwrap();
        let sol = solve_common_rsv(&ch, p, &s()).unwrap();
        let r = sol.covariance.as_matrix();
        for w in [pair.w1().as_matrix(), pair.w2().as_matrix()] {
            prop_assert!((w * r - r * w).norm() < 1e-9);
        }
        let direct = secrecy_rate(&pair, &sol.covariance).unwrap();
        prop_assert!((direct - sol.capacity_nats).abs() < 1e-9);
        let (oracle, _) = separable_allocation(ch.lam1(), ch.lam2(), p, &OracleConfig::default()).unwrap();
        prop_assert!((oracle - sol.capacity_nats).abs() < 1e-6);
    }

    #[test]
    fn monotone_in_power(seed in any::<u64>(), m in 1usize..=4, p in 0.01f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l1: Vec<f64> = (0..m).map(|_| uniform(&mut rng, 0.0, 5.0)).collect();
        let l2: Vec<f64> = (0..m).map(|_| uniform(&mut rng, 0.0, 3.0)).collect();
        let pair = ChannelPair::from_diagonals(&l1, &l2).unwrap();
        let ch = detect_common_rsv(&pair, 1e-8).unwrap();
        let a = solve_common_rsv(&ch, p, &s()).unwrap();
        let b = solve_common_rsv(&ch, 1.3 * p, &s()).unwrap();
        prop_assert!(b.capacity_nats >= a.capacity_nats - 1e-12);
        for (x, y) in a.mode_powers.iter().zip(&b.mode_powers) {
            prop_assert!(*y >= *x - 1e-12 * p);
        }
    }
}

#[test]
fn random_commuting_pair_matches_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let basis = random_unitary(&mut rng, 3);
    let pair = commuting_pair(&basis, &[2.5, 1.2, 0.4], &[0.3, 1.5, 0.1]);
    let ch = detect_common_rsv(&pair, 1e-8).unwrap();
    let sol = solve_common_rsv(&ch, 2.0, &s()).unwrap();
    let sep = separable_oracle(ch.lam1(), ch.lam2(), 2.0, &OracleConfig::default()).unwrap();
    assert!((sep - sol.capacity_nats).abs() < 1e-6);
    let cfg = OracleConfig { seed_candidates: false, ..Default::default() };
    let mc = mc_capacity(&pair, 2.0, Objective::Exact, &cfg).unwrap();
    assert!(mc.best_value <= sol.capacity_nats + 1e-9);
    assert!(sol.capacity_nats - mc.best_value < 5e-3);
}

#[test]
fn crossing_spectra_are_paired_by_eigenvector() {
    // Sorting λ1 and λ2 independently would pair 3 with 2 and 1 with 0.1.
    let pair = ChannelPair::from_diagonals(&[3.0, 1.0], &[0.1, 2.0]).unwrap();
    let ch = detect_common_rsv(&pair, 1e-8).unwrap();
    assert_eq!(ch.lam1(), &[3.0, 1.0]);
    assert_eq!(ch.lam2(), &[0.1, 2.0]);
}
