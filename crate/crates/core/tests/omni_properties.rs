mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wiretap_core::*;

use common::*;

fn s() -> MultiplierSearch {
    MultiplierSearch::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn contained_channel_is_isotropic(seed in any::<u64>(), m in 1usize..=3, eps in 0.05f64..2.0, p in 0.05f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r2 = 1 + (seed as usize) % m;
        let u = random_semi_unitary(&mut rng, m, r2);
        let w2 = HermitianMatrix::new(&u * u.adjoint()).unwrap().scale(eps);
        let w1 = random_psd(&mut rng, r2, 3.0).congruence(&u);
        let pair = ChannelPair::from_gram(w1, w2).unwrap();
        let out = solve_omni(&pair, p, &s()).unwrap();
        prop_assert!(out.bounds.is_none());

        let cfg = OracleConfig { samples: 10_000, seed, refine_samples: 1024, seed_candidates: false, ..Default::default() };
        let mc = mc_capacity(&pair, p, Objective::Exact, &cfg).unwrap();
        prop_assert!(mc.best_value <= out.result.capacity_nats + 1e-9);

        // Another orthonormal basis of the same subspace.
        let q = random_unitary(&mut rng, r2);
        let v = &u * q;
        let w2b = HermitianMatrix::new(&v * v.adjoint()).unwrap().scale(eps);
        let alt = ChannelPair::from_gram(pair.w1().clone(), w2b).unwrap();
        let out_b = solve_omni(&alt, p, &s()).unwrap();
        prop_assert!((out_b.result.capacity_nats - out.result.capacity_nats).abs() < 1e-9);
    }
}
