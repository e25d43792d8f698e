use bohrdisc_core::discord::{min_discord, mutual_information, OptimizerConfig};
use bohrdisc_core::measure::{outcome_distribution, Povm};
use bohrdisc_core::nonlocal::{separability, SeparabilityMethod};
use bohrdisc_core::qcore::{eig_hermitian, BipartiteState, CMatrix};
use bohrdisc_core::random::{random_density, random_state, random_unitary, seeded};
use proptest::prelude::*;

fn quick() -> OptimizerConfig {
    OptimizerConfig {
        starts: 12,
        ..OptimizerConfig::default()
    }
}

fn state_from(seed: u64, da: usize, db: usize, rank: usize) -> BipartiteState {
    let mut rng = seeded(seed);
    let n = da * db;
    BipartiteState::new(da, db, random_density(n, rank.clamp(1, n), &mut rng)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bob_marginals_ignore_alice_choice(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let s = state_from(seed, da, db, da * db);
        let mut rng = seeded(seed ^ 0x5eed);
        let bob = Povm::projective(&random_unitary(db, &mut rng));
        let reference = outcome_distribution(&s, &Povm::trivial(da), &bob).unwrap().bob_marginal();
        for _ in 0..3 {
            let alice = Povm::projective(&random_unitary(da, &mut rng));
            let m = outcome_distribution(&s, &alice, &bob).unwrap().bob_marginal();
            for (x, y) in m.iter().zip(&reference) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = seeded(seed);
        let m = random_density(n, n, &mut rng);
        let e = eig_hermitian(&m).unwrap();
        prop_assert!(e.reconstruct().distance(&m) < 1e-9);
        let v = &e.vectors;
        prop_assert!(v.adjoint().matmul(v).distance(&CMatrix::identity(n)) < 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ppt_witness_matches_brute_force(seed in any::<u64>(), rank in 1usize..5) {
        let s = state_from(seed, 2, 2, rank);
        let v = separability(&s);
        let brute = eig_hermitian(&s.partial_transpose()).unwrap().values[0];
        prop_assert!((v.min_pt_eigenvalue - brute).abs() < 1e-10);
        if v.method == SeparabilityMethod::Ppt {
            prop_assert!((v.witness - brute).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn discord_is_nonnegative_and_bounded(seed in any::<u64>(), rank in 1usize..5) {
        let s = state_from(seed, 2, 2, rank);
        let m = min_discord(&s, &quick()).unwrap();
        prop_assert!(m.result.discord >= -1e-7);
        prop_assert!(m.result.discord <= mutual_information(&s).unwrap() + 1e-7);
    }

    #[test]
    fn discord_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let s = random_state(2, 2, &mut rng);
        let (u, v) = (random_unitary(2, &mut rng), random_unitary(2, &mut rng));
        let t = s.apply_local_unitaries(&u, &v).unwrap();
        let a = min_discord(&s, &OptimizerConfig::default()).unwrap().result.discord;
        let b = min_discord(&t, &OptimizerConfig::default()).unwrap().result.discord;
        prop_assert!((a - b).abs() < 1e-5, "{} vs {}", a, b);
        prop_assert!((mutual_information(&s).unwrap() - mutual_information(&t).unwrap()).abs() < 1e-9);
    }
}
