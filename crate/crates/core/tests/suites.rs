//! Seeded random suites over two-qubit states.

use bohrdisc_core::discord::{is_alice_concordant, min_discord, OptimizerConfig};
use bohrdisc_core::measure::{Instrument, Povm};
use bohrdisc_core::nonlocal::{
    chsh_max, chsh_phenomenon, chsh_settings, classify, local_model_lp, separability,
    steering_lhs_lp, ClassifyConfig, LocalModel, Separability, SteeringOptions,
};
use bohrdisc_core::phenomena::{
    bohr_no_disturbance, pauli_catalog, phenomenon_from_state, LabeledPovm,
};
use bohrdisc_core::qcore::BipartiteState;
use bohrdisc_core::random::{
    random_classical_quantum, random_density, random_separable, random_state, seeded,
};

fn discord_suite() -> Vec<BipartiteState> {
    let mut rng = seeded(2024);
    let mut suite: Vec<BipartiteState> = (0..200).map(|_| random_state(2, 2, &mut rng)).collect();
    suite.extend((0..50).map(|_| random_classical_quantum(2, 2, &mut rng).0));
    suite
}

fn mixed_rank_suite(n: usize, seed: u64) -> Vec<BipartiteState> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|i| BipartiteState::new(2, 2, random_density(4, 1 + i % 4, &mut rng)).unwrap())
        .collect()
}

fn paulis() -> Vec<LabeledPovm> {
    vec![
        LabeledPovm::new("x", "x", Povm::sigma_x()),
        LabeledPovm::new("y", "y", Povm::sigma_y()),
        LabeledPovm::new("z", "z", Povm::sigma_z()),
    ]
}

#[test]
fn concordance_agrees_with_minimized_discord() {
    let cfg = OptimizerConfig::default();
    for (i, s) in discord_suite().iter().enumerate() {
        let c = is_alice_concordant(s);
        let m = min_discord(s, &cfg).unwrap();
        assert_eq!(
            c.verdict,
            m.is_zero(),
            "state {i}: residual {:e}, discord {:e}",
            c.residual,
            m.result.discord
        );
    }
}

#[test]
fn zero_discord_iff_bohr_nondisturbing() {
    let quantities = paulis();
    let bob: Vec<Povm> = quantities.iter().map(|q| q.povm.clone()).collect();
    let mut recovery = bob.clone();
    recovery.extend(pauli_catalog());
    let cfg = OptimizerConfig::default();
    for (i, s) in discord_suite().iter().enumerate() {
        let c = is_alice_concordant(s);
        let basis = if c.verdict {
            c.basis.clone()
        } else {
            min_discord(s, &cfg).unwrap().basis
        };
        let first = Instrument::measure_and_reprepare(&basis, &Povm::projective(&basis));
        let v = bohr_no_disturbance(s, &first, &quantities, &recovery, &bob).unwrap();
        let worst = ["x", "y", "z"]
            .iter()
            .map(|q| v.residual(q).unwrap())
            .fold(0.0, f64::max);
        if c.verdict {
            assert!(
                !v.is_disturbing() && worst <= 1e-9,
                "state {i}: residual {worst:e}"
            );
        } else {
            assert!(
                v.is_disturbing() && worst >= 1e-3,
                "state {i}: residual {worst:e}"
            );
        }
    }
}

#[test]
fn hierarchy_is_monotone() {
    let cfg = OptimizerConfig::default();
    let opts = SteeringOptions::default();
    for (i, s) in mixed_rank_suite(200, 7).iter().enumerate() {
        let ph = chsh_phenomenon(s).unwrap();
        let nonlocal = !local_model_lp(&ph).unwrap().is_local();
        let set = chsh_settings(s).unwrap();
        let alice: Vec<Povm> = set.alice.iter().map(|&n| Povm::spin(n)).collect();
        let steer = steering_lhs_lp(s, &alice, &opts).unwrap();
        if nonlocal {
            assert!(
                steer.is_steerable(),
                "state {i}: Bell-nonlocal but not steerable"
            );
        }
        let sep = separability(s).verdict;
        if steer.is_steerable() {
            assert_ne!(sep, Separability::Separable, "state {i}");
        }
        if sep == Separability::Entangled {
            assert!(
                min_discord(s, &cfg).unwrap().result.discord > 1e-5,
                "state {i}"
            );
        }
    }
}

#[test]
fn chsh_bound_matches_local_model() {
    for (i, s) in mixed_rank_suite(200, 8).iter().enumerate() {
        let chsh = chsh_max(s).unwrap();
        if (chsh - 2.0).abs() < 1e-6 {
            continue;
        }
        let local = local_model_lp(&chsh_phenomenon(s).unwrap())
            .unwrap()
            .is_local();
        assert_eq!(chsh <= 2.0, local, "state {i}: chsh {chsh}");
    }
}

#[test]
fn separable_phenomena_have_local_models() {
    let mut rng = seeded(9);
    let settings = paulis();
    for i in 0..50 {
        let s = random_separable(2, 2, 1 + i % 5, &mut rng).state;
        for ph in [
            chsh_phenomenon(&s).unwrap(),
            phenomenon_from_state(&s, &settings, &settings).unwrap(),
        ] {
            match local_model_lp(&ph).unwrap() {
                LocalModel::Local { error, .. } => assert!(error <= 1e-7),
                LocalModel::Nonlocal(c) => panic!("state {i}: violation {}", c.violation()),
            }
        }
    }
}

#[test]
fn single_setting_phenomena_are_local() {
    for s in mixed_rank_suite(20, 10) {
        let z = [LabeledPovm::new("z", "z", Povm::sigma_z())];
        let x = [LabeledPovm::new("x", "x", Povm::sigma_x())];
        assert!(local_model_lp(&phenomenon_from_state(&s, &z, &x).unwrap())
            .unwrap()
            .is_local());
    }
}

#[test]
fn classification_is_consistent() {
    for (i, s) in mixed_rank_suite(40, 11).iter().enumerate() {
        let r = classify(s, &ClassifyConfig::default()).unwrap();
        assert!(r.is_consistent(), "state {i}: {r:?}");
    }
}
