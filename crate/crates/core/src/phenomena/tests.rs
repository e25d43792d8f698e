use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::discord::is_alice_concordant;
use crate::measure::Instrument;
use crate::qcore::states::{self, ket, ket_plus, projector};
use crate::qcore::CMatrix;

fn zx() -> Vec<LabeledPovm> {
    vec![
        LabeledPovm::new("z", "z", Povm::sigma_z()),
        LabeledPovm::new("x", "x", Povm::sigma_x()),
    ]
}

fn table(rows: &[&[f64]]) -> JointTable {
    JointTable::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), 1e-9).unwrap()
}

fn two_by_two(tables: Vec<Vec<JointTable>>) -> Phenomenon {
    let s = |l: &str| Setting::new(l, l, 2);
    Phenomenon::new(vec![s("a0"), s("a1")], vec![s("b0"), s("b1")], tables, 1e-9).unwrap()
}

#[test]
fn bell_phenomenon_correlations() {
    let ph = phenomenon_from_state(&states::phi_plus(), &zx(), &zx()).unwrap();
    let zz = ph.table(0, 0);
    assert!((zz.get(0, 0) - 0.5).abs() < 1e-12 && (zz.get(1, 1) - 0.5).abs() < 1e-12);
    assert!(zz.get(0, 1).abs() < 1e-12);
    let xx = ph.table(1, 1);
    assert!((xx.get(0, 0) - 0.5).abs() < 1e-12 && xx.get(1, 0).abs() < 1e-12);
    let zx = ph.table(0, 1);
    assert!(zx.as_slice().iter().all(|p| (p - 0.25).abs() < 1e-12));
}

#[test]
fn product_phenomenon_factorizes() {
    let s =
        BipartiteState::product(&CMatrix::diag_real(&[0.3, 0.7]), &projector(&ket_plus())).unwrap();
    let ph = phenomenon_from_state(&s, &zx(), &zx()).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            let t = ph.table(a, b);
            let (ma, mb) = (t.alice_marginal(), t.bob_marginal());
            for (x, p) in ma.iter().enumerate() {
                for (y, q) in mb.iter().enumerate() {
                    assert!((t.get(x, y) - p * q).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn qudit_analog_correlations() {
    let sc = epr_analog(8, 0);
    let ph = sc.phenomenon().unwrap();
    let (q, p) = (ph.table(0, 0), ph.table(1, 1));
    for a in 0..8 {
        for b in 0..8 {
            let dq = if a == b { 0.125 } else { 0.0 };
            let dp = if (a + b) % 8 == 0 { 0.125 } else { 0.0 };
            assert!((q.get(a, b) - dq).abs() < 1e-12);
            assert!((p.get(a, b) - dp).abs() < 1e-12, "{a} {b} {}", p.get(a, b));
        }
    }
}

#[test]
fn settings_equivalence() {
    let ph = phenomenon_from_state(&states::phi_plus(), &zx(), &zx()).unwrap();
    assert!(settings_equivalent(&ph, 0, 0));
    assert!(!settings_equivalent(&ph, 0, 1));

    // σ_z via a Naimark-style coarse-graining: a 3-outcome POVM whose two last effects
    // split |1><1|, then merged back. Both give the same 2-outcome table.
    let p1 = projector(&ket(2, 1));
    let fine = Povm::new(vec![
        projector(&ket(2, 0)),
        p1.scale_real(0.4),
        p1.scale_real(0.6),
    ])
    .unwrap();
    let merged = Povm::new(vec![
        fine.effect(0).clone(),
        fine.effect(1) + fine.effect(2),
    ])
    .unwrap();
    let alice = vec![
        LabeledPovm::new("z", "z", Povm::sigma_z()),
        LabeledPovm::new("z'", "z", merged),
    ];
    let ph = phenomenon_from_state(&states::phi_plus(), &alice, &zx()).unwrap();
    assert!(settings_equivalent(&ph, 0, 1));
}

#[test]
fn no_signalling_checks() {
    let ph = phenomenon_from_state(&states::phi_plus(), &zx(), &zx()).unwrap();
    assert!(epr_no_disturbance(&ph, 0) && epr_no_disturbance(&ph, 1));

    let id = table(&[&[0.5, 0.0], &[0.0, 0.5]]);
    let skewed = table(&[&[0.7, 0.1], &[0.1, 0.1]]);
    let signalling = two_by_two(vec![vec![id.clone(), id.clone()], vec![skewed, id.clone()]]);
    assert!(!epr_no_disturbance(&signalling, 0));

    // PR box: A ⊕ B = a·b with uniform marginals.
    let anti = table(&[&[0.0, 0.5], &[0.5, 0.0]]);
    let pr = two_by_two(vec![vec![id.clone(), id.clone()], vec![id, anti]]);
    assert!(epr_no_disturbance(&pr, 0) && epr_no_disturbance(&pr, 1));
}

#[test]
fn predictability_examples() {
    let ph = phenomenon_from_state(&states::phi_plus(), &zx(), &zx()).unwrap();
    assert!(predictable(&ph, 0, 0));
    assert!(!predictable(&ph, 0, 1));
    let s = BipartiteState::product(&projector(&ket_plus()), &projector(&ket(2, 1))).unwrap();
    let ph = phenomenon_from_state(&s, &zx(), &zx()).unwrap();
    assert!(predictable(&ph, 1, 0) && predictable(&ph, 0, 0));
}

#[test]
fn bohr_examples() {
    let bob = [Povm::sigma_x(), Povm::sigma_y(), Povm::sigma_z()];
    let catalog = vec![
        LabeledPovm::new("x", "x", Povm::sigma_x()),
        LabeledPovm::new("y", "y", Povm::sigma_y()),
        LabeledPovm::new("z", "z", Povm::sigma_z()),
    ];
    let recovery = pauli_catalog();

    let r0 = CMatrix::diag_real(&[0.9, 0.1]);
    let r1 = projector(&ket_plus());
    let cq = states::classical_quantum(&CMatrix::identity(2), &[0.5, 0.5], &[r0, r1]).unwrap();
    let first = Instrument::measure_and_reprepare(&CMatrix::identity(2), &Povm::sigma_x());
    match bohr_no_disturbance(&cq, &first, &catalog, &recovery, &bob).unwrap() {
        BohrVerdict::Nondisturbing { strategies } => {
            for s in &strategies {
                assert!(s.residual <= 1e-9, "{s:?}");
            }
        }
        other => panic!("{other:?}"),
    }

    let first = Instrument::lueders(&Povm::sigma_z());
    let v =
        bohr_no_disturbance(&states::phi_plus(), &first, &catalog[..1], &recovery, &bob).unwrap();
    assert!(v.is_disturbing());
    assert!(v.residual("x").unwrap() >= 0.1);
    if let BohrVerdict::Disturbing {
        certification,
        residuals,
    } = &v
    {
        assert!(certification.catalog_exhausted && !certification.state_alice_concordant);
        assert!(residuals[0].exhaustive);
    }

    let v = bohr_no_disturbance(
        &states::phi_plus(),
        &Instrument::identity(2),
        &catalog,
        &recovery,
        &bob,
    )
    .unwrap();
    assert!(!v.is_disturbing());

    assert!(bohr_no_disturbance(&states::phi_plus(), &first, &[], &recovery, &bob).is_err());
    assert!(bohr_no_disturbance(&states::phi_plus(), &first, &catalog, &[], &bob).is_err());
}

#[test]
fn elements_of_reality() {
    let sc = epr_analog(8, 0);
    let v = element_of_reality(&sc, "q", Notion::Epr).unwrap();
    assert!(v.verdict);
    assert_eq!(v.witness.as_deref(), Some("q"));
    assert!(!element_of_reality(&sc, "q", Notion::Bohr).unwrap().verdict);
    assert!(element_of_reality(&sc, "nope", Notion::Epr).is_err());

    let s =
        BipartiteState::product(&projector(&ket(2, 0)), &CMatrix::diag_real(&[0.5, 0.5])).unwrap();
    let alice = vec![
        AliceSetting::lueders("z", "z", &Povm::sigma_z()),
        AliceSetting::lueders("x", "x", &Povm::sigma_x()),
    ];
    let sc = QuantumScenario::new(s, alice, zx());
    for n in [Notion::Epr, Notion::Bohr] {
        assert!(!element_of_reality(&sc, "z", n).unwrap().verdict);
        assert!(!element_of_reality(&sc, "x", n).unwrap().verdict);
    }
}

#[test]
fn representation_examples() {
    let cc = states::classically_correlated();
    let ph = phenomenon_from_state(&cc, &zx()[..1], &zx()[..1]).unwrap();
    let s = |l: &str| Setting::new(l, l, 2);
    let det = HiddenVariableTheory::deterministic(
        vec![s("z")],
        vec![s("z")],
        &[(vec![0], vec![0]), (vec![1], vec![1])],
        vec![0.5, 0.5],
    )
    .unwrap();
    assert!(det.reproduces(&ph, 1e-12));
    assert!(representation_check(&det, "z").unwrap());

    let bell = phenomenon_from_state(&states::phi_plus(), &zx(), &zx()).unwrap();
    assert!(!representation_check(&HiddenVariableTheory::operational(&bell), "z").unwrap());

    let p0 = projector(&ket(2, 0));
    let p1 = projector(&ket(2, 1));
    let dec = ProductDecomposition::new(vec![0.5, 0.5], vec![p0.clone(), p1.clone()], vec![p0, p1])
        .unwrap();
    let th = proper_mixture_theory(&cc, &dec, &zx(), &zx()).unwrap();
    assert_eq!(th.lambdas().len(), 2);
    let ph = phenomenon_from_state(&cc, &zx(), &zx()).unwrap();
    assert!(th.reproduction_error(&ph) <= 1e-12);
    assert!(representation_check(&th, "z").unwrap());
    assert!(!representation_check(&th, "x").unwrap());
}

#[test]
fn proper_mixture_edge_cases() {
    let a = CMatrix::diag_real(&[0.2, 0.8]);
    let b = projector(&ket_plus());
    let prod = BipartiteState::product(&a, &b).unwrap();
    let dec = ProductDecomposition::new(vec![1.0], vec![a], vec![b]).unwrap();
    let th = proper_mixture_theory(&prod, &dec, &zx(), &zx()).unwrap();
    assert_eq!(th.lambdas().len(), 1);
    assert!(th.reproduction_error(&phenomenon_from_state(&prod, &zx(), &zx()).unwrap()) < 1e-12);

    // Non-orthogonal Alice states |0>, |+> paired with distinct Bob eigenstates.
    let s = states::alice_discordant_example();
    let p0 = projector(&ket(2, 0));
    let dec = ProductDecomposition::new(
        vec![0.5, 0.5],
        vec![p0.clone(), projector(&ket_plus())],
        vec![p0, projector(&ket(2, 1))],
    )
    .unwrap();
    let th = proper_mixture_theory(&s, &dec, &zx(), &zx()).unwrap();
    let ph = phenomenon_from_state(&s, &zx(), &zx()).unwrap();
    assert!(th.reproduction_error(&ph) < 1e-9);
    assert!(representation_check(&th, "z").unwrap());
    assert!(!predictable(&ph, 0, 0) && !predictable(&ph, 1, 0));

    let wrong = ProductDecomposition::new(
        vec![1.0],
        vec![CMatrix::diag_real(&[0.5, 0.5])],
        vec![CMatrix::diag_real(&[0.5, 0.5])],
    )
    .unwrap();
    assert!(matches!(
        proper_mixture_theory(&s, &wrong, &zx(), &zx()),
        Err(Error::DecompositionMismatch { .. })
    ));
}

#[test]
fn epr_argument_qudit() {
    let sc = epr_analog(8, 0);
    let r = epr_argument(&sc, "q", "p", Notion::Epr).unwrap();
    assert_eq!(
        r.conclusion,
        Conclusion::Incomplete {
            one_observable: false
        }
    );
    assert!(
        r.steps.iter().all(|s| s.verdict == StepVerdict::Verified),
        "{:?}",
        r.steps
    );
    assert_eq!(r.steps.len(), 7);
    assert_eq!(
        r.one_observable.last().unwrap().verdict,
        StepVerdict::Verified
    );

    let r = epr_argument(&sc, "q", "p", Notion::Bohr).unwrap();
    assert_eq!(r.conclusion, Conclusion::Blocked { step: 3 });
    assert_eq!(r.step(3).verdict, StepVerdict::Failed);
    assert_eq!(r.step(4).verdict, StepVerdict::NotReached);
    assert_eq!(
        alloc::format!("{}", r.conclusion),
        "argument blocked at element-of-reality"
    );
}

#[test]
fn epr_argument_shifted_and_qubit() {
    let r = epr_argument(&epr_analog(5, 2), "q", "p", Notion::Epr).unwrap();
    assert_eq!(
        r.conclusion,
        Conclusion::Incomplete {
            one_observable: false
        }
    );
    let r = epr_argument(&epr_analog(2, 0), "q", "p", Notion::Epr).unwrap();
    assert_eq!(
        r.conclusion,
        Conclusion::Incomplete {
            one_observable: false
        }
    );
}

#[test]
fn epr_argument_classically_correlated() {
    let alice = vec![
        AliceSetting::lueders("z", "z", &Povm::sigma_z()),
        AliceSetting::lueders("x", "x", &Povm::sigma_x()),
    ];
    let sc = QuantumScenario::new(states::classically_correlated(), alice, zx());
    let r = epr_argument(&sc, "z", "x", Notion::Epr).unwrap();
    for n in 1..=3 {
        assert_eq!(r.step(n).verdict, StepVerdict::Verified);
    }
    assert_eq!(r.step(4).verdict, StepVerdict::Failed);
    assert_eq!(r.conclusion, Conclusion::NoContradiction);
    assert_eq!(r.theories.len(), 2);
}

#[test]
fn epr_argument_without_correlations() {
    let s = BipartiteState::product(
        &CMatrix::diag_real(&[0.5, 0.5]),
        &CMatrix::diag_real(&[0.5, 0.5]),
    )
    .unwrap();
    let alice = vec![AliceSetting::lueders("z", "z", &Povm::sigma_z())];
    let sc = QuantumScenario::new(s, alice, zx());
    let r = epr_argument(&sc, "z", "x", Notion::Epr).unwrap();
    assert_eq!(r.conclusion, Conclusion::PreconditionFailed);
    assert_eq!(r.step(1).verdict, StepVerdict::Failed);
}

#[test]
fn bohr_witness_examples() {
    let w = bohr_disturbance_witness().unwrap();
    assert!(w.holds());
    assert!(w.bohr.residual("x").unwrap() >= 0.1);

    let r0 = CMatrix::diag_real(&[0.9, 0.1]);
    let r1 = projector(&ket_plus());
    let cq = states::classical_quantum(&CMatrix::identity(2), &[0.5, 0.5], &[r0, r1]).unwrap();
    let alice = vec![
        AliceSetting::new(
            "z",
            "z",
            Instrument::measure_and_reprepare(&CMatrix::identity(2), &Povm::sigma_z()),
        ),
        AliceSetting::lueders("x", "x", &Povm::sigma_x()),
    ];
    let sc = QuantumScenario::new(cq.clone(), alice, zx()).with_recovery(pauli_catalog());
    let w = bohr_witness_for(sc, 0).unwrap();
    assert!(w.epr_nondisturbing && !w.holds());
    assert!(is_alice_concordant(&cq).verdict);

    let w = bohr_witness_for(epr_analog(8, 0), 0).unwrap();
    assert!(w.holds());
}
