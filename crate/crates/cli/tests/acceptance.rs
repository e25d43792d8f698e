//! Acceptance run: one pass/fail line per criterion, nonzero exit on any failure.

use std::process::Command;
use std::time::{Duration, Instant};

use bohrdisc_core::discord::{
    is_alice_concordant, is_consonant, min_discord, mutual_information, MinDiscord, OptimizerConfig,
};
use bohrdisc_core::measure::{outcome_distribution, Instrument, Povm};
use bohrdisc_core::nonlocal::{
    chsh_max, chsh_phenomenon, chsh_settings, local_model_lp, separability, steering_lhs_lp,
    LocalModel, Separability, SeparabilityMethod, SteeringOptions,
};
use bohrdisc_core::phenomena::{
    bohr_disturbance_witness, bohr_no_disturbance, pauli_catalog, phenomenon_from_state,
    LabeledPovm,
};
use bohrdisc_core::qcore::{eig_hermitian, states, BipartiteState, CMatrix};
use bohrdisc_core::random::{
    random_classical_quantum, random_density, random_separable, random_state, random_unitary,
    seeded,
};

type Check = Result<String, String>;

struct Report {
    failures: usize,
}

impl Report {
    fn run(&mut self, id: u8, name: &str, budget: Duration, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > budget => Err(format!(
                "{d}; exceeded {:.0} s budget",
                budget.as_secs_f64()
            )),
            o => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            self.failures += 1;
        }
        println!(
            "{tag} [{id}] {name}: {detail} ({:.2} s)",
            elapsed.as_secs_f64()
        );
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn paulis() -> Vec<LabeledPovm> {
    vec![
        LabeledPovm::new("x", "x", Povm::sigma_x()),
        LabeledPovm::new("y", "y", Povm::sigma_y()),
        LabeledPovm::new("z", "z", Povm::sigma_z()),
    ]
}

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

fn discord_values() -> Check {
    let cfg = OptimizerConfig {
        starts: 32,
        ..OptimizerConfig::default()
    };
    let r = min_discord(&states::phi_plus(), &cfg)
        .map_err(|e| e.to_string())?
        .result;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-4;
    ensure(
        close(r.mutual_information, 2.0) && close(r.j_value, 1.0) && close(r.discord, 1.0),
        || {
            format!(
                "I={:.6} J={:.6} discord={:.6}",
                r.mutual_information, r.j_value, r.discord
            )
        },
    )?;
    Ok(format!(
        "I={:.4} J={:.4} discord={:.4}",
        r.mutual_information, r.j_value, r.discord
    ))
}

fn zero_discord_agreement(suite: &[BipartiteState], minima: &mut Vec<MinDiscord>) -> Check {
    let cfg = OptimizerConfig::default();
    let mut disagreements = Vec::new();
    let mut concordant = 0;
    for (i, s) in suite.iter().enumerate() {
        let c = is_alice_concordant(s);
        let m = min_discord(s, &cfg).map_err(|e| e.to_string())?;
        if c.verdict != (m.result.discord <= 1e-5) {
            disagreements.push(i);
        }
        concordant += usize::from(c.verdict);
        minima.push(m);
    }
    ensure(disagreements.is_empty(), || {
        format!("disagreements at {disagreements:?}")
    })?;
    Ok(format!(
        "{} states, {concordant} concordant, 0 disagreements",
        suite.len()
    ))
}

fn discord_iff_disturbance(suite: &[BipartiteState], minima: &[MinDiscord]) -> Check {
    let quantities = paulis();
    let bob: Vec<Povm> = quantities.iter().map(|q| q.povm.clone()).collect();
    let mut recovery = bob.clone();
    recovery.extend(pauli_catalog());
    let mut worst_concordant: f64 = 0.0;
    let mut least_discordant = f64::INFINITY;
    for (i, s) in suite.iter().enumerate() {
        let c = is_alice_concordant(s);
        let basis = if c.verdict {
            c.basis.clone()
        } else {
            minima[i].basis.clone()
        };
        let first = Instrument::measure_and_reprepare(&basis, &Povm::projective(&basis));
        let v = bohr_no_disturbance(s, &first, &quantities, &recovery, &bob)
            .map_err(|e| e.to_string())?;
        let worst = ["x", "y", "z"]
            .iter()
            .map(|q| v.residual(q).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        if c.verdict {
            ensure(!v.is_disturbing() && worst <= 1e-9, || {
                format!("concordant state {i} residual {worst:e}")
            })?;
            worst_concordant = worst_concordant.max(worst);
        } else {
            ensure(v.is_disturbing() && worst >= 1e-3, || {
                format!("discordant state {i} residual {worst:e}")
            })?;
            least_discordant = least_discordant.min(worst);
        }
    }
    Ok(format!(
        "concordant max residual {worst_concordant:.1e}, discordant min residual {least_discordant:.4}, 0 counterexamples"
    ))
}

fn bohr_witness() -> Check {
    let w = bohr_disturbance_witness().map_err(|e| e.to_string())?;
    let x = w.bohr.residual("x").unwrap_or(0.0);
    ensure(w.epr_nondisturbing, || "EPR-disturbing".into())?;
    ensure(w.bohr.is_disturbing(), || "not Bohr-disturbing".into())?;
    ensure(x >= 0.1, || format!("x residual {x:.4}"))?;
    Ok(format!(
        "EPR-nondisturbing, Bohr-disturbing, x residual {x:.4}"
    ))
}

fn epr_demo(notion: &str) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_bohrdisc"))
        .args(["epr-demo", "--dim", "8", "--notion", notion])
        .env_remove("BOHRDISC_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || format!("exit {:?}", o.status.code()))?;
    String::from_utf8(o.stdout).map_err(|e| e.to_string())
}

fn step_verdicts(text: &str) -> Vec<(String, String)> {
    text.lines()
        .take_while(|l| !l.starts_with("one-observable"))
        .filter_map(|l| {
            let rest = l.trim_start().strip_prefix('(')?;
            let (n, tail) = rest.split_once(')')?;
            let verdict = if tail.trim_start().starts_with("not reached") {
                "not reached"
            } else {
                tail.split_whitespace().next()?
            };
            Some((n.trim().to_string(), verdict.to_string()))
        })
        .collect()
}

fn epr_pipeline() -> Check {
    let epr = epr_demo("epr")?;
    ensure(epr == epr_demo("epr")?, || {
        "epr run not deterministic".into()
    })?;
    let steps = step_verdicts(&epr);
    ensure(
        steps.len() == 7 && steps.iter().all(|(_, v)| v == "verified"),
        || format!("epr steps {steps:?}"),
    )?;
    ensure(epr.ends_with("conclusion: incomplete\n"), || {
        "epr conclusion is not incomplete".into()
    })?;
    let bohr = epr_demo("bohr")?;
    ensure(bohr == epr_demo("bohr")?, || {
        "bohr run not deterministic".into()
    })?;
    let steps = step_verdicts(&bohr);
    let halted = steps.iter().position(|(n, _)| n == "iii").is_some_and(|k| {
        steps[k].1 == "failed" && steps[k + 1..].iter().all(|(_, v)| v == "not reached")
    });
    ensure(halted, || format!("bohr steps {steps:?}"))?;
    ensure(
        bohr.ends_with("conclusion: argument blocked at element-of-reality\n"),
        || "bohr conclusion".into(),
    )?;
    Ok("epr: (i)-(vii) verified, incomplete; bohr: halts at (iii); both deterministic".into())
}

fn bell_layer() -> Check {
    let phi = states::phi_plus();
    let ph = chsh_phenomenon(&phi).map_err(|e| e.to_string())?;
    let cert = match local_model_lp(&ph).map_err(|e| e.to_string())? {
        LocalModel::Nonlocal(c) => c,
        LocalModel::Local { .. } => return Err("local model for the Bell state".into()),
    };
    let m = chsh_max(&phi).map_err(|e| e.to_string())?;
    ensure((m - 2.0 * 2f64.sqrt()).abs() <= 1e-6, || {
        format!("chsh_max {m}")
    })?;
    let mut rng = seeded(9);
    let settings = paulis();
    for i in 0..50 {
        let s = random_separable(2, 2, 1 + i % 5, &mut rng).state;
        let tables = [
            chsh_phenomenon(&s),
            phenomenon_from_state(&s, &settings, &settings),
        ];
        for ph in tables {
            let ph = ph.map_err(|e| e.to_string())?;
            match local_model_lp(&ph).map_err(|e| e.to_string())? {
                LocalModel::Local { .. } => {}
                LocalModel::Nonlocal(c) => {
                    return Err(format!("separable state {i} violation {:e}", c.violation()))
                }
            }
        }
    }
    Ok(format!(
        "Bell state infeasible (inequality value {:.4} > local bound {:.4}), chsh_max {m:.6}, 50 separable states feasible",
        cert.value, cert.local_bound
    ))
}

fn strictness_witnesses() -> Check {
    let werner = states::werner(0.6).map_err(|e| e.to_string())?;
    let sep = separability(&werner);
    ensure(sep.verdict == Separability::Entangled, || {
        format!("werner verdict {:?}", sep.verdict)
    })?;
    ensure((sep.min_pt_eigenvalue + 0.2).abs() <= 1e-6, || {
        format!("werner PT {}", sep.min_pt_eigenvalue)
    })?;
    let chsh = chsh_max(&werner).map_err(|e| e.to_string())?;
    ensure((chsh - 1.6971).abs() <= 1e-4 && chsh <= 2.0, || {
        format!("werner chsh {chsh}")
    })?;

    let sd = states::alice_discordant_example();
    let sv = separability(&sd);
    ensure(
        sv.verdict == Separability::Separable && sv.method == SeparabilityMethod::Ppt,
        || {
            format!(
                "separable example verdict {:?} by {:?}",
                sv.verdict, sv.method
            )
        },
    )?;
    let d = min_discord(&sd, &OptimizerConfig::default())
        .map_err(|e| e.to_string())?
        .result
        .discord;
    ensure(d > 0.05, || format!("separable example discord {d}"))?;

    let cc = states::classically_correlated();
    ensure(is_consonant(&cc).verdict, || {
        "classically correlated state not consonant".into()
    })?;
    let mi = mutual_information(&cc).map_err(|e| e.to_string())?;
    ensure((mi - 1.0).abs() <= 1e-6, || {
        format!("mutual information {mi}")
    })?;
    Ok(format!(
        "werner PT {:.4}, chsh {chsh:.4}; separable discord {d:.4}; consonant MI {mi:.4}",
        sep.min_pt_eigenvalue
    ))
}

fn no_signalling() -> Result<(), String> {
    let mut rng = seeded(31);
    for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for _ in 0..10 {
            let s =
                BipartiteState::new(da, db, random_density(da * db, da * db, &mut rng)).unwrap();
            let bob = Povm::projective(&random_unitary(db, &mut rng));
            let reference = outcome_distribution(&s, &Povm::trivial(da), &bob)
                .map_err(|e| e.to_string())?
                .bob_marginal();
            for _ in 0..3 {
                let alice = Povm::projective(&random_unitary(da, &mut rng));
                let m = outcome_distribution(&s, &alice, &bob)
                    .map_err(|e| e.to_string())?
                    .bob_marginal();
                let gap = m
                    .iter()
                    .zip(&reference)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                ensure(gap < 1e-9, || format!("Bob marginal shifted by {gap:e}"))?;
            }
        }
    }
    Ok(())
}

fn discord_invariants() -> Result<(), String> {
    let cfg = OptimizerConfig::default();
    let mut rng = seeded(32);
    for s in mixed_rank_suite(24, 33) {
        let d = min_discord(&s, &cfg)
            .map_err(|e| e.to_string())?
            .result
            .discord;
        let mi = mutual_information(&s).map_err(|e| e.to_string())?;
        ensure(d >= -1e-7 && d <= mi + 1e-7, || {
            format!("discord {d:e} outside [0, {mi}]")
        })?;
        let (u, v) = (random_unitary(2, &mut rng), random_unitary(2, &mut rng));
        let t = s.apply_local_unitaries(&u, &v).map_err(|e| e.to_string())?;
        let dt = min_discord(&t, &cfg)
            .map_err(|e| e.to_string())?
            .result
            .discord;
        ensure((d - dt).abs() < 1e-5, || {
            format!("local unitary changed discord {d} -> {dt}")
        })?;
    }
    Ok(())
}

fn eigen_residuals() -> Result<(), String> {
    let mut rng = seeded(34);
    for n in 2..9 {
        for _ in 0..10 {
            let m = random_density(n, n, &mut rng);
            let e = eig_hermitian(&m).map_err(|e| e.to_string())?;
            let r = e.reconstruct().distance(&m);
            let o = e
                .vectors
                .adjoint()
                .matmul(&e.vectors)
                .distance(&CMatrix::identity(n));
            ensure(r < 1e-9 && o < 1e-9, || {
                format!("n={n}: reconstruction {r:e}, orthogonality {o:e}")
            })?;
        }
    }
    Ok(())
}

fn hierarchy_monotone() -> Result<(), String> {
    let cfg = OptimizerConfig::default();
    let opts = SteeringOptions::default();
    for (i, s) in mixed_rank_suite(200, 7).iter().enumerate() {
        let nonlocal = !local_model_lp(&chsh_phenomenon(s).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .is_local();
        let set = chsh_settings(s).map_err(|e| e.to_string())?;
        let alice: Vec<Povm> = set.alice.iter().map(|&n| Povm::spin(n)).collect();
        let steerable = steering_lhs_lp(s, &alice, &opts)
            .map_err(|e| e.to_string())?
            .is_steerable();
        ensure(!nonlocal || steerable, || {
            format!("state {i}: Bell-nonlocal but not steerable")
        })?;
        let sep = separability(s).verdict;
        ensure(!steerable || sep != Separability::Separable, || {
            format!("state {i}: steerable but separable")
        })?;
        if sep == Separability::Entangled {
            let d = min_discord(s, &cfg)
                .map_err(|e| e.to_string())?
                .result
                .discord;
            ensure(d > 1e-5, || {
                format!("state {i}: entangled with discord {d:e}")
            })?;
        }
    }
    Ok(())
}

fn invariant_suites() -> Check {
    no_signalling().map_err(|e| format!("no-signalling: {e}"))?;
    discord_invariants().map_err(|e| format!("discord: {e}"))?;
    eigen_residuals().map_err(|e| format!("eigendecomposition: {e}"))?;
    hierarchy_monotone().map_err(|e| format!("hierarchy: {e}"))?;
    Ok("no-signalling, discord bounds, local-unitary invariance, eigen residuals, hierarchy monotonicity".into())
}

fn main() {
    let mut report = Report { failures: 0 };
    let secs = Duration::from_secs;
    report.run(1, "discord of the Bell state", secs(5), discord_values);
    let suite = discord_suite();
    let mut minima = Vec::new();
    report.run(2, "zero-discord agreement", secs(120), || {
        zero_discord_agreement(&suite, &mut minima)
    });
    report.run(3, "discord iff Bohr disturbance", secs(120), || {
        ensure(minima.len() == suite.len(), || {
            "criterion 2 did not complete".into()
        })?;
        discord_iff_disturbance(&suite, &minima)
    });
    report.run(
        4,
        "Bohr disturbance without EPR disturbance",
        secs(10),
        bohr_witness,
    );
    report.run(5, "EPR pipeline", secs(30), epr_pipeline);
    report.run(6, "Bell layer", secs(60), bell_layer);
    report.run(
        7,
        "hierarchy strictness witnesses",
        secs(60),
        strictness_witnesses,
    );
    report.run(8, "invariant suites", secs(300), invariant_suites);
    if report.failures > 0 {
        println!("{} criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
