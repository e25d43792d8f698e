//! The EPR incompleteness argument as an executable pipeline, and the witness that
//! EPR's and Bohr's notions of disturbance differ.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{
    element_of_reality, epr_no_disturbance, predictable, proper_mixture_theory,
    representation_check, AliceSetting, BohrVerdict, HiddenVariableTheory, LabeledPovm, Notion,
    Phenomenon, ProductDecomposition, QuantumScenario,
};
use crate::discord::is_consonant;
use crate::error::Result;
use crate::measure::Povm;
use crate::qcore::{states, BipartiteState, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StepVerdict {
    Verified,
    Failed,
    NotReached,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepRecord {
    /// 1 to 7.
    pub step: u8,
    pub claim: String,
    pub verdict: StepVerdict,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Conclusion {
    /// Every theory examined fails to represent an established element of reality.
    Incomplete { one_observable: bool },
    /// The chain stops at `step`.
    Blocked { step: u8 },
    /// Elements of reality exist but some theory represents them all.
    NoContradiction,
    /// No Alice setting predicts the first quantity.
    PreconditionFailed,
}

impl core::fmt::Display for Conclusion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Conclusion::Incomplete {
                one_observable: false,
            } => f.write_str("incomplete"),
            Conclusion::Incomplete {
                one_observable: true,
            } => f.write_str("incomplete (one-observable argument)"),
            Conclusion::Blocked { step: 3 } => {
                f.write_str("argument blocked at element-of-reality")
            }
            Conclusion::Blocked { step } => write!(f, "argument blocked at step {step}"),
            Conclusion::NoContradiction => f.write_str("no contradiction with completeness"),
            Conclusion::PreconditionFailed => f.write_str("required correlations absent"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArgumentReport {
    pub notion: Notion,
    pub quantities: [String; 2],
    /// Steps (i) to (vii) for both quantities.
    pub steps: Vec<StepRecord>,
    /// Steps (i) to (iii) and (v) to (vii) using only the first quantity.
    pub one_observable: Vec<StepRecord>,
    /// Labels of the theories the completeness assumption was tested against.
    pub theories: Vec<String>,
    pub conclusion: Conclusion,
}

impl ArgumentReport {
    pub fn step(&self, n: u8) -> &StepRecord {
        &self.steps[usize::from(n) - 1]
    }
}

/// `d`-dimensional analog of the EPR state, `d^{-1/2} Σ_j |j>|j ⊕ shift>`. Quantity `q`
/// is the computational basis and `p` the discrete Fourier basis, on both sides.
pub fn epr_analog(d: usize, shift: usize) -> QuantumScenario {
    let q = Povm::computational(d);
    let p = Povm::projective(&states::fourier_basis(d));
    QuantumScenario::new(
        states::max_entangled(d, shift),
        vec![
            AliceSetting::lueders("q", "q", &q),
            AliceSetting::lueders("p", "p", &p),
        ],
        vec![LabeledPovm::new("q", "q", q), LabeledPovm::new("p", "p", p)],
    )
}

struct Candidate {
    label: String,
    theory: HiddenVariableTheory,
}

fn cq_decomposition(state: &BipartiteState, basis: &CMatrix) -> Option<ProductDecomposition> {
    let db = state.dim_beta();
    let (mut w, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..basis.cols() {
        let v = basis.column(j);
        let pi = CMatrix::outer(&v);
        let block = CMatrix::from_fn(db, db, |k, l| {
            let mut acc = crate::qcore::C64::new(0.0, 0.0);
            for x in 0..state.dim_alpha() {
                for y in 0..state.dim_alpha() {
                    acc += v[x].conj() * state.matrix()[(x * db + k, y * db + l)] * v[y];
                }
            }
            acc
        })
        .hermitian_part();
        let p = block.trace().re;
        if p > 1e-14 {
            w.push(p);
            a.push(pi);
            b.push(block.scale_real(1.0 / p));
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    ProductDecomposition::new(w, a, b).ok()
}

/// Operational quantum theories consistent with the preparation: the single-λ theory
/// always, plus a proper-mixture theory when the state is mixed and a decomposition is
/// available (supplied, or read off a consonance/concordance certificate).
fn theories(scenario: &QuantumScenario, ph: &Phenomenon) -> Vec<Candidate> {
    let mut out = vec![Candidate {
        label: "single hidden variable (P = f)".into(),
        theory: HiddenVariableTheory::operational(ph),
    }];
    if scenario.state.purity() >= 1.0 - 1e-9 {
        return out;
    }
    let alice = scenario.alice_povms();
    let mut decomposition = scenario
        .decomposition
        .clone()
        .map(|d| ("supplied decomposition", d));
    if decomposition.is_none() {
        let c = is_consonant(&scenario.state);
        if c.verdict {
            let parts = c.decomposition();
            let w = parts.iter().map(|p| p.0).collect();
            let a = parts.iter().map(|p| p.1.clone()).collect();
            let b = parts.iter().map(|p| p.2.clone()).collect();
            decomposition = ProductDecomposition::new(w, a, b)
                .ok()
                .map(|d| ("consonant decomposition", d));
        } else if c.alice.verdict {
            decomposition = cq_decomposition(&scenario.state, &c.alice.basis)
                .map(|d| ("classical-quantum decomposition", d));
        }
    }
    if let Some((label, d)) = decomposition {
        if let Ok(theory) = proper_mixture_theory(&scenario.state, &d, &alice, &scenario.bob) {
            out.push(Candidate {
                label: format!("proper mixture over the {label}"),
                theory,
            });
        }
    }
    out
}

fn record(step: u8, claim: String, ok: Option<bool>, evidence: String) -> StepRecord {
    let verdict = match ok {
        Some(true) => StepVerdict::Verified,
        Some(false) => StepVerdict::Failed,
        None => StepVerdict::NotReached,
    };
    StepRecord {
        step,
        claim,
        verdict,
        evidence,
    }
}

fn not_reached(step: u8, claim: String) -> StepRecord {
    record(step, claim, None, String::new())
}

fn predicting_setting(ph: &Phenomenon, quantity: &str) -> Result<Option<usize>> {
    let group = ph.bob_quantity(quantity)?;
    Ok((0..ph.alice_settings().len()).find(|&a| group.iter().all(|&b| predictable(ph, a, b))))
}

/// Steps (v) to (vii) for the established quantities; returns the records and whether a
/// contradiction was reached.
fn completeness_steps(
    candidates: &[Candidate],
    established: &[&str],
) -> Result<(Vec<StepRecord>, bool)> {
    let names = established.join(", ");
    let labels: Vec<&str> = candidates.iter().map(|c| c.label.as_str()).collect();
    let mut steps = vec![
        record(
            5,
            "assume completeness of every operational theory of the preparation".into(),
            Some(true),
            format!("theories: {}", labels.join("; ")),
        ),
        record(
            6,
            format!("completeness requires each theory to represent {names}"),
            Some(true),
            "elements of reality established above".into(),
        ),
    ];
    let mut failures = Vec::new();
    let mut survivors = Vec::new();
    for c in candidates {
        let mut missing = Vec::new();
        for q in established {
            if !representation_check(&c.theory, q)? {
                missing.push(*q);
            }
        }
        if missing.is_empty() {
            survivors.push(c.label.clone());
        } else {
            failures.push(format!(
                "{} does not represent {}",
                c.label,
                missing.join(", ")
            ));
        }
    }
    let contradiction = survivors.is_empty();
    let evidence = if contradiction {
        failures.join("; ")
    } else {
        format!("represented by: {}", survivors.join("; "))
    };
    steps.push(record(
        7,
        format!("some theory fails to represent {names}, contradicting completeness"),
        Some(contradiction),
        evidence,
    ));
    Ok((steps, contradiction))
}

/// Runs the argument with `q` and `p` as Bob's two quantities under `notion`.
pub fn epr_argument(
    scenario: &QuantumScenario,
    q: &str,
    p: &str,
    notion: Notion,
) -> Result<ArgumentReport> {
    let ph = scenario.phenomenon()?;
    ph.bob_quantity(p)?;
    let candidates = theories(scenario, &ph);
    let theory_labels = candidates.iter().map(|c| c.label.clone()).collect();

    let mut steps = Vec::with_capacity(7);
    let claim1 = format!("some Alice setting predicts {q} with certainty");
    let claim2 = format!("that setting does not disturb Bob ({notion} notion)");
    let claim3 = format!("{q} is an element of reality");
    let claim4 = format!("{p} is an element of reality");
    let report = |steps: Vec<StepRecord>, one: Vec<StepRecord>, conclusion| ArgumentReport {
        notion,
        quantities: [q.to_string(), p.to_string()],
        steps,
        one_observable: one,
        theories: theory_labels,
        conclusion,
    };

    let Some(aq) = predicting_setting(&ph, q)? else {
        steps.push(record(
            1,
            claim1,
            Some(false),
            format!("no Alice setting yields 0/1 conditionals for {q}"),
        ));
        for (n, c) in [(2, claim2), (3, claim3), (4, claim4)] {
            steps.push(not_reached(n, c));
        }
        for n in 5..=7 {
            steps.push(not_reached(n, String::new()));
        }
        let one = steps.iter().filter(|s| s.step != 4).cloned().collect();
        return Ok(report(steps, one, Conclusion::PreconditionFailed));
    };
    let aq_label = ph.alice_settings()[aq].label.clone();
    steps.push(record(
        1,
        claim1,
        Some(true),
        format!("Alice's {aq_label} fixes Bob's {q} outcome"),
    ));

    let (undisturbed, why) = match notion {
        Notion::Epr => {
            let ok = epr_no_disturbance(&ph, aq);
            (
                ok,
                if ok {
                    "Bob's marginals are the same for every Alice setting".to_string()
                } else {
                    "Bob's marginals depend on Alice's setting".into()
                },
            )
        }
        Notion::Bohr => match scenario.bohr_check(aq)? {
            BohrVerdict::Nondisturbing { .. } => (
                true,
                "every catalog quantity is recoverable after it".into(),
            ),
            BohrVerdict::Disturbing {
                residuals,
                certification,
            } => {
                let parts: Vec<String> = residuals
                    .iter()
                    .map(|r| format!("{}: {:.4}", r.quantity, r.residual))
                    .collect();
                (
                    false,
                    format!(
                        "best recovery residuals {}; catalog exhausted: {}; state Alice-concordant: {}",
                        parts.join(", "),
                        certification.catalog_exhausted,
                        certification.state_alice_concordant
                    ),
                )
            }
        },
    };
    steps.push(record(2, claim2, Some(undisturbed), why));

    let eq = element_of_reality(scenario, q, notion)?;
    steps.push(record(3, claim3, Some(eq.verdict), eq.evidence.clone()));
    if !eq.verdict {
        steps.push(not_reached(4, claim4));
        for n in 5..=7 {
            steps.push(not_reached(n, String::new()));
        }
        let one = steps.iter().filter(|s| s.step != 4).cloned().collect();
        return Ok(report(steps, one, Conclusion::Blocked { step: 3 }));
    }

    let mut one: Vec<StepRecord> = steps.clone();
    let (tail, one_contradiction) = completeness_steps(&candidates, &[q])?;
    one.extend(tail);

    let ep = element_of_reality(scenario, p, notion)?;
    steps.push(record(4, claim4, Some(ep.verdict), ep.evidence));
    let conclusion = if ep.verdict {
        let (tail, contradiction) = completeness_steps(&candidates, &[q, p])?;
        steps.extend(tail);
        if contradiction {
            Conclusion::Incomplete {
                one_observable: false,
            }
        } else if one_contradiction {
            Conclusion::Incomplete {
                one_observable: true,
            }
        } else {
            Conclusion::NoContradiction
        }
    } else {
        for n in 5..=7 {
            steps.push(not_reached(n, String::new()));
        }
        if one_contradiction {
            Conclusion::Incomplete {
                one_observable: true,
            }
        } else {
            Conclusion::NoContradiction
        }
    };
    Ok(report(steps, one, conclusion))
}

/// Setting that is EPR-nondisturbing yet disturbing in Bohr's sense.
#[derive(Debug, Clone)]
pub struct BohrWitness {
    pub scenario: QuantumScenario,
    pub setting: usize,
    pub epr_nondisturbing: bool,
    pub bohr: BohrVerdict,
}

impl BohrWitness {
    pub fn holds(&self) -> bool {
        self.epr_nondisturbing && self.bohr.is_disturbing()
    }
}

pub fn bohr_witness_for(scenario: QuantumScenario, setting: usize) -> Result<BohrWitness> {
    let ph = scenario.phenomenon()?;
    let epr_nondisturbing = epr_no_disturbance(&ph, setting);
    let bohr = scenario.bohr_check(setting)?;
    Ok(BohrWitness {
        scenario,
        setting,
        epr_nondisturbing,
        bohr,
    })
}

/// Pauli measurements and their outcome-swapped versions.
pub fn pauli_catalog() -> Vec<Povm> {
    let mut out = Vec::new();
    for p in [Povm::sigma_x(), Povm::sigma_y(), Povm::sigma_z()] {
        let flipped = p.relabeled(&[1, 0]).expect("two outcomes");
        out.push(p);
        out.push(flipped);
    }
    out
}

/// Φ⁺ with Alice measuring σ_z (Lüders) against the catalog {σ_z, σ_x}.
pub fn bohr_disturbance_witness() -> Result<BohrWitness> {
    let scenario = QuantumScenario::new(
        states::phi_plus(),
        vec![
            AliceSetting::lueders("z", "z", &Povm::sigma_z()),
            AliceSetting::lueders("x", "x", &Povm::sigma_x()),
        ],
        vec![
            LabeledPovm::new("z", "z", Povm::sigma_z()),
            LabeledPovm::new("x", "x", Povm::sigma_x()),
        ],
    )
    .with_recovery(pauli_catalog());
    bohr_witness_for(scenario, 0)
}
