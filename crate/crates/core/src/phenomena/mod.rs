//! Operational layer: frequency-table phenomena, hidden-variable theories,
//! the EPR criteria, Bohr disturbance, and the EPR-argument pipeline.

mod argument;
mod bohr;
mod theory;

pub use argument::{
    bohr_disturbance_witness, bohr_witness_for, epr_analog, epr_argument, pauli_catalog,
    ArgumentReport, BohrWitness, Conclusion, StepRecord, StepVerdict,
};
pub use bohr::{
    bohr_no_disturbance, BohrVerdict, Certification, QuantityResidual, RecoveryChoice, BOHR_TOL,
};
pub use theory::{
    proper_mixture_theory, representation_check, HiddenVariableTheory, ProductDecomposition,
};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::measure::{outcome_distribution, Instrument, JointTable, Povm};
use crate::qcore::BipartiteState;

/// Tolerance for exact (Born-rule generated) frequency comparisons.
pub const FREQUENCY_TOL: f64 = 1e-9;
/// Outcomes with marginal probability below this are ignored when conditioning.
pub const MARGINAL_FLOOR: f64 = 1e-12;

/// One measurement setting: a label, the physical quantity it measures, and its outcome count.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Setting {
    pub label: String,
    pub quantity: String,
    pub outcomes: usize,
}

impl Setting {
    pub fn new(label: impl Into<String>, quantity: impl Into<String>, outcomes: usize) -> Self {
        Self {
            label: label.into(),
            quantity: quantity.into(),
            outcomes,
        }
    }
}

/// Where a phenomenon's tables came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Supplied directly as numbers.
    Table,
    /// Born rule on a state with the listed measurements.
    BornRule {
        state: BipartiteState,
        alice: Vec<Povm>,
        bob: Vec<Povm>,
    },
}

/// Frequencies `f(A, B | a, b)` for every pair of settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Phenomenon {
    alice: Vec<Setting>,
    bob: Vec<Setting>,
    /// Indexed `a * bob.len() + b`.
    tables: Vec<JointTable>,
    provenance: Provenance,
}

impl Phenomenon {
    /// `tables[a][b]` must be an `alice[a].outcomes × bob[b].outcomes` distribution within `tol`.
    pub fn new(
        alice: Vec<Setting>,
        bob: Vec<Setting>,
        tables: Vec<Vec<JointTable>>,
        tol: f64,
    ) -> Result<Self> {
        if alice.is_empty() {
            return Err(Error::Empty("alice settings"));
        }
        if bob.is_empty() {
            return Err(Error::Empty("bob settings"));
        }
        check_unique(&alice)?;
        check_unique(&bob)?;
        if tables.len() != alice.len() {
            return Err(Error::InvalidTable(format!(
                "expected {} rows of tables, got {}",
                alice.len(),
                tables.len()
            )));
        }
        let mut flat = Vec::with_capacity(alice.len() * bob.len());
        for (a, row) in tables.into_iter().enumerate() {
            if row.len() != bob.len() {
                return Err(Error::InvalidTable(format!(
                    "setting {}: expected {} tables, got {}",
                    alice[a].label,
                    bob.len(),
                    row.len()
                )));
            }
            for (b, t) in row.into_iter().enumerate() {
                if t.rows() != alice[a].outcomes || t.cols() != bob[b].outcomes {
                    return Err(Error::InvalidTable(format!(
                        "table ({}, {}) has shape {}x{}, expected {}x{}",
                        alice[a].label,
                        bob[b].label,
                        t.rows(),
                        t.cols(),
                        alice[a].outcomes,
                        bob[b].outcomes
                    )));
                }
                // Re-validate: tables may have been built with `zeros`.
                let t = JointTable::new(t.rows(), t.cols(), t.as_slice().to_vec(), tol).map_err(
                    |e| {
                        Error::InvalidTable(format!(
                            "table ({}, {}): {e}",
                            alice[a].label, bob[b].label
                        ))
                    },
                )?;
                flat.push(t);
            }
        }
        Ok(Self {
            alice,
            bob,
            tables: flat,
            provenance: Provenance::Table,
        })
    }

    pub fn alice_settings(&self) -> &[Setting] {
        &self.alice
    }

    pub fn bob_settings(&self) -> &[Setting] {
        &self.bob
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn table(&self, a: usize, b: usize) -> &JointTable {
        &self.tables[a * self.bob.len() + b]
    }

    pub fn alice_index(&self, label: &str) -> Result<usize> {
        self.alice
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    pub fn bob_index(&self, label: &str) -> Result<usize> {
        self.bob
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    /// Bob settings belonging to quantity `b̂`; errors if there are none.
    pub fn bob_quantity(&self, quantity: &str) -> Result<Vec<usize>> {
        let v: Vec<usize> = (0..self.bob.len())
            .filter(|&b| self.bob[b].quantity == quantity)
            .collect();
        if v.is_empty() {
            return Err(Error::UnknownLabel(quantity.into()));
        }
        Ok(v)
    }

    /// Same phenomenon with Alice's and Bob's roles exchanged.
    pub fn swapped(&self) -> Self {
        let (na, nb) = (self.alice.len(), self.bob.len());
        let mut tables = Vec::with_capacity(na * nb);
        for b in 0..nb {
            for a in 0..na {
                let t = self.table(a, b);
                let mut s = JointTable::zeros(t.cols(), t.rows());
                for x in 0..t.rows() {
                    for y in 0..t.cols() {
                        s.set(y, x, t.get(x, y));
                    }
                }
                tables.push(s);
            }
        }
        Self {
            alice: self.bob.clone(),
            bob: self.alice.clone(),
            tables,
            provenance: Provenance::Table,
        }
    }
}

fn check_unique(settings: &[Setting]) -> Result<()> {
    for (i, s) in settings.iter().enumerate() {
        if s.outcomes == 0 {
            return Err(Error::InvalidTable(format!(
                "setting {} has no outcomes",
                s.label
            )));
        }
        if settings[..i].iter().any(|t| t.label == s.label) {
            return Err(Error::InvalidTable(format!(
                "duplicate setting label {}",
                s.label
            )));
        }
    }
    Ok(())
}

/// A POVM together with its setting label and quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPovm {
    pub label: String,
    pub quantity: String,
    pub povm: Povm,
}

impl LabeledPovm {
    pub fn new(label: impl Into<String>, quantity: impl Into<String>, povm: Povm) -> Self {
        Self {
            label: label.into(),
            quantity: quantity.into(),
            povm,
        }
    }

    pub fn setting(&self) -> Setting {
        Setting::new(
            self.label.clone(),
            self.quantity.clone(),
            self.povm.outcomes(),
        )
    }
}

/// Born-rule phenomenon for the given state and measurement catalogs.
pub fn phenomenon_from_state(
    state: &BipartiteState,
    alice: &[LabeledPovm],
    bob: &[LabeledPovm],
) -> Result<Phenomenon> {
    let mut tables = Vec::with_capacity(alice.len());
    for a in alice {
        let mut row = Vec::with_capacity(bob.len());
        for b in bob {
            row.push(outcome_distribution(state, &a.povm, &b.povm)?);
        }
        tables.push(row);
    }
    let mut ph = Phenomenon::new(
        alice.iter().map(LabeledPovm::setting).collect(),
        bob.iter().map(LabeledPovm::setting).collect(),
        tables,
        FREQUENCY_TOL,
    )?;
    ph.provenance = Provenance::BornRule {
        state: state.clone(),
        alice: alice.iter().map(|a| a.povm.clone()).collect(),
        bob: bob.iter().map(|b| b.povm.clone()).collect(),
    };
    Ok(ph)
}

/// Alice settings `a` and `a'` give the same joint table with every Bob setting.
pub fn settings_equivalent(ph: &Phenomenon, a: usize, a2: usize) -> bool {
    if ph.alice[a].outcomes != ph.alice[a2].outcomes {
        return false;
    }
    (0..ph.bob.len()).all(|b| ph.table(a, b).max_abs_diff(ph.table(a2, b)) <= FREQUENCY_TOL)
}

/// Bob's marginals do not depend on whether Alice uses `a` or any other setting.
pub fn epr_no_disturbance(ph: &Phenomenon, a: usize) -> bool {
    (0..ph.bob.len()).all(|b| {
        let m = ph.table(a, b).bob_marginal();
        (0..ph.alice.len()).all(|a2| {
            ph.table(a2, b)
                .bob_marginal()
                .iter()
                .zip(&m)
                .all(|(x, y)| (x - y).abs() <= FREQUENCY_TOL)
        })
    })
}

/// Every Alice outcome of nonzero probability fixes Bob's outcome for setting `b`.
pub fn predictable(ph: &Phenomenon, a: usize, b: usize) -> bool {
    let t = ph.table(a, b);
    t.alice_marginal().iter().enumerate().all(|(x, &p)| {
        p <= MARGINAL_FLOOR
            || (0..t.cols()).all(|y| {
                let c = t.get(x, y) / p;
                c <= FREQUENCY_TOL || c >= 1.0 - FREQUENCY_TOL
            })
    })
}

/// Which notion of disturbance an element-of-reality judgement uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Notion {
    Epr,
    Bohr,
}

impl core::fmt::Display for Notion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Notion::Epr => "epr",
            Notion::Bohr => "bohr",
        })
    }
}

/// Alice setting backed by an instrument, so its post-measurement states are available.
#[derive(Debug, Clone)]
pub struct AliceSetting {
    pub label: String,
    pub quantity: String,
    pub instrument: Instrument,
}

impl AliceSetting {
    pub fn new(
        label: impl Into<String>,
        quantity: impl Into<String>,
        instrument: Instrument,
    ) -> Self {
        Self {
            label: label.into(),
            quantity: quantity.into(),
            instrument,
        }
    }

    /// Projective measurement with the Lüders instrument.
    pub fn lueders(label: impl Into<String>, quantity: impl Into<String>, povm: &Povm) -> Self {
        Self::new(label, quantity, Instrument::lueders(povm))
    }

    pub fn labeled_povm(&self) -> LabeledPovm {
        LabeledPovm::new(
            self.label.clone(),
            self.quantity.clone(),
            self.instrument.povm(),
        )
    }
}

/// A state with instrument-level settings for Alice, POVM settings for Bob, and the
/// catalog of follow-up measurements Alice may use to recover after a first measurement.
#[derive(Debug, Clone)]
pub struct QuantumScenario {
    pub state: BipartiteState,
    pub alice: Vec<AliceSetting>,
    pub bob: Vec<LabeledPovm>,
    pub recovery: Vec<Povm>,
    /// Optional explicit decomposition used to build a proper-mixture theory.
    pub decomposition: Option<ProductDecomposition>,
}

impl QuantumScenario {
    /// Recovery catalog defaults to Alice's own measurements.
    pub fn new(state: BipartiteState, alice: Vec<AliceSetting>, bob: Vec<LabeledPovm>) -> Self {
        let recovery = alice.iter().map(|a| a.instrument.povm()).collect();
        Self {
            state,
            alice,
            bob,
            recovery,
            decomposition: None,
        }
    }

    pub fn with_recovery(mut self, recovery: Vec<Povm>) -> Self {
        self.recovery = recovery;
        self
    }

    pub fn with_decomposition(mut self, decomposition: ProductDecomposition) -> Self {
        self.decomposition = Some(decomposition);
        self
    }

    pub fn alice_povms(&self) -> Vec<LabeledPovm> {
        self.alice.iter().map(AliceSetting::labeled_povm).collect()
    }

    pub fn phenomenon(&self) -> Result<Phenomenon> {
        phenomenon_from_state(&self.state, &self.alice_povms(), &self.bob)
    }

    /// Bohr check of Alice's setting `a`, against all of Alice's settings as the quantity catalog.
    pub fn bohr_check(&self, a: usize) -> Result<BohrVerdict> {
        let quantities = self.alice_povms();
        let bob: Vec<Povm> = self.bob.iter().map(|b| b.povm.clone()).collect();
        bohr_no_disturbance(
            &self.state,
            &self.alice[a].instrument,
            &quantities,
            &self.recovery,
            &bob,
        )
    }
}

/// Outcome of an element-of-reality judgement.
#[derive(Debug, Clone, PartialEq)]
pub struct RealityVerdict {
    pub verdict: bool,
    /// Alice setting that both predicts the quantity and does not disturb.
    pub witness: Option<String>,
    pub evidence: String,
}

/// Is Bob's quantity `b̂` an element of reality: some Alice setting predicts it with
/// certainty and does not disturb Bob under `notion`?
pub fn element_of_reality(
    scenario: &QuantumScenario,
    quantity: &str,
    notion: Notion,
) -> Result<RealityVerdict> {
    let ph = scenario.phenomenon()?;
    let group = ph.bob_quantity(quantity)?;
    let mut notes: Vec<String> = Vec::new();
    for a in 0..ph.alice.len() {
        let label = &ph.alice[a].label;
        if !group.iter().all(|&b| predictable(&ph, a, b)) {
            continue;
        }
        let (ok, why) = match notion {
            Notion::Epr => {
                let ok = epr_no_disturbance(&ph, a);
                (
                    ok,
                    if ok {
                        format!("{label} predicts {quantity}; Bob's marginals independent of Alice's setting")
                    } else {
                        format!("{label} signals to Bob")
                    },
                )
            }
            Notion::Bohr => match scenario.bohr_check(a)? {
                BohrVerdict::Nondisturbing { .. } => (
                    true,
                    format!(
                        "{label} predicts {quantity}; every catalog quantity recoverable after it"
                    ),
                ),
                BohrVerdict::Disturbing { residuals, .. } => {
                    let worst = residuals
                        .iter()
                        .max_by(|x, y| x.residual.total_cmp(&y.residual));
                    let w = worst.map_or(String::new(), |r| {
                        format!(
                            " (best recovery for {} leaves residual {:.4})",
                            r.quantity, r.residual
                        )
                    });
                    (
                        false,
                        format!("{label} predicts {quantity} but disturbs in the Bohr sense{w}"),
                    )
                }
            },
        };
        if ok {
            return Ok(RealityVerdict {
                verdict: true,
                witness: Some(label.clone()),
                evidence: why,
            });
        }
        notes.push(why);
    }
    let evidence = if notes.is_empty() {
        format!("no Alice setting predicts {quantity} with certainty")
    } else {
        notes.join("; ")
    };
    Ok(RealityVerdict {
        verdict: false,
        witness: None,
        evidence,
    })
}

#[cfg(test)]
mod tests;
