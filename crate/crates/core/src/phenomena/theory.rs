use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{LabeledPovm, Phenomenon, Setting, FREQUENCY_TOL};
use crate::error::{Error, Result};
use crate::measure::JointTable;
use crate::qcore::{validate_density, BipartiteState, CMatrix};

/// Finite hidden-variable theory: weights `μ(λ)` and conditionals `P(A, B | a, b, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenVariableTheory {
    alice: Vec<Setting>,
    bob: Vec<Setting>,
    lambdas: Vec<String>,
    weights: Vec<f64>,
    /// `conditionals[λ][a * bob.len() + b]`.
    conditionals: Vec<Vec<JointTable>>,
}

impl HiddenVariableTheory {
    pub fn new(
        alice: Vec<Setting>,
        bob: Vec<Setting>,
        lambdas: Vec<String>,
        weights: Vec<f64>,
        conditionals: Vec<Vec<JointTable>>,
    ) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::Empty("hidden variables"));
        }
        if weights.len() != lambdas.len() || conditionals.len() != lambdas.len() {
            return Err(Error::DimensionMismatch {
                expected: lambdas.len(),
                found: weights.len().min(conditionals.len()),
            });
        }
        if weights.iter().any(|&w| w.is_nan() || w < -FREQUENCY_TOL) {
            return Err(Error::InvalidTable(
                "negative hidden-variable weight".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-7 {
            return Err(Error::InvalidTable(format!(
                "hidden-variable weights sum to {total}"
            )));
        }
        for tables in &conditionals {
            if tables.len() != alice.len() * bob.len() {
                return Err(Error::DimensionMismatch {
                    expected: alice.len() * bob.len(),
                    found: tables.len(),
                });
            }
            for (i, t) in tables.iter().enumerate() {
                let (a, b) = (i / bob.len(), i % bob.len());
                if t.rows() != alice[a].outcomes || t.cols() != bob[b].outcomes {
                    return Err(Error::InvalidTable(format!(
                        "conditional table ({a}, {b}) has the wrong shape"
                    )));
                }
                JointTable::new(t.rows(), t.cols(), t.as_slice().to_vec(), 1e-7)?;
            }
        }
        Ok(Self {
            alice,
            bob,
            lambdas,
            weights,
            conditionals,
        })
    }

    /// The theory with a single `λ` whose conditionals are the phenomenon itself.
    pub fn operational(ph: &Phenomenon) -> Self {
        let (na, nb) = (ph.alice_settings().len(), ph.bob_settings().len());
        let tables = (0..na * nb)
            .map(|i| ph.table(i / nb, i % nb).clone())
            .collect();
        Self {
            alice: ph.alice_settings().to_vec(),
            bob: ph.bob_settings().to_vec(),
            lambdas: alloc::vec!["operational".into()],
            weights: alloc::vec![1.0],
            conditionals: alloc::vec![tables],
        }
    }

    /// Mixture of deterministic strategies; each strategy gives one outcome per Alice
    /// setting and one per Bob setting.
    pub fn deterministic(
        alice: Vec<Setting>,
        bob: Vec<Setting>,
        strategies: &[(Vec<usize>, Vec<usize>)],
        weights: Vec<f64>,
    ) -> Result<Self> {
        let mut lambdas = Vec::with_capacity(strategies.len());
        let mut conditionals = Vec::with_capacity(strategies.len());
        for (sa, sb) in strategies {
            if sa.len() != alice.len() || sb.len() != bob.len() {
                return Err(Error::DimensionMismatch {
                    expected: alice.len(),
                    found: sa.len(),
                });
            }
            let mut tables = Vec::with_capacity(alice.len() * bob.len());
            for (a, &x) in sa.iter().enumerate() {
                for (b, &y) in sb.iter().enumerate() {
                    if x >= alice[a].outcomes || y >= bob[b].outcomes {
                        return Err(Error::InvalidOutcome {
                            outcome: x.max(y),
                            count: alice[a].outcomes.min(bob[b].outcomes),
                        });
                    }
                    let mut t = JointTable::zeros(alice[a].outcomes, bob[b].outcomes);
                    t.set(x, y, 1.0);
                    tables.push(t);
                }
            }
            lambdas.push(format!("A={sa:?} B={sb:?}"));
            conditionals.push(tables);
        }
        Self::new(alice, bob, lambdas, weights, conditionals)
    }

    pub fn alice_settings(&self) -> &[Setting] {
        &self.alice
    }

    pub fn bob_settings(&self) -> &[Setting] {
        &self.bob
    }

    pub fn lambdas(&self) -> &[String] {
        &self.lambdas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn conditional(&self, lambda: usize, a: usize, b: usize) -> &JointTable {
        &self.conditionals[lambda][a * self.bob.len() + b]
    }

    /// `Σ_λ μ(λ) P(A, B | a, b, λ)`.
    pub fn predicted(&self, a: usize, b: usize) -> JointTable {
        let t0 = self.conditional(0, a, b);
        let mut t = JointTable::zeros(t0.rows(), t0.cols());
        for (l, &w) in self.weights.iter().enumerate() {
            t.add_scaled(self.conditional(l, a, b), w);
        }
        t
    }

    /// Largest entrywise deviation from `ph`; infinite if the setting catalogs differ.
    pub fn reproduction_error(&self, ph: &Phenomenon) -> f64 {
        if self.alice != ph.alice_settings() || self.bob != ph.bob_settings() {
            return f64::INFINITY;
        }
        let mut err: f64 = 0.0;
        for a in 0..self.alice.len() {
            for b in 0..self.bob.len() {
                err = err.max(self.predicted(a, b).max_abs_diff(ph.table(a, b)));
            }
        }
        err
    }

    pub fn reproduces(&self, ph: &Phenomenon, tol: f64) -> bool {
        self.reproduction_error(ph) <= tol
    }
}

/// Does the theory assign Bob's quantity `b̂` a definite value for every `λ`?
pub fn representation_check(theory: &HiddenVariableTheory, quantity: &str) -> Result<bool> {
    let group: Vec<usize> = (0..theory.bob.len())
        .filter(|&b| theory.bob[b].quantity == quantity)
        .collect();
    if group.is_empty() {
        return Err(Error::UnknownLabel(quantity.into()));
    }
    for l in 0..theory.lambdas.len() {
        if theory.weights[l] <= super::MARGINAL_FLOOR {
            continue;
        }
        for &b in &group {
            for a in 0..theory.alice.len() {
                let m = theory.conditional(l, a, b).bob_marginal();
                if m.iter()
                    .any(|&p| p > FREQUENCY_TOL && p < 1.0 - FREQUENCY_TOL)
                {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Explicit decomposition `Σ_k p(k) ρ_k^α ⊗ ρ_k^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDecomposition {
    pub weights: Vec<f64>,
    pub alpha: Vec<CMatrix>,
    pub beta: Vec<CMatrix>,
}

impl ProductDecomposition {
    pub fn new(weights: Vec<f64>, alpha: Vec<CMatrix>, beta: Vec<CMatrix>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("decomposition"));
        }
        if alpha.len() != weights.len() || beta.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: alpha.len().min(beta.len()),
            });
        }
        let (da, db) = (alpha[0].rows(), beta[0].rows());
        for (a, b) in alpha.iter().zip(&beta) {
            validate_density(a, da)?;
            validate_density(b, db)?;
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0)
            || (weights.iter().sum::<f64>() - 1.0).abs() > FREQUENCY_TOL
        {
            return Err(Error::InvalidTable(
                "decomposition weights are not a probability vector".into(),
            ));
        }
        Ok(Self {
            weights,
            alpha,
            beta,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.alpha[0].rows(), self.beta[0].rows())
    }

    pub fn matrix(&self) -> CMatrix {
        let (da, db) = self.dims();
        let mut rho = CMatrix::zeros(da * db, da * db);
        for k in 0..self.weights.len() {
            rho = &rho
                + &self.alpha[k]
                    .kron(&self.beta[k])
                    .scale_real(self.weights[k]);
        }
        rho
    }

    /// Frobenius distance from the state.
    pub fn residual(&self, state: &BipartiteState) -> f64 {
        if self.dims() != state.dims() {
            return f64::INFINITY;
        }
        self.matrix().distance(state.matrix())
    }
}

/// Reads the decomposition index as a hidden variable: `P(A, B | a, b, k)` is the Born
/// rule on `ρ_k^α ⊗ ρ_k^β`.
pub fn proper_mixture_theory(
    state: &BipartiteState,
    decomposition: &ProductDecomposition,
    alice: &[LabeledPovm],
    bob: &[LabeledPovm],
) -> Result<HiddenVariableTheory> {
    let residual = decomposition.residual(state);
    if residual.is_nan() || residual > FREQUENCY_TOL {
        return Err(Error::DecompositionMismatch { residual });
    }
    let (da, db) = state.dims();
    for a in alice {
        if a.povm.dim() != da {
            return Err(Error::DimensionMismatch {
                expected: da,
                found: a.povm.dim(),
            });
        }
    }
    for b in bob {
        if b.povm.dim() != db {
            return Err(Error::DimensionMismatch {
                expected: db,
                found: b.povm.dim(),
            });
        }
    }
    let mut conditionals = Vec::with_capacity(decomposition.weights.len());
    for k in 0..decomposition.weights.len() {
        let mut tables = Vec::with_capacity(alice.len() * bob.len());
        for a in alice {
            let pa: Vec<f64> = a
                .povm
                .effects()
                .iter()
                .map(|e| e.trace_product(&decomposition.alpha[k]).re.max(0.0))
                .collect();
            for b in bob {
                let pb: Vec<f64> = b
                    .povm
                    .effects()
                    .iter()
                    .map(|f| f.trace_product(&decomposition.beta[k]).re.max(0.0))
                    .collect();
                let mut t = JointTable::zeros(pa.len(), pb.len());
                for (x, &p) in pa.iter().enumerate() {
                    for (y, &q) in pb.iter().enumerate() {
                        t.set(x, y, p * q);
                    }
                }
                tables.push(t);
            }
        }
        conditionals.push(tables);
    }
    HiddenVariableTheory::new(
        alice.iter().map(LabeledPovm::setting).collect(),
        bob.iter().map(LabeledPovm::setting).collect(),
        (0..decomposition.weights.len())
            .map(|k| format!("k={k}"))
            .collect(),
        decomposition.weights.clone(),
        conditionals,
    )
}
