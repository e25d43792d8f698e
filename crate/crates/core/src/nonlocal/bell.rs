//! Local hidden-variable models as a linear program over deterministic strategies.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp::{solve_feasibility, Constraints, LpOutcome};
use crate::phenomena::{HiddenVariableTheory, Phenomenon};

/// Largest number of deterministic strategies the dense LP accepts.
pub const MAX_STRATEGIES: usize = 20_000;
/// Accepted deviation between a local model and the phenomenon.
pub const LOCAL_MODEL_TOL: f64 = 1e-7;

/// Linear inequality `Σ c(a,b,A,B) f(A,B|a,b) <= local_bound` obeyed by every local
/// model and violated by the phenomenon.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BellCertificate {
    /// `coefficients[a * n_bob + b]` is a row-major `A × B` array.
    pub coefficients: Vec<Vec<f64>>,
    pub local_bound: f64,
    /// Value of the left-hand side on the phenomenon.
    pub value: f64,
}

impl BellCertificate {
    pub fn violation(&self) -> f64 {
        self.value - self.local_bound
    }
}

#[derive(Debug, Clone)]
pub enum LocalModel {
    Local {
        theory: HiddenVariableTheory,
        error: f64,
    },
    Nonlocal(BellCertificate),
}

impl LocalModel {
    pub fn is_local(&self) -> bool {
        matches!(self, LocalModel::Local { .. })
    }
}

/// Mixed-radix enumeration of outcome assignments, one digit per setting.
fn assignments(radices: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = radices.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0; radices.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for (d, &r) in cur.iter_mut().zip(radices) {
            *d += 1;
            if *d < r {
                break;
            }
            *d = 0;
        }
    }
    out
}

/// Searches for weights on deterministic strategies reproducing `ph`.
pub fn local_model_lp(ph: &Phenomenon) -> Result<LocalModel> {
    let alice = ph.alice_settings();
    let bob = ph.bob_settings();
    let ra: Vec<usize> = alice.iter().map(|s| s.outcomes).collect();
    let rb: Vec<usize> = bob.iter().map(|s| s.outcomes).collect();
    let count = ra
        .iter()
        .chain(&rb)
        .try_fold(1usize, |acc, &r| acc.checked_mul(r));
    let count = match count {
        Some(c) if c <= MAX_STRATEGIES => c,
        _ => {
            return Err(Error::Precondition(format!(
                "more than {MAX_STRATEGIES} deterministic strategies"
            )))
        }
    };
    let sa = assignments(&ra);
    let sb = assignments(&rb);

    // Row layout: one row per (a, b, A, B), then normalization.
    let mut offsets = Vec::with_capacity(alice.len() * bob.len());
    let mut rows = 0;
    for a in alice {
        for b in bob {
            offsets.push(rows);
            rows += a.outcomes * b.outcomes;
        }
    }
    let mut c = Constraints::new(rows + 1, count);
    let nb = bob.len();
    for (ia, x) in sa.iter().enumerate() {
        for (ib, y) in sb.iter().enumerate() {
            let col = ia * sb.len() + ib;
            for a in 0..alice.len() {
                for b in 0..nb {
                    c.set(
                        offsets[a * nb + b] + x[a] * bob[b].outcomes + y[b],
                        col,
                        1.0,
                    );
                }
            }
            c.set(rows, col, 1.0);
        }
    }
    for a in 0..alice.len() {
        for b in 0..nb {
            let t = ph.table(a, b);
            c.b[offsets[a * nb + b]..offsets[a * nb + b] + t.as_slice().len()]
                .copy_from_slice(t.as_slice());
        }
    }
    c.b[rows] = 1.0;

    match solve_feasibility(&c) {
        LpOutcome::Feasible { x, .. } => {
            let mut strategies = Vec::new();
            let mut weights = Vec::new();
            for (col, &w) in x.iter().enumerate() {
                if w > 1e-13 {
                    strategies.push((sa[col / sb.len()].clone(), sb[col % sb.len()].clone()));
                    weights.push(w);
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            let theory = HiddenVariableTheory::deterministic(
                alice.to_vec(),
                bob.to_vec(),
                &strategies,
                weights,
            )?;
            let error = theory.reproduction_error(ph);
            if error > LOCAL_MODEL_TOL {
                return Err(Error::Precondition(format!(
                    "local model reproduces the phenomenon only to {error:.2e}"
                )));
            }
            Ok(LocalModel::Local { theory, error })
        }
        LpOutcome::Infeasible { y, .. } => {
            let coefficients: Vec<Vec<f64>> = (0..alice.len() * nb)
                .map(|i| {
                    let len = alice[i / nb].outcomes * bob[i % nb].outcomes;
                    y[offsets[i]..offsets[i] + len].to_vec()
                })
                .collect();
            // Exact local bound by enumeration rather than trusting the dual.
            let mut local_bound = f64::NEG_INFINITY;
            for x in &sa {
                for yb in &sb {
                    let mut v = 0.0;
                    for a in 0..alice.len() {
                        for b in 0..nb {
                            v += coefficients[a * nb + b][x[a] * bob[b].outcomes + yb[b]];
                        }
                    }
                    local_bound = local_bound.max(v);
                }
            }
            let mut value = 0.0;
            for a in 0..alice.len() {
                for b in 0..nb {
                    value += coefficients[a * nb + b]
                        .iter()
                        .zip(ph.table(a, b).as_slice())
                        .map(|(c, f)| c * f)
                        .sum::<f64>();
                }
            }
            if value - local_bound <= 0.0 {
                return Err(Error::Precondition(
                    "Farkas vector does not separate the phenomenon".into(),
                ));
            }
            Ok(LocalModel::Nonlocal(BellCertificate {
                coefficients,
                local_bound,
                value,
            }))
        }
        LpOutcome::Undetermined => Err(Error::Precondition(
            "local-model LP did not reach a verified answer".into(),
        )),
    }
}
