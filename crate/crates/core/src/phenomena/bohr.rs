//! Disturbance in Bohr's sense: after Alice's first measurement, can some follow-up
//! measurement, chosen according to its outcome, still reproduce the joint statistics
//! she would have obtained by measuring another quantity directly?

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use super::{LabeledPovm, FREQUENCY_TOL};
use crate::discord::is_alice_concordant;
use crate::error::{Error, Result};
use crate::measure::{
    average_channel_state, outcome_distribution, post_measurement_state, Instrument, JointTable,
    Povm,
};
use crate::qcore::BipartiteState;

/// Residual at or below this counts as a successful recovery.
pub const BOHR_TOL: f64 = 1e-7;
/// Above this many strategies per quantity the search switches to coordinate descent.
const EXHAUSTIVE_LIMIT: usize = 1 << 16;

/// The follow-up chosen for each first outcome, and how well it reproduces one quantity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecoveryChoice {
    pub quantity: String,
    /// Index into the recovery catalog per first outcome; `None` for zero-probability outcomes.
    pub choices: Vec<Option<usize>>,
    /// Largest total-variation distance over Bob's settings.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantityResidual {
    pub quantity: String,
    /// Best residual found; 1 if no catalog entry has the right number of outcomes.
    pub residual: f64,
    pub best: Vec<Option<usize>>,
    /// Every strategy in the catalog was tried.
    pub exhaustive: bool,
}

/// How a disturbing verdict is backed up.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certification {
    /// The recovery catalog was searched exhaustively for every quantity.
    pub catalog_exhausted: bool,
    /// Structural test: a discordant state admits no recovery by any instrument.
    pub state_alice_concordant: bool,
    pub concordance_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "verdict", rename_all = "snake_case"))]
pub enum BohrVerdict {
    Nondisturbing {
        strategies: Vec<RecoveryChoice>,
    },
    Disturbing {
        residuals: Vec<QuantityResidual>,
        certification: Certification,
    },
}

impl BohrVerdict {
    pub fn is_disturbing(&self) -> bool {
        matches!(self, BohrVerdict::Disturbing { .. })
    }

    /// Residual recorded for `quantity` (label of the catalog entry).
    pub fn residual(&self, quantity: &str) -> Option<f64> {
        match self {
            BohrVerdict::Nondisturbing { strategies } => strategies
                .iter()
                .find(|s| s.quantity == quantity)
                .map(|s| s.residual),
            BohrVerdict::Disturbing { residuals, .. } => residuals
                .iter()
                .find(|s| s.quantity == quantity)
                .map(|s| s.residual),
        }
    }
}

fn bob_marginals(state: &BipartiteState, bob: &[Povm]) -> Result<Vec<Vec<f64>>> {
    let trivial = Povm::trivial(state.dim_alpha());
    bob.iter()
        .map(|b| Ok(outcome_distribution(state, &trivial, b)?.bob_marginal()))
        .collect()
}

fn residual_of(sum: &[JointTable], target: &[JointTable]) -> f64 {
    sum.iter()
        .zip(target)
        .map(|(s, t)| s.total_variation(t))
        .fold(0.0, f64::max)
}

struct Search<'a> {
    /// `contrib[i][c][b]`: weighted table of the `i`-th defined first outcome with candidate `c`.
    contrib: Vec<Vec<Vec<JointTable>>>,
    candidates: &'a [usize],
    target: &'a [JointTable],
}

impl Search<'_> {
    fn evaluate(&self, pick: &[usize]) -> f64 {
        let mut sum: Vec<JointTable> = self
            .target
            .iter()
            .map(|t| JointTable::zeros(t.rows(), t.cols()))
            .collect();
        for (i, &c) in pick.iter().enumerate() {
            for (s, t) in sum.iter_mut().zip(&self.contrib[i][c]) {
                s.add_scaled(t, 1.0);
            }
        }
        residual_of(&sum, self.target)
    }

    fn exhaustive(&self) -> (Vec<usize>, f64) {
        let n = self.contrib.len();
        let k = self.candidates.len();
        let mut pick = vec![0usize; n];
        let mut best = (pick.clone(), self.evaluate(&pick));
        loop {
            let mut i = 0;
            while i < n {
                pick[i] += 1;
                if pick[i] < k {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            let r = self.evaluate(&pick);
            if r < best.1 {
                best = (pick.clone(), r);
                if r <= 1e-12 {
                    break;
                }
            }
        }
        best
    }

    fn greedy(&self) -> (Vec<usize>, f64) {
        let n = self.contrib.len();
        let k = self.candidates.len();
        let mut best = (vec![0; n], f64::INFINITY);
        for c in 0..k {
            let pick = vec![c; n];
            let r = self.evaluate(&pick);
            if r < best.1 {
                best = (pick, r);
            }
        }
        loop {
            let mut improved = false;
            for i in 0..n {
                for c in 0..k {
                    let mut pick = best.0.clone();
                    pick[i] = c;
                    let r = self.evaluate(&pick);
                    if r < best.1 - 1e-15 {
                        best = (pick, r);
                        improved = true;
                    }
                }
            }
            if !improved {
                return best;
            }
        }
    }
}

/// Searches `recovery` for an outcome-dependent follow-up after `first` that reproduces,
/// for every quantity in `quantities`, the direct joint table with each of Bob's POVMs.
pub fn bohr_no_disturbance(
    state: &BipartiteState,
    first: &Instrument,
    quantities: &[LabeledPovm],
    recovery: &[Povm],
    bob: &[Povm],
) -> Result<BohrVerdict> {
    if quantities.is_empty() {
        return Err(Error::Empty("quantity catalog"));
    }
    if recovery.is_empty() {
        return Err(Error::Empty("recovery catalog"));
    }
    if bob.is_empty() {
        return Err(Error::Empty("bob catalog"));
    }
    for r in recovery {
        if r.dim() != state.dim_alpha() {
            return Err(Error::DimensionMismatch {
                expected: state.dim_alpha(),
                found: r.dim(),
            });
        }
    }

    // The notion only applies to measurements that do not signal.
    let before = bob_marginals(state, bob)?;
    let after = bob_marginals(&average_channel_state(state, first)?, bob)?;
    let shift = before
        .iter()
        .flatten()
        .zip(after.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if shift > FREQUENCY_TOL {
        return Err(Error::Precondition(format!(
            "first measurement changes Bob's marginals by {shift:.3e}"
        )));
    }

    let mut branches = Vec::new();
    let mut defined = Vec::new();
    for a1 in 0..first.outcomes() {
        let cond = post_measurement_state(state, first, a1)?;
        if let Some(s) = cond.state() {
            defined.push(a1);
            branches.push((cond.probability(), s.clone()));
        }
    }

    let mut found = Vec::with_capacity(quantities.len());
    let mut exhausted_all = true;
    let mut all_ok = true;
    for q in quantities {
        let target: Vec<JointTable> = bob
            .iter()
            .map(|b| outcome_distribution(state, &q.povm, b))
            .collect::<Result<_>>()?;
        let candidates: Vec<usize> = (0..recovery.len())
            .filter(|&c| recovery[c].outcomes() == q.povm.outcomes())
            .collect();
        if candidates.is_empty() {
            found.push(QuantityResidual {
                quantity: q.label.clone(),
                residual: 1.0,
                best: vec![None; first.outcomes()],
                exhaustive: true,
            });
            all_ok = false;
            continue;
        }
        let contrib: Vec<Vec<Vec<JointTable>>> = branches
            .iter()
            .map(|(p, s)| {
                candidates
                    .iter()
                    .map(|&c| {
                        bob.iter()
                            .map(|b| {
                                let t = outcome_distribution(s, &recovery[c], b)?;
                                let mut w = JointTable::zeros(t.rows(), t.cols());
                                w.add_scaled(&t, *p);
                                Ok(w)
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let search = Search {
            contrib,
            candidates: &candidates,
            target: &target,
        };
        let total = (candidates.len() as f64).powi(branches.len() as i32);
        let exhaustive = total <= EXHAUSTIVE_LIMIT as f64;
        let (pick, residual) = if exhaustive {
            search.exhaustive()
        } else {
            search.greedy()
        };
        exhausted_all &= exhaustive;
        all_ok &= residual <= BOHR_TOL;
        let mut best = vec![None; first.outcomes()];
        for (i, &a1) in defined.iter().enumerate() {
            best[a1] = Some(candidates[pick[i]]);
        }
        found.push(QuantityResidual {
            quantity: q.label.clone(),
            residual,
            best,
            exhaustive,
        });
    }

    if all_ok {
        return Ok(BohrVerdict::Nondisturbing {
            strategies: found
                .into_iter()
                .map(|f| RecoveryChoice {
                    quantity: f.quantity,
                    choices: f.best,
                    residual: f.residual,
                })
                .collect(),
        });
    }
    let cert = is_alice_concordant(state);
    Ok(BohrVerdict::Disturbing {
        residuals: found,
        certification: Certification {
            catalog_exhausted: exhausted_all,
            state_alice_concordant: cert.verdict,
            concordance_residual: cert.residual,
        },
    })
}
