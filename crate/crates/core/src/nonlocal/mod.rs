//! Separability, Bell locality, steering, and the classification of a state along the
//! chain Bell-nonlocal ⇒ steerable ⇒ entangled ⇒ discordant ⇒ dissonant.

mod bell;
mod steering;

pub use bell::{local_model_lp, BellCertificate, LocalModel, LOCAL_MODEL_TOL, MAX_STRATEGIES};
pub use steering::{
    steering_lhs_lp, LhsModel, SteeringOptions, SteeringVerdict, SteeringWitness, MAX_RESPONSES,
};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::discord::{is_consonant, mutual_information};
use crate::error::{Error, Result};
use crate::measure::Povm;
use crate::phenomena::{phenomenon_from_state, LabeledPovm, Phenomenon};
use crate::qcore::{
    eig_hermitian, pauli, schmidt_decomposition, states, BipartiteState, CMatrix, PureState, C64,
};

/// States with purity at least `1 - PURE_TOL` are treated as pure.
pub const PURE_TOL: f64 = 1e-9;
/// Schmidt coefficients above this count toward the rank.
pub const SCHMIDT_TOL: f64 = 1e-7;
/// Partial-transpose eigenvalues below `-PPT_TOL` witness entanglement.
pub const PPT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SeparabilityMethod {
    Schmidt,
    Ppt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Separability {
    Separable,
    Entangled,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeparabilityVerdict {
    pub method: SeparabilityMethod,
    pub verdict: Separability,
    /// Schmidt rank for pure states, smallest partial-transpose eigenvalue otherwise.
    pub witness: f64,
    /// Reported for every state, whatever the method.
    pub min_pt_eigenvalue: f64,
}

/// Smallest eigenvalue of the partial transpose on Bob's side.
pub fn min_partial_transpose_eigenvalue(state: &BipartiteState) -> f64 {
    eig_hermitian(&state.partial_transpose())
        .expect("partial transpose is Hermitian")
        .values[0]
}

/// Schmidt rank for pure states, PPT otherwise (conclusive in 2⊗2 and 2⊗3).
pub fn separability(state: &BipartiteState) -> SeparabilityVerdict {
    let min_pt = min_partial_transpose_eigenvalue(state);
    let (da, db) = state.dims();
    if state.purity() >= 1.0 - PURE_TOL {
        let e = eig_hermitian(state.matrix()).expect("state is Hermitian");
        let top = e.vector(e.values.len() - 1);
        if let Ok(psi) = PureState::normalized(da, db, top) {
            if let Ok(s) = schmidt_decomposition(&psi) {
                let rank = s.coefficients.iter().filter(|&&c| c > SCHMIDT_TOL).count();
                let verdict = if rank > 1 {
                    Separability::Entangled
                } else {
                    Separability::Separable
                };
                return SeparabilityVerdict {
                    method: SeparabilityMethod::Schmidt,
                    verdict,
                    witness: rank as f64,
                    min_pt_eigenvalue: min_pt,
                };
            }
        }
    }
    let verdict = if min_pt < -PPT_TOL {
        Separability::Entangled
    } else if da.min(db) == 2 && da.max(db) <= 3 {
        Separability::Separable
    } else {
        Separability::Inconclusive
    };
    SeparabilityVerdict {
        method: SeparabilityMethod::Ppt,
        verdict,
        witness: min_pt,
        min_pt_eigenvalue: min_pt,
    }
}

fn check_two_qubits(state: &BipartiteState) -> Result<()> {
    if state.dims() != (2, 2) {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: if state.dim_alpha() == 2 {
                state.dim_beta()
            } else {
                state.dim_alpha()
            },
        });
    }
    Ok(())
}

/// `T_ij = Tr[ϱ σ_i ⊗ σ_j]`.
pub fn correlation_matrix(state: &BipartiteState) -> Result<[[f64; 3]; 3]> {
    check_two_qubits(state)?;
    let p = [pauli::x(), pauli::y(), pauli::z()];
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = p[i].kron(&p[j]).trace_product(state.matrix()).re;
        }
    }
    Ok(t)
}

/// Optimal CHSH measurement directions (Bloch vectors) and the value they reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub alice: [[f64; 3]; 2],
    pub bob: [[f64; 3]; 2],
    pub value: f64,
}

fn mat_vec(t: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| (0..3).map(|j| t[i][j] * v[j]).sum())
}

fn normalized_or(v: [f64; 3], fallback: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n > 1e-12 {
        v.map(|x| x / n)
    } else {
        fallback
    }
}

/// Settings reaching `2 √(u1 + u2)`, with `u1 >= u2` the largest eigenvalues of `TᵀT`.
pub fn chsh_settings(state: &BipartiteState) -> Result<ChshSettings> {
    let t = correlation_matrix(state)?;
    let mut tt = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            tt[i * 3 + j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let e = eig_hermitian(&CMatrix::from_real(3, &tt))?;
    let vec_of = |k: usize| {
        let v = e.vector(k);
        // Real symmetric input: fix the global phase so the vector is real.
        let pivot = v
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(C64::new(1.0, 0.0));
        let ph = pivot.conj() / pivot.norm();
        let r = [v[0] * ph, v[1] * ph, v[2] * ph];
        normalized_or(r.map(|z| z.re), [0.0, 0.0, 1.0])
    };
    let (u1, u2) = (e.values[2].max(0.0), e.values[1].max(0.0));
    let (e1, e2) = (vec_of(2), vec_of(1));
    let theta = if u1 + u2 > 0.0 {
        u2.sqrt().atan2(u1.sqrt())
    } else {
        0.0
    };
    let (c, s) = (theta.cos(), theta.sin());
    let b0 = [0, 1, 2].map(|i| c * e1[i] + s * e2[i]);
    let b1 = [0, 1, 2].map(|i| c * e1[i] - s * e2[i]);
    let plus = mat_vec(&t, &[0, 1, 2].map(|i| b0[i] + b1[i]));
    let minus = mat_vec(&t, &[0, 1, 2].map(|i| b0[i] - b1[i]));
    let a0 = normalized_or(plus, [0.0, 0.0, 1.0]);
    let a1 = normalized_or(minus, [1.0, 0.0, 0.0]);
    let corr =
        |a: &[f64; 3], b: &[f64; 3]| -> f64 { (0..3).map(|i| a[i] * mat_vec(&t, b)[i]).sum() };
    let value = corr(&a0, &b0) + corr(&a0, &b1) + corr(&a1, &b0) - corr(&a1, &b1);
    Ok(ChshSettings {
        alice: [a0, a1],
        bob: [b0, b1],
        value,
    })
}

/// Largest CHSH value over spin measurements, `2 √(u1 + u2)`.
pub fn chsh_max(state: &BipartiteState) -> Result<f64> {
    let t = correlation_matrix(state)?;
    let mut tt = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            tt[i * 3 + j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let v = crate::qcore::eigvals_hermitian(&CMatrix::from_real(3, &tt))?;
    Ok(2.0 * (v[2].max(0.0) + v[1].max(0.0)).sqrt())
}

/// Born-rule phenomenon at the optimal CHSH settings; labels `a0, a1, b0, b1`.
pub fn chsh_phenomenon(state: &BipartiteState) -> Result<Phenomenon> {
    let s = chsh_settings(state)?;
    let alice =
        [0, 1].map(|i| LabeledPovm::new(format!("a{i}"), format!("a{i}"), Povm::spin(s.alice[i])));
    let bob =
        [0, 1].map(|i| LabeledPovm::new(format!("b{i}"), format!("b{i}"), Povm::spin(s.bob[i])));
    phenomenon_from_state(state, &alice, &bob)
}

/// Bob's measurement eigenvectors for the CHSH settings; used as steering probes.
pub fn chsh_probes(state: &BipartiteState) -> Result<Vec<Vec<C64>>> {
    let s = chsh_settings(state)?;
    let mut out = Vec::new();
    for b in s.bob {
        for e in Povm::spin(b).effects() {
            out.push(eig_hermitian(e)?.vector(1));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LevelVerdict {
    Established,
    Refuted,
    Inconclusive,
}

impl core::fmt::Display for LevelVerdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            LevelVerdict::Established => "established",
            LevelVerdict::Refuted => "refuted",
            LevelVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Level {
    pub verdict: LevelVerdict,
    pub witness: String,
    pub method: String,
}

impl Level {
    fn new(verdict: LevelVerdict, witness: String, method: &str) -> Self {
        Self {
            verdict,
            witness,
            method: method.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HierarchyReport {
    pub bell_nonlocal: Level,
    pub steerable: Level,
    pub entangled: Level,
    pub alice_discordant: Level,
    pub bob_discordant: Level,
    pub dissonant: Level,
    pub mutual_information: f64,
    pub chsh: Option<f64>,
    pub separability: SeparabilityVerdict,
}

impl HierarchyReport {
    /// Levels from strongest to weakest, with their names.
    pub fn levels(&self) -> [(&'static str, &Level); 6] {
        [
            ("bell_nonlocal", &self.bell_nonlocal),
            ("steerable", &self.steerable),
            ("entangled", &self.entangled),
            ("alice_discordant", &self.alice_discordant),
            ("bob_discordant", &self.bob_discordant),
            ("dissonant", &self.dissonant),
        ]
    }

    /// No level is established while a level it implies is refuted.
    pub fn is_consistent(&self) -> bool {
        IMPLICATIONS.iter().all(|&(strong, weak)| {
            let l = self.levels();
            !(l[strong].1.verdict == LevelVerdict::Established
                && l[weak].1.verdict == LevelVerdict::Refuted)
        })
    }

    fn level_mut(&mut self, i: usize) -> &mut Level {
        match i {
            0 => &mut self.bell_nonlocal,
            1 => &mut self.steerable,
            2 => &mut self.entangled,
            3 => &mut self.alice_discordant,
            4 => &mut self.bob_discordant,
            _ => &mut self.dissonant,
        }
    }

    /// Fills inconclusive levels from established stronger or refuted weaker ones.
    fn propagate(&mut self) {
        loop {
            let mut changed = false;
            for &(strong, weak) in IMPLICATIONS {
                let (vs, vw) = (
                    self.levels()[strong].1.verdict,
                    self.levels()[weak].1.verdict,
                );
                let (ns, nw) = (self.levels()[strong].0, self.levels()[weak].0);
                if vs == LevelVerdict::Established && vw == LevelVerdict::Inconclusive {
                    let l = self.level_mut(weak);
                    l.verdict = LevelVerdict::Established;
                    l.method = format!("implied by {ns}; {}", l.method);
                    changed = true;
                }
                if vw == LevelVerdict::Refuted && vs == LevelVerdict::Inconclusive {
                    let l = self.level_mut(strong);
                    l.verdict = LevelVerdict::Refuted;
                    l.method = format!("excluded by {nw}; {}", l.method);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }
}

/// `(stronger, weaker)` index pairs into [`HierarchyReport::levels`].
const IMPLICATIONS: &[(usize, usize)] = &[(0, 1), (1, 2), (2, 3), (2, 4), (3, 5), (4, 5)];

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    /// Alice settings used for the steering test (2 or 3).
    pub steering_settings: usize,
    pub steering: SteeringOptions,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            steering_settings: 2,
            steering: SteeringOptions::default(),
        }
    }
}

fn steering_measurements(state: &BipartiteState, n: usize) -> Vec<Povm> {
    let d = state.dim_alpha();
    if d == 2 {
        let all = [Povm::sigma_z(), Povm::sigma_x(), Povm::sigma_y()];
        return all.into_iter().take(n.clamp(1, 3)).collect();
    }
    let mut out = vec![
        Povm::computational(d),
        Povm::projective(&states::fourier_basis(d)),
    ];
    let mut rng = crate::random::seeded(0);
    while out.len() < n.max(1) {
        out.push(Povm::projective(&crate::random::random_unitary(
            d, &mut rng,
        )));
    }
    out.truncate(n.max(1));
    out
}

fn bell_level(state: &BipartiteState) -> Result<(Level, Option<f64>, Vec<Vec<C64>>)> {
    let (da, db) = state.dims();
    if (da, db) == (2, 2) {
        let chsh = chsh_max(state)?;
        let ph = chsh_phenomenon(state)?;
        let probes = chsh_probes(state)?;
        let level = match local_model_lp(&ph)? {
            LocalModel::Nonlocal(cert) => Level::new(
                LevelVerdict::Established,
                format!(
                    "CHSH {chsh:.4}; Bell inequality violated by {:.4}",
                    cert.violation()
                ),
                "local-model LP at optimal CHSH settings",
            ),
            LocalModel::Local { .. } => Level::new(
                LevelVerdict::Inconclusive,
                format!("CHSH {chsh:.4} <= 2; local model exists for these settings"),
                "CHSH witness and local-model LP; other settings not excluded",
            ),
        };
        return Ok((level, Some(chsh), probes));
    }
    let comp = |d: usize| Povm::computational(d);
    let four = |d: usize| Povm::projective(&states::fourier_basis(d));
    let alice = [
        LabeledPovm::new("q", "q", comp(da)),
        LabeledPovm::new("p", "p", four(da)),
    ];
    let bob = [
        LabeledPovm::new("q", "q", comp(db)),
        LabeledPovm::new("p", "p", four(db)),
    ];
    let ph = phenomenon_from_state(state, &alice, &bob)?;
    let mut probes = Vec::new();
    for u in [CMatrix::identity(db), states::fourier_basis(db)] {
        probes.extend((0..db).map(|j| u.column(j)));
    }
    let level = match local_model_lp(&ph) {
        Ok(LocalModel::Nonlocal(cert)) => Level::new(
            LevelVerdict::Established,
            format!("Bell inequality violated by {:.4}", cert.violation()),
            "local-model LP, computational and Fourier settings",
        ),
        Ok(LocalModel::Local { .. }) => Level::new(
            LevelVerdict::Inconclusive,
            "local model exists for computational and Fourier settings".into(),
            "local-model LP; other settings not excluded",
        ),
        Err(e) => Level::new(
            LevelVerdict::Inconclusive,
            format!("not attempted: {e}"),
            "local-model LP",
        ),
    };
    Ok((level, None, probes))
}

/// Runs every test and reports each level with its witness.
pub fn classify(state: &BipartiteState, cfg: &ClassifyConfig) -> Result<HierarchyReport> {
    let (bell_nonlocal, chsh, probes) = bell_level(state)?;

    let mut opts = cfg.steering.clone();
    opts.probes.extend(probes);
    let settings = steering_measurements(state, cfg.steering_settings);
    let steerable = match steering_lhs_lp(state, &settings, &opts)? {
        SteeringVerdict::Steerable(w) => Level::new(
            LevelVerdict::Established,
            format!(
                "steering witness value {:.4} < 0 with {} settings",
                w.value,
                settings.len()
            ),
            "LP over deterministic responses",
        ),
        SteeringVerdict::Unsteerable(_) => Level::new(
            LevelVerdict::Inconclusive,
            format!(
                "local-hidden-state model found for {} settings",
                settings.len()
            ),
            "unsteerable with these settings; inconclusive globally",
        ),
        SteeringVerdict::Inconclusive => Level::new(
            LevelVerdict::Inconclusive,
            "neither witness nor model found".into(),
            "LP over deterministic responses",
        ),
    };

    let sep = separability(state);
    let method = match sep.method {
        SeparabilityMethod::Schmidt => "Schmidt rank",
        SeparabilityMethod::Ppt => "partial transpose",
    };
    let entangled = match sep.verdict {
        Separability::Entangled => Level::new(
            LevelVerdict::Established,
            entanglement_witness(&sep),
            method,
        ),
        Separability::Separable => {
            Level::new(LevelVerdict::Refuted, entanglement_witness(&sep), method)
        }
        Separability::Inconclusive => Level::new(
            LevelVerdict::Inconclusive,
            entanglement_witness(&sep),
            "partial transpose (not conclusive in this dimension)",
        ),
    };

    let cons = is_consonant(state);
    let disc = |c: &crate::discord::ConcordanceCertificate| {
        if c.verdict {
            Level::new(
                LevelVerdict::Refuted,
                format!(
                    "classical basis found, off-block residual {:.4}",
                    c.residual
                ),
                "joint block-diagonalization",
            )
        } else {
            Level::new(
                LevelVerdict::Established,
                format!("no classical basis, off-block residual {:.4}", c.residual),
                "joint block-diagonalization",
            )
        }
    };
    let alice_discordant = disc(&cons.alice);
    let bob_discordant = disc(&cons.bob);
    let dissonant = if cons.verdict {
        Level::new(
            LevelVerdict::Refuted,
            format!("classical on both sides, residual {:.4}", cons.residual),
            "product-basis diagonalization",
        )
    } else {
        Level::new(
            LevelVerdict::Established,
            format!("not classical on both sides, residual {:.4}", cons.residual),
            "product-basis diagonalization",
        )
    };

    let mut report = HierarchyReport {
        bell_nonlocal,
        steerable,
        entangled,
        alice_discordant,
        bob_discordant,
        dissonant,
        mutual_information: mutual_information(state)?,
        chsh,
        separability: sep,
    };
    report.propagate();
    Ok(report)
}

fn entanglement_witness(sep: &SeparabilityVerdict) -> String {
    match sep.method {
        SeparabilityMethod::Schmidt => format!(
            "Schmidt rank {}, min PT eigenvalue {:.4}",
            sep.witness, sep.min_pt_eigenvalue
        ),
        SeparabilityMethod::Ppt => format!("min PT eigenvalue {:.4}", sep.min_pt_eigenvalue),
    }
}
