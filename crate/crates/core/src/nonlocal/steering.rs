//! Steering relative to a finite set of Alice measurements.
//!
//! Two linear programs over the same dictionary `S` of pure states on Bob's side
//! bracket the semidefinite problem:
//!
//! * witness: Hermitian `F_{A|a}` with `Σ_a F_{λ(a)|a} ∈ cone{|s><s|}` for every
//!   deterministic response `λ` and `Σ Tr[F_{A|a} σ_{A|a}] = -1`. Each such sum is
//!   positive semidefinite, so feasibility certifies steering.
//! * model: hidden states restricted to `cone{|s><s|}`. Feasibility gives an
//!   explicit local-hidden-state model.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::discord::hermitian_basis;
use crate::error::{Error, Result};
use crate::lp::{solve_feasibility, Constraints, LpOutcome};
use crate::measure::{bob_conditional, Povm};
use crate::qcore::{eigvals_hermitian, states, BipartiteState, CMatrix, C64};
use crate::random::{random_vector, seeded};

/// Most deterministic response functions accepted.
pub const MAX_RESPONSES: usize = 4096;
const WITNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringOptions {
    /// Points of the pure-state dictionary besides the fixed bases.
    pub dictionary: usize,
    pub seed: u64,
    /// Extra pure states always included (e.g. eigenvectors of Bob's measurements).
    pub probes: Vec<Vec<C64>>,
}

impl Default for SteeringOptions {
    fn default() -> Self {
        Self {
            dictionary: 240,
            seed: 0,
            probes: Vec::new(),
        }
    }
}

/// Local-hidden-state model: `σ_{A|a} = Σ_λ [λ(a) = A] σ_λ`.
#[derive(Debug, Clone)]
pub struct LhsModel {
    /// Outcome assigned to each Alice setting, per hidden state.
    pub responses: Vec<Vec<usize>>,
    /// Unnormalized, positive semidefinite.
    pub hidden_states: Vec<CMatrix>,
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct SteeringWitness {
    /// `operators[a][A]`.
    pub operators: Vec<Vec<CMatrix>>,
    /// `Σ Tr[F_{A|a} σ_{A|a}]`; nonnegative for every unsteerable assemblage.
    pub value: f64,
}

#[derive(Debug, Clone)]
pub enum SteeringVerdict {
    Unsteerable(LhsModel),
    Steerable(SteeringWitness),
    /// Neither program settled the question with this dictionary.
    Inconclusive,
}

impl SteeringVerdict {
    pub fn is_steerable(&self) -> bool {
        matches!(self, SteeringVerdict::Steerable(_))
    }

    pub fn is_unsteerable(&self) -> bool {
        matches!(self, SteeringVerdict::Unsteerable(_))
    }
}

/// Near-uniform points on the Bloch sphere as qubit state vectors.
fn fibonacci_sphere(n: usize) -> Vec<Vec<C64>> {
    let golden = core::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let phi = golden * i as f64;
            let theta = z.acos();
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            vec![C64::new(c, 0.0), C64::new(phi.cos() * s, phi.sin() * s)]
        })
        .collect()
}

fn dictionary(d: usize, opts: &SteeringOptions) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    let mut push_basis = |u: &CMatrix| {
        for j in 0..u.cols() {
            out.push(u.column(j));
        }
    };
    push_basis(&CMatrix::identity(d));
    push_basis(&states::fourier_basis(d));
    if d == 2 {
        for p in [Povm::sigma_x(), Povm::sigma_y()] {
            for e in p.effects() {
                let eig = crate::qcore::eig_hermitian(e).expect("effect is Hermitian");
                out.push(eig.vector(1));
            }
        }
        out.extend(fibonacci_sphere(opts.dictionary));
    } else {
        // `(u_i + ω u_j)/√2` for ω ∈ {±1, ±i} in both fixed bases.
        let h = core::f64::consts::FRAC_1_SQRT_2;
        for u in [CMatrix::identity(d), states::fourier_basis(d)] {
            for i in 0..d {
                for j in i + 1..d {
                    for w in [
                        C64::new(1.0, 0.0),
                        C64::new(-1.0, 0.0),
                        C64::new(0.0, 1.0),
                        C64::new(0.0, -1.0),
                    ] {
                        out.push((0..d).map(|k| (u[(k, i)] + w * u[(k, j)]) * h).collect());
                    }
                }
            }
        }
        let mut rng = seeded(opts.seed);
        out.extend((0..opts.dictionary).map(|_| random_vector(d, &mut rng)));
    }
    out.extend(opts.probes.iter().cloned());
    out
}

fn responses(outcomes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = outcomes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0; outcomes.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for (d, &r) in cur.iter_mut().zip(outcomes) {
            *d += 1;
            if *d < r {
                break;
            }
            *d = 0;
        }
    }
    out
}

fn coords(basis: &[CMatrix], m: &CMatrix) -> Vec<f64> {
    basis.iter().map(|g| g.trace_product(m).re).collect()
}

/// Every response sum `Σ_a F_{λ(a)|a}` is positive semidefinite, independently of the dictionary.
fn witness_is_valid(operators: &[Vec<CMatrix>], lambdas: &[Vec<usize>]) -> bool {
    lambdas.iter().all(|lam| {
        let d = operators[0][0].rows();
        let sum = lam
            .iter()
            .enumerate()
            .fold(CMatrix::zeros(d, d), |acc, (a, &x)| &acc + &operators[a][x]);
        eigvals_hermitian(&sum.hermitian_part())
            .map(|v| v[0] >= -WITNESS_TOL)
            .unwrap_or(false)
    })
}

/// Witness built from the assemblage itself: `F_{A|a} = c/n I - σ_{A|a}` with
/// `c = max_λ λ_max(Σ_a σ_{λ(a)|a})`, rescaled so its value is -1 when negative.
fn assemblage_witness(
    assemblage: &[Vec<CMatrix>],
    lambdas: &[Vec<usize>],
) -> Result<Option<SteeringWitness>> {
    let d = assemblage[0][0].rows();
    let n = assemblage.len() as f64;
    let mut c = f64::NEG_INFINITY;
    for lam in lambdas {
        let sum = lam
            .iter()
            .enumerate()
            .fold(CMatrix::zeros(d, d), |acc, (a, &x)| {
                &acc + &assemblage[a][x]
            });
        c = c.max(
            *eigvals_hermitian(&sum.hermitian_part())?
                .last()
                .unwrap_or(&0.0),
        );
    }
    let purity: f64 = assemblage
        .iter()
        .flatten()
        .map(|s| s.trace_product(s).re)
        .sum();
    let value = c - purity;
    if value >= -1e-9 {
        return Ok(None);
    }
    let k = -1.0 / value;
    let operators: Vec<Vec<CMatrix>> = assemblage
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| (&CMatrix::identity(d).scale_real(c / n) - s).scale_real(k))
                .collect()
        })
        .collect();
    Ok(
        witness_is_valid(&operators, lambdas).then_some(SteeringWitness {
            operators,
            value: -1.0,
        }),
    )
}

/// Decides whether `state` admits a local-hidden-state model for Alice's measurements.
pub fn steering_lhs_lp(
    state: &BipartiteState,
    alice: &[Povm],
    opts: &SteeringOptions,
) -> Result<SteeringVerdict> {
    if alice.is_empty() {
        return Err(Error::Empty("alice settings"));
    }
    let db = state.dim_beta();
    for a in alice {
        if a.dim() != state.dim_alpha() {
            return Err(Error::DimensionMismatch {
                expected: state.dim_alpha(),
                found: a.dim(),
            });
        }
    }
    for p in &opts.probes {
        if p.len() != db {
            return Err(Error::DimensionMismatch {
                expected: db,
                found: p.len(),
            });
        }
    }
    let outcomes: Vec<usize> = alice.iter().map(Povm::outcomes).collect();
    let lambdas = responses(&outcomes);
    if lambdas.len() > MAX_RESPONSES {
        return Err(Error::Precondition(alloc::format!(
            "more than {MAX_RESPONSES} response functions"
        )));
    }
    let basis = hermitian_basis(db);
    let nm = basis.len();
    let dict = dictionary(db, opts);
    let dict_coords: Vec<Vec<f64>> = dict
        .iter()
        .map(|s| coords(&basis, &CMatrix::outer(s)))
        .collect();
    // assemblage[a][A]
    let assemblage: Vec<Vec<CMatrix>> = alice
        .iter()
        .map(|p| {
            p.effects()
                .iter()
                .map(|e| bob_conditional(state, e))
                .collect()
        })
        .collect();
    let mut slot = Vec::new();
    let mut k = 0;
    for &n in &outcomes {
        slot.push(k);
        k += n;
    }
    let n_elements = k;

    if let Some(w) = assemblage_witness(&assemblage, &lambdas)? {
        return Ok(SteeringVerdict::Steerable(w));
    }

    // Witness program.
    {
        let nf = n_elements * nm;
        let cols = 2 * nf + lambdas.len() * dict.len();
        let rows = lambdas.len() * nm + 1;
        let mut c = Constraints::new(rows, cols);
        for (l, lam) in lambdas.iter().enumerate() {
            for m in 0..nm {
                let r = l * nm + m;
                for (a, &x) in lam.iter().enumerate() {
                    let f = (slot[a] + x) * nm + m;
                    c.set(r, f, 1.0);
                    c.set(r, nf + f, -1.0);
                }
                for (s, sc) in dict_coords.iter().enumerate() {
                    c.set(r, 2 * nf + l * dict.len() + s, -sc[m]);
                }
            }
        }
        for (a, row) in assemblage.iter().enumerate() {
            for (x, sigma) in row.iter().enumerate() {
                let sc = coords(&basis, sigma);
                for (m, &v) in sc.iter().enumerate().take(nm) {
                    let f = (slot[a] + x) * nm + m;
                    c.set(rows - 1, f, v);
                    c.set(rows - 1, nf + f, -v);
                }
            }
        }
        c.b[rows - 1] = -1.0;
        if let LpOutcome::Feasible { x, .. } = solve_feasibility(&c) {
            let operators: Vec<Vec<CMatrix>> = outcomes
                .iter()
                .enumerate()
                .map(|(a, &n)| {
                    (0..n)
                        .map(|xo| {
                            (0..nm).fold(CMatrix::zeros(db, db), |acc, m| {
                                let f = (slot[a] + xo) * nm + m;
                                &acc + &basis[m].scale_real(x[f] - x[nf + f])
                            })
                        })
                        .collect()
                })
                .collect();
            let value = operators
                .iter()
                .zip(&assemblage)
                .flat_map(|(fs, ss)| fs.iter().zip(ss).map(|(f, s)| f.trace_product(s).re))
                .sum();
            if value < -0.5 && witness_is_valid(&operators, &lambdas) {
                return Ok(SteeringVerdict::Steerable(SteeringWitness {
                    operators,
                    value,
                }));
            }
        }
    }

    // Model program.
    let cols = lambdas.len() * dict.len();
    let rows = n_elements * nm;
    let mut c = Constraints::new(rows, cols);
    for (l, lam) in lambdas.iter().enumerate() {
        for (s, sc) in dict_coords.iter().enumerate() {
            let col = l * dict.len() + s;
            for (a, &x) in lam.iter().enumerate() {
                for (m, &v) in sc.iter().enumerate().take(nm) {
                    c.set((slot[a] + x) * nm + m, col, v);
                }
            }
        }
    }
    for (a, row) in assemblage.iter().enumerate() {
        for (x, sigma) in row.iter().enumerate() {
            let sc = coords(&basis, sigma);
            c.b[(slot[a] + x) * nm..(slot[a] + x + 1) * nm].copy_from_slice(&sc);
        }
    }
    match solve_feasibility(&c) {
        LpOutcome::Feasible { x, .. } => {
            let hidden_states: Vec<CMatrix> = (0..lambdas.len())
                .map(|l| {
                    (0..dict.len()).fold(CMatrix::zeros(db, db), |acc, s| {
                        let w = x[l * dict.len() + s];
                        if w > 0.0 {
                            &acc + &CMatrix::outer(&dict[s]).scale_real(w)
                        } else {
                            acc
                        }
                    })
                })
                .collect();
            let mut error: f64 = 0.0;
            for (a, row) in assemblage.iter().enumerate() {
                for (xo, sigma) in row.iter().enumerate() {
                    let sum = lambdas
                        .iter()
                        .zip(&hidden_states)
                        .filter(|(lam, _)| lam[a] == xo)
                        .fold(CMatrix::zeros(db, db), |acc, (_, h)| &acc + h);
                    error = error.max(sum.distance(sigma));
                }
            }
            if error > 1e-7 {
                return Ok(SteeringVerdict::Inconclusive);
            }
            Ok(SteeringVerdict::Unsteerable(LhsModel {
                responses: lambdas,
                hidden_states,
                error,
            }))
        }
        LpOutcome::Infeasible { .. } | LpOutcome::Undetermined => Ok(SteeringVerdict::Inconclusive),
    }
}
