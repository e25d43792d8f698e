//! Mutual information, measurement-induced information `J`, Alice-discord and
//! the structural zero-discord (concordance) and consonance tests.
//!
//! All entropies are in bits.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::error::Result;
use crate::measure::{bob_conditional, Povm, ZERO_PROBABILITY};
use crate::qcore::{
    eig_hermitian, partial_trace, von_neumann_entropy, BipartiteState, CMatrix, Subsystem, C64,
};
use crate::random::{random_unitary, seeded};

/// Discord values in `[-DISCORD_CLAMP, 0]` are reported as zero.
pub const DISCORD_CLAMP: f64 = 1e-7;
/// `min_discord` at or below this value counts as zero discord.
pub const ZERO_DISCORD: f64 = 1e-5;
/// Off-block norm accepted as concordant.
pub const CONCORDANCE_TOL: f64 = 1e-9;
/// Residuals above [`CONCORDANCE_TOL`] but at most this are decided by the optimizer.
pub const CONCORDANCE_TIE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct DiscordResult {
    pub mutual_information: f64,
    pub j_value: f64,
    pub discord: f64,
    /// The measurement on Alice's side that produced `j_value`.
    pub measurement: Povm,
}

/// `I(β:α) = S(ρ_α) + S(ρ_β) - S(ϱ)`.
pub fn mutual_information(state: &BipartiteState) -> Result<f64> {
    let sa = von_neumann_entropy(&partial_trace(state, Subsystem::Alpha))?;
    let sb = von_neumann_entropy(&partial_trace(state, Subsystem::Beta))?;
    let s = von_neumann_entropy(state.matrix())?;
    Ok((sa + sb - s).max(0.0))
}

fn conditional_entropy_sum(state: &BipartiteState, effects: &[CMatrix]) -> Result<f64> {
    let mut acc = 0.0;
    for e in effects {
        let m = bob_conditional(state, e);
        let p = m.trace().re;
        if p < ZERO_PROBABILITY {
            continue;
        }
        acc += p * von_neumann_entropy(&m.scale_real(1.0 / p))?;
    }
    Ok(acc)
}

/// `J(β|a) = S(ρ_β) - Σ_A p(A) S(ρ_β|A)`.
pub fn j_value(state: &BipartiteState, alice: &Povm) -> Result<f64> {
    if alice.dim() != state.dim_alpha() {
        return Err(crate::Error::DimensionMismatch {
            expected: state.dim_alpha(),
            found: alice.dim(),
        });
    }
    let sb = von_neumann_entropy(&partial_trace(state, Subsystem::Beta))?;
    Ok((sb - conditional_entropy_sum(state, alice.effects())?).max(0.0))
}

fn clamp_discord(x: f64) -> f64 {
    if (-DISCORD_CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// `δ(β|a) = I(β:α) - J(β|a)`.
pub fn discord_for(state: &BipartiteState, alice: &Povm) -> Result<DiscordResult> {
    let mutual_information = mutual_information(state)?;
    let j = j_value(state, alice)?;
    Ok(DiscordResult {
        mutual_information,
        j_value: j,
        discord: clamp_discord(mutual_information - j),
        measurement: alice.clone(),
    })
}

/// Settings for the multi-start minimization over rank-one projective measurements.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizerConfig {
    pub seed: u64,
    pub starts: usize,
    pub max_iterations: usize,
    /// Stop a local descent once the gradient norm falls below this.
    pub tolerance: f64,
    /// Points per polar angle of the Bloch-sphere verification grid (qubit Alice),
    /// or number of random bases in the grid otherwise.
    pub grid: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            starts: 32,
            max_iterations: 200,
            tolerance: 1e-10,
            grid: 24,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinDiscord {
    pub result: DiscordResult,
    /// Columns are the optimal measurement basis.
    pub basis: CMatrix,
    /// Every local descent stopped on its gradient criterion rather than the iteration cap.
    pub converged: bool,
    pub evaluations: usize,
}

impl MinDiscord {
    pub fn is_zero(&self) -> bool {
        self.result.discord <= ZERO_DISCORD
    }
}

struct Objective<'a> {
    state: &'a BipartiteState,
    evaluations: usize,
}

impl Objective<'_> {
    /// `Σ_j p_j S(ρ_β|j)` for the projective measurement onto the columns of `u`.
    fn eval(&mut self, u: &CMatrix) -> f64 {
        self.evaluations += 1;
        let effects: Vec<CMatrix> = (0..u.cols())
            .map(|j| CMatrix::outer(&u.column(j)))
            .collect();
        conditional_entropy_sum(self.state, &effects).unwrap_or(f64::INFINITY)
    }
}

/// Number of real parameters of a zero-diagonal Hermitian generator.
fn generator_params(d: usize) -> usize {
    d * (d - 1)
}

/// `exp(i H)` for the zero-diagonal Hermitian `H` encoded by `x`.
fn unitary_from_params(d: usize, x: &[f64]) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    let mut idx = 0;
    for p in 0..d {
        for q in (p + 1)..d {
            let z = C64::new(x[idx], x[idx + 1]);
            idx += 2;
            h[(p, q)] = z;
            h[(q, p)] = z.conj();
        }
    }
    let e = eig_hermitian(&h).expect("generator is Hermitian");
    let n = d;
    let phases: Vec<C64> = e
        .values
        .iter()
        .map(|&l| C64::new(l.cos(), l.sin()))
        .collect();
    let v = &e.vectors;
    CMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj())
            .sum()
    })
}

/// Gradient descent on the unitary manifold, re-centering the chart after every step.
fn local_descent(
    obj: &mut Objective<'_>,
    start: CMatrix,
    cfg: &OptimizerConfig,
) -> (CMatrix, f64, bool) {
    let d = start.rows();
    let np = generator_params(d);
    let mut u = start;
    let mut fu = obj.eval(&u);
    let mut step = 0.1;
    let h = 1e-6;
    for _ in 0..cfg.max_iterations {
        let mut grad = vec![0.0; np];
        let mut x = vec![0.0; np];
        for k in 0..np {
            x[k] = h;
            let fp = obj.eval(&u.matmul(&unitary_from_params(d, &x)));
            x[k] = -h;
            let fm = obj.eval(&u.matmul(&unitary_from_params(d, &x)));
            x[k] = 0.0;
            grad[k] = (fp - fm) / (2.0 * h);
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < cfg.tolerance {
            return (u, fu, true);
        }
        let mut accepted = false;
        let mut t = step;
        while t * gnorm > 1e-12 {
            let trial: Vec<f64> = grad.iter().map(|g| -t * g).collect();
            let cand = u.matmul(&unitary_from_params(d, &trial));
            let fc = obj.eval(&cand);
            if fc <= fu - 1e-4 * t * gnorm * gnorm {
                u = cand;
                fu = fc;
                accepted = true;
                step = (t * 2.0).min(10.0);
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return (u, fu, true);
        }
    }
    (u, fu, false)
}

/// Bloch-sphere grid over the upper hemisphere; `n` polar steps.
fn qubit_grid(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    let n = n.max(2);
    for i in 0..=n {
        let theta = core::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
        let azimuths = if i == 0 { 1 } else { 4 * n };
        for k in 0..azimuths {
            let phi = 2.0 * core::f64::consts::PI * k as f64 / azimuths as f64;
            out.push(qubit_basis(theta, phi));
        }
    }
    out
}

/// Basis `{|n>, |-n>}` for the Bloch direction `(θ, φ)`.
pub fn qubit_basis(theta: f64, phi: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::new(phi.cos(), phi.sin());
    CMatrix::from_columns(&[
        vec![C64::new(c, 0.0), e * s],
        vec![C64::new(-s, 0.0), e * c],
    ])
}

fn verification_grid(d: usize, cfg: &OptimizerConfig) -> Vec<CMatrix> {
    if d == 2 {
        return qubit_grid(cfg.grid);
    }
    let mut rng = seeded(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut grid = vec![CMatrix::identity(d), crate::qcore::states::fourier_basis(d)];
    grid.extend((0..cfg.grid * 4).map(|_| random_unitary(d, &mut rng)));
    grid
}

/// Minimum Alice-discord over rank-one projective measurements.
///
/// Starts from the eigenbasis of `ρ_α` and `starts - 1` Haar-random bases, runs a
/// local descent from each, then checks the best value against a fixed
/// verification grid and polishes from any grid point that does better.
pub fn min_discord(state: &BipartiteState, cfg: &OptimizerConfig) -> Result<MinDiscord> {
    let d = state.dim_alpha();
    let mi = mutual_information(state)?;
    let sb = von_neumann_entropy(&partial_trace(state, Subsystem::Beta))?;
    let mut obj = Objective {
        state,
        evaluations: 0,
    };
    let mut rng = seeded(cfg.seed);

    let mut starts = Vec::with_capacity(cfg.starts.max(1));
    starts.push(eig_hermitian(&partial_trace(state, Subsystem::Alpha))?.vectors);
    while starts.len() < cfg.starts.max(1) {
        starts.push(random_unitary(d, &mut rng));
    }

    let mut best: Option<(CMatrix, f64)> = None;
    let mut converged = true;
    for s in starts {
        let (u, f, ok) = local_descent(&mut obj, s, cfg);
        converged &= ok;
        if best.as_ref().map_or(true, |b| f < b.1) {
            best = Some((u, f));
        }
    }
    let (mut u, mut f) = best.expect("at least one start");

    let grid = verification_grid(d, cfg);
    let mut grid_best: Option<(CMatrix, f64)> = None;
    for g in grid {
        let v = obj.eval(&g);
        if grid_best.as_ref().map_or(true, |b| v < b.1) {
            grid_best = Some((g, v));
        }
    }
    if let Some((g, v)) = grid_best {
        if v < f {
            let (gu, gf, ok) = local_descent(&mut obj, g.clone(), cfg);
            converged &= ok;
            if gf < v {
                (u, f) = (gu, gf);
            } else {
                (u, f) = (g, v);
            }
        }
    }

    let j = (sb - f).max(0.0);
    let measurement = Povm::projective(&u);
    Ok(MinDiscord {
        result: DiscordResult {
            mutual_information: mi,
            j_value: j,
            discord: clamp_discord(mi - j).max(0.0),
            measurement,
        },
        basis: u,
        converged,
        evaluations: obj.evaluations,
    })
}

/// How a concordance verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ConcordanceMethod {
    /// Joint block-diagonalization of the reduced operator family.
    Structural,
    /// Residual fell between the structural tolerance and the tie threshold.
    OptimizerFallback,
}

#[derive(Debug, Clone)]
pub struct ConcordanceCertificate {
    pub verdict: bool,
    /// Columns are the candidate basis `{|j>}` of Alice's space.
    pub basis: CMatrix,
    /// Frobenius norm of all off-diagonal blocks `<j|ϱ|k>`, `j != k`.
    pub residual: f64,
    pub method: ConcordanceMethod,
}

/// Frobenius norm of the off-diagonal Alice blocks of `ϱ` in `basis`.
pub fn off_block_residual(state: &BipartiteState, basis: &CMatrix) -> f64 {
    let rotated = state
        .apply_local_unitaries(&basis.adjoint(), &CMatrix::identity(state.dim_beta()))
        .expect("basis matches Alice dimension");
    let (da, db) = state.dims();
    let m = rotated.matrix();
    let mut s = 0.0;
    for r in 0..da * db {
        for c in 0..da * db {
            if r / db != c / db {
                s += m[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// `Σ_j (π_j ⊗ I) ϱ (π_j ⊗ I)` for the columns of `basis`.
pub fn dephase(state: &BipartiteState, basis: &CMatrix) -> BipartiteState {
    let db = state.dim_beta();
    let id = CMatrix::identity(db);
    let n = state.dim();
    let rho = (0..basis.cols()).fold(CMatrix::zeros(n, n), |acc, j| {
        let k = CMatrix::outer(&basis.column(j)).kron(&id);
        &acc + &k.conjugate(state.matrix())
    });
    BipartiteState::from_parts_unchecked(state.dim_alpha(), db, rho)
}

/// Hermitian, Hilbert–Schmidt orthonormal operator basis of `d × d` matrices.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = C64::new(1.0, 0.0);
        out.push(m);
    }
    for k in 0..d {
        for l in (k + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(k, l)] = C64::new(r, 0.0);
            m[(l, k)] = C64::new(r, 0.0);
            out.push(m);
            let mut m = CMatrix::zeros(d, d);
            m[(k, l)] = C64::new(0.0, r);
            m[(l, k)] = C64::new(0.0, -r);
            out.push(m);
        }
    }
    out
}

/// `Tr_β[(I ⊗ F) ϱ]`.
fn alice_reduced(state: &BipartiteState, f: &CMatrix) -> CMatrix {
    let (da, db) = state.dims();
    let rho = state.matrix();
    CMatrix::from_fn(da, da, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..db {
            for l in 0..db {
                let x = f[(l, k)];
                if x != C64::new(0.0, 0.0) {
                    acc += x * rho[(i * db + k, j * db + l)];
                }
            }
        }
        acc
    })
    .hermitian_part()
}

/// Common eigenbasis of a family of Hermitian matrices, by successive refinement of
/// degenerate eigenspaces. For a non-commuting family the result is just some basis.
fn joint_eigenbasis(family: &[CMatrix], d: usize) -> CMatrix {
    let mut spaces: Vec<CMatrix> = vec![CMatrix::identity(d)];
    for x in family {
        let scale = x.max_abs().max(1.0);
        let mut next = Vec::with_capacity(spaces.len());
        for v in spaces {
            if v.cols() == 1 {
                next.push(v);
                continue;
            }
            let y = v.adjoint().matmul(x).matmul(&v).hermitian_part();
            let e = eig_hermitian(&y).expect("projected operator is Hermitian");
            let w = v.matmul(&e.vectors);
            let mut start = 0;
            for k in 1..=e.values.len() {
                if k == e.values.len() || e.values[k] - e.values[k - 1] > 1e-9 * scale {
                    let cols: Vec<Vec<C64>> = (start..k).map(|c| w.column(c)).collect();
                    next.push(CMatrix::from_columns(&cols));
                    start = k;
                }
            }
        }
        spaces = next;
        if spaces.iter().all(|s| s.cols() == 1) {
            break;
        }
    }
    let cols: Vec<Vec<C64>> = spaces
        .iter()
        .flat_map(|s| (0..s.cols()).map(|c| s.column(c)))
        .collect();
    CMatrix::from_columns(&cols)
}

fn structural_certificate(state: &BipartiteState) -> ConcordanceCertificate {
    let mut family = vec![partial_trace(state, Subsystem::Alpha)];
    family.extend(
        hermitian_basis(state.dim_beta())
            .iter()
            .map(|f| alice_reduced(state, f)),
    );
    let basis = joint_eigenbasis(&family, state.dim_alpha());
    let residual = off_block_residual(state, &basis);
    ConcordanceCertificate {
        verdict: residual <= CONCORDANCE_TOL,
        basis,
        residual,
        method: ConcordanceMethod::Structural,
    }
}

/// Tests for the form `Σ_j p_j |j><j| ⊗ ρ_j`, i.e. zero Alice-discord.
pub fn is_alice_concordant(state: &BipartiteState) -> ConcordanceCertificate {
    let mut cert = structural_certificate(state);
    if cert.residual > CONCORDANCE_TOL && cert.residual <= CONCORDANCE_TIE {
        if let Ok(m) = min_discord(state, &OptimizerConfig::default()) {
            cert.verdict = m.is_zero();
            cert.method = ConcordanceMethod::OptimizerFallback;
        }
    }
    cert
}

/// Zero Bob-discord test, via the swapped state.
pub fn is_bob_concordant(state: &BipartiteState) -> ConcordanceCertificate {
    is_alice_concordant(&state.swapped())
}

#[derive(Debug, Clone)]
pub struct ConsonanceCertificate {
    pub verdict: bool,
    pub alice: ConcordanceCertificate,
    pub bob: ConcordanceCertificate,
    /// Off-diagonal norm of `ϱ` in the product basis of the two certificates.
    pub residual: f64,
    /// `P(j, k) = <j k|ϱ|j k>` in that product basis.
    pub weights: Vec<Vec<f64>>,
}

impl ConsonanceCertificate {
    /// At most one nonzero weight in every row and column, i.e. the form `Σ p(j) π_j ⊗ π_j'`
    /// with perfectly correlated indices.
    pub fn perfectly_correlated(&self) -> bool {
        let nz = |w: f64| w > 1e-12;
        let rows_ok = self
            .weights
            .iter()
            .all(|r| r.iter().filter(|&&w| nz(w)).count() <= 1);
        let cols = self.weights.first().map_or(0, Vec::len);
        let cols_ok = (0..cols).all(|k| self.weights.iter().filter(|r| nz(r[k])).count() <= 1);
        self.verdict && rows_ok && cols_ok
    }
}

impl ConsonanceCertificate {
    /// Decomposition `Σ P(j,k) π_j ⊗ π_k` as (weight, Alice projector, Bob projector), zero weights dropped.
    pub fn decomposition(&self) -> Vec<(f64, CMatrix, CMatrix)> {
        let mut out = Vec::new();
        for (j, row) in self.weights.iter().enumerate() {
            for (k, &w) in row.iter().enumerate() {
                if w > 1e-14 {
                    out.push((
                        w,
                        CMatrix::outer(&self.alice.basis.column(j)),
                        CMatrix::outer(&self.bob.basis.column(k)),
                    ));
                }
            }
        }
        out
    }
}

/// Classical on both sides: `Σ P(j,k) π_j^α ⊗ π_k^β` with rank-one orthogonal projectors.
pub fn is_consonant(state: &BipartiteState) -> ConsonanceCertificate {
    let alice = is_alice_concordant(state);
    let bob = is_bob_concordant(state);
    let rotated = state
        .apply_local_unitaries(&alice.basis.adjoint(), &bob.basis.adjoint())
        .expect("certificate bases match dimensions");
    let m = rotated.matrix();
    let n = state.dim();
    let mut off = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                off += m[(r, c)].norm_sqr();
            }
        }
    }
    let residual = off.sqrt();
    let db = state.dim_beta();
    let weights = (0..state.dim_alpha())
        .map(|j| {
            (0..db)
                .map(|k| m[(j * db + k, j * db + k)].re.max(0.0))
                .collect()
        })
        .collect();
    ConsonanceCertificate {
        verdict: alice.verdict && bob.verdict && residual <= CONCORDANCE_TOL,
        alice,
        bob,
        residual,
        weights,
    }
}
