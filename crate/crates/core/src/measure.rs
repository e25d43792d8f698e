//! POVMs, instruments, Born-rule statistics and adaptive two-step strategies.
//!
//! Outcome labels are plain indices `0..n`. Alice's measurements are
//! instruments because disturbance questions need the post-measurement state;
//! Bob only ever needs POVMs.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::qcore::{eig_hermitian, hermitian_tolerance, pauli, BipartiteState, CMatrix, C64};

/// Conditional states below this probability are reported as undefined.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Positive operator-valued measure; one effect per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<CMatrix>,
}

fn check_psd(m: &CMatrix, tol: f64) -> Result<()> {
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let min_eigenvalue = eig_hermitian(m)?.values[0];
    if min_eigenvalue < -tol {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(())
}

fn check_identity(sum: &CMatrix) -> Result<()> {
    let d = sum.rows();
    let deviation = sum.distance(&CMatrix::identity(d));
    if deviation > hermitian_tolerance(d) {
        return Err(Error::Incomplete { deviation });
    }
    Ok(())
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let first = effects.first().ok_or(Error::Empty("POVM"))?;
        if !first.is_square() {
            return Err(Error::NotSquare {
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        let d = first.rows();
        let tol = hermitian_tolerance(d);
        let mut sum = CMatrix::zeros(d, d);
        for e in &effects {
            if e.rows() != d || e.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.rows(),
                });
            }
            check_psd(e, tol)?;
            sum = &sum + e;
        }
        check_identity(&sum)?;
        Ok(Self {
            effects: effects.into_iter().map(|e| e.hermitian_part()).collect(),
        })
    }

    pub(crate) fn from_effects_unchecked(effects: Vec<CMatrix>) -> Self {
        Self { effects }
    }

    /// Rank-one projective measurement onto the columns of a unitary.
    pub fn projective(basis: &CMatrix) -> Self {
        Self {
            effects: (0..basis.cols())
                .map(|j| CMatrix::outer(&basis.column(j)))
                .collect(),
        }
    }

    pub fn computational(d: usize) -> Self {
        Self::projective(&CMatrix::identity(d))
    }

    /// Spin measurement along `n`: outcome 0 is `+1`, outcome 1 is `-1`.
    pub fn spin(n: [f64; 3]) -> Self {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let ns = &(&pauli::x().scale_real(n[0] / norm) + &pauli::y().scale_real(n[1] / norm))
            + &pauli::z().scale_real(n[2] / norm);
        let id = CMatrix::identity(2);
        Self {
            effects: vec![(&id + &ns).scale_real(0.5), (&id - &ns).scale_real(0.5)],
        }
    }

    pub fn sigma_x() -> Self {
        Self::spin([1.0, 0.0, 0.0])
    }

    pub fn sigma_y() -> Self {
        Self::spin([0.0, 1.0, 0.0])
    }

    pub fn sigma_z() -> Self {
        Self::spin([0.0, 0.0, 1.0])
    }

    /// The one-outcome measurement `{I}`.
    pub fn trivial(d: usize) -> Self {
        Self {
            effects: vec![CMatrix::identity(d)],
        }
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn effect(&self, outcome: usize) -> &CMatrix {
        &self.effects[outcome]
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    /// Outcome `k` of the result is outcome `perm[k]` of `self`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let n = self.outcomes();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: perm.len(),
            });
        }
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidOutcome {
                    outcome: p,
                    count: n,
                });
            }
            seen[p] = true;
        }
        Ok(Self {
            effects: perm.iter().map(|&p| self.effects[p].clone()).collect(),
        })
    }

    /// `U† E U` for every effect.
    pub fn rotated(&self, u: &CMatrix) -> Self {
        let ud = u.adjoint();
        Self {
            effects: self.effects.iter().map(|e| ud.conjugate(e)).collect(),
        }
    }
}

/// Quantum instrument: for each outcome, a list of Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    outcomes: Vec<Vec<CMatrix>>,
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    eig_hermitian(m)
        .expect("effects are Hermitian")
        .map(|x| x.max(0.0).sqrt())
}

impl Instrument {
    pub fn new(outcomes: Vec<Vec<CMatrix>>) -> Result<Self> {
        let d = outcomes
            .iter()
            .flat_map(|ks| ks.first())
            .next()
            .ok_or(Error::Empty("instrument"))?
            .cols();
        let mut sum = CMatrix::zeros(d, d);
        for ks in &outcomes {
            for k in ks {
                if k.rows() != d || k.cols() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: k.rows(),
                    });
                }
                sum = &sum + &k.adjoint().matmul(k);
            }
        }
        check_identity(&sum)?;
        Ok(Self { outcomes })
    }

    /// Does nothing and always reports outcome 0.
    pub fn identity(d: usize) -> Self {
        Self {
            outcomes: vec![vec![CMatrix::identity(d)]],
        }
    }

    /// Lüders instrument `K_A = sqrt(E_A)`; for projective POVMs this is the projective measurement.
    pub fn lueders(povm: &Povm) -> Self {
        Self {
            outcomes: povm.effects().iter().map(|e| vec![psd_sqrt(e)]).collect(),
        }
    }

    /// Measure in `basis`, measure `inner`, then re-prepare the basis state that was found.
    ///
    /// As a channel this is `K_{A,j} = sqrt(<j|E_A|j>) |j><j|`; on average it dephases
    /// in `basis`, so it leaves any state block-diagonal in that basis unchanged.
    pub fn measure_and_reprepare(basis: &CMatrix, inner: &Povm) -> Self {
        let d = basis.rows();
        let projectors: Vec<(CMatrix, Vec<C64>)> = (0..d)
            .map(|j| {
                let v = basis.column(j);
                (CMatrix::outer(&v), v)
            })
            .collect();
        let outcomes = inner
            .effects()
            .iter()
            .map(|e| {
                projectors
                    .iter()
                    .filter_map(|(p, v)| {
                        let w = e.apply(v);
                        let weight: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
                        (weight > 0.0).then(|| p.scale_real(weight.sqrt()))
                    })
                    .collect()
            })
            .collect();
        Self { outcomes }
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn kraus(&self, outcome: usize) -> &[CMatrix] {
        &self.outcomes[outcome]
    }

    pub fn dim(&self) -> usize {
        self.outcomes
            .iter()
            .flat_map(|k| k.first())
            .next()
            .map_or(0, CMatrix::cols)
    }

    /// Effects `Σ_k K_k† K_k` of each outcome.
    pub fn povm(&self) -> Povm {
        let d = self.dim();
        Povm::from_effects_unchecked(
            self.outcomes
                .iter()
                .map(|ks| {
                    ks.iter()
                        .fold(CMatrix::zeros(d, d), |acc, k| &acc + &k.adjoint().matmul(k))
                })
                .collect(),
        )
    }
}

/// First an instrument, then a POVM chosen by the first outcome.
#[derive(Debug, Clone)]
pub struct AdaptiveStrategy {
    first: Instrument,
    followup: Vec<Povm>,
}

impl AdaptiveStrategy {
    pub fn new(first: Instrument, followup: Vec<Povm>) -> Result<Self> {
        if followup.len() != first.outcomes() {
            return Err(Error::DimensionMismatch {
                expected: first.outcomes(),
                found: followup.len(),
            });
        }
        let n2 = followup[0].outcomes();
        for f in &followup {
            if f.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: f.dim(),
                });
            }
            if f.outcomes() != n2 {
                return Err(Error::DimensionMismatch {
                    expected: n2,
                    found: f.outcomes(),
                });
            }
        }
        Ok(Self { first, followup })
    }

    /// The same follow-up regardless of the first outcome.
    pub fn constant(first: Instrument, followup: Povm) -> Self {
        let followup = vec![followup; first.outcomes()];
        Self { first, followup }
    }

    pub fn first(&self) -> &Instrument {
        &self.first
    }

    pub fn followup(&self, first_outcome: usize) -> &Povm {
        &self.followup[first_outcome]
    }
}

/// Joint probability table `p(A, B)` stored row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawTable"))]
pub struct JointTable {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Unvalidated table as read from a serialized form.
#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct RawTable {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawTable> for JointTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        JointTable::new(raw.rows, raw.cols, raw.data, 1e-9)
    }
}

impl JointTable {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Validates nonnegativity and normalization within `tol`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>, tol: f64) -> Result<Self> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::InvalidTable(alloc::format!(
                "expected {rows}x{cols} entries, got {}",
                data.len()
            )));
        }
        if let Some(x) = data.iter().find(|x| !x.is_finite() || **x < -tol) {
            return Err(Error::InvalidTable(alloc::format!(
                "entry {x} is not a probability"
            )));
        }
        let total: f64 = data.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidTable(alloc::format!(
                "entries sum to {total}"
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidTable("ragged rows".into()));
        }
        Self::new(r, c, rows.concat(), tol)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.cols + b]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, p: f64) {
        self.data[a * self.cols + b] = p;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// `p(A) = Σ_B p(A, B)`.
    pub fn alice_marginal(&self) -> Vec<f64> {
        self.data
            .chunks(self.cols)
            .map(|r| r.iter().sum())
            .collect()
    }

    /// `p(B) = Σ_A p(A, B)`.
    pub fn bob_marginal(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|b| (0..self.rows).map(|a| self.get(a, b)).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `½ Σ |p - q|`; infinite for mismatched shapes.
    pub fn total_variation(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        0.5 * self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    pub(crate) fn add_scaled(&mut self, other: &Self, w: f64) {
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += w * b);
    }
}

fn check_alice(state: &BipartiteState, d: usize) -> Result<()> {
    if d != state.dim_alpha() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_alpha(),
            found: d,
        });
    }
    Ok(())
}

fn check_bob(state: &BipartiteState, d: usize) -> Result<()> {
    if d != state.dim_beta() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_beta(),
            found: d,
        });
    }
    Ok(())
}

/// Unnormalized conditional state of Bob, `Tr_α[(E ⊗ I) ϱ]`.
pub fn bob_conditional(state: &BipartiteState, effect: &CMatrix) -> CMatrix {
    let (da, db) = state.dims();
    let rho = state.matrix();
    CMatrix::from_fn(db, db, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..da {
            for j in 0..da {
                let e = effect[(j, i)];
                if e != C64::new(0.0, 0.0) {
                    acc += e * rho[(i * db + k, j * db + l)];
                }
            }
        }
        acc
    })
    .hermitian_part()
}

/// Born-rule table `p(A, B) = Tr[(E_A ⊗ F_B) ϱ]`.
pub fn outcome_distribution(
    state: &BipartiteState,
    alice: &Povm,
    bob: &Povm,
) -> Result<JointTable> {
    check_alice(state, alice.dim())?;
    check_bob(state, bob.dim())?;
    let mut t = JointTable::zeros(alice.outcomes(), bob.outcomes());
    for (a, e) in alice.effects().iter().enumerate() {
        let cond = bob_conditional(state, e);
        for (b, f) in bob.effects().iter().enumerate() {
            t.set(a, b, f.trace_product(&cond).re.max(0.0));
        }
    }
    Ok(t)
}

/// Result of conditioning on one outcome of an instrument.
#[derive(Debug, Clone)]
pub enum Conditional {
    Defined {
        probability: f64,
        state: BipartiteState,
    },
    /// The outcome has probability below [`ZERO_PROBABILITY`]; no state is defined.
    Undefined { probability: f64 },
}

impl Conditional {
    pub fn probability(&self) -> f64 {
        match self {
            Conditional::Defined { probability, .. } | Conditional::Undefined { probability } => {
                *probability
            }
        }
    }

    pub fn state(&self) -> Option<&BipartiteState> {
        match self {
            Conditional::Defined { state, .. } => Some(state),
            Conditional::Undefined { .. } => None,
        }
    }
}

fn unnormalized_branch(state: &BipartiteState, kraus: &[CMatrix]) -> CMatrix {
    let db = state.dim_beta();
    let id = CMatrix::identity(db);
    let n = state.dim();
    kraus.iter().fold(CMatrix::zeros(n, n), |acc, k| {
        &acc + &k.kron(&id).conjugate(state.matrix())
    })
}

/// Probability of `outcome` and the normalized post-measurement state.
pub fn post_measurement_state(
    state: &BipartiteState,
    inst: &Instrument,
    outcome: usize,
) -> Result<Conditional> {
    check_alice(state, inst.dim())?;
    if outcome >= inst.outcomes() {
        return Err(Error::InvalidOutcome {
            outcome,
            count: inst.outcomes(),
        });
    }
    let branch = unnormalized_branch(state, inst.kraus(outcome));
    let probability = branch.trace().re.max(0.0);
    if probability < ZERO_PROBABILITY {
        return Ok(Conditional::Undefined { probability });
    }
    let (da, db) = state.dims();
    Ok(Conditional::Defined {
        probability,
        state: BipartiteState::from_parts_unchecked(da, db, branch.scale_real(1.0 / probability)),
    })
}

/// `Σ_A (K_A ⊗ I) ϱ (K_A ⊗ I)†`, the state after the instrument with the outcome forgotten.
pub fn average_channel_state(state: &BipartiteState, inst: &Instrument) -> Result<BipartiteState> {
    check_alice(state, inst.dim())?;
    let n = state.dim();
    let rho = (0..inst.outcomes()).fold(CMatrix::zeros(n, n), |acc, a| {
        &acc + &unnormalized_branch(state, inst.kraus(a))
    });
    let (da, db) = state.dims();
    Ok(BipartiteState::from_parts_unchecked(da, db, rho))
}

/// Joint distribution `p(A1, A2, B)` of an adaptive strategy and Bob's POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveTable {
    first: usize,
    second: usize,
    bob: usize,
    data: Vec<f64>,
}

impl AdaptiveTable {
    pub fn get(&self, a1: usize, a2: usize, b: usize) -> f64 {
        self.data[(a1 * self.second + a2) * self.bob + b]
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.first, self.second, self.bob)
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// `p(A2, B) = Σ_{A1} p(A1, A2, B)`.
    pub fn second_and_bob(&self) -> JointTable {
        let mut t = JointTable::zeros(self.second, self.bob);
        for a1 in 0..self.first {
            for a2 in 0..self.second {
                for b in 0..self.bob {
                    t.set(a2, b, t.get(a2, b) + self.get(a1, a2, b));
                }
            }
        }
        t
    }
}

/// Runs `first`, then the follow-up selected by its outcome, alongside Bob's POVM.
pub fn run_adaptive(
    state: &BipartiteState,
    strat: &AdaptiveStrategy,
    bob: &Povm,
) -> Result<AdaptiveTable> {
    check_bob(state, bob.dim())?;
    let first = strat.first();
    let second = strat.followup(0).outcomes();
    let mut data = vec![0.0; first.outcomes() * second * bob.outcomes()];
    for a1 in 0..first.outcomes() {
        if let Conditional::Defined {
            probability,
            state: post,
        } = post_measurement_state(state, first, a1)?
        {
            let t = outcome_distribution(&post, strat.followup(a1), bob)?;
            for a2 in 0..second {
                for b in 0..bob.outcomes() {
                    data[(a1 * second + a2) * bob.outcomes() + b] = probability * t.get(a2, b);
                }
            }
        }
    }
    Ok(AdaptiveTable {
        first: first.outcomes(),
        second,
        bob: bob.outcomes(),
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::states::{self, ket, ket_plus, projector};
    use crate::random;

    const EPS: f64 = 1e-12;

    #[test]
    fn bell_zz_statistics() {
        let t =
            outcome_distribution(&states::phi_plus(), &Povm::sigma_z(), &Povm::sigma_z()).unwrap();
        let expect = [0.5, 0.0, 0.0, 0.5];
        for (x, y) in t.as_slice().iter().zip(expect) {
            assert!((x - y).abs() < EPS);
        }
    }

    #[test]
    fn trivial_povms_give_certainty() {
        let s = random::random_state(2, 3, &mut random::seeded(1));
        let t = outcome_distribution(&s, &Povm::trivial(2), &Povm::trivial(3)).unwrap();
        assert!((t.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_factorizes() {
        let mut rng = random::seeded(2);
        let ra = random::random_density(2, 2, &mut rng);
        let rb = random::random_density(3, 2, &mut rng);
        let s = BipartiteState::product(&ra, &rb).unwrap();
        let alice = Povm::projective(&random::random_unitary(2, &mut rng));
        let bob = Povm::projective(&random::random_unitary(3, &mut rng));
        let t = outcome_distribution(&s, &alice, &bob).unwrap();
        let (pa, pb) = (t.alice_marginal(), t.bob_marginal());
        for (a, x) in pa.iter().enumerate() {
            for (b, y) in pb.iter().enumerate() {
                assert!((t.get(a, b) - x * y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let r = outcome_distribution(
            &states::phi_plus(),
            &Povm::computational(3),
            &Povm::sigma_z(),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bell_post_measurement() {
        let inst = Instrument::lueders(&Povm::sigma_z());
        let c = post_measurement_state(&states::phi_plus(), &inst, 0).unwrap();
        assert!((c.probability() - 0.5).abs() < EPS);
        let p00 = projector(&crate::qcore::kron_vec(&ket(2, 0), &ket(2, 0)));
        assert!(c.state().unwrap().matrix().distance(&p00) < EPS);
    }

    #[test]
    fn product_state_bob_marginal_unchanged_by_alice_update() {
        let mut rng = random::seeded(5);
        let rb = random::random_density(2, 2, &mut rng);
        let s = BipartiteState::product(&random::random_density(2, 2, &mut rng), &rb).unwrap();
        let inst = Instrument::lueders(&Povm::projective(&random::random_unitary(2, &mut rng)));
        for a in 0..2 {
            let c = post_measurement_state(&s, &inst, a).unwrap();
            let post = c
                .state()
                .unwrap()
                .partial_trace(crate::qcore::Subsystem::Beta);
            assert!(post.distance(&rb) < 1e-12);
        }
    }

    #[test]
    fn classical_quantum_block_selection() {
        let r0 = CMatrix::diag_real(&[0.8, 0.2]);
        let r1 = projector(&ket_plus());
        let s = states::classical_quantum(&CMatrix::identity(2), &[0.5, 0.5], &[r0, r1.clone()])
            .unwrap();
        let inst = Instrument::lueders(&Povm::computational(2));
        let c = post_measurement_state(&s, &inst, 1).unwrap();
        assert!((c.probability() - 0.5).abs() < EPS);
        let expect = projector(&ket(2, 1)).kron(&r1);
        assert!(c.state().unwrap().matrix().distance(&expect) < EPS);
    }

    #[test]
    fn zero_probability_outcome_is_flagged() {
        let inst = Instrument::lueders(&Povm::sigma_z());
        let s = BipartiteState::product(&projector(&ket(2, 0)), &projector(&ket(2, 0))).unwrap();
        let c = post_measurement_state(&s, &inst, 1).unwrap();
        assert!(matches!(c, Conditional::Undefined { .. }));
        assert!(post_measurement_state(&s, &inst, 2).is_err());
    }

    #[test]
    fn average_channel_examples() {
        let s = states::alice_concordant_example();
        let mr = Instrument::measure_and_reprepare(&CMatrix::identity(2), &Povm::sigma_x());
        assert!(
            average_channel_state(&s, &mr)
                .unwrap()
                .matrix()
                .distance(s.matrix())
                < 1e-9
        );

        let deph =
            average_channel_state(&states::phi_plus(), &Instrument::lueders(&Povm::sigma_z()))
                .unwrap();
        let expect = CMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]);
        assert!(deph.matrix().distance(&expect) < EPS);

        let r = random::random_state(2, 2, &mut random::seeded(9));
        assert!(
            average_channel_state(&r, &Instrument::identity(2))
                .unwrap()
                .matrix()
                .distance(r.matrix())
                < EPS
        );
    }

    #[test]
    fn adaptive_with_identity_first_step() {
        let strat = AdaptiveStrategy::constant(Instrument::identity(2), Povm::sigma_z());
        let t = run_adaptive(&states::phi_plus(), &strat, &Povm::sigma_z()).unwrap();
        let direct =
            outcome_distribution(&states::phi_plus(), &Povm::sigma_z(), &Povm::sigma_z()).unwrap();
        assert!(t.second_and_bob().max_abs_diff(&direct) < EPS);
    }

    #[test]
    fn adaptive_reprepare_then_sigma_x() {
        // Oracle: compose the dephasing channel explicitly, then apply the Born rule.
        let s = states::alice_concordant_example();
        let mr = Instrument::measure_and_reprepare(&CMatrix::identity(2), &Povm::sigma_z());
        let strat = AdaptiveStrategy::constant(mr, Povm::sigma_x());
        let t = run_adaptive(&s, &strat, &Povm::sigma_x()).unwrap();
        let p0 = projector(&ket(2, 0));
        let p1 = projector(&ket(2, 1));
        let mut dephased = CMatrix::zeros(4, 4);
        for p in [&p0, &p1] {
            let k = p.kron(&CMatrix::identity(2));
            dephased = &dephased + &k.conjugate(s.matrix());
        }
        let oracle_state = BipartiteState::new(2, 2, dephased).unwrap();
        let oracle =
            outcome_distribution(&oracle_state, &Povm::sigma_x(), &Povm::sigma_x()).unwrap();
        assert!(t.second_and_bob().max_abs_diff(&oracle) < EPS);
        let direct = outcome_distribution(&s, &Povm::sigma_x(), &Povm::sigma_x()).unwrap();
        assert!(t.second_and_bob().max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn adaptive_z_then_x_on_bell_is_uninformative() {
        let strat =
            AdaptiveStrategy::constant(Instrument::lueders(&Povm::sigma_z()), Povm::sigma_x());
        let t = run_adaptive(&states::phi_plus(), &strat, &Povm::sigma_x())
            .unwrap()
            .second_and_bob();
        for a in 0..2 {
            for b in 0..2 {
                assert!((t.get(a, b) - 0.25).abs() < EPS);
            }
        }
    }

    #[test]
    fn projective_repeatability() {
        let mut rng = random::seeded(4);
        let s = random::random_state(2, 2, &mut rng);
        let povm = Povm::projective(&random::random_unitary(2, &mut rng));
        let strat = AdaptiveStrategy::constant(Instrument::lueders(&povm), povm.clone());
        let t = run_adaptive(&s, &strat, &Povm::trivial(2)).unwrap();
        let agree: f64 = (0..2).map(|a| t.get(a, a, 0)).sum();
        assert!((agree - 1.0).abs() < 1e-12);
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(alloc::vec![CMatrix::diag_real(&[1.0, 0.0])]).is_err());
        assert!(Povm::new(alloc::vec![
            CMatrix::diag_real(&[1.5, 0.0]),
            CMatrix::diag_real(&[-0.5, 1.0])
        ])
        .is_err());
        assert!(Povm::new(Povm::sigma_x().effects().to_vec()).is_ok());
        let bad = Instrument::new(alloc::vec![alloc::vec![CMatrix::diag_real(&[1.0, 0.0])]]);
        assert!(matches!(bad, Err(Error::Incomplete { .. })));
    }
}
