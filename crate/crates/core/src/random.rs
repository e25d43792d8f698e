//! Seeded random states, unitaries and measurements for tests and experiments.

use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qcore::{vec_norm, BipartiteState, CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal sample (Box–Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    let n = vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Haar-random unitary: Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let n = vec_norm(&v);
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    CMatrix::from_columns(&cols)
}

/// Random density matrix `G G† / Tr` with `G` a `d × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    m.scale_real(1.0 / t).hermitian_part()
}

/// Full-rank random state from the induced (Hilbert–Schmidt) measure.
pub fn random_state<R: Rng + ?Sized>(
    dim_alpha: usize,
    dim_beta: usize,
    rng: &mut R,
) -> BipartiteState {
    let n = dim_alpha * dim_beta;
    BipartiteState::from_parts_unchecked(dim_alpha, dim_beta, random_density(n, n, rng))
}

/// Probability vector with i.i.d. exponential weights (flat Dirichlet).
pub fn random_probabilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// `Σ_j p_j |u_j><u_j| ⊗ ρ_j` in a Haar-random Alice basis with random mixed `ρ_j`.
pub fn random_classical_quantum<R: Rng + ?Sized>(
    dim_alpha: usize,
    dim_beta: usize,
    rng: &mut R,
) -> (BipartiteState, CMatrix) {
    let u = random_unitary(dim_alpha, rng);
    let probs = random_probabilities(dim_alpha, rng);
    let mut rho = CMatrix::zeros(dim_alpha * dim_beta, dim_alpha * dim_beta);
    for (j, &p) in probs.iter().enumerate() {
        let pi = CMatrix::outer(&u.column(j));
        let rank = 1 + (rng.gen::<u32>() as usize) % dim_beta;
        let rb = random_density(dim_beta, rank, rng);
        rho = &rho + &pi.kron(&rb).scale_real(p);
    }
    (
        BipartiteState::from_parts_unchecked(dim_alpha, dim_beta, rho),
        u,
    )
}

/// Explicit separable state with its decomposition `(weights, alpha, beta)`.
pub struct SeparableSample {
    pub state: BipartiteState,
    pub weights: Vec<f64>,
    pub alpha: Vec<CMatrix>,
    pub beta: Vec<CMatrix>,
}

pub fn random_separable<R: Rng + ?Sized>(
    dim_alpha: usize,
    dim_beta: usize,
    terms: usize,
    rng: &mut R,
) -> SeparableSample {
    let weights = random_probabilities(terms, rng);
    let alpha: Vec<CMatrix> = (0..terms)
        .map(|_| {
            let r = 1 + (rng.gen::<u32>() as usize) % dim_alpha;
            random_density(dim_alpha, r, rng)
        })
        .collect();
    let beta: Vec<CMatrix> = (0..terms)
        .map(|_| {
            let r = 1 + (rng.gen::<u32>() as usize) % dim_beta;
            random_density(dim_beta, r, rng)
        })
        .collect();
    let mut rho = CMatrix::zeros(dim_alpha * dim_beta, dim_alpha * dim_beta);
    for k in 0..terms {
        rho = &rho + &alpha[k].kron(&beta[k]).scale_real(weights[k]);
    }
    let state = BipartiteState::from_parts_unchecked(dim_alpha, dim_beta, rho);
    SeparableSample {
        state,
        weights,
        alpha,
        beta,
    }
}
