//! Named states and bases used across the toolkit.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use super::matrix::{CMatrix, C64, ONE, ZERO};
use super::state::{validate_density, BipartiteState, PureState};
use crate::error::{Error, Result};

pub fn ket(d: usize, j: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[j] = ONE;
    v
}

pub fn ket_plus() -> Vec<C64> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    vec![C64::new(h, 0.0), C64::new(h, 0.0)]
}

pub fn ket_minus() -> Vec<C64> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    vec![C64::new(h, 0.0), C64::new(-h, 0.0)]
}

pub fn projector(v: &[C64]) -> CMatrix {
    CMatrix::outer(v)
}

/// Discrete Fourier basis as the columns of a unitary: `|k~> = d^{-1/2} Σ_j ω^{jk} |j>`.
pub fn fourier_basis(d: usize) -> CMatrix {
    let s = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| {
        let angle = 2.0 * core::f64::consts::PI * ((j * k) % d) as f64 / d as f64;
        C64::new(angle.cos() * s, angle.sin() * s)
    })
}

/// `d^{-1/2} Σ_j |j>|j ⊕ shift>`; `shift = 0` gives the generalized Φ⁺.
pub fn max_entangled_vector(d: usize, shift: usize) -> PureState {
    let s = 1.0 / (d as f64).sqrt();
    let mut amps = vec![ZERO; d * d];
    for j in 0..d {
        amps[j * d + (j + shift) % d] = C64::new(s, 0.0);
    }
    PureState::new(d, d, amps).expect("maximally entangled state is normalized")
}

pub fn max_entangled(d: usize, shift: usize) -> BipartiteState {
    max_entangled_vector(d, shift).density()
}

pub fn phi_plus_vector() -> PureState {
    max_entangled_vector(2, 0)
}

pub fn phi_plus() -> BipartiteState {
    max_entangled(2, 0)
}

/// `p Φ⁺ + (1 - p) I/4`.
pub fn werner(p: f64) -> Result<BipartiteState> {
    let phi = phi_plus();
    let rho = &phi.matrix().scale_real(p) + &CMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    BipartiteState::new(2, 2, rho)
}

/// `Σ_j p_j |j><j| ⊗ ρ_j` where `|j>` are the columns of `basis`.
pub fn classical_quantum(
    basis: &CMatrix,
    probs: &[f64],
    bob_states: &[CMatrix],
) -> Result<BipartiteState> {
    if probs.len() != bob_states.len() || probs.len() > basis.cols() {
        return Err(Error::DimensionMismatch {
            expected: basis.cols(),
            found: probs.len(),
        });
    }
    let alpha: Vec<CMatrix> = (0..probs.len())
        .map(|j| CMatrix::outer(&basis.column(j)))
        .collect();
    for a in &alpha {
        validate_density(a, basis.rows())?;
    }
    BipartiteState::separable(probs, &alpha, bob_states)
}

/// `½(|00><00| + |11><11|)`, the canonical consonant state.
pub fn classically_correlated() -> BipartiteState {
    let p0 = projector(&ket(2, 0));
    let p1 = projector(&ket(2, 1));
    BipartiteState::separable(&[0.5, 0.5], &[p0.clone(), p1.clone()], &[p0, p1]).expect("valid")
}

/// `½(|0><0| ⊗ |0><0| + |1><1| ⊗ |+><+|)`: zero Alice-discord, nonzero Bob-discord.
pub fn alice_concordant_example() -> BipartiteState {
    let p0 = projector(&ket(2, 0));
    let p1 = projector(&ket(2, 1));
    let pp = projector(&ket_plus());
    BipartiteState::separable(&[0.5, 0.5], &[p0.clone(), p1], &[p0, pp]).expect("valid")
}

/// `½(|0><0| ⊗ |0><0| + |+><+| ⊗ |1><1|)`: separable but Alice-discordant.
pub fn alice_discordant_example() -> BipartiteState {
    alice_concordant_example().swapped()
}
