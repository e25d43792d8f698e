use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use super::eig::{eig_hermitian, hermitian_tolerance};
use super::matrix::{kron_vec, vec_norm, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues in `[-ENTROPY_FLOOR, 0]` count as zero; anything lower is an invalid state.
pub const ENTROPY_FLOOR: f64 = 1e-12;

/// Which side of the bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Subsystem {
    Alpha,
    Beta,
}

/// Density operator on `C^dim_alpha ⊗ C^dim_beta`, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_alpha: usize,
    dim_beta: usize,
    rho: CMatrix,
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// Validates that `rho` is a density operator of size `n`: Hermitian, unit trace,
/// positive semidefinite, all within `1e-9 * n`.
pub fn validate_density(rho: &CMatrix, n: usize) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    if rho.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho.rows(),
        });
    }
    let tol = hermitian_tolerance(n);
    let deviation = rho.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > tol {
        return Err(Error::TraceNotOne { trace });
    }
    let min_eigenvalue = eig_hermitian(rho)?.values[0];
    if min_eigenvalue < -tol {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(())
}

impl BipartiteState {
    pub fn new(dim_alpha: usize, dim_beta: usize, rho: CMatrix) -> Result<Self> {
        check_dim(dim_alpha)?;
        check_dim(dim_beta)?;
        validate_density(&rho, dim_alpha * dim_beta)?;
        Ok(Self {
            dim_alpha,
            dim_beta,
            rho: rho.hermitian_part(),
        })
    }

    /// Skips the spectral check; callers guarantee positivity and unit trace by construction.
    pub(crate) fn from_parts_unchecked(dim_alpha: usize, dim_beta: usize, rho: CMatrix) -> Self {
        debug_assert_eq!(rho.rows(), dim_alpha * dim_beta);
        Self {
            dim_alpha,
            dim_beta,
            rho: rho.hermitian_part(),
        }
    }

    pub fn product(alpha: &CMatrix, beta: &CMatrix) -> Result<Self> {
        validate_density(alpha, alpha.rows())?;
        validate_density(beta, beta.rows())?;
        Self::new(alpha.rows(), beta.rows(), alpha.kron(beta))
    }

    /// Convex combination `Σ_k w_k ρ_k^α ⊗ ρ_k^β`; every component is validated.
    pub fn separable(weights: &[f64], alpha: &[CMatrix], beta: &[CMatrix]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("decomposition"));
        }
        if weights.len() != alpha.len() || weights.len() != beta.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: alpha.len().min(beta.len()),
            });
        }
        let (da, db) = (alpha[0].rows(), beta[0].rows());
        let mut rho = CMatrix::zeros(da * db, da * db);
        for ((&w, a), b) in weights.iter().zip(alpha).zip(beta) {
            if w < 0.0 {
                return Err(Error::Precondition(alloc::format!("negative weight {w}")));
            }
            validate_density(a, da)?;
            validate_density(b, db)?;
            rho = &rho + &a.kron(b).scale_real(w);
        }
        Self::new(da, db, rho)
    }

    #[inline]
    pub fn dim_alpha(&self) -> usize {
        self.dim_alpha
    }

    #[inline]
    pub fn dim_beta(&self) -> usize {
        self.dim_beta
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim_alpha * self.dim_beta
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_alpha, self.dim_beta)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho).re
    }

    /// Exchanges the roles of Alice and Bob.
    pub fn swapped(&self) -> Self {
        let (da, db) = (self.dim_alpha, self.dim_beta);
        let rho = CMatrix::from_fn(da * db, da * db, |r, c| {
            let (k, i) = (r / da, r % da);
            let (l, j) = (c / da, c % da);
            self.rho[(i * db + k, j * db + l)]
        });
        Self {
            dim_alpha: db,
            dim_beta: da,
            rho,
        }
    }

    /// `(U_α ⊗ U_β) ϱ (U_α ⊗ U_β)†`.
    pub fn apply_local_unitaries(&self, u_alpha: &CMatrix, u_beta: &CMatrix) -> Result<Self> {
        if u_alpha.rows() != self.dim_alpha || u_beta.rows() != self.dim_beta {
            return Err(Error::DimensionMismatch {
                expected: self.dim_alpha,
                found: u_alpha.rows(),
            });
        }
        let u = u_alpha.kron(u_beta);
        Ok(Self::from_parts_unchecked(
            self.dim_alpha,
            self.dim_beta,
            u.conjugate(&self.rho),
        ))
    }

    pub fn partial_trace(&self, keep: Subsystem) -> CMatrix {
        partial_trace(self, keep)
    }

    /// Matrix obtained by transposing Bob's indices.
    pub fn partial_transpose(&self) -> CMatrix {
        let (da, db) = (self.dim_alpha, self.dim_beta);
        CMatrix::from_fn(da * db, da * db, |r, c| {
            let (i, k) = (r / db, r % db);
            let (j, l) = (c / db, c % db);
            self.rho[(i * db + l, j * db + k)]
        })
    }

    /// Block `<j|ϱ|k>` on Bob's space, for Alice basis indices `j, k` of the computational basis.
    pub fn alice_block(&self, j: usize, k: usize) -> CMatrix {
        let db = self.dim_beta;
        CMatrix::from_fn(db, db, |a, b| self.rho[(j * db + a, k * db + b)])
    }
}

/// Reduced density operator on the kept subsystem.
pub fn partial_trace(state: &BipartiteState, keep: Subsystem) -> CMatrix {
    let (da, db) = state.dims();
    let rho = state.matrix();
    match keep {
        Subsystem::Alpha => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| rho[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::Beta => CMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| rho[(i * db + k, i * db + l)]).sum()
        }),
    }
}

/// `-Σ λ log2 λ`, requiring a density operator.
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    validate_shape_and_trace(rho)?;
    let values = eig_hermitian(rho)?.values;
    entropy_of_spectrum(&values)
}

fn validate_shape_and_trace(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > hermitian_tolerance(rho.rows()) {
        return Err(Error::TraceNotOne { trace });
    }
    Ok(())
}

/// Shannon entropy (bits) of an eigenvalue list, clamping `[-1e-12, 0]` to zero.
pub fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &x in values {
        if x < -ENTROPY_FLOOR {
            return Err(Error::NotPositive { min_eigenvalue: x });
        }
        if x > 0.0 {
            s -= x * x.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Pure bipartite state vector with index `i * dim_beta + k` for `|i>_α |k>_β`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim_alpha: usize,
    dim_beta: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dim_alpha: usize, dim_beta: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(dim_alpha)?;
        check_dim(dim_beta)?;
        if amplitudes.len() != dim_alpha * dim_beta {
            return Err(Error::DimensionMismatch {
                expected: dim_alpha * dim_beta,
                found: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            dim_alpha,
            dim_beta,
            amplitudes,
        })
    }

    /// Normalizes the given amplitudes first.
    pub fn normalized(dim_alpha: usize, dim_beta: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::new(dim_alpha, dim_beta, amplitudes)
    }

    pub fn product(alpha: &[C64], beta: &[C64]) -> Result<Self> {
        Self::normalized(alpha.len(), beta.len(), kron_vec(alpha, beta))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_alpha, self.dim_beta)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> BipartiteState {
        BipartiteState::from_parts_unchecked(
            self.dim_alpha,
            self.dim_beta,
            CMatrix::outer(&self.amplitudes),
        )
    }
}

/// `ψ = Σ_k c_k |u_k> ⊗ |v_k>`; columns of the bases are the Schmidt vectors.
#[derive(Debug, Clone)]
pub struct Schmidt {
    pub coefficients: Vec<f64>,
    pub alpha_basis: CMatrix,
    pub beta_basis: CMatrix,
}

impl Schmidt {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> Vec<C64> {
        let (da, db) = (self.alpha_basis.rows(), self.beta_basis.rows());
        let mut out = alloc::vec![ZERO; da * db];
        for (k, &c) in self.coefficients.iter().enumerate() {
            for i in 0..da {
                for j in 0..db {
                    out[i * db + j] += self.alpha_basis[(i, k)] * self.beta_basis[(j, k)] * c;
                }
            }
        }
        out
    }
}

/// Schmidt decomposition via the eigenvectors of `M M†`, `M` the amplitude matrix.
///
/// Coefficients are recomputed as `‖Mᵀ conj(u_k)‖` rather than from the square root
/// of the eigenvalues, which keeps small coefficients accurate; components below
/// `1e-12` are dropped.
pub fn schmidt_decomposition(psi: &PureState) -> Result<Schmidt> {
    let (da, db) = psi.dims();
    let norm = vec_norm(psi.amplitudes());
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm });
    }
    let m = CMatrix::from_fn(da, db, |i, j| psi.amplitudes()[i * db + j]);
    let eig = eig_hermitian(&m.matmul(&m.adjoint()))?;

    let mut terms: Vec<(f64, Vec<C64>, Vec<C64>)> = Vec::new();
    for k in (0..da).rev() {
        let u = eig.vector(k);
        // w[j] = Σ_i M_ij conj(u_i)
        let w: Vec<C64> = (0..db)
            .map(|j| (0..da).map(|i| m[(i, j)] * u[i].conj()).sum())
            .collect();
        let c = vec_norm(&w);
        if c > 1e-12 {
            let w = w.into_iter().map(|z| z / c).collect();
            terms.push((c, u, w));
        }
    }
    terms.sort_by(|a, b| b.0.total_cmp(&a.0));
    let coefficients = terms.iter().map(|t| t.0).collect();
    let alpha_basis = CMatrix::from_columns(&terms.iter().map(|t| t.1.clone()).collect::<Vec<_>>());
    let beta_basis = CMatrix::from_columns(&terms.iter().map(|t| t.2.clone()).collect::<Vec<_>>());
    Ok(Schmidt {
        coefficients,
        alpha_basis,
        beta_basis,
    })
}
