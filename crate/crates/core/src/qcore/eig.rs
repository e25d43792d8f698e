//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, then applies the
//! classical real Jacobi rotation to the resulting real symmetric 2x2 block.
//! Convergence is quadratic once the off-diagonal mass is small, and the
//! eigenvectors come out orthonormal to machine precision.

use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    /// `V diag(values) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }

    /// `V diag(f(values)) V†`, the spectral calculus.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fv[k]).sum()
        })
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

/// Tolerance on `|m_ij - conj(m_ji)|` accepted as Hermitian: `1e-9 * dim`.
pub fn hermitian_tolerance(dim: usize) -> f64 {
    1e-9 * dim.max(1) as f64
}

/// Eigendecomposition of a Hermitian matrix. Rejects non-square or non-Hermitian input.
pub fn eig_hermitian(m: &CMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > hermitian_tolerance(m.rows()) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(jacobi(&m.hermitian_part()))
}

/// Eigenvalues only.
pub fn eigvals_hermitian(m: &CMatrix) -> Result<Vec<f64>> {
    eig_hermitian(m).map(|e| e.values)
}

fn off_diagonal_norm_sqr(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

pub(crate) fn jacobi(m: &CMatrix) -> Eigen {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm_sqr(&a);
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let g_abs = g.norm();
                if g_abs <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Skip rotations that cannot change the diagonal in floating point.
                if g_abs < 1e-18 * scale && g_abs * 1e3 < (app - aqq).abs() {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                let phase = g / g_abs;
                let theta = (aqq - app) / (2.0 * g_abs);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // G restricted to (p, q): [[c, s], [-s·conj(e), c·conj(e)]]
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = phase.conj() * (-s);
                let gqq = phase.conj() * c;

                // A <- A G
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * gpp + aiq * gqp;
                    a[(i, q)] = aip * gpq + aiq * gqq;
                }
                // A <- G† A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = gpp.conj() * apj + gqp.conj() * aqj;
                    a[(q, j)] = gpq.conj() * apj + gqq.conj() * aqj;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // V <- V G
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * gpp + viq * gqp;
                    v[(i, q)] = vip * gpq + viq * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Eigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::pauli;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn identity_eigenvalues() {
        let e = eig_hermitian(&CMatrix::identity(2)).unwrap();
        assert_eq!(e.values, alloc::vec![1.0, 1.0]);
    }

    #[test]
    fn pauli_z_eigensystem() {
        let e = eig_hermitian(&pauli::z()).unwrap();
        assert!(close(e.values[0], -1.0) && close(e.values[1], 1.0));
        // -1 eigenvector is |1>, +1 eigenvector is |0> (up to phase)
        assert!(close(e.vectors[(1, 0)].norm(), 1.0));
        assert!(close(e.vectors[(0, 1)].norm(), 1.0));
    }

    #[test]
    fn pauli_x_eigensystem() {
        // characteristic polynomial λ² - 1 = 0; eigenvectors (|0> ∓ |1>)/√2
        let e = eig_hermitian(&pauli::x()).unwrap();
        assert!(close(e.values[0], -1.0) && close(e.values[1], 1.0));
        let minus = e.vector(0);
        let ratio = minus[1] / minus[0];
        assert!(close(ratio.re, -1.0) && close(ratio.im, 0.0));
        assert!(close(minus[0].norm(), FRAC_1_SQRT_2));
        let plus = e.vector(1);
        let ratio = plus[1] / plus[0];
        assert!(close(ratio.re, 1.0) && close(ratio.im, 0.0));
    }

    #[test]
    fn complex_pivot_is_handled() {
        let e = eig_hermitian(&pauli::y()).unwrap();
        assert!(close(e.values[0], -1.0) && close(e.values[1], 1.0));
        assert!(e.reconstruct().distance(&pauli::y()) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }
}
