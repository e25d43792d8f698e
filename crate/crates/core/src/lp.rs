//! Dense phase-one simplex for feasibility of `A x = b, x >= 0`.
//!
//! Infeasible systems come with a Farkas vector `y` satisfying `yᵀA <= 0` and
//! `yᵀb > 0`, which callers turn into inequality certificates.

use alloc::vec;
use alloc::vec::Vec;

/// Phase-one optimum at or below this counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const REDUCED_COST_TOL: f64 = 1e-11;
/// Largest `yᵀA_j` (relative to `max |y_i|`) accepted in a Farkas certificate.
const CERTIFICATE_TOL: f64 = 1e-9;
/// Largest `|Ax - b|` accepted for a returned solution.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Feasible {
        x: Vec<f64>,
        residual: f64,
    },
    /// `y` with `yᵀA_j <= 0` for every column and `yᵀb = gap > 0`.
    Infeasible {
        y: Vec<f64>,
        gap: f64,
    },
    /// Pivot limit reached, or a certificate failed verification.
    Undetermined,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible { .. })
    }
}

/// Row-major constraint matrix with `rows × cols` entries.
#[derive(Debug, Clone)]
pub struct Constraints {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Constraints {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            a: vec![0.0; rows * cols],
            b: vec![0.0; rows],
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * self.cols + c] = v;
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.cols + c]
    }

    /// `max_i |(A x - b)_i|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        (0..self.rows)
            .map(|r| {
                let row = &self.a[r * self.cols..(r + 1) * self.cols];
                (row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - self.b[r]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Phase-one simplex with artificial variables. Dantzig pricing, switching to
/// Bland's rule after a run of degenerate pivots.
pub fn solve_feasibility(c: &Constraints) -> LpOutcome {
    let (m, n) = (c.rows, c.cols);
    let width = n + m + 1;
    let mut t = vec![0.0; m * width];
    let mut sign = vec![1.0; m];
    for r in 0..m {
        if c.b[r] < 0.0 {
            sign[r] = -1.0;
        }
        for j in 0..n {
            t[r * width + j] = sign[r] * c.get(r, j);
        }
        t[r * width + n + r] = 1.0;
        t[r * width + n + m] = sign[r] * c.b[r];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs for minimizing the sum of artificials.
    let mut cost = vec![0.0; width];
    for r in 0..m {
        for j in 0..n {
            cost[j] -= t[r * width + j];
        }
        cost[n + m] -= t[r * width + n + m];
    }

    let mut degenerate_run = 0usize;
    let max_pivots = 50 * (m + n) + 1000;
    let mut converged = false;
    for _ in 0..max_pivots {
        let bland = degenerate_run > 50;
        let mut enter = None;
        let mut best = -REDUCED_COST_TOL;
        for (j, &cj) in cost.iter().enumerate().take(n + m) {
            if cj < best {
                enter = Some(j);
                if bland {
                    break;
                }
                best = cj;
            }
        }
        let Some(e) = enter else {
            converged = true;
            break;
        };

        let mut leave: Option<usize> = None;
        let mut ratio = f64::INFINITY;
        for r in 0..m {
            let a = t[r * width + e];
            if a > PIVOT_TOL {
                let q = t[r * width + n + m] / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        if q < ratio - 1e-12 {
                            true
                        } else if q <= ratio + 1e-12 {
                            if bland {
                                basis[r] < basis[l]
                            } else {
                                a > t[l * width + e]
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some(r);
                    ratio = q;
                }
            }
        }
        let Some(l) = leave else {
            // Unbounded direction cannot occur in phase one; treat as converged.
            converged = true;
            break;
        };
        if ratio.abs() < 1e-14 {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        pivot(&mut t, &mut cost, width, m, l, e);
        basis[l] = e;
    }

    let objective = -cost[n + m];
    if objective <= FEASIBILITY_TOL {
        let mut x = vec![0.0; n];
        for (r, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = t[r * width + n + m].max(0.0);
            }
        }
        let residual = c.residual(&x);
        if residual > RESIDUAL_TOL {
            return LpOutcome::Undetermined;
        }
        return LpOutcome::Feasible { x, residual };
    }
    if !converged {
        return LpOutcome::Undetermined;
    }
    // Dual values of the phase-one problem: y_i = 1 - reduced cost of artificial i.
    let y: Vec<f64> = (0..m).map(|r| sign[r] * (1.0 - cost[n + r])).collect();
    let gap: f64 = y.iter().zip(&c.b).map(|(y, b)| y * b).sum();
    // Check the Farkas conditions directly rather than trusting the tableau.
    let scale = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let worst = (0..n)
        .map(|j| (0..m).map(|r| y[r] * c.get(r, j)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    if gap <= FEASIBILITY_TOL || worst > CERTIFICATE_TOL * scale {
        return LpOutcome::Undetermined;
    }
    LpOutcome::Infeasible { y, gap }
}

fn pivot(t: &mut [f64], cost: &mut [f64], width: usize, m: usize, l: usize, e: usize) {
    let p = t[l * width + e];
    for v in &mut t[l * width..(l + 1) * width] {
        *v /= p;
    }
    let (before, rest) = t.split_at_mut(l * width);
    let (prow, after) = rest.split_at_mut(width);
    let eliminate = |row: &mut [f64]| {
        let f = row[e];
        if f != 0.0 {
            for (x, &pv) in row.iter_mut().zip(prow.iter()) {
                if pv != 0.0 {
                    *x -= f * pv;
                }
            }
            row[e] = 0.0;
        }
    };
    for row in before.chunks_mut(width) {
        eliminate(row);
    }
    for row in after.chunks_mut(width) {
        eliminate(row);
    }
    eliminate(cost);
    let _ = m;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(rows: &[&[f64]], b: &[f64]) -> Constraints {
        let mut c = Constraints::new(rows.len(), rows[0].len());
        for (r, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                c.set(r, j, v);
            }
        }
        c.b = b.to_vec();
        c
    }

    #[test]
    fn feasible_simplex_point() {
        let c = system(&[&[1.0, 1.0, 1.0], &[1.0, -1.0, 0.0]], &[1.0, 0.2]);
        match solve_feasibility(&c) {
            LpOutcome::Feasible { x, residual } => {
                assert!(residual < 1e-12);
                assert!(x.iter().all(|&v| v >= 0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_gives_farkas_vector() {
        // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
        let c = system(&[&[1.0, 1.0], &[1.0, 1.0]], &[1.0, 2.0]);
        match solve_feasibility(&c) {
            LpOutcome::Infeasible { y, gap } => {
                assert!(gap > 1e-9);
                for j in 0..2 {
                    let ya: f64 = (0..2).map(|r| y[r] * c.get(r, j)).sum();
                    assert!(ya <= 1e-9);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_right_hand_side() {
        // x >= 0 with -x = -3
        let c = system(&[&[-1.0]], &[-3.0]);
        match solve_feasibility(&c) {
            LpOutcome::Feasible { x, .. } => assert!((x[0] - 3.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let c = system(&[&[1.0]], &[-3.0]);
        match solve_feasibility(&c) {
            LpOutcome::Infeasible { y, gap } => {
                assert!(gap > 0.0 && y[0] * 1.0 <= 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_fine() {
        let c = system(&[&[1.0, 2.0], &[2.0, 4.0], &[1.0, 0.0]], &[2.0, 4.0, 1.0]);
        assert!(solve_feasibility(&c).is_feasible());
    }
}
