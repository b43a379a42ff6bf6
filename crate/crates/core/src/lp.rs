//! Dense two-phase simplex for small standard-form programs
//!
//! ```text
//! minimize c·x  subject to  A x = b,  x >= 0
//! ```
//!
//! The programs solved here have few rows and many columns (envelope
//! certificates have `n + 1` rows, the dual of the extremal problem has one
//! row per free coefficient), so a full dense tableau is cheap. Pricing is
//! Dantzig's rule until a run of degenerate pivots is seen; from then on
//! Bland's lowest-index rule is used, which cannot cycle.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    /// Constraint rows, each of length `c.len()`.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexOptions {
    pub tolerance: f64,
    pub max_pivots: usize,
    /// Consecutive degenerate pivots after which Bland's rule takes over.
    pub degenerate_switch: usize,
    /// Use Bland's rule from the first pivot.
    pub bland_only: bool,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            tolerance: 1e-10,
            max_pivots: 100_000,
            degenerate_switch: 8,
            bland_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multipliers `y` with `Aᵀy <= c` at optimality, one per row.
    pub duals: Vec<f64>,
    /// Basic column of each non-redundant row.
    pub basis: Vec<usize>,
    pub pivots: usize,
    pub bland_pivots: usize,
}

struct Tableau {
    rows: usize,
    width: usize, // columns incl. rhs
    data: Vec<f64>,
    obj: Vec<f64>, // reduced costs + negated objective value at the end
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.at(pr, pc);
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f != 0.0 {
                for (v, pv) in self.data[r * w..(r + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.data[r * w + pc] = 0.0;
            }
        }
        let f = self.obj[pc];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width;
        self.data.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.rows -= 1;
    }

    /// Runs simplex iterations on the current objective row. Columns at or
    /// beyond `allowed` never enter.
    fn optimize(
        &mut self,
        allowed: usize,
        opts: &SimplexOptions,
        pivots: &mut usize,
        bland_pivots: &mut usize,
    ) -> Result<()> {
        let tol = opts.tolerance;
        let mut degenerate_run = 0usize;
        loop {
            let use_bland = opts.bland_only || degenerate_run >= opts.degenerate_switch;
            let mut enter = None;
            if use_bland {
                enter = (0..allowed).find(|&j| self.obj[j] < -tol);
            } else {
                let mut best = -tol;
                for j in 0..allowed {
                    if self.obj[j] < best {
                        best = self.obj[j];
                        enter = Some(j);
                    }
                }
            }
            let Some(pc) = enter else { return Ok(()) };

            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > tol {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - tol
                                || (ratio <= lratio + tol && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, ratio)) = leave else {
                return Err(Error::Unbounded);
            };
            if ratio.abs() <= tol {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            if use_bland {
                *bland_pivots += 1;
            }
            self.pivot(pr, pc);
            *pivots += 1;
            if *pivots > opts.max_pivots {
                return Err(Error::IterationLimit(opts.max_pivots));
            }
        }
    }
}

/// Solves a standard-form LP with the two-phase method.
pub fn solve(lp: &StandardLp, opts: &SimplexOptions) -> Result<LpSolution> {
    let m = lp.b.len();
    let n = lp.c.len();
    if lp.a.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: lp.a.len(),
        });
    }
    if let Some(row) = lp.a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: row.len(),
        });
    }
    let tol = opts.tolerance;
    let width = n + m + 1;
    let mut data = vec![0.0; m * width];
    for i in 0..m {
        let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[i * width + j] = sign * lp.a[i][j];
        }
        data[i * width + n + i] = 1.0;
        data[i * width + width - 1] = sign * lp.b[i];
    }
    // phase 1: minimize the sum of artificials
    let mut obj = vec![0.0; width];
    for i in 0..m {
        for j in 0..n {
            obj[j] -= data[i * width + j];
        }
        obj[width - 1] -= data[i * width + width - 1];
    }
    let mut t = Tableau {
        rows: m,
        width,
        data,
        obj,
        basis: (n..n + m).collect(),
    };
    // original row index of each tableau row, for dual recovery
    let mut row_ids: Vec<usize> = (0..m).collect();
    let mut pivots = 0;
    let mut bland_pivots = 0;
    t.optimize(n, opts, &mut pivots, &mut bland_pivots)?;
    let b_scale = 1.0 + lp.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if -t.obj[width - 1] > tol * b_scale * (m as f64).max(1.0) * 10.0 {
        return Err(Error::Infeasible);
    }
    // drive remaining artificials out of the basis
    let mut r = 0;
    while r < t.rows {
        if t.basis[r] >= n {
            let col = (0..n)
                .filter(|&j| t.at(r, j).abs() > tol)
                .max_by(|&a, &b| t.at(r, a).abs().total_cmp(&t.at(r, b).abs()));
            match col {
                Some(j) => {
                    t.pivot(r, j);
                    r += 1;
                }
                None => {
                    t.remove_row(r);
                    row_ids.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }
    // phase 2
    let mut obj = vec![0.0; width];
    obj[..n].copy_from_slice(&lp.c);
    for r in 0..t.rows {
        let cb = if t.basis[r] < n { lp.c[t.basis[r]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..width {
                obj[j] -= cb * t.at(r, j);
            }
        }
    }
    for r in 0..t.rows {
        obj[t.basis[r]] = 0.0;
    }
    t.obj = obj;
    t.optimize(n, opts, &mut pivots, &mut bland_pivots)?;

    let mut x = vec![0.0; n];
    for r in 0..t.rows {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let objective = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();

    // duals from Bᵀ y = c_B on the kept rows of the original system
    let k = t.rows;
    let mut bt = vec![vec![0.0; k + 1]; k];
    for (col, &bj) in t.basis.iter().enumerate() {
        for (row, &orig) in row_ids.iter().enumerate() {
            bt[col][row] = if bj < n {
                lp.a[orig][bj]
            } else if bj - n == orig {
                1.0
            } else {
                0.0
            };
        }
        bt[col][k] = if bj < n { lp.c[bj] } else { 0.0 };
    }
    let y_kept = solve_dense(bt)?;
    let mut duals = vec![0.0; m];
    for (row, &orig) in row_ids.iter().enumerate() {
        duals[orig] = y_kept[row];
    }
    Ok(LpSolution {
        x,
        objective,
        duals,
        basis: t.basis,
        pivots,
        bland_pivots,
    })
}

/// Gaussian elimination with partial pivoting on an augmented `k × (k+1)` system.
fn solve_dense(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let k = a.len();
    for col in 0..k {
        let p = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[p][col].abs() < 1e-300 {
            return Err(Error::InvalidParameter("singular basis".into()));
        }
        a.swap(col, p);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=k {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Ok((0..k).map(|i| a[i][k] / a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> StandardLp {
        StandardLp { a, b, c }
    }

    #[test]
    fn small_textbook_problem() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6  (slacks s1, s2)
        let p = lp(
            vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]],
            vec![4.0, 6.0],
            vec![-3.0, -2.0, 0.0, 0.0],
        );
        let s = solve(&p, &SimplexOptions::default()).unwrap();
        assert!((s.objective + 12.0).abs() < 1e-12);
        assert!((s.x[0] - 4.0).abs() < 1e-12);
        // duals satisfy Aᵀy <= c and bᵀy = objective
        let by: f64 = p.b.iter().zip(&s.duals).map(|(b, y)| b * y).sum();
        assert!((by - s.objective).abs() < 1e-12);
        for j in 0..4 {
            let aty: f64 = (0..2).map(|i| p.a[i][j] * s.duals[i]).sum();
            assert!(aty <= p.c[j] + 1e-12);
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(vec![vec![1.0, 1.0]], vec![-1.0], vec![1.0, 1.0]);
        assert_eq!(solve(&p, &SimplexOptions::default()), Err(Error::Infeasible));
        let p = lp(vec![vec![1.0, -1.0]], vec![1.0], vec![0.0, -1.0]);
        assert_eq!(solve(&p, &SimplexOptions::default()), Err(Error::Unbounded));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let p = lp(
            vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]],
            vec![1.0, 2.0, 1.0],
            vec![1.0, 2.0, 0.0],
        );
        let s = solve(&p, &SimplexOptions::default()).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bland_only_agrees_with_default() {
        // classic degenerate example (Beale) in standard form
        let p = lp(
            vec![
                vec![0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
                vec![0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            ],
            vec![0.0, 0.0, 1.0],
            vec![-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0],
        );
        let a = solve(&p, &SimplexOptions::default()).unwrap();
        let b = solve(
            &p,
            &SimplexOptions {
                bland_only: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((a.objective - b.objective).abs() < 1e-12);
        assert!((a.objective + 0.05).abs() < 1e-12);
    }
}
