//! The extremal problem over `C_N`: convex, nonnegative, even polynomials
//! `p(t) = a_N t^N + … + a_2 t^2` with the leading coefficient fixed at 2.
//!
//! `q(t₀) = min p(t₀)` is a semi-infinite LP. It is discretized on a
//! Chebyshev-Lobatto grid of `[0, T]` (evenness makes the negative half
//! redundant) and solved through its dual, which has one equality row per
//! free coefficient and two columns per grid point.

use crate::error::{Error, Result};
use crate::lp::{solve, SimplexOptions, StandardLp};
use crate::normcore::PolyNorm;
use crate::sampling::{coordinate_polish, golden_section, DirectionSampler, Halton, SamplerConfig, TopK};
use serde::{Deserialize, Serialize};

pub const LEADING: f64 = 2.0;
pub const DEFAULT_DENSITY: usize = 2048;

/// `Σ a_{2k} t^{2k}` for `k = 1..=N/2`; `coeffs[k-1] = a_{2k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenPolynomial {
    #[serde(rename = "N")]
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl EvenPolynomial {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree < 2 || degree % 2 != 0 || coeffs.len() != degree / 2 {
            return Err(Error::InvalidParameter(format!(
                "even polynomial of degree {degree} needs {} coefficients, got {}",
                degree / 2,
                coeffs.len()
            )));
        }
        Ok(EvenPolynomial { degree, coeffs })
    }

    /// Coefficient of `t^i`.
    pub fn coefficient(&self, i: usize) -> f64 {
        if i == 0 || i % 2 == 1 || i > self.degree {
            0.0
        } else {
            self.coeffs[i / 2 - 1]
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = t * t;
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * u + a) * u
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let u = t * t;
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (k, a)| {
                let i = 2 * (k + 1) as i64;
                acc * u + a * (i * (i - 1)) as f64
            })
    }

    /// `λp + (1−λ)q`.
    pub fn combine(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch {
                expected: self.degree,
                got: other.degree,
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        Ok(EvenPolynomial { degree: self.degree, coeffs })
    }

    /// Cauchy bounds `1 + max|a_i| / |lead|` for the positive roots of `p`
    /// and `p''` (the larger of the two).
    pub fn root_bound(&self) -> f64 {
        let n = self.degree;
        let lead = self.coefficient(n).abs();
        let lead2 = lead * (n * (n - 1)) as f64;
        let (mut b, mut b2) = (0.0f64, 0.0f64);
        for i in (2..n).step_by(2) {
            b = b.max(self.coefficient(i).abs());
            b2 = b2.max(self.coefficient(i).abs() * (i * (i - 1)) as f64);
        }
        if lead == 0.0 {
            return f64::INFINITY;
        }
        (1.0 + b / lead).max(1.0 + b2 / lead2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalProblem {
    #[serde(rename = "N")]
    pub degree: usize,
    pub t0: f64,
    pub density: usize,
}

impl ExtremalProblem {
    pub fn new(degree: usize, t0: f64) -> Result<Self> {
        if degree < 4 || degree % 2 != 0 {
            return Err(Error::InvalidParameter(format!("N must be even and >= 4, got {degree}")));
        }
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
        }
        Ok(ExtremalProblem {
            degree,
            t0,
            density: DEFAULT_DENSITY,
        })
    }

    pub fn with_density(mut self, density: usize) -> Self {
        self.density = density.max(8);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Value,
    Convexity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActiveConstraint {
    pub t: f64,
    pub kind: ConstraintKind,
    pub multiplier: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    #[serde(rename = "T")]
    pub truncation: f64,
    pub density: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalDiagnostics {
    pub pivots: usize,
    pub bland_pivots: usize,
    pub truncation_rounds: usize,
    /// Points added to the Chebyshev grid by the exchange step.
    pub exchange_points: usize,
    pub min_value_on_grid: f64,
    pub min_convexity_on_grid: f64,
    pub active: Vec<ActiveConstraint>,
    pub normalization: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    #[serde(rename = "N")]
    pub degree: usize,
    pub t0: f64,
    pub q: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// `[a_2, a_4, …, a_N]`.
    pub coefficients: Vec<f64>,
    pub grid: GridInfo,
    pub diagnostics: ExtremalDiagnostics,
}

impl ExtremalResult {
    pub fn polynomial(&self) -> EvenPolynomial {
        EvenPolynomial {
            degree: self.degree,
            coeffs: self.coefficients.clone(),
        }
    }
}

/// Chebyshev-Lobatto points of `[0, T]`, endpoints included.
pub fn chebyshev_grid(truncation: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|j| {
            if j == n - 1 {
                truncation
            } else {
                0.5 * truncation * (1.0 - (std::f64::consts::PI * j as f64 / last).cos())
            }
        })
        .collect()
}

struct Solved {
    coeffs: Vec<f64>,
    pivots: usize,
    bland_pivots: usize,
    active: Vec<ActiveConstraint>,
}

fn solve_on_grid(problem: &ExtremalProblem, grid: &[f64]) -> Result<Solved> {
    let n = problem.degree;
    let free: Vec<usize> = (2..n).step_by(2).collect();
    // Each constraint reads G_j·a ≥ g_j; row-scaled so max |entry| is 1.
    let mut columns: Vec<(Vec<f64>, f64, f64, ConstraintKind)> = Vec::new();
    for &t in grid {
        let value: Vec<f64> = free.iter().map(|&i| t.powi(i as i32)).collect();
        let rhs = -LEADING * t.powi(n as i32);
        let conv: Vec<f64> = free
            .iter()
            .map(|&i| (i * (i - 1)) as f64 * t.powi(i as i32 - 2))
            .collect();
        let rhs2 = -LEADING * (n * (n - 1)) as f64 * t.powi(n as i32 - 2);
        for (g, r, kind) in [(value, rhs, ConstraintKind::Value), (conv, rhs2, ConstraintKind::Convexity)] {
            let s = g.iter().fold(r.abs(), |m, v| m.max(v.abs()));
            if s == 0.0 {
                continue;
            }
            columns.push((g.iter().map(|v| v / s).collect(), r / s, t, kind));
        }
    }
    // Dual: min −g·y s.t. Σ_j y_j G_j = c, y ≥ 0, with c_i = t0^i.
    let a: Vec<Vec<f64>> = (0..free.len())
        .map(|r| columns.iter().map(|(g, _, _, _)| g[r]).collect())
        .collect();
    let b: Vec<f64> = free.iter().map(|&i| problem.t0.powi(i as i32)).collect();
    let c: Vec<f64> = columns.iter().map(|(_, r, _, _)| -r).collect();
    let sol = match solve(&StandardLp { a, b, c }, &SimplexOptions::default()) {
        Ok(s) => s,
        // The zero-tail polynomial is primal feasible and p(t0) >= 0 bounds
        // the objective, so the dual must be feasible and bounded.
        Err(Error::Infeasible) => panic!("extremal LP: primal unbounded contradicts p(t0) >= 0"),
        Err(Error::Unbounded) => panic!("extremal LP: primal infeasible contradicts a_i = 0 feasibility"),
        Err(e) => return Err(e),
    };
    let mut coeffs: Vec<f64> = sol.duals.iter().map(|y| -y).collect();
    coeffs.push(LEADING);
    let active = columns
        .iter()
        .zip(&sol.x)
        .filter(|(_, y)| **y > 0.0)
        .map(|((_, _, t, kind), y)| ActiveConstraint {
            t: *t,
            kind: *kind,
            multiplier: *y,
        })
        .collect();
    Ok(Solved {
        coeffs,
        pivots: sol.pivots,
        bland_pivots: sol.bland_pivots,
        active,
    })
}

/// Continuous minimizers of `p` and `p''` that dip below `-tol`, found by
/// golden-section search around every discrete local minimum on `grid`.
fn violations(p: &EvenPolynomial, grid: &[f64], tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for kind in [ConstraintKind::Value, ConstraintKind::Convexity] {
        let f = |t: f64| match kind {
            ConstraintKind::Value => p.eval(t),
            ConstraintKind::Convexity => p.second_derivative(t),
        };
        let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
        for j in 0..grid.len() {
            let left = if j > 0 { vals[j - 1] } else { f64::INFINITY };
            let right = if j + 1 < grid.len() { vals[j + 1] } else { f64::INFINITY };
            if vals[j] > left || vals[j] > right {
                continue;
            }
            let a = grid[j.saturating_sub(1)];
            let b = grid[(j + 1).min(grid.len() - 1)];
            let (t, v) = golden_section(f, a, b, 100);
            if v < -tol {
                out.push(t);
            }
        }
    }
    out
}

/// Maximum number of exchange rounds adding continuous violators.
const EXCHANGE_ROUNDS: usize = 8;

/// Minimizes `p(t₀)` over the discretized `C_N` with `a_N = 2`. The
/// truncation starts at `max(2, 2t₀)` and grows to the Cauchy root bound of
/// the current optimum until it is stable. On each truncation the
/// Chebyshev grid is then augmented with the continuous minimizers of `p` and
/// `p''` wherever the discrete optimum dips below zero between grid points.
pub fn solve_extremal(problem: &ExtremalProblem) -> Result<ExtremalResult> {
    let mut truncation = 2.0f64.max(2.0 * problem.t0);
    let mut rounds = 0;
    let mut exchange_points = 0;
    let scale = LEADING * problem.t0.powi(problem.degree as i32);
    let (solved, grid) = loop {
        rounds += 1;
        let mut grid = chebyshev_grid(truncation, problem.density);
        let mut s = solve_on_grid(problem, &grid)?;
        for _ in 0..EXCHANGE_ROUNDS {
            let p = EvenPolynomial::new(problem.degree, s.coeffs.clone())?;
            let extra = violations(&p, &grid, 1e-13 * scale.max(1.0));
            if extra.is_empty() {
                break;
            }
            exchange_points += extra.len();
            grid.extend(extra);
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            s = solve_on_grid(problem, &grid)?;
        }
        let bound = EvenPolynomial::new(problem.degree, s.coeffs.clone())?.root_bound();
        if bound <= truncation || rounds >= 12 {
            break (s, grid);
        }
        truncation = bound;
    };
    let p = EvenPolynomial::new(problem.degree, solved.coeffs.clone())?;
    let min_value_on_grid = grid.iter().map(|&t| p.eval(t)).fold(f64::INFINITY, f64::min);
    let min_convexity_on_grid = grid
        .iter()
        .map(|&t| p.second_derivative(t))
        .fold(f64::INFINITY, f64::min);
    let q = p.eval(problem.t0);
    assert!(q > 1e-6 * scale, "q(t0) must be strictly positive, got {q}");
    Ok(ExtremalResult {
        degree: problem.degree,
        t0: problem.t0,
        q,
        k: scale / q,
        coefficients: solved.coeffs,
        grid: GridInfo {
            truncation,
            density: problem.density,
        },
        diagnostics: ExtremalDiagnostics {
            pivots: solved.pivots,
            bland_pivots: solved.bland_pivots,
            truncation_rounds: rounds,
            exchange_points,
            min_value_on_grid,
            min_convexity_on_grid,
            active: solved.active,
            normalization: "leading coefficient a_N = 2 (unit-norm direction h)".into(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub t0: f64,
    pub q: f64,
    /// `q / t₀^N`.
    pub normalized: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleReport {
    #[serde(rename = "N")]
    pub degree: usize,
    pub rows: Vec<ScaleRow>,
    /// Largest relative deviation of `q/t₀^N` from the first row.
    pub max_relative_deviation: f64,
}

/// Solves at each `t₀` and compares `q(t₀)/t₀^N`.
pub fn scale_invariance_check(degree: usize, t0s: &[f64], density: usize) -> Result<ScaleReport> {
    if t0s.is_empty() {
        return Err(Error::InvalidParameter("need at least one t0".into()));
    }
    let rows = t0s
        .iter()
        .map(|&t0| {
            let r = solve_extremal(&ExtremalProblem::new(degree, t0)?.with_density(density))?;
            Ok(ScaleRow {
                t0,
                q: r.q,
                normalized: r.q / t0.powi(degree as i32),
                k: r.k,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reference = rows[0].normalized;
    let max_relative_deviation = rows
        .iter()
        .map(|r| ((r.normalized - reference) / reference).abs())
        .fold(0.0, f64::max);
    Ok(ScaleReport {
        degree,
        rows,
        max_relative_deviation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Membership {
    Member { truncation: f64 },
    NotMember { t: f64, kind: ConstraintKind, value: f64 },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Checks `p ≥ 0` and `p'' ≥ 0` on `R`: the even polynomial is scanned on a
/// dense grid of `[0, T]` past the Cauchy root bound and every discrete local
/// minimum is refined by golden-section search.
pub fn membership_check(p: &EvenPolynomial) -> Membership {
    let n = p.degree;
    let lead = p.coefficient(n);
    let scale = 1.0 + p.coeffs.iter().map(|a| a.abs()).sum::<f64>() * (n * n) as f64;
    let tol = 1e-10 * scale;
    let truncation = if lead > 0.0 { p.root_bound() + 1.0 } else { 1e3 };
    let grid: Vec<f64> = (0..=20_000).map(|j| truncation * j as f64 / 20_000.0).collect();
    let mut worst: Option<(f64, ConstraintKind, f64)> = None;
    for kind in [ConstraintKind::Value, ConstraintKind::Convexity] {
        let f = |t: f64| match kind {
            ConstraintKind::Value => p.eval(t),
            ConstraintKind::Convexity => p.second_derivative(t),
        };
        let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
        for j in 0..grid.len() {
            let left = if j > 0 { vals[j - 1] } else { f64::INFINITY };
            let right = if j + 1 < vals.len() { vals[j + 1] } else { f64::INFINITY };
            if vals[j] > left || vals[j] > right {
                continue;
            }
            let a = grid[j.saturating_sub(1)];
            let b = grid[(j + 1).min(grid.len() - 1)];
            let (t, v) = golden_section(f, a, b, 80);
            let (t, v) = if v < vals[j] { (t, v) } else { (grid[j], vals[j]) };
            if worst.map_or(true, |(_, _, w)| v < w) {
                worst = Some((t, kind, v));
            }
        }
    }
    match worst {
        Some((t, kind, value)) if value < -tol => Membership::NotMember { t, kind, value },
        _ => Membership::Member { truncation },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub t0: f64,
    pub q: f64,
    pub min_gap: f64,
    pub z: Vec<f64>,
    pub h: Vec<f64>,
    pub checked: usize,
    /// `min_gap ≥ q − 1e-9·max(1, q)`.
    pub holds: bool,
}

/// Samples `(z, h)` with `‖h‖ = 1` and `z` in a ball of radius 2 (and
/// `z = 0`), minimizing `P(z+t₀h) + P(z−t₀h) − 2P(z)`, then polishes the
/// smallest gaps. Soundness of the relaxation means the minimum never drops
/// below `q(t₀)`.
pub fn gap_witness(norm: &PolyNorm, t0: f64, q: f64, cfg: &SamplerConfig) -> Result<GapReport> {
    if !(t0 > 0.0) {
        return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
    }
    let form = &norm.form;
    let dim = form.dimension();
    let degree = form.degree() as f64;
    let unit = |v: &[f64]| -> Option<Vec<f64>> {
        let n = form.eval_diagonal(v).max(0.0).powf(1.0 / degree);
        (n > 0.0).then(|| v.iter().map(|c| c / n).collect())
    };
    let gap = |z: &[f64], h: &[f64]| -> f64 {
        let plus: Vec<f64> = z.iter().zip(h).map(|(a, b)| a + t0 * b).collect();
        let minus: Vec<f64> = z.iter().zip(h).map(|(a, b)| a - t0 * b).collect();
        form.eval_diagonal(&plus) + form.eval_diagonal(&minus) - 2.0 * form.eval_diagonal(z)
    };
    let mut hs = DirectionSampler::new(dim, cfg.samples, cfg.seed);
    let mut zs = DirectionSampler::new(dim, cfg.samples, cfg.seed.wrapping_add(0x2b));
    let mut radii = Halton::new(1, cfg.seed);
    let mut top = TopK::new(cfg.refine_top);
    let mut checked = 0;
    for k in 0..cfg.samples {
        let h = unit(&hs.next_direction()).expect("nonzero direction");
        let z: Vec<f64> = if k % 2 == 0 {
            vec![0.0; dim]
        } else {
            let r = 2.0 * radii.next_point()[0];
            unit(&zs.next_direction()).expect("nonzero direction").iter().map(|c| c * r).collect()
        };
        checked += 1;
        top.push(gap(&z, &h), [z, h].concat());
    }
    let mut obj = |theta: &[f64]| -> f64 {
        let (z, hr) = theta.split_at(dim);
        match unit(hr) {
            Some(h) => gap(z, &h),
            None => f64::INFINITY,
        }
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (v0, start) in top.into_vec() {
        let (theta, v) = coordinate_polish(&mut obj, &start, 0.25, cfg.refine_iters);
        let (v, theta) = if v <= v0 { (v, theta) } else { (v0, start) };
        if best.as_ref().map_or(true, |(b, _)| v < *b) {
            best = Some((v, theta));
        }
    }
    let (min_gap, theta) = best.expect("at least one sample");
    let (z, hr) = theta.split_at(dim);
    let h = unit(hr).expect("admissible");
    Ok(GapReport {
        t0,
        q,
        min_gap,
        z: z.to_vec(),
        h,
        checked,
        holds: min_gap >= q - 1e-9 * q.max(1.0),
    })
}
