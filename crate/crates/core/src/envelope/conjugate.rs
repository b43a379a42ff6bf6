//! Discrete Legendre-Fenchel transforms.
//!
//! `f*(s) = max_k (s·x_k − f(x_k))` is evaluated in linear-logarithmic time:
//! the maximizing knot is always a vertex of the lower hull, found by binary
//! search on the hull's edge slopes. The 2D transform is separable: first in
//! `x` for every `y` row, then in `y` for every slope column.

use super::hull::lower_hull_indices;
use super::{GridFunction1D, GridFunction2D};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeGrid {
    /// Exactly the edge slopes of the lower hull (biconjugate = hull on the knots).
    HullEdges,
    /// `count` evenly spaced slopes spanning the hull's extreme edge slopes.
    Uniform(usize),
    /// Caller-provided slopes; extended to the hull's extreme slopes if short.
    Explicit(Vec<f64>),
}

/// Conjugate of the sampled line `(xs, fs)` at each of `slopes`.
pub fn conjugate_line(xs: &[f64], fs: &[f64], slopes: &[f64]) -> Vec<f64> {
    let hull = lower_hull_indices(xs, fs);
    let edges: Vec<f64> = hull
        .windows(2)
        .map(|w| (fs[w[1]] - fs[w[0]]) / (xs[w[1]] - xs[w[0]]))
        .collect();
    slopes
        .iter()
        .map(|&s| {
            let k = edges.partition_point(|&m| m < s);
            let i = hull[k];
            s * xs[i] - fs[i]
        })
        .collect()
}

fn extreme_slopes(xs: &[f64], fs: &[f64]) -> (f64, f64) {
    let hull = lower_hull_indices(xs, fs);
    if hull.len() < 2 {
        return (0.0, 0.0);
    }
    let m = |a: usize, b: usize| (fs[b] - fs[a]) / (xs[b] - xs[a]);
    (m(hull[0], hull[1]), m(hull[hull.len() - 2], hull[hull.len() - 1]))
}

fn uniform(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = if hi - lo <= 1e-12 * (1.0 + lo.abs()) {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    };
    let n = count.max(2);
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn normalize_slopes(mut s: Vec<f64>) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Err(Error::Grid("empty slope grid".into()));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Grid("slopes must be finite".into()));
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    Ok(s)
}

fn resolve_slopes(f: &GridFunction1D, grid: &SlopeGrid) -> Result<Vec<f64>> {
    let (lo, hi) = extreme_slopes(f.knots(), f.values());
    match grid {
        SlopeGrid::HullEdges => {
            let hull = lower_hull_indices(f.knots(), f.values());
            let (k, v) = (f.knots(), f.values());
            let s: Vec<f64> = hull
                .windows(2)
                .map(|w| (v[w[1]] - v[w[0]]) / (k[w[1]] - k[w[0]]))
                .collect();
            normalize_slopes(if s.is_empty() { vec![0.0] } else { s })
        }
        SlopeGrid::Uniform(n) => Ok(uniform(lo, hi, *n)),
        SlopeGrid::Explicit(s) => {
            let mut s = normalize_slopes(s.clone())?;
            if s[0] > lo {
                s.insert(0, lo);
            }
            if s[s.len() - 1] < hi {
                s.push(hi);
            }
            Ok(s)
        }
    }
}

/// `f*` on a slope grid.
pub fn legendre_conjugate_1d(f: &GridFunction1D, grid: &SlopeGrid) -> Result<GridFunction1D> {
    let slopes = resolve_slopes(f, grid)?;
    let vals = conjugate_line(f.knots(), f.values(), &slopes);
    GridFunction1D::new(slopes, vals)
}

/// `f**` on the knots of `f`.
pub fn biconjugate_1d(f: &GridFunction1D, grid: &SlopeGrid) -> Result<GridFunction1D> {
    let fstar = legendre_conjugate_1d(f, grid)?;
    let vals = conjugate_line(fstar.knots(), fstar.values(), f.knots());
    // f** <= f holds exactly in real arithmetic
    let vals = vals.iter().zip(f.values()).map(|(a, b)| a.min(*b)).collect();
    f.with_values(vals)
}

/// `f*(s1, s2)` on the product slope grid `sx × sy`.
pub fn legendre_conjugate_2d(f: &GridFunction2D, sx: &[f64], sy: &[f64]) -> Result<GridFunction2D> {
    let sx = normalize_slopes(sx.to_vec())?;
    let sy = normalize_slopes(sy.to_vec())?;
    let first = first_pass(f, &sx);
    Ok(second_pass(f.ys(), &first, sx, sy))
}

// g[i][j] = max_x (sx_i x − f(x, y_j)), stored as negated values -g per slope row
fn first_pass(f: &GridFunction2D, sx: &[f64]) -> Vec<Vec<f64>> {
    let (nx, ny) = f.shape();
    let mut out = vec![vec![0.0; ny]; sx.len()];
    let mut line = vec![0.0; nx];
    for j in 0..ny {
        for (i, v) in line.iter_mut().enumerate() {
            *v = f.value(i, j);
        }
        for (i, c) in conjugate_line(f.xs(), &line, sx).into_iter().enumerate() {
            out[i][j] = -c;
        }
    }
    out
}

fn second_pass(ys: &[f64], neg_g: &[Vec<f64>], sx: Vec<f64>, sy: Vec<f64>) -> GridFunction2D {
    let mut values = Vec::with_capacity(sx.len() * sy.len());
    for row in neg_g {
        values.extend(conjugate_line(ys, row, &sy));
    }
    GridFunction2D::new(sx, sy, values).expect("conjugate grid is valid")
}

/// Result of a 2D biconjugation on a finite window. The window truncation
/// makes the value an upper bound of the envelope of the unrestricted function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Biconjugate2D {
    pub envelope: GridFunction2D,
    pub slopes_x: Vec<f64>,
    pub slopes_y: Vec<f64>,
    pub window: [[f64; 2]; 2],
    pub bound: crate::sampling::BoundDirection,
}

/// `f**` on the knots of `f`, using `nx × ny` uniform slopes when
/// `slopes` is `None`.
pub fn biconjugate_2d(f: &GridFunction2D, slopes: Option<(Vec<f64>, Vec<f64>)>) -> Result<Biconjugate2D> {
    let (nx, ny) = f.shape();
    let (sx, sy, fstar) = match slopes {
        Some((sx, sy)) => {
            let fstar = legendre_conjugate_2d(f, &sx, &sy)?;
            (fstar.xs().to_vec(), fstar.ys().to_vec(), fstar)
        }
        None => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut line = vec![0.0; nx];
            for j in 0..ny {
                for (i, v) in line.iter_mut().enumerate() {
                    *v = f.value(i, j);
                }
                let (a, b) = extreme_slopes(f.xs(), &line);
                lo = lo.min(a);
                hi = hi.max(b);
            }
            let sx = symmetric_if_close(uniform(lo, hi, nx));
            let neg_g = first_pass(f, &sx);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for row in &neg_g {
                let (a, b) = extreme_slopes(f.ys(), row);
                lo = lo.min(a);
                hi = hi.max(b);
            }
            let sy = symmetric_if_close(uniform(lo, hi, ny));
            let fstar = second_pass(f.ys(), &neg_g, sx.clone(), sy.clone());
            (sx, sy, fstar)
        }
    };
    let back = legendre_conjugate_2d(&fstar, f.xs(), f.ys())?;
    let values = back
        .values()
        .iter()
        .zip(f.values())
        .map(|(a, b)| a.min(*b))
        .collect();
    let envelope = GridFunction2D::new(f.xs().to_vec(), f.ys().to_vec(), values)?;
    Ok(Biconjugate2D {
        envelope,
        slopes_x: sx,
        slopes_y: sy,
        window: [
            [f.xs()[0], f.xs()[nx - 1]],
            [f.ys()[0], f.ys()[ny - 1]],
        ],
        bound: crate::sampling::BoundDirection::Upper,
    })
}

// Snap a nearly symmetric slope range onto an exactly symmetric grid so that
// slope 0 is present for odd counts.
fn symmetric_if_close(s: Vec<f64>) -> Vec<f64> {
    let (lo, hi) = (s[0], s[s.len() - 1]);
    if (lo + hi).abs() <= 1e-9 * (hi - lo) {
        let m = hi.max(-lo);
        let n = s.len();
        return (0..n)
            .map(|i| {
                let k = 2.0 * i as f64 - (n - 1) as f64;
                m * k / (n - 1) as f64
            })
            .collect();
    }
    s
}
