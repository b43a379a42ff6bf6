use super::GridFunction1D;
use crate::error::{Error, Result};

/// Indices of the vertices of the lower convex hull of the points
/// `(knots[i], values[i])` (Andrew's monotone chain). Collinear interior
/// points are dropped; the first and last knots are always kept.
pub fn lower_hull_indices(knots: &[f64], values: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(knots.len());
    for i in 0..knots.len() {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let (ax, ay) = (knots[a] - knots[o], values[a] - values[o]);
            let (bx, by) = (knots[i] - knots[o], values[i] - values[o]);
            let cross = ax * by - ay * bx;
            let scale = (ax.abs() + ay.abs()) * (bx.abs() + by.abs());
            if cross <= 1e-12 * scale {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Greatest convex piecewise-linear function below `f` on its knots.
pub fn lower_convex_hull_1d(f: &GridFunction1D) -> Result<GridFunction1D> {
    if f.len() < 2 {
        return Err(Error::Grid("lower hull needs at least 2 knots".into()));
    }
    let k = f.knots();
    let v = f.values();
    let hull = lower_hull_indices(k, v);
    let mut out = Vec::with_capacity(k.len());
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (v[b] - v[a]) / (k[b] - k[a]);
        for i in a..b {
            out.push(if i == a { v[a] } else { (v[a] + slope * (k[i] - k[a])).min(v[i]) });
        }
    }
    out.push(v[k.len() - 1]);
    f.with_values(out)
}

/// Slopes between consecutive knots are nondecreasing up to `tol` (scaled
/// by the slope magnitude).
pub fn is_convex_1d(f: &GridFunction1D, tol: f64) -> bool {
    let k = f.knots();
    let v = f.values();
    let slopes: Vec<f64> = (1..k.len()).map(|i| (v[i] - v[i - 1]) / (k[i] - k[i - 1])).collect();
    slopes
        .windows(2)
        .all(|w| w[1] - w[0] >= -tol * (1.0 + w[0].abs().max(w[1].abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_well_envelope() {
        let f = GridFunction1D::sample(|x| (x * x - 1.0).powi(2), -2.0, 2.0, 801).unwrap();
        let h = lower_convex_hull_1d(&f).unwrap();
        for (x, (hv, fv)) in f.knots().iter().zip(h.values().iter().zip(f.values())) {
            if x.abs() <= 1.0 {
                assert!(hv.abs() <= 1e-12, "x = {x}, hull = {hv}");
            } else {
                assert!((hv - fv).abs() <= 1e-12);
            }
        }
        assert_eq!(h.values()[800], 9.0);
        assert!(is_convex_1d(&h, 1e-12));
    }

    #[test]
    fn convex_and_affine_are_fixed() {
        let f = GridFunction1D::sample(|x| x * x, -1.0, 1.0, 101).unwrap();
        assert_eq!(lower_convex_hull_1d(&f).unwrap(), f);
        let g = GridFunction1D::sample(|x| -x, 0.0, 1.0, 11).unwrap();
        let h = lower_convex_hull_1d(&g).unwrap();
        for (a, b) in h.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        // collinear interior knots are not hull vertices
        assert_eq!(lower_hull_indices(g.knots(), g.values()), vec![0, 10]);
    }

    #[test]
    fn too_few_knots() {
        let f = GridFunction1D::new(vec![0.0], vec![1.0]).unwrap();
        assert!(lower_convex_hull_1d(&f).is_err());
    }
}
