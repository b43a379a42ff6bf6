use super::{GridFunction1D, GridFunction2D};
use crate::error::{Error, Result};
use crate::lp::{solve, SimplexOptions, StandardLp};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub weight: f64,
    pub point: Vec<f64>,
    pub value: f64,
}

/// A convex combination `Σ λ_i x_i = x` realizing the envelope value
/// `Σ λ_i f(x_i)`. A vertex solution has at most `n + 1` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCertificate {
    pub point: Vec<f64>,
    pub value: f64,
    pub combination: Vec<CertificateEntry>,
}

impl EnvelopeCertificate {
    /// Largest violation among `Σλ = 1`, `Σλx = x`, `λ >= 0` and the value identity.
    pub fn feasibility_error(&self) -> f64 {
        let n = self.point.len();
        let mut err: f64 = 0.0;
        let sum: f64 = self.combination.iter().map(|e| e.weight).sum();
        err = err.max((sum - 1.0).abs());
        for d in 0..n {
            let c: f64 = self.combination.iter().map(|e| e.weight * e.point[d]).sum();
            err = err.max((c - self.point[d]).abs());
        }
        for e in &self.combination {
            err = err.max(-e.weight);
        }
        let v: f64 = self.combination.iter().map(|e| e.weight * e.value).sum();
        err.max((v - self.value).abs())
    }
}

/// Envelope value at `x` over arbitrary sample points in `R^n`, by the LP
/// `min Σλ_j f_j  s.t.  Σλ_j p_j = x, Σλ_j = 1, λ >= 0`.
pub fn caratheodory_on_points(points: &[Vec<f64>], values: &[f64], x: &[f64]) -> Result<EnvelopeCertificate> {
    let n = x.len();
    if points.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    let mut a = vec![Vec::with_capacity(points.len()); n + 1];
    for p in points {
        for d in 0..n {
            a[d].push(p[d]);
        }
        a[n].push(1.0);
    }
    let mut b = x.to_vec();
    b.push(1.0);
    let lp = StandardLp {
        a,
        b,
        c: values.to_vec(),
    };
    let sol = match solve(&lp, &SimplexOptions::default()) {
        Ok(s) => s,
        Err(Error::Infeasible) => return Err(Error::OutsideHull(x.to_vec())),
        Err(e) => return Err(e),
    };
    let combination: Vec<CertificateEntry> = sol
        .x
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 1e-12)
        .map(|(j, w)| CertificateEntry {
            weight: *w,
            point: points[j].clone(),
            value: values[j],
        })
        .collect();
    let value = combination.iter().map(|e| e.weight * e.value).sum();
    Ok(EnvelopeCertificate {
        point: x.to_vec(),
        value,
        combination,
    })
}

/// LP envelope of a 1D grid function at `x`.
pub fn caratheodory_envelope_at(f: &GridFunction1D, x: f64) -> Result<EnvelopeCertificate> {
    let pts: Vec<Vec<f64>> = f.knots().iter().map(|k| vec![*k]).collect();
    caratheodory_on_points(&pts, f.values(), &[x])
}

impl GridFunction2D {
    /// LP envelope of a 2D grid function at `(x, y)`.
    pub fn caratheodory_at(&self, x: f64, y: f64) -> Result<EnvelopeCertificate> {
        let (nx, ny) = self.shape();
        let mut pts = Vec::with_capacity(nx * ny);
        for &a in self.xs() {
            for &b in self.ys() {
                pts.push(vec![a, b]);
            }
        }
        caratheodory_on_points(&pts, self.values(), &[x, y])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_well_at_zero() {
        let f = GridFunction1D::sample(|x| (x * x - 1.0).powi(2), -2.0, 2.0, 801).unwrap();
        let c = caratheodory_envelope_at(&f, 0.0).unwrap();
        assert!(c.value.abs() < 1e-12);
        assert_eq!(c.combination.len(), 2);
        let mut pts: Vec<f64> = c.combination.iter().map(|e| e.point[0]).collect();
        pts.sort_by(f64::total_cmp);
        assert!((pts[0] + 1.0).abs() < 1e-12 && (pts[1] - 1.0).abs() < 1e-12);
        for e in &c.combination {
            assert!((e.weight - 0.5).abs() < 1e-12);
        }
        assert!(c.feasibility_error() < 1e-9);
    }

    #[test]
    fn convex_function_uses_single_point() {
        let f = GridFunction1D::sample(|x| x * x, -1.0, 1.0, 21).unwrap();
        let c = caratheodory_envelope_at(&f, 0.3).unwrap();
        assert_eq!(c.combination.len(), 1);
        assert!((c.value - 0.09).abs() < 1e-12);
    }

    #[test]
    fn outside_hull_is_reported() {
        let f = GridFunction1D::sample(|x| x * x, -1.0, 1.0, 21).unwrap();
        assert!(matches!(caratheodory_envelope_at(&f, 1.5), Err(Error::OutsideHull(_))));
    }

    #[test]
    fn planar_support_is_at_most_three() {
        let f = GridFunction2D::sample(|x, y| (x * x + y * y - 1.0).powi(2) + 0.1 * x, (-1.5, 1.5), (-1.5, 1.5), 31, 31)
            .unwrap();
        for (x, y) in [(0.0, 0.0), (0.3, -0.2), (-0.7, 0.55)] {
            let c = f.caratheodory_at(x, y).unwrap();
            assert!(c.combination.len() <= 3);
            assert!(c.feasibility_error() < 1e-9);
            assert!(c.value <= f.interpolate(x, y) + 1e-12);
        }
    }
}
