//! Norm descriptors and certification of polynomial norms.

use crate::error::{Error, Result};
use crate::form::SymmetricForm;
use crate::sampling::{
    axis_directions, coordinate_polish, dot, euclid, BoundDirection, DirectionSampler, SamplerConfig, TopK,
};
use crate::sequence::SparseSequence;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Finite(usize),
    Sequence,
}

/// Convex polygonal unit ball in the plane, stored as facet normals `a_k`
/// with the facet on `{a_k · x = 1}`. The gauge is `max_k a_k · x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarGauge {
    pub normals: Vec<[f64; 2]>,
}

impl PlanarGauge {
    /// Builds the gauge from boundary radii sampled at increasing angles in
    /// `[0, 2π)`. The resulting polygon must be strictly convex around the origin.
    pub fn from_radii(angles: &[f64], radii: &[f64]) -> Result<Self> {
        if angles.len() != radii.len() || angles.len() < 3 {
            return Err(Error::Grid("gauge needs at least 3 matched angle/radius samples".into()));
        }
        if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::Grid("gauge radii must be positive".into()));
        }
        if angles.windows(2).any(|w| w[1] <= w[0])
            || angles[angles.len() - 1] - angles[0] >= std::f64::consts::TAU
        {
            return Err(Error::Grid("gauge angles must increase within one turn".into()));
        }
        let pts: Vec<[f64; 2]> = angles
            .iter()
            .zip(radii)
            .map(|(a, r)| [r * a.cos(), r * a.sin()])
            .collect();
        let n = pts.len();
        let mut normals = Vec::with_capacity(n);
        for k in 0..n {
            let p = pts[k];
            let q = pts[(k + 1) % n];
            let r = pts[(k + 2) % n];
            let turn = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
            if turn <= 0.0 {
                return Err(Error::Grid(format!("sampled unit ball is not convex at vertex {}", (k + 1) % n)));
            }
            // a with a·p = a·q = 1
            let det = p[0] * q[1] - p[1] * q[0];
            if det <= 0.0 {
                return Err(Error::Grid("origin is not interior to the sampled ball".into()));
            }
            normals.push([(q[1] - p[1]) / det, (p[0] - q[0]) / det]);
        }
        Ok(PlanarGauge { normals })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.normals
            .iter()
            .map(|a| a[0] * x[0] + a[1] * x[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A polynomial `P` certified (by sampling) as convex and separating, so that
/// `P^{1/N}` is a norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyNorm {
    pub form: SymmetricForm,
    /// Empirical infimum of `P` on the reference unit sphere (upper bound).
    pub alpha: f64,
    pub convexity_checked: bool,
}

impl PolyNorm {
    /// Certifies `form` against a reference norm. Fails with the witness if
    /// either check fails.
    pub fn certify(form: SymmetricForm, reference: &NormDescriptor, cfg: &SamplerConfig) -> Result<Self> {
        let alpha = match is_separating(&form, reference, cfg)? {
            Separation::Separating { alpha, .. } => alpha,
            Separation::Counterexample { x, value } => {
                return Err(Error::NotSeparating { witness: x, value })
            }
        };
        if let ConvexityCheck::Witness { x, h, value } = check_convexity(&form, cfg) {
            return Err(Error::NotConvex { x, h, value });
        }
        Ok(PolyNorm {
            form,
            alpha,
            convexity_checked: true,
        })
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    Lp { p: f64 },
    Sup,
    Poly(PolyNorm),
    Gauge(PlanarGauge),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormDescriptor {
    pub kind: NormKind,
    pub dimension: Dimension,
}

impl NormDescriptor {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("l_p needs p >= 1, got {p}")));
        }
        Ok(NormDescriptor {
            kind: NormKind::Lp { p },
            dimension: Dimension::Finite(dim),
        })
    }

    pub fn sup(dim: usize) -> Self {
        NormDescriptor {
            kind: NormKind::Sup,
            dimension: Dimension::Finite(dim),
        }
    }

    pub fn poly(norm: PolyNorm) -> Self {
        let dim = norm.form.dimension();
        NormDescriptor {
            kind: NormKind::Poly(norm),
            dimension: Dimension::Finite(dim),
        }
    }

    pub fn gauge(g: PlanarGauge) -> Self {
        NormDescriptor {
            kind: NormKind::Gauge(g),
            dimension: Dimension::Finite(2),
        }
    }

    /// Short label used in file names and reports, e.g. `l4`, `sup`, `poly4`.
    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Lp { p } => format!("l{}", p),
            NormKind::Sup => "sup".into(),
            NormKind::Poly(n) => format!("poly{}", n.degree()),
            NormKind::Gauge(_) => "gauge".into(),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self.dimension {
            Dimension::Finite(d) => Some(d),
            Dimension::Sequence => None,
        }
    }

    /// Norm value without validation; callers guarantee the dimension.
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Lp { p } => lp_norm(x, *p),
            NormKind::Sup => x.iter().fold(0.0, |a, v| a.max(v.abs())),
            NormKind::Poly(n) => n.form.eval_diagonal(x).max(0.0).powf(1.0 / n.degree() as f64),
            NormKind::Gauge(g) => g.eval(x).max(0.0),
        }
    }
}

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return euclid(x);
    }
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `‖x‖` for a finite-dimensional descriptor.
pub fn eval_norm(norm: &NormDescriptor, x: &[f64]) -> Result<f64> {
    match norm.dimension {
        Dimension::Finite(d) if d != x.len() => {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x.len(),
            })
        }
        _ => {}
    }
    if let NormKind::Poly(n) = &norm.kind {
        if !(n.alpha > 0.0 && n.convexity_checked) {
            return Err(Error::InvalidParameter(
                "polynomial norm is not certified separating and convex".into(),
            ));
        }
    }
    Ok(norm.value(x))
}

/// `‖x‖` of a finitely supported sequence under an `ℓ_p` or sup descriptor.
pub fn eval_sequence_norm(norm: &NormDescriptor, x: &SparseSequence) -> Result<f64> {
    match (&norm.kind, norm.dimension) {
        (NormKind::Lp { p }, Dimension::Sequence) => Ok(x.lp_norm(*p)),
        (NormKind::Sup, Dimension::Sequence) => Ok(x.sup_norm()),
        (_, Dimension::Finite(d)) => {
            if x.max_support() > d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.max_support(),
                });
            }
            let mut dense = vec![0.0; d];
            for (i, v) in x.iter() {
                dense[i - 1] = v;
            }
            eval_norm(norm, &dense)
        }
        _ => Err(Error::InvalidParameter("norm has no sequence-space model".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Separation {
    Separating {
        alpha: f64,
        witness: Vec<f64>,
        bound: BoundDirection,
    },
    Counterexample {
        x: Vec<f64>,
        value: f64,
    },
}

/// Threshold below which the empirical minimum of `P` on the sphere counts as
/// a failure to separate.
pub const SEPARATION_FLOOR: f64 = 1e-12;

/// Empirical `min P` over the unit sphere of `reference`, with coordinate
/// polish of the best candidates.
pub fn is_separating(form: &SymmetricForm, reference: &NormDescriptor, cfg: &SamplerConfig) -> Result<Separation> {
    if form.degree() % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "separating forms have even degree, got {}",
            form.degree()
        )));
    }
    let d = form.dimension();
    if reference.dim() != Some(d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: reference.dim().unwrap_or(0),
        });
    }
    let on_sphere = |v: &[f64]| -> f64 {
        let n = reference.value(v);
        if n == 0.0 {
            return f64::INFINITY;
        }
        let u: Vec<f64> = v.iter().map(|c| c / n).collect();
        form.eval_diagonal(&u)
    };
    let mut top = TopK::new(cfg.refine_top);
    for e in axis_directions(d) {
        let val = on_sphere(&e);
        if val <= SEPARATION_FLOOR {
            return Ok(Separation::Counterexample { x: e, value: val });
        }
        top.push(val, e);
    }
    let mut dirs = DirectionSampler::new(d, cfg.samples, cfg.seed);
    for _ in 0..cfg.samples {
        let v = dirs.next_direction();
        top.push(on_sphere(&v), v);
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut f = |v: &[f64]| on_sphere(v);
    for (_, start) in top.into_vec() {
        let (v, val) = coordinate_polish(&mut f, &start, 0.25, cfg.refine_iters);
        if best.as_ref().map_or(true, |(b, _)| val < *b) {
            best = Some((val, v));
        }
    }
    let (alpha, v) = best.expect("at least one candidate");
    let n = reference.value(&v);
    let witness: Vec<f64> = v.iter().map(|c| c / n).collect();
    if alpha <= SEPARATION_FLOOR {
        return Ok(Separation::Counterexample { x: witness, value: alpha });
    }
    Ok(Separation::Separating {
        alpha,
        witness,
        bound: BoundDirection::Upper,
    })
}

/// Empirical `sup |P|` over the unit sphere of `reference` (a lower bound of `‖P‖`).
pub fn form_sup_norm(form: &SymmetricForm, reference: &NormDescriptor, cfg: &SamplerConfig) -> f64 {
    let d = form.dimension();
    let on_sphere = |v: &[f64]| -> f64 {
        let n = reference.value(v);
        if n == 0.0 {
            return 0.0;
        }
        let u: Vec<f64> = v.iter().map(|c| c / n).collect();
        -form.eval_diagonal(&u).abs()
    };
    let mut top = TopK::new(cfg.refine_top);
    let mut dirs = DirectionSampler::new(d, cfg.samples, cfg.seed);
    for e in axis_directions(d) {
        top.push(on_sphere(&e), e);
    }
    for _ in 0..cfg.samples {
        let v = dirs.next_direction();
        top.push(on_sphere(&v), v);
    }
    let mut f = |v: &[f64]| on_sphere(v);
    top.into_vec()
        .into_iter()
        .map(|(_, s)| -coordinate_polish(&mut f, &s, 0.25, cfg.refine_iters).1)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ConvexityCheck {
    Pass { checked: usize },
    Witness { x: Vec<f64>, h: Vec<f64>, value: f64 },
}

/// Samples second directional derivatives of `P`. Checks the exact Hessian
/// form `N(N-1) A(x,…,x,h,h)`, second differences with step `1e-3`, and for
/// `N = 4` the mixed term `A(x,x,h,h)` itself. Axis pairs and diagonal pairs
/// `(e_i ± e_j)/√2` are tried before the sampled pairs.
pub fn check_convexity(form: &SymmetricForm, cfg: &SamplerConfig) -> ConvexityCheck {
    let d = form.dimension();
    let scale = form.max_coefficient().max(1e-300);
    let tol = 1e-12 * scale;
    let step = 1e-3;
    let mut structured = axis_directions(d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            for sj in [1.0, -1.0] {
                let mut v = vec![0.0; d];
                v[i] = s;
                v[j] = sj * s;
                structured.push(v);
            }
        }
    }
    let mut checked = 0usize;
    let mut test = |x: &[f64], h: &[f64]| -> Option<ConvexityCheck> {
        checked += 1;
        let hess = form.hessian_form(x, h);
        if hess < -tol {
            return Some(ConvexityCheck::Witness {
                x: x.to_vec(),
                h: h.to_vec(),
                value: hess,
            });
        }
        if form.degree() == 4 {
            let a = form.eval_mixed(x, h, 2);
            if a < -tol {
                return Some(ConvexityCheck::Witness {
                    x: x.to_vec(),
                    h: h.to_vec(),
                    value: a,
                });
            }
        }
        let plus: Vec<f64> = x.iter().zip(h).map(|(a, b)| a + step * b).collect();
        let minus: Vec<f64> = x.iter().zip(h).map(|(a, b)| a - step * b).collect();
        let diff = form.eval_diagonal(&plus) + form.eval_diagonal(&minus) - 2.0 * form.eval_diagonal(x);
        if diff < -tol * (1.0 + step * step * 1e3) {
            return Some(ConvexityCheck::Witness {
                x: x.to_vec(),
                h: h.to_vec(),
                value: diff / (step * step),
            });
        }
        None
    };
    for x in &structured {
        for h in &structured {
            if let Some(w) = test(x, h) {
                return w;
            }
        }
    }
    let mut xs = DirectionSampler::new(d, cfg.samples, cfg.seed);
    let mut hs = DirectionSampler::new(d, cfg.samples, cfg.seed.wrapping_add(1));
    for _ in 0..cfg.samples {
        let x = xs.next_direction();
        let h = hs.next_direction();
        if let Some(w) = test(&x, &h) {
            return w;
        }
    }
    ConvexityCheck::Pass { checked }
}

/// `|||x||| = inf{λ > 0 : P(x/λ) = 1} = P(x)^{1/N}`.
pub fn minkowski_norm(norm: &PolyNorm, x: &[f64]) -> Result<f64> {
    if x.len() != norm.form.dimension() {
        return Err(Error::DimensionMismatch {
            expected: norm.form.dimension(),
            got: x.len(),
        });
    }
    if !(norm.alpha > 0.0) {
        return Err(Error::NotSeparating {
            witness: vec![],
            value: norm.alpha,
        });
    }
    if x.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    Ok(norm.form.eval_diagonal(x).max(0.0).powf(1.0 / norm.degree() as f64))
}

/// Solves `P(x/λ) = 1` by bisection on `λ`; used to cross-check
/// [`minkowski_norm`].
pub fn minkowski_norm_bisect(form: &SymmetricForm, x: &[f64]) -> f64 {
    if x.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let g = |lam: f64| {
        let y: Vec<f64> = x.iter().map(|v| v / lam).collect();
        form.eval_diagonal(&y) - 1.0
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    while g(lo) < 0.0 {
        lo *= 0.5;
    }
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Euclidean projection helper: component of `u` orthogonal to unit `x`.
pub(crate) fn orthogonalize(u: &[f64], x: &[f64]) -> Vec<f64> {
    let xx = dot(x, x);
    if xx == 0.0 {
        return u.to_vec();
    }
    let c = dot(u, x) / xx;
    u.iter().zip(x).map(|(a, b)| a - c * b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::{polarize, MonomialPolynomial};
    use proptest::prelude::*;

    fn l4_form() -> SymmetricForm {
        SymmetricForm::power_sum(4, 2)
    }

    fn cfg() -> SamplerConfig {
        SamplerConfig::default().with_samples(1024)
    }

    #[test]
    fn eval_norm_examples() {
        let l4 = NormDescriptor::lp(4.0, 2).unwrap();
        assert!((eval_norm(&l4, &[1.0, 1.0]).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(eval_norm(&NormDescriptor::sup(2), &[0.3, -0.9]).unwrap(), 0.9);
        let l2 = NormDescriptor::lp(2.0, 2).unwrap();
        let poly = NormDescriptor::poly(PolyNorm::certify(l4_form(), &l2, &cfg()).unwrap());
        assert!((eval_norm(&poly, &[1.0, 1.0]).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        assert!(matches!(eval_norm(&l4, &[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(NormDescriptor::lp(0.5, 2).is_err());
    }

    #[test]
    fn uncertified_poly_norm_is_rejected() {
        let fake = NormDescriptor::poly(PolyNorm {
            form: l4_form(),
            alpha: 0.0,
            convexity_checked: false,
        });
        assert!(eval_norm(&fake, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn separation_examples() {
        let l2 = NormDescriptor::lp(2.0, 2).unwrap();
        match is_separating(&l4_form(), &l2, &cfg()).unwrap() {
            Separation::Separating { alpha, witness, bound } => {
                assert!((alpha - 0.5).abs() < 1e-9, "alpha = {alpha}");
                assert!((witness[0].abs() - witness[1].abs()).abs() < 1e-4);
                assert_eq!(bound, BoundDirection::Upper);
            }
            other => panic!("{other:?}"),
        }
        let x14 = SymmetricForm::from_terms(4, 2, [(vec![0, 0, 0, 0], 1.0)]).unwrap();
        match is_separating(&x14, &l2, &cfg()).unwrap() {
            Separation::Counterexample { x, value } => {
                assert_eq!(value, 0.0);
                assert_eq!(x[0], 0.0);
            }
            other => panic!("{other:?}"),
        }
        let l4 = NormDescriptor::lp(4.0, 2).unwrap();
        match is_separating(&l4_form(), &l4, &cfg()).unwrap() {
            Separation::Separating { alpha, .. } => assert!((alpha - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let odd = SymmetricForm::power_sum(3, 2);
        assert!(is_separating(&odd, &l2, &cfg()).is_err());
    }

    #[test]
    fn convexity_examples() {
        assert!(matches!(check_convexity(&l4_form(), &cfg()), ConvexityCheck::Pass { .. }));
        assert!(matches!(
            check_convexity(&SymmetricForm::power_sum(2, 1), &cfg()),
            ConvexityCheck::Pass { .. }
        ));
        let p = MonomialPolynomial::new(2)
            .with_term(&[4, 0], 1.0)
            .with_term(&[2, 2], -6.0)
            .with_term(&[0, 4], 1.0);
        let a = polarize(&p, 4).unwrap();
        match check_convexity(&a, &cfg()) {
            ConvexityCheck::Witness { x, h, value } => {
                assert_eq!((x.as_slice(), h.as_slice()), (&[1.0, 0.0][..], &[0.0, 1.0][..]));
                assert!((value + 12.0).abs() < 1e-9 || (value + 1.0).abs() < 1e-9);
                assert!((a.eval_mixed(&x, &h, 2) + 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certify_reports_witnesses() {
        let l2 = NormDescriptor::lp(2.0, 2).unwrap();
        let x14 = SymmetricForm::from_terms(4, 2, [(vec![0, 0, 0, 0], 1.0)]).unwrap();
        assert!(matches!(PolyNorm::certify(x14, &l2, &cfg()), Err(Error::NotSeparating { .. })));
    }

    #[test]
    fn minkowski_examples() {
        let l2 = NormDescriptor::lp(2.0, 2).unwrap();
        let n = PolyNorm::certify(l4_form(), &l2, &cfg()).unwrap();
        assert!((minkowski_norm(&n, &[1.0, 1.0]).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(minkowski_norm(&n, &[0.0, 0.0]).unwrap(), 0.0);
        assert!((minkowski_norm(&n, &[3.0, 0.0]).unwrap() - 3.0).abs() < 1e-15);
        for x in [[1.0, 1.0], [3.0, 0.0], [-0.2, 0.7]] {
            let a = minkowski_norm(&n, &x).unwrap();
            assert!((a - minkowski_norm_bisect(&n.form, &x)).abs() < 1e-9);
        }
        let bad = PolyNorm {
            form: l4_form(),
            alpha: 0.0,
            convexity_checked: true,
        };
        assert!(minkowski_norm(&bad, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn sandwich_bounds_hold() {
        let l2 = NormDescriptor::lp(2.0, 2).unwrap();
        let n = PolyNorm::certify(l4_form(), &l2, &cfg()).unwrap();
        let sup = form_sup_norm(&n.form, &l2, &cfg());
        assert!((sup - 1.0).abs() < 1e-12);
        let mut dirs = DirectionSampler::new(2, 200, 3);
        for k in 0..200 {
            let r = 0.1 + k as f64 * 0.02;
            let x: Vec<f64> = dirs.next_direction().iter().map(|v| v * r).collect();
            let p = n.form.eval_diagonal(&x);
            let e = euclid(&x).powi(4);
            assert!(n.alpha * e <= p * (1.0 + 1e-9));
            assert!(p <= sup * e * (1.0 + 1e-9));
        }
    }

    #[test]
    fn gauge_square_is_sup_norm() {
        use std::f64::consts::{FRAC_PI_4, SQRT_2};
        let angles: Vec<f64> = (0..4).map(|k| FRAC_PI_4 + k as f64 * 2.0 * FRAC_PI_4).collect();
        let g = PlanarGauge::from_radii(&angles, &[SQRT_2; 4]).unwrap();
        let n = NormDescriptor::gauge(g);
        for x in [[0.3f64, -0.9], [2.0, 1.0], [-1.0, -1.5]] {
            let want = x[0].abs().max(x[1].abs());
            assert!((eval_norm(&n, &x).unwrap() - want).abs() < 1e-12);
        }
        let bad = PlanarGauge::from_radii(&[0.0, 1.0, 2.0, 3.0, 4.0], &[1.0, 0.1, 1.0, 1.0, 1.0]);
        assert!(bad.is_err());
    }

    #[test]
    fn sequence_norms() {
        let x = SparseSequence::from_pairs([(1, 1.0), (5, 1.0)]);
        let l4 = NormDescriptor {
            kind: NormKind::Lp { p: 4.0 },
            dimension: Dimension::Sequence,
        };
        assert!((eval_sequence_norm(&l4, &x).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        let fin = NormDescriptor::lp(4.0, 3).unwrap();
        assert!(eval_sequence_norm(&fin, &x).is_err());
    }

    proptest! {
        #[test]
        fn homogeneity(x in proptest::collection::vec(-3.0f64..3.0, 2), s in -5.0f64..5.0) {
            let l2 = NormDescriptor::lp(2.0, 2).unwrap();
            let poly = PolyNorm::certify(l4_form(), &l2, &SamplerConfig::default().with_samples(64)).unwrap();
            let sx: Vec<f64> = x.iter().map(|v| s * v).collect();
            for norm in [NormDescriptor::lp(4.0, 2).unwrap(), NormDescriptor::sup(2), NormDescriptor::lp(1.0, 2).unwrap()] {
                let a = eval_norm(&norm, &sx).unwrap();
                let b = s.abs() * eval_norm(&norm, &x).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
            }
            let a = minkowski_norm(&poly, &sx).unwrap();
            let b = s.abs() * minkowski_norm(&poly, &x).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
        }

        #[test]
        fn triangle_inequality_for_convex_separating_form(
            x in proptest::collection::vec(-3.0f64..3.0, 3),
            y in proptest::collection::vec(-3.0f64..3.0, 3),
            z in proptest::collection::vec(-3.0f64..3.0, 3),
        ) {
            let p = MonomialPolynomial::new(3)
                .with_term(&[4, 0, 0], 1.0)
                .with_term(&[0, 4, 0], 1.0)
                .with_term(&[0, 0, 4], 1.0)
                .with_term(&[2, 2, 0], 2.0)
                .with_term(&[0, 2, 2], 1.0);
            let l2 = NormDescriptor::lp(2.0, 3).unwrap();
            let n = PolyNorm::certify(polarize(&p, 4).unwrap(), &l2, &SamplerConfig::default().with_samples(64)).unwrap();
            let add = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| u + v).collect() };
            for (a, b) in [(&x, &y), (&y, &z), (&x, &z)] {
                let lhs = minkowski_norm(&n, &add(a, b)).unwrap();
                let rhs = minkowski_norm(&n, a).unwrap() + minkowski_norm(&n, b).unwrap();
                prop_assert!(lhs <= rhs + 1e-9);
            }
        }
    }
}
