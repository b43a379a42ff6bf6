use super::{lower_convex_hull_1d, GridFunction1D};
use crate::error::{Error, Result};

/// Greatest convex nondecreasing minorant of a profile `φ` on `[0, R]`.
///
/// For `f = φ ∘ ‖·‖` this profile `ψ` gives `conv f = ψ ∘ ‖·‖`: the lower hull
/// of `φ` is flattened to its minimum left of the first minimizing knot.
pub fn radial_envelope(phi: &GridFunction1D) -> Result<GridFunction1D> {
    if phi.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    if phi.knots()[0] != 0.0 {
        return Err(Error::Grid("radial profile must start at r = 0".into()));
    }
    if phi.len() == 1 {
        return Ok(phi.clone());
    }
    let hull = lower_convex_hull_1d(phi)?;
    let v = hull.values();
    let (argmin, min) = v
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, x)| if *x < bv { (i, *x) } else { (bi, bv) });
    let mut out = v.to_vec();
    for x in &mut out[..argmin] {
        *x = min;
    }
    hull.with_values(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::is_convex_1d;

    fn check(phi: &GridFunction1D, psi: &GridFunction1D) {
        assert!(is_convex_1d(psi, 1e-12));
        assert!(psi.values().windows(2).all(|w| w[1] >= w[0]));
        for (a, b) in psi.values().iter().zip(phi.values()) {
            assert!(a <= b);
        }
    }

    #[test]
    fn shifted_square_flattens_left_branch() {
        let phi = GridFunction1D::sample(|r| (r - 1.0).powi(2), 0.0, 3.0, 301).unwrap();
        let psi = radial_envelope(&phi).unwrap();
        check(&phi, &psi);
        for (r, (a, b)) in phi.knots().iter().zip(psi.values().iter().zip(phi.values())) {
            if *r <= 1.0 {
                assert!(a.abs() < 1e-12);
            } else {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_profile_is_kept() {
        let phi = GridFunction1D::sample(|r| r, 0.0, 2.0, 21).unwrap();
        let psi = radial_envelope(&phi).unwrap();
        for (a, b) in psi.values().iter().zip(phi.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn double_well_profile() {
        let phi = GridFunction1D::sample(|r| (r * r - 1.0).powi(2), 0.0, 2.0, 401).unwrap();
        let psi = radial_envelope(&phi).unwrap();
        check(&phi, &psi);
        for (r, (a, b)) in phi.knots().iter().zip(psi.values().iter().zip(phi.values())) {
            if *r <= 1.0 {
                assert!(a.abs() < 1e-12);
            } else {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn must_start_at_zero() {
        let phi = GridFunction1D::sample(|r| r, 0.5, 2.0, 21).unwrap();
        assert!(radial_envelope(&phi).is_err());
    }
}
