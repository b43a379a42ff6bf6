//! Convex envelopes of sampled functions.
//!
//! Three independent routes are provided: the lower convex hull of the
//! epigraph points (1D), discrete Legendre-Fenchel biconjugation (1D and 2D),
//! and a linear program over convex combinations of grid points that returns
//! a Carathéodory certificate.

mod caratheodory;
mod conjugate;
mod grid;
mod hull;
mod radial;

pub use caratheodory::{caratheodory_envelope_at, caratheodory_on_points, CertificateEntry, EnvelopeCertificate};
pub use conjugate::{
    biconjugate_1d, biconjugate_2d, conjugate_line, legendre_conjugate_1d, legendre_conjugate_2d, Biconjugate2D,
    SlopeGrid,
};
pub use grid::{GridFunction1D, GridFunction2D};
pub use hull::{is_convex_1d, lower_convex_hull_1d, lower_hull_indices};
pub use radial::radial_envelope;

/// Cross-method agreement tolerance `4 · spacing · Lipschitz`, with the
/// Lipschitz constant estimated from the largest secant slope.
pub fn agreement_tolerance(f: &GridFunction1D) -> f64 {
    let k = f.knots();
    let v = f.values();
    let mut spacing: f64 = 0.0;
    let mut lip: f64 = 0.0;
    for i in 1..k.len() {
        let dx = k[i] - k[i - 1];
        spacing = spacing.max(dx);
        lip = lip.max(((v[i] - v[i - 1]) / dx).abs());
    }
    4.0 * spacing * lip.max(1e-12)
}
