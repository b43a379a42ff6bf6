//! Browser bindings. Every function returns a JSON string; failures come back
//! as `{"error": "..."}` so the page can show them inline.

use asymconv::envelope::{caratheodory_envelope_at, lower_convex_hull_1d, GridFunction1D};
use asymconv::expr::Expr;
use asymconv::extremal::{solve_extremal, ExtremalProblem};
use asymconv::moduli::{delta_curve, log_grid, power_fit, rho_curve, RhoVariant};
use asymconv::normcore::NormDescriptor;
use asymconv::sampling::SamplerConfig;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Samples `expr` on `[a, b]` and returns the knots, values, lower hull and a
/// two-point certificate at `at`.
#[wasm_bindgen]
pub fn envelope_1d(expr: &str, a: f64, b: f64, n: usize, at: f64) -> String {
    respond((|| {
        let e = Expr::parse(expr).map_err(|e| e.to_string())?;
        if e.uses_y() {
            return Err("only functions of x are supported here".into());
        }
        let f = GridFunction1D::sample(|x| e.eval(x, 0.0), a, b, n.clamp(3, 20_001)).map_err(|e| e.to_string())?;
        let hull = lower_convex_hull_1d(&f).map_err(|e| e.to_string())?;
        let cert = caratheodory_envelope_at(&f, at.clamp(a, b)).map_err(|e| e.to_string())?;
        Ok(json!({
            "x": f.knots(),
            "f": f.values(),
            "envelope": hull.values(),
            "certificate": cert,
        }))
    })())
}

/// Modulus of convexity (`"delta"`) or smoothness (`"rho"`) of planar `l_p`
/// on a log grid, with its fitted power type.
#[wasm_bindgen]
pub fn lp_modulus(p: f64, quantity: &str, lo: f64, hi: f64, points: usize, samples: usize) -> String {
    respond((|| {
        let norm = NormDescriptor::lp(p, 2).map_err(|e| e.to_string())?;
        if !(lo > 0.0 && lo < hi && hi <= 2.0) {
            return Err("need 0 < lo < hi <= 2".into());
        }
        let grid = log_grid(lo, hi, points.clamp(2, 64));
        let cfg = SamplerConfig::default().with_samples(samples.clamp(16, 8192));
        let curve = match quantity {
            "delta" => delta_curve(&norm, &grid, &cfg),
            "rho" => rho_curve(&norm, &grid, RhoVariant::Standard, &cfg),
            other => return Err(format!("unknown quantity '{other}'")),
        }
        .map_err(|e| e.to_string())?;
        let fit = power_fit(&curve, (lo, hi)).ok();
        Ok(json!({ "t": curve.ts(), "value": curve.values(), "bound": curve.bound_direction, "fit": fit }))
    })())
}

/// Solves the extremal problem for degree `n` and point `t0`.
#[wasm_bindgen]
pub fn extremal(n: usize, t0: f64) -> String {
    respond((|| {
        let problem = ExtremalProblem::new(n, t0).map_err(|e| e.to_string())?;
        let r = solve_extremal(&problem).map_err(|e| e.to_string())?;
        let p = r.polynomial();
        let tmax = r.grid.truncation.max(2.0 * t0);
        let ts: Vec<f64> = (0..=400).map(|i| -tmax + 2.0 * tmax * i as f64 / 400.0).collect();
        let ps: Vec<f64> = ts.iter().map(|&t| p.eval(t)).collect();
        Ok(json!({ "q": r.q, "K": r.k, "coefficients": r.coefficients, "t": ts, "p": ps }))
    })())
}
