//! The claim table behind `asymconv verify`: each row recomputes one
//! quantitative statement and compares it against its expected value.

use crate::record::{Assertion, CurveData, NamedCurve, Outcome};
use asymconv::asymptotic::{
    envelope_preserves_smoothness_demo, random_unit_sequences, tail_delta_norm, tail_modulus_fn, tail_rho_norm,
    ModulusMode, Radial, SequenceSpace,
};
use asymconv::envelope::{
    agreement_tolerance, biconjugate_1d, biconjugate_2d, caratheodory_envelope_at, lower_convex_hull_1d,
    GridFunction1D, GridFunction2D, SlopeGrid,
};
use asymconv::extremal::{scale_invariance_check, solve_extremal, ExtremalProblem, DEFAULT_DENSITY};
use asymconv::form::SymmetricForm;
use asymconv::moduli::{delta_curve, log_grid, power_fit, puc_constant, verify_puc, PucCheck, PucOutcome};
use asymconv::normcore::{NormDescriptor, PolyNorm};
use asymconv::sampling::SamplerConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|computed - expected| <= tolerance`
    Eq,
    /// `computed <= expected + tolerance`
    Le,
    /// `computed >= expected - tolerance`
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub claim: String,
    pub anchor: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

struct Table {
    scale: f64,
    rows: Vec<Claim>,
}

impl Table {
    fn push(&mut self, id: &str, claim: &str, anchor: &str, computed: f64, expected: f64, tol: f64, rel: Relation) {
        let tolerance = tol * self.scale;
        let pass = match rel {
            Relation::Eq => (computed - expected).abs() <= tolerance,
            Relation::Le => computed <= expected + tolerance,
            Relation::Ge => computed >= expected - tolerance,
        };
        self.rows.push(Claim {
            id: id.into(),
            claim: claim.into(),
            anchor: anchor.into(),
            computed,
            expected,
            tolerance,
            relation: rel,
            pass,
        });
    }

    fn fail(&mut self, id: &str, claim: &str, anchor: &str, err: impl std::fmt::Display) {
        self.rows.push(Claim {
            id: id.into(),
            claim: format!("{claim} (error: {err})"),
            anchor: anchor.into(),
            computed: f64::NAN,
            expected: f64::NAN,
            tolerance: 0.0,
            relation: Relation::Eq,
            pass: false,
        });
    }
}

fn lp_closed_form(p: f64, t: f64) -> f64 {
    (1.0 + t.powf(p)).powf(1.0 / p) - 1.0
}

pub fn claims(cfg: &SamplerConfig, scale: f64) -> Vec<Claim> {
    let mut t = Table { scale, rows: Vec::new() };
    let light = SamplerConfig { samples: 128, ..*cfg };

    // 1. closed form of the tail moduli on lp
    let anchor = "asymptotic moduli of lp at a unit vector";
    for p in [1.0, 2.0, 4.0] {
        let space = SequenceSpace::Lp { p };
        let x = random_unit_sequences(&space, 1, 5, cfg.seed).remove(0);
        let mut worst_a: f64 = 0.0;
        let mut worst_s: f64 = 0.0;
        for tv in [0.1, 0.5, 1.0] {
            let e = lp_closed_form(p, tv);
            for r in [tail_rho_norm(&space, &x, tv), tail_delta_norm(&space, &x, tv)] {
                match r {
                    Ok(r) => worst_a = worst_a.max((r.value - e).abs()),
                    Err(err) => t.fail("1", "analytic tail modulus", anchor, err),
                }
            }
            for mode in [ModulusMode::RhoBar, ModulusMode::DeltaBar] {
                match tail_modulus_fn(&space, &space, &x, tv, mode, false, &light) {
                    Ok(r) => worst_s = worst_s.max((r.value - e).abs()),
                    Err(err) => t.fail("1", "sampled tail modulus", anchor, err),
                }
            }
        }
        t.push("1a", &format!("l{p}: analytic moduli equal (1+t^p)^(1/p)-1"), anchor, worst_a, 0.0, 1e-12, Relation::Eq);
        t.push("1b", &format!("l{p}: sampled moduli equal (1+t^p)^(1/p)-1"), anchor, worst_s, 0.0, 1e-9, Relation::Eq);
    }

    // 2. c0 has flat asymptotic moduli
    let c0 = SequenceSpace::C0;
    let mut x = random_unit_sequences(&c0, 1, 5, cfg.seed).remove(0);
    x.set(2, 1.0);
    let mut largest: f64 = 0.0;
    for tv in [0.25, 0.5, 1.0] {
        for v in [
            tail_rho_norm(&c0, &x, tv).map(|r| r.value),
            tail_delta_norm(&c0, &x, tv).map(|r| r.value),
            tail_modulus_fn(&c0, &c0, &x, tv, ModulusMode::RhoBar, false, &light).map(|r| r.value),
            tail_modulus_fn(&c0, &c0, &x, tv, ModulusMode::DeltaBar, false, &light).map(|r| r.value),
        ] {
            largest = largest.max(v.map(f64::abs).unwrap_or(f64::INFINITY));
        }
    }
    t.push("2", "c0: asymptotic moduli vanish for t <= 1", "flatness of c0", largest, 0.0, 0.0, Relation::Eq);

    // 3-4. constant-1 inequality for the power-sum norms
    for (id, n) in [("3", 4usize), ("4", 6)] {
        let anchor = "constant-one parallelogram-type inequality";
        let reference = NormDescriptor::lp(2.0, 3).unwrap();
        match PolyNorm::certify(SymmetricForm::power_sum(n, 3), &reference, cfg) {
            Ok(norm) => match verify_puc(&NormDescriptor::poly(norm), n as f64, 1.0, 20_000, cfg.seed) {
                Ok(PucCheck::Pass { min_slack, .. }) => t.push(
                    id,
                    &format!("N={n}: P(x+h)+P(x-h) >= 2P(x)+2P(h)"),
                    anchor,
                    min_slack,
                    0.0,
                    1e-9,
                    Relation::Ge,
                ),
                Ok(PucCheck::Violation { slack, .. }) => t.push(
                    id,
                    &format!("N={n}: P(x+h)+P(x-h) >= 2P(x)+2P(h)"),
                    anchor,
                    slack,
                    0.0,
                    1e-9,
                    Relation::Ge,
                ),
                Err(e) => t.fail(id, "constant-one inequality", anchor, e),
            },
            Err(e) => t.fail(id, "power-sum certification", anchor, e),
        }
    }

    // 5. extremal problem
    let anchor = "extremal problem over convex nonnegative even polynomials";
    match solve_extremal(&ExtremalProblem::new(4, 1.0).unwrap()) {
        Ok(r) => t.push("5a", "q(4, 1) = 2", anchor, r.q, 2.0, 1e-6, Relation::Eq),
        Err(e) => t.fail("5a", "q(4, 1)", anchor, e),
    }
    match solve_extremal(&ExtremalProblem::new(6, 1.0).unwrap()) {
        Ok(r) => {
            t.push("5b", "q(6, 1) = 7/6", anchor, r.q, 7.0 / 6.0, 2e-3, Relation::Eq);
            t.push("5c", "K(6) = 12/7", anchor, r.k, 12.0 / 7.0, 3e-3, Relation::Eq);
            t.push("5d", "optimal a4 = -5/3", anchor, r.coefficients[1], -5.0 / 3.0, 5e-3, Relation::Eq);
            t.push("5e", "optimal a2 = 5/6", anchor, r.coefficients[0], 5.0 / 6.0, 5e-3, Relation::Eq);
        }
        Err(e) => t.fail("5b", "q(6, 1)", anchor, e),
    }
    let mut dev: f64 = 0.0;
    for n in [4, 6] {
        match scale_invariance_check(n, &[0.5, 1.0, 2.0], DEFAULT_DENSITY) {
            Ok(r) => dev = dev.max(r.max_relative_deviation),
            Err(_) => dev = f64::INFINITY,
        }
    }
    t.push("5f", "q(N, t0) / t0^N is independent of t0", anchor, dev, 0.0, 1e-4, Relation::Eq);

    // 6. power type
    let anchor = "power type of the moduli of lp";
    let l4 = NormDescriptor::lp(4.0, 2).unwrap();
    match delta_curve(&l4, &log_grid(0.01, 0.1, 8), cfg).and_then(|c| power_fit(&c, (0.01, 0.1))) {
        Ok(fit) => t.push("6a", "delta of l4 has power type 4", anchor, fit.exponent, 4.0, 0.2, Relation::Eq),
        Err(e) => t.fail("6a", "delta of l4", anchor, e),
    }
    let space = SequenceSpace::Lp { p: 4.0 };
    let x = random_unit_sequences(&space, 1, 4, cfg.seed).remove(0);
    let ts = log_grid(0.05, 0.5, 10);
    let tail_fit = ts
        .iter()
        .map(|&tv| tail_rho_norm(&space, &x, tv).map(|r| asymconv::moduli::CurvePoint { t: tv, value: r.value }))
        .collect::<asymconv::Result<Vec<_>>>()
        .and_then(|pts| asymconv::moduli::ModulusCurve::new("t", pts, asymconv::sampling::BoundDirection::Exact))
        .and_then(|c| power_fit(&c, (0.05, 0.5)));
    match tail_fit {
        Ok(fit) => t.push("6b", "asymptotic rho of l4 has power type 4", anchor, fit.exponent, 4.0, 0.1, Relation::Eq),
        Err(e) => t.fail("6b", "asymptotic rho of l4", anchor, e),
    }

    // 7. envelope computation
    let anchor = "convex envelope of a sampled function";
    let f = GridFunction1D::sample(|x| (x * x - 1.0).powi(2), -2.0, 2.0, 801).unwrap();
    let hull = lower_convex_hull_1d(&f).unwrap();
    t.push("7a", "conv((x^2-1)^2)(0) = 0", anchor, hull.interpolate(0.0), 0.0, 1e-9, Relation::Eq);
    let tol = agreement_tolerance(&f);
    let bic = biconjugate_1d(&f, &SlopeGrid::Uniform(401)).unwrap();
    let mut gap: f64 = 0.0;
    let mut support = 0usize;
    for (i, &xk) in f.knots().iter().enumerate().step_by(40) {
        gap = gap.max((hull.values()[i] - bic.values()[i]).abs());
        match caratheodory_envelope_at(&f, xk) {
            Ok(c) => {
                gap = gap.max((c.value - hull.values()[i]).abs());
                support = support.max(c.combination.len());
            }
            Err(_) => gap = f64::INFINITY,
        }
    }
    t.push("7b", "hull, biconjugate and LP envelopes agree", anchor, gap / tol, 0.0, 1.0, Relation::Le);
    t.push("7c", "envelope certificates use at most n+1 points", anchor, support as f64, 2.0, 0.0, Relation::Le);

    // 8. two-dimensional counterexample
    let anchor = "envelope of sqrt(x^2 + exp(-y^2)) on growing windows";
    let mut values = Vec::new();
    for r in [4.0, 8.0, 16.0] {
        let g = GridFunction2D::sample(|x, y| (x * x + (-y * y).exp()).sqrt(), (-2.0, 2.0), (-r, r), 81, 401).unwrap();
        values.push(biconjugate_2d(&g, None).map(|b| b.envelope.value(40, 200)).unwrap_or(f64::INFINITY));
    }
    t.push("8a", "conv f(0,0) tends to 0 as the window grows", anchor, values[2], 0.0, 0.15, Relation::Le);
    t.push("8b", "conv f(0,0) decreases with the window", anchor, values[2] - values[0], 0.0, 0.0, Relation::Le);

    // 9. convexification preserves asymptotic smoothness
    let anchor = "convex envelope of a radial function on l4";
    let phi = GridFunction1D::sample(|r| (r * r - 1.0).powi(2), 0.0, 3.0, 3001).unwrap();
    let radii = [0.7, 0.75, 0.8, 0.85, 0.9, 1.2, 1.4, 1.6, 1.8, 2.0];
    let set: Vec<_> = random_unit_sequences(&space, radii.len(), 4, 29)
        .into_iter()
        .zip(radii)
        .map(|(x, r)| x.scaled(r))
        .collect();
    match envelope_preserves_smoothness_demo(&phi, 4.0, &set, &log_grid(0.05, 0.5, 8), 4.0, &light) {
        Ok(d) => {
            t.push("9a", "conv f has the power type of f", anchor, d.fit_conv.exponent, d.fit_f.exponent, 0.4, Relation::Eq);
            t.push("9b", "power-type constants comparable", anchor, d.fit_conv.constant / d.fit_f.constant, 1.0, 3.0, Relation::Le);
        }
        Err(e) => t.fail("9a", "smoothness demonstration", anchor, e),
    }

    // 10. absolute value in the asymptotic modulus of a convex function
    let anchor = "absolute values in the asymptotic smoothness modulus";
    let sp = SequenceSpace::Lp { p: 3.0 };
    let fx = Radial { space: sp, profile: |r: f64| r + r * r + r.exp() };
    let x = random_unit_sequences(&sp, 1, 5, cfg.seed).remove(0).scaled(1.3);
    let mut worst: f64 = 0.0;
    for tv in [0.1, 0.5, 1.0] {
        let a = tail_modulus_fn(&fx, &sp, &x, tv, ModulusMode::RhoBar, false, &light).map(|r| r.value);
        let b = tail_modulus_fn(&fx, &sp, &x, tv, ModulusMode::RhoBar, true, &light).map(|r| r.value);
        worst = match (a, b) {
            (Ok(a), Ok(b)) => worst.max((a - b).abs()),
            _ => f64::INFINITY,
        };
    }
    t.push("10", "convex f: |f(x+h)-f(x)| gives the same modulus", anchor, worst, 0.0, 1e-12, Relation::Eq);

    // 11. p-uniform convexity constants
    let anchor = "p-uniform convexity constants";
    for (id, p, tol) in [("11a", 2.0, 4.0 * f64::EPSILON), ("11b", 4.0, 1e-6)] {
        match puc_constant(&NormDescriptor::lp(p, 3).unwrap(), p, cfg) {
            Ok(PucOutcome::Constant(r)) => t.push(id, &format!("K(l{p}) = 1"), anchor, r.k_hat, 1.0, tol, Relation::Eq),
            Ok(other) => t.fail(id, &format!("K(l{p})"), anchor, format!("{other:?}")),
            Err(e) => t.fail(id, &format!("K(l{p})"), anchor, e),
        }
    }
    let flat = matches!(
        puc_constant(&NormDescriptor::lp(1.0, 3).unwrap(), 2.0, cfg),
        Ok(PucOutcome::NotUniformlyConvex { .. })
    );
    t.push("11c", "l1 is not 2-uniformly convex", anchor, flat as u8 as f64, 1.0, 0.0, Relation::Eq);

    t.rows
}

pub fn run(cfg: &SamplerConfig, scale: f64) -> Outcome {
    let rows = claims(cfg, scale);
    let assertions = rows
        .iter()
        .map(|c| {
            Assertion::new(
                &format!("claim_{}", c.id),
                c.pass,
                format!("{}: computed {:e}, expected {:e} ({:?}, tol {:e})", c.claim, c.computed, c.expected, c.relation, c.tolerance),
            )
        })
        .collect();
    let table = CurveData::Table {
        columns: vec!["computed".into(), "expected".into(), "tolerance".into(), "pass".into()],
        rows: rows
            .iter()
            .map(|c| vec![c.computed, c.expected, c.tolerance, c.pass as u8 as f64])
            .collect(),
    };
    Outcome {
        results: serde_json::json!({ "claims": rows, "tolerance_scale": scale }),
        curves: vec![NamedCurve { name: "claims".into(), data: table }],
        assertions,
    }
}
