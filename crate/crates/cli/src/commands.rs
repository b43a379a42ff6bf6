use crate::config::*;
use crate::record::{Assertion, CurveData, NamedCurve, Outcome};
use crate::verify;
use anyhow::Context;
use asymconv::asymptotic::{
    envelope_preserves_smoothness_demo, random_unit_sequences, tail_delta_norm, tail_modulus_fn, tail_rho_norm,
    ModulusMode, SequenceSpace,
};
use asymconv::envelope::{
    agreement_tolerance, biconjugate_1d, biconjugate_2d, caratheodory_envelope_at, lower_convex_hull_1d,
    GridFunction1D, GridFunction2D, SlopeGrid,
};
use asymconv::expr::Expr;
use asymconv::extremal::{gap_witness, membership_check, scale_invariance_check, solve_extremal, ExtremalProblem};
use asymconv::form::SymmetricForm;
use asymconv::moduli::{
    delta_fn, delta_norm, isotonic_nondecreasing, power_fit, puc_constant, rho_norm, verify_puc, CurvePoint,
    FunctionDescriptor, ModulusCurve, PucCheck, PucOutcome,
};
use asymconv::normcore::{check_convexity, is_separating, NormDescriptor, PolyNorm};
use asymconv::sampling::{BoundDirection, SamplerConfig};
use serde_json::json;

pub fn run(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let cfg = config.sampler();
    let scale = config.tolerance_scale();
    match &config.command {
        CommandConfig::Envelope(c) => envelope(c, scale),
        CommandConfig::Moduli(c) => moduli(c, &cfg, scale),
        CommandConfig::Asymptotic(c) => asymptotic(c, &cfg, scale),
        CommandConfig::Extremal(c) => extremal(c, scale),
        CommandConfig::Polynorm(c) => polynorm(c, &cfg, scale),
        CommandConfig::Verify(c) => Ok(verify::run(&cfg, c.tolerance_scale)),
    }
}

fn envelope(c: &EnvelopeConfig, scale: f64) -> anyhow::Result<Outcome> {
    let expr = Expr::parse(&c.function).or_else(|e| usage(e.to_string()))?;
    let mut out = Outcome::default();
    match c.y_window {
        None => {
            let f = GridFunction1D::sample(|x| expr.eval(x, 0.0), c.window[0], c.window[1], c.grid)
                .or_else(|e| usage(format!("function: {e}")))?;
            let hull = lower_convex_hull_1d(&f)?;
            let slopes = c.slopes.map_or(SlopeGrid::HullEdges, SlopeGrid::Uniform);
            let bic = biconjugate_1d(&f, &slopes)?;
            let tol = agreement_tolerance(&f) * scale;
            let below = hull.values().iter().zip(f.values()).all(|(e, v)| e <= v);
            let gap = hull
                .values()
                .iter()
                .zip(bic.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let mut points = Vec::new();
            let mut worst_cert: f64 = 0.0;
            let mut max_support = 0;
            for p in &c.at {
                let cert = caratheodory_envelope_at(&f, p[0]).with_context(|| format!("certificate at {}", p[0]))?;
                let h = hull.interpolate(p[0]);
                worst_cert = worst_cert.max((cert.value - h).abs());
                max_support = max_support.max(cert.combination.len());
                points.push(json!({
                    "x": p[0],
                    "f": expr.eval(p[0], 0.0),
                    "hull": h,
                    "biconjugate": bic.interpolate(p[0]),
                    "caratheodory": cert,
                }));
            }
            out.assertions = vec![
                Assertion::new("envelope_below_f", below, "lower hull <= f at every knot"),
                Assertion::new("hull_matches_biconjugate", gap <= tol, format!("max gap {gap:e}, tolerance {tol:e}")),
                Assertion::new(
                    "caratheodory_matches_hull",
                    worst_cert <= tol,
                    format!("max gap {worst_cert:e}, tolerance {tol:e}"),
                ),
                Assertion::new("support_at_most_2", max_support <= 2, format!("max support {max_support}")),
            ];
            out.results = json!({
                "dimension": 1,
                "points": points,
                "hull_biconjugate_gap": gap,
                "tolerance": tol,
                "slope_grid": slopes,
            });
            out.curves = vec![
                NamedCurve { name: "function".into(), data: CurveData::Grid1d(f) },
                NamedCurve { name: "envelope".into(), data: CurveData::Grid1d(hull) },
            ];
        }
        Some(yw) => {
            let f = GridFunction2D::sample(|x, y| expr.eval(x, y), (c.window[0], c.window[1]), (yw[0], yw[1]), c.grid, c.y_grid)
                .or_else(|e| usage(format!("function: {e}")))?;
            let bic = biconjugate_2d(&f, None)?;
            let env = &bic.envelope;
            let below = env.values().iter().zip(f.values()).all(|(e, v)| e <= v);
            let mut points = Vec::new();
            let mut worst_order: f64 = 0.0;
            let mut max_support = 0;
            for p in &c.at {
                let cert = f.caratheodory_at(p[0], p[1]).with_context(|| format!("certificate at {p:?}"))?;
                let b = env.interpolate(p[0], p[1]);
                max_support = max_support.max(cert.combination.len());
                // the LP is the exact envelope of the samples; the biconjugate
                // over finitely many slopes can only lie above it at knots
                worst_order = worst_order.max(cert.value - b);
                points.push(json!({ "x": p[0], "y": p[1], "f": expr.eval(p[0], p[1]), "biconjugate": b, "caratheodory": cert }));
            }
            out.assertions = vec![
                Assertion::new("envelope_below_f", below, "biconjugate <= f at every knot"),
                Assertion::new(
                    "caratheodory_not_above_biconjugate",
                    worst_order <= 1e-9 * scale.max(1e-300),
                    format!("max excess {worst_order:e}"),
                ),
                Assertion::new("support_at_most_3", max_support <= 3, format!("max support {max_support}")),
            ];
            out.results = json!({
                "dimension": 2,
                "points": points,
                "slopes": [bic.slopes_x.len(), bic.slopes_y.len()],
                "window": bic.window,
                "bound": bic.bound,
            });
            out.curves = vec![NamedCurve { name: "envelope_2d".into(), data: CurveData::Grid2d(bic.envelope) }];
        }
    }
    Ok(out)
}

/// Parses `lp:<p>`, `sup`, `poly:<N>` or `form:<path>`.
pub fn parse_norm(spec: &str, dim: usize, cfg: &SamplerConfig) -> anyhow::Result<NormDescriptor> {
    if spec == "sup" {
        return Ok(NormDescriptor::sup(dim));
    }
    if let Some(p) = spec.strip_prefix("lp:") {
        let p: f64 = p.parse().or_else(|_| usage(format!("bad exponent in '{spec}'")))?;
        return NormDescriptor::lp(p, dim).or_else(|e| usage(e.to_string()));
    }
    let form = if let Some(n) = spec.strip_prefix("poly:") {
        let n: usize = n.parse().or_else(|_| usage(format!("bad degree in '{spec}'")))?;
        if n < 2 || n % 2 != 0 {
            return usage("polynomial norms need an even degree");
        }
        SymmetricForm::power_sum(n, dim)
    } else if let Some(path) = spec.strip_prefix("form:") {
        read_form(path)?
    } else {
        return usage(format!("unknown norm '{spec}' (use lp:<p>, sup, poly:<N> or form:<path>)"));
    };
    let reference = NormDescriptor::lp(2.0, form.dimension())?;
    let norm = PolyNorm::certify(form, &reference, cfg).or_else(|e| usage(format!("polynomial norm rejected: {e}")))?;
    Ok(NormDescriptor::poly(norm))
}

fn read_form(path: &str) -> anyhow::Result<SymmetricForm> {
    let bytes = std::fs::read(path).or_else(|e| usage(format!("cannot read form '{path}': {e}")))?;
    serde_json::from_slice(&bytes).or_else(|e| usage(format!("invalid form JSON '{path}': {e}")))
}

fn norm_tag(spec: &str) -> String {
    if spec == "sup" {
        return "linf".into();
    }
    if let Some(p) = spec.strip_prefix("lp:") {
        return format!("l{}", p.replace('.', "p"));
    }
    if let Some(n) = spec.strip_prefix("poly:") {
        return format!("poly{n}");
    }
    "form".into()
}

fn natural_power(norm: &NormDescriptor) -> f64 {
    match &norm.kind {
        asymconv::normcore::NormKind::Lp { p } => *p,
        asymconv::normcore::NormKind::Poly(pn) => pn.degree() as f64,
        _ => 2.0,
    }
}

fn fit_if_possible(curve: &ModulusCurve) -> Option<asymconv::moduli::PowerFit> {
    let ts = curve.ts();
    if ts.len() < 4 {
        return None;
    }
    power_fit(curve, (ts[0], ts[ts.len() - 1])).ok()
}

fn moduli(c: &ModuliConfig, cfg: &SamplerConfig, scale: f64) -> anyhow::Result<Outcome> {
    let norm = parse_norm(&c.norm, c.dim, cfg)?;
    let p = c.p.unwrap_or_else(|| natural_power(&norm));
    let tag = format!("{}_d{}", norm_tag(&c.norm), c.dim);
    let mut out = Outcome::default();
    match c.quantity {
        Quantity::Delta | Quantity::Rho | Quantity::DeltaFn => {
            if c.parameters.iter().any(|v| !(*v > 0.0 && *v <= 2.0)) {
                return usage("parameters must lie in (0, 2]");
            }
            let mut pts = Vec::new();
            let mut witnesses = Vec::new();
            let mut in_range = true;
            for &t in &c.parameters {
                let (value, witness) = match c.quantity {
                    Quantity::Delta => {
                        let r = delta_norm(&norm, t, cfg)?;
                        in_range &= r.value >= -1e-12 && r.value <= 1.0;
                        (r.value, json!(r))
                    }
                    Quantity::Rho => {
                        let r = rho_norm(&norm, t, c.variant, cfg)?;
                        in_range &= r.value >= -1e-12 && r.value <= t * (1.0 + 1e-12);
                        (r.value, json!(r))
                    }
                    _ => {
                        let f = FunctionDescriptor::NormPower { norm: norm.clone(), p };
                        let r = delta_fn(&f, &norm, t, cfg)?;
                        in_range &= r.estimate.value >= -1e-12;
                        (r.estimate.value, json!(r))
                    }
                };
                pts.push(CurvePoint { t, value });
                witnesses.push(witness);
            }
            let (name, parameter, bound) = match c.quantity {
                Quantity::Delta => ("delta", "epsilon", BoundDirection::Upper),
                Quantity::Rho => ("rho", "tau", BoundDirection::Lower),
                _ => ("delta_fn", "t", BoundDirection::Upper),
            };
            let curve = ModulusCurve::new(parameter, pts, bound)?
                .with_meta("norm", c.norm.clone())
                .with_meta("dimension", c.dim)
                .with_meta("seed", cfg.seed)
                .with_meta("samples", cfg.samples)
                .with_meta("refine_iters", cfg.refine_iters);
            let vals = curve.values();
            let iso = isotonic_nondecreasing(&vals);
            let drift = vals.iter().zip(&iso).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let vmax = vals.iter().cloned().fold(0.0, f64::max);
            let drift_tol = 1e-6 * vmax.max(1e-12) * scale;
            out.assertions = vec![
                Assertion::new("values_in_range", in_range, "each value within its a-priori bounds"),
                Assertion::new(
                    "nondecreasing",
                    drift <= drift_tol,
                    format!("distance to isotonic fit {drift:e}, tolerance {drift_tol:e}"),
                ),
            ];
            let fit = fit_if_possible(&curve);
            out.results = json!({ "quantity": name, "norm": c.norm, "fit": fit, "estimates": witnesses });
            out.curves = vec![NamedCurve { name: format!("{name}_{tag}"), data: CurveData::Modulus(curve) }];
        }
        Quantity::Puc => {
            match puc_constant(&norm, p, cfg).or_else(|e| usage(e.to_string()))? {
                PucOutcome::Constant(r) => {
                    let check = verify_puc(&norm, p, r.k_hat, cfg.samples.max(1000), cfg.seed)?;
                    out.assertions = vec![Assertion::new(
                        "inequality_holds_at_estimate",
                        matches!(check, PucCheck::Pass { .. }),
                        format!("{check:?}"),
                    )];
                    out.results = json!({ "p": p, "outcome": "constant", "estimate": r, "check": check });
                }
                PucOutcome::NotUniformlyConvex { x, y, denominator } => {
                    let ok = denominator.abs() <= 1e-12 * (1.0 + norm.value(&x)).powf(p);
                    out.assertions = vec![Assertion::new(
                        "flat_witness_verified",
                        ok,
                        format!("denominator {denominator:e}"),
                    )];
                    out.results = json!({
                        "p": p,
                        "outcome": "not_uniformly_convex",
                        "x": x, "y": y, "denominator": denominator,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn asymptotic(c: &AsymptoticConfig, cfg: &SamplerConfig, scale: f64) -> anyhow::Result<Outcome> {
    let mut out = Outcome::default();
    let tag = match c.space {
        SequenceSpace::Lp { p } => format!("lp{}", p.to_string().replace('.', "p")),
        SequenceSpace::C0 => "c0".into(),
    };
    if let Some(d) = &c.demo {
        let SequenceSpace::Lp { p } = c.space else {
            return usage("the demonstration needs an lp space");
        };
        let phi_expr = Expr::parse(&d.phi).or_else(|e| usage(e.to_string()))?;
        let rmax = d.radii.iter().cloned().fold(1.0, f64::max) * 1.5;
        let phi = GridFunction1D::sample(|r| phi_expr.eval(r, 0.0), 0.0, rmax, 3001)?;
        let set: Vec<_> = random_unit_sequences(&c.space, d.radii.len(), c.support, cfg.seed)
            .into_iter()
            .zip(&d.radii)
            .map(|(x, r)| x.scaled(*r))
            .collect();
        if c.t.len() < 4 || c.t.iter().any(|t| *t > 1.0) {
            return usage("the demonstration needs at least 4 values of t in (0, 1]");
        }
        let demo = envelope_preserves_smoothness_demo(&phi, p, &set, &c.t, d.factor, cfg)?;
        out.assertions = vec![Assertion::new(
            "conv_f_inherits_smoothness",
            demo.holds,
            format!(
                "exponents {:.3} / {:.3}, constants {:.4e} / {:.4e}, factor {}",
                demo.fit_f.exponent, demo.fit_conv.exponent, demo.fit_f.constant, demo.fit_conv.constant, d.factor
            ),
        )];
        out.results = json!({
            "fit_f": demo.fit_f,
            "fit_conv": demo.fit_conv,
            "bound_constant": demo.bound_constant,
            "factor": demo.factor,
            "holds": demo.holds,
            "radii": d.radii,
        });
        out.curves = vec![
            NamedCurve { name: format!("rho_bar_f_{tag}"), data: CurveData::Modulus(demo.curve_f) },
            NamedCurve { name: format!("rho_bar_conv_f_{tag}"), data: CurveData::Modulus(demo.curve_conv) },
            NamedCurve { name: "psi".into(), data: CurveData::Grid1d(demo.psi) },
        ];
        return Ok(out);
    }
    let x = random_unit_sequences(&c.space, 1, c.support, cfg.seed).remove(0);
    let mut rows = Vec::new();
    let mut pts = Vec::new();
    let mut nonneg = true;
    let mut worst: f64 = 0.0;
    for &t in &c.t {
        let analytic = match c.path {
            EvalPath::Sampled => None,
            _ => Some(match c.mode {
                ModulusMode::RhoBar => tail_rho_norm(&c.space, &x, t)?,
                ModulusMode::DeltaBar => tail_delta_norm(&c.space, &x, t)?,
            }),
        };
        let sampled = match c.path {
            EvalPath::Analytic => None,
            _ => Some(tail_modulus_fn(&c.space, &c.space, &x, t, c.mode, false, cfg)?),
        };
        let value = analytic.as_ref().or(sampled.as_ref()).map(|r| r.value).unwrap();
        nonneg &= value >= 0.0 && sampled.as_ref().map_or(true, |s| s.value >= -1e-15);
        if let (Some(a), Some(s)) = (&analytic, &sampled) {
            worst = worst.max((a.value - s.value).abs());
        }
        rows.push(json!({
            "t": t,
            "value": value,
            "analytic": analytic.as_ref().map(|r| r.value),
            "sampled": sampled.as_ref().map(|r| r.value),
            "subspace_index": sampled.as_ref().map_or(x.max_support(), |r| r.subspace_index),
        }));
        if t <= 2.0 {
            pts.push(CurvePoint { t, value });
        }
    }
    let tol = 1e-9 * scale;
    out.assertions = vec![Assertion::new("nonnegative", nonneg, "every tail modulus value >= 0")];
    if c.path == EvalPath::Both {
        out.assertions.push(Assertion::new(
            "sampled_matches_analytic",
            worst <= tol,
            format!("max difference {worst:e}, tolerance {tol:e}"),
        ));
    }
    let mode = match c.mode {
        ModulusMode::RhoBar => "rho_bar",
        ModulusMode::DeltaBar => "delta_bar",
    };
    let bound = if c.path == EvalPath::Sampled {
        match c.mode {
            ModulusMode::RhoBar => BoundDirection::Upper,
            ModulusMode::DeltaBar => BoundDirection::Lower,
        }
    } else {
        BoundDirection::Exact
    };
    let mut sorted = pts.clone();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
    sorted.dedup_by(|a, b| a.t == b.t);
    let curve = ModulusCurve::new("t", sorted, bound)?
        .with_meta("model", "tail")
        .with_meta("space", c.space.label())
        .with_meta("mode", mode)
        .with_meta("x", serde_json::to_value(&x)?)
        .with_meta("seed", cfg.seed)
        .with_meta("samples", cfg.samples);
    let fit = fit_if_possible(&curve);
    out.results = json!({ "space": c.space.label(), "mode": mode, "model": "tail", "x": x, "values": rows, "fit": fit });
    out.curves = vec![NamedCurve { name: format!("{mode}_{tag}"), data: CurveData::Modulus(curve) }];
    Ok(out)
}

fn extremal(c: &ExtremalConfig, scale: f64) -> anyhow::Result<Outcome> {
    let mut out = Outcome::default();
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let n = c.degree as i32;
    for &t0 in &c.t0 {
        let problem = ExtremalProblem::new(c.degree, t0).or_else(|e| usage(e.to_string()))?.with_density(c.density);
        let r = solve_extremal(&problem)?;
        let member = membership_check(&r.polynomial());
        out.assertions.push(Assertion::new(
            &format!("q_positive_t0_{t0}"),
            r.q > 0.0,
            format!("q = {}", r.q),
        ));
        let feasible = r.diagnostics.min_value_on_grid >= -1e-9 && r.diagnostics.min_convexity_on_grid >= -1e-9;
        out.assertions.push(Assertion::new(
            &format!("grid_feasible_t0_{t0}"),
            feasible,
            format!(
                "min p {:e}, min p'' {:e}",
                r.diagnostics.min_value_on_grid, r.diagnostics.min_convexity_on_grid
            ),
        ));
        out.assertions.push(Assertion::new(
            &format!("optimum_in_class_t0_{t0}"),
            member.is_member(),
            format!("{member:?}"),
        ));
        rows.push(vec![t0, r.q, r.q / t0.powi(n), r.k]);
        results.push(json!({ "result": r, "membership": member }));
    }
    let mut summary = json!({ "N": c.degree, "solutions": results });
    if c.t0.len() > 1 {
        let report = scale_invariance_check(c.degree, &c.t0, c.density)?;
        let tol = 1e-4 * scale;
        out.assertions.push(Assertion::new(
            "scale_law",
            report.max_relative_deviation <= tol,
            format!("max relative deviation {:e}, tolerance {tol:e}", report.max_relative_deviation),
        ));
        summary["scale_invariance"] = serde_json::to_value(&report)?;
    }
    out.results = summary;
    out.curves = vec![NamedCurve {
        name: "extremal_sweep".into(),
        data: CurveData::Table {
            columns: vec!["t0".into(), "q".into(), format!("q_over_t0_{}", c.degree), "K".into()],
            rows,
        },
    }];
    Ok(out)
}

fn polynorm(c: &PolynormConfig, cfg: &SamplerConfig, scale: f64) -> anyhow::Result<Outcome> {
    let form = if let Some(n) = c.form.strip_prefix("power-sum:") {
        let n: usize = n.parse().or_else(|_| usage(format!("bad degree in '{}'", c.form)))?;
        if n < 2 || n % 2 != 0 || c.dim < 1 {
            return usage("power-sum forms need an even degree and dimension >= 1");
        }
        SymmetricForm::power_sum(n, c.dim)
    } else if let Some(path) = c.form.strip_prefix("file:") {
        read_form(path)?
    } else {
        return usage(format!("unknown form '{}' (use power-sum:<N> or file:<path>)", c.form));
    };
    let degree = form.degree();
    let reference = NormDescriptor::lp(2.0, form.dimension())?;
    let separation = is_separating(&form, &reference, cfg)?;
    let convexity = check_convexity(&form, cfg);
    let mut out = Outcome::default();
    let norm = match PolyNorm::certify(form.clone(), &reference, cfg) {
        Ok(n) => n,
        Err(e) => {
            out.assertions = vec![Assertion::new("certified", false, e.to_string())];
            out.results = json!({ "separation": separation, "convexity": convexity });
            return Ok(out);
        }
    };
    let desc = NormDescriptor::poly(norm.clone());
    let p = degree as f64;
    let puc = puc_constant(&desc, p, cfg)?;
    let check = verify_puc(&desc, p, c.k, cfg.samples.max(1000), cfg.seed)?;
    let extremal = if degree >= 4 {
        Some(solve_extremal(&ExtremalProblem::new(degree, c.t0).or_else(|e| usage(e.to_string()))?)?)
    } else {
        None
    };
    let gap = match &extremal {
        Some(r) => Some(gap_witness(&norm, c.t0, r.q, cfg)?),
        None => None,
    };
    out.assertions = vec![
        Assertion::new("certified", true, format!("alpha = {:e}", norm.alpha)),
        Assertion::new(
            &format!("p_uniform_convexity_k_{}", c.k),
            matches!(check, PucCheck::Pass { .. }),
            format!("{check:?}"),
        ),
    ];
    if let Some(g) = &gap {
        let tol = 1e-9 * g.q.max(1.0) * scale.max(1e-300);
        out.assertions.push(Assertion::new(
            "gap_at_least_q",
            g.min_gap >= g.q - tol,
            format!("min gap {} vs q {}", g.min_gap, g.q),
        ));
    }
    out.results = json!({
        "degree": degree,
        "dimension": form.dimension(),
        "separation": separation,
        "convexity": convexity,
        "puc": puc,
        "puc_check": check,
        "extremal": extremal.map(|r| json!({ "q": r.q, "K": r.k, "coefficients": r.coefficients })),
        "gap": gap,
    });
    Ok(out)
}
