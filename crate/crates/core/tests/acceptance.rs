//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use asymconv::asymptotic::{
    envelope_preserves_smoothness_demo, random_unit_sequences, tail_delta_norm, tail_modulus_fn, tail_rho_norm,
    ModulusMode, Radial, SequenceSpace,
};
use asymconv::envelope::{
    agreement_tolerance, biconjugate_1d, biconjugate_2d, caratheodory_envelope_at, lower_convex_hull_1d,
    GridFunction1D, GridFunction2D, SlopeGrid,
};
use asymconv::extremal::{scale_invariance_check, solve_extremal, ExtremalProblem, DEFAULT_DENSITY};
use asymconv::form::{polarize, MonomialPolynomial, SymmetricForm};
use asymconv::moduli::{
    delta_curve, log_grid, power_fit, puc_constant, verify_puc, CurvePoint, ModulusCurve, PucCheck, PucOutcome,
};
use asymconv::normcore::{lp_norm, minkowski_norm, NormDescriptor, PolyNorm};
use asymconv::sampling::{golden_section, BoundDirection, SamplerConfig};
use asymconv::sequence::SparseSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lp_closed_form(p: f64, t: f64) -> f64 {
    (1.0 + t.powf(p)).powf(1.0 / p) - 1.0
}

fn c1_lp_asymptotic_moduli() -> Outcome {
    let cfg = SamplerConfig::default().with_samples(128);
    let mut worst_analytic: f64 = 0.0;
    let mut worst_sampled: f64 = 0.0;
    for p in [1.0, 2.0, 4.0] {
        let space = SequenceSpace::lp(p).unwrap();
        let x = &random_unit_sequences(&space, 1, 5, 17)[0];
        for t in [0.1, 0.5, 1.0] {
            let expected = lp_closed_form(p, t);
            for r in [tail_rho_norm(&space, x, t), tail_delta_norm(&space, x, t)] {
                let v = r.map_err(|e| e.to_string())?.value;
                worst_analytic = worst_analytic.max((v - expected).abs());
            }
            for mode in [ModulusMode::RhoBar, ModulusMode::DeltaBar] {
                let v = tail_modulus_fn(&space, &space, x, t, mode, false, &cfg)
                    .map_err(|e| e.to_string())?
                    .value;
                worst_sampled = worst_sampled.max((v - expected).abs());
            }
        }
    }
    ensure(worst_analytic <= 1e-12, || format!("analytic error {worst_analytic:e}"))?;
    ensure(worst_sampled <= 1e-9, || format!("sampled error {worst_sampled:e}"))?;
    Ok(format!("max error analytic {worst_analytic:.1e}, sampled {worst_sampled:.1e}"))
}

fn c2_c0_flatness() -> Outcome {
    let cfg = SamplerConfig::default().with_samples(128);
    let c0 = SequenceSpace::C0;
    let mut x = random_unit_sequences(&c0, 1, 5, 23).remove(0);
    x.set(2, 1.0);
    for t in [0.25, 0.5, 1.0] {
        let vals = [
            tail_rho_norm(&c0, &x, t).unwrap().value,
            tail_delta_norm(&c0, &x, t).unwrap().value,
            tail_modulus_fn(&c0, &c0, &x, t, ModulusMode::RhoBar, false, &cfg).unwrap().value,
            tail_modulus_fn(&c0, &c0, &x, t, ModulusMode::DeltaBar, false, &cfg).unwrap().value,
        ];
        ensure(vals.iter().all(|v| *v == 0.0), || format!("t={t}: {vals:?}"))?;
    }
    Ok("all values exactly 0".into())
}

/// Power sum `Σ x_i^N` built from monomials and polarized.
fn polarized_power_sum(degree: usize, dim: usize) -> SymmetricForm {
    let mut p = MonomialPolynomial::new(dim);
    for i in 0..dim {
        let mut e = vec![0u32; dim];
        e[i] = degree as u32;
        p = p.with_term(&e, 1.0);
    }
    polarize(&p, degree).unwrap()
}

fn constant_one(degree: usize) -> Outcome {
    let dim = 3;
    let form = polarized_power_sum(degree, dim);
    let cfg = SamplerConfig::default();
    let reference = NormDescriptor::lp(2.0, dim).unwrap();
    let norm = PolyNorm::certify(form.clone(), &reference, &cfg).map_err(|e| e.to_string())?;
    let n = degree as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(degree as u64);
    let mut min_slack = f64::INFINITY;
    let mut worst_identity: f64 = 0.0;
    for _ in 0..100_000 {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let h: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let s: Vec<f64> = x.iter().zip(&h).map(|(a, b)| a + b).collect();
        let d: Vec<f64> = x.iter().zip(&h).map(|(a, b)| a - b).collect();
        let nm = |v: &[f64]| minkowski_norm(&norm, v).unwrap().powi(n);
        let rhs = nm(&s) + nm(&d);
        let lhs = 2.0 * nm(&x) + 2.0 * nm(&h);
        min_slack = min_slack.min(rhs - lhs);
        // even terms of the binomial expansion of P(x+h) + P(x-h)
        let mut expansion = lhs;
        for k in (2..degree).step_by(2) {
            expansion += 2.0 * binom(degree, k) * form.eval_mixed(&x, &h, k);
        }
        worst_identity = worst_identity.max((expansion - rhs).abs() / rhs.max(1e-300));
        // against the direct ℓ_N computation as well
        let direct = lp_norm(&s, degree as f64).powi(n) + lp_norm(&d, degree as f64).powi(n);
        worst_identity = worst_identity.max((direct - rhs).abs() / rhs.max(1e-300));
    }
    ensure(min_slack >= -1e-9, || format!("slack {min_slack:e}"))?;
    ensure(worst_identity <= 1e-9, || format!("identity error {worst_identity:e}"))?;
    let check = verify_puc(&NormDescriptor::poly(norm), degree as f64, 1.0, 20_000, 3).map_err(|e| e.to_string())?;
    ensure(matches!(check, PucCheck::Pass { .. }), || format!("{check:?}"))?;
    Ok(format!("min slack {min_slack:.2e}, identity rel. error {worst_identity:.1e}"))
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn c3_constant_one_quartic() -> Outcome {
    constant_one(4)
}

fn c4_constant_one_sextic() -> Outcome {
    constant_one(6)
}

fn c5_extremal() -> Outcome {
    let q4 = solve_extremal(&ExtremalProblem::new(4, 1.0).unwrap()).map_err(|e| e.to_string())?;
    ensure((q4.q - 2.0).abs() <= 1e-6, || format!("q(4,1) = {}", q4.q))?;
    ensure(q4.coefficients[0] == 0.0, || format!("a2 = {}", q4.coefficients[0]))?;
    // KKT reduction for N = 6: p'' ≥ 0 iff a₂ ≥ 0.3a₄², objective 2 + a₄ + a₂.
    let (a4, q_oracle) = golden_section(|a| 2.0 + a + 0.3 * a * a, -4.0, 0.0, 200);
    let a2 = 0.3 * a4 * a4;
    let q6 = solve_extremal(&ExtremalProblem::new(6, 1.0).unwrap()).map_err(|e| e.to_string())?;
    ensure((q6.q - 7.0 / 6.0).abs() <= 2e-3 && (q6.q - q_oracle).abs() <= 2e-3, || {
        format!("q(6,1) = {}", q6.q)
    })?;
    ensure((q6.k - 12.0 / 7.0).abs() <= 3e-3, || format!("K(6) = {}", q6.k))?;
    let (b2, b4) = (q6.coefficients[0], q6.coefficients[1]);
    ensure((b4 - a4).abs() <= 5e-3 && (b2 - a2).abs() <= 5e-3, || format!("(a4, a2) = ({b4}, {b2})"))?;
    ensure((a4 + 5.0 / 3.0).abs() < 1e-6 && (a2 - 5.0 / 6.0).abs() < 1e-6, || "oracle drifted".into())?;
    let mut dev: f64 = 0.0;
    for n in [4, 6] {
        let r = scale_invariance_check(n, &[0.5, 1.0, 2.0], DEFAULT_DENSITY).map_err(|e| e.to_string())?;
        dev = dev.max(r.max_relative_deviation);
    }
    ensure(dev <= 1e-4, || format!("scale law deviation {dev:e}"))?;
    Ok(format!(
        "q(4,1)={:.9}, q(6,1)={:.6}, K(6)={:.6}, (a4,a2)=({b4:.5},{b2:.5}), scale dev {dev:.1e}",
        q4.q, q6.q, q6.k
    ))
}

fn c6_power_types() -> Outcome {
    let l4 = NormDescriptor::lp(4.0, 2).unwrap();
    let curve = delta_curve(&l4, &log_grid(0.01, 0.1, 8), &SamplerConfig::default()).map_err(|e| e.to_string())?;
    let fit = power_fit(&curve, (0.01, 0.1)).map_err(|e| e.to_string())?;
    ensure((3.8..=4.2).contains(&fit.exponent), || format!("delta exponent {}", fit.exponent))?;
    let space = SequenceSpace::lp(4.0).unwrap();
    let x = &random_unit_sequences(&space, 1, 4, 5)[0];
    let ts = log_grid(0.05, 0.5, 10);
    let pts = ts
        .iter()
        .map(|&t| CurvePoint { t, value: tail_rho_norm(&space, x, t).unwrap().value })
        .collect();
    let tail = ModulusCurve::new("t", pts, BoundDirection::Exact).unwrap();
    let tfit = power_fit(&tail, (0.05, 0.5)).map_err(|e| e.to_string())?;
    ensure((3.9..=4.1).contains(&tfit.exponent), || format!("tail exponent {}", tfit.exponent))?;
    Ok(format!("delta exponent {:.4}, tail exponent {:.4}", fit.exponent, tfit.exponent))
}

fn random_piecewise(rng: &mut ChaCha8Rng) -> GridFunction1D {
    let breaks: Vec<f64> = {
        let mut b: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        b.sort_by(f64::total_cmp);
        b
    };
    let levels: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let curv: f64 = rng.gen_range(0.0..1.0);
    GridFunction1D::sample(
        |x| {
            let piece = breaks.partition_point(|&b| b < x);
            levels[piece] + curv * x * x + (3.0 * x).sin() * 0.3
        },
        -2.0,
        2.0,
        201,
    )
    .unwrap()
}

fn c7_envelope_correctness() -> Outcome {
    let f = GridFunction1D::sample(|x| (x * x - 1.0).powi(2), -2.0, 2.0, 801).unwrap();
    let hull = lower_convex_hull_1d(&f).unwrap();
    let at0 = hull.values()[400];
    ensure(at0.abs() <= 1e-9, || format!("conv at 0 = {at0}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_ratio: f64 = 0.0;
    let mut max_support = 0;
    for _ in 0..20 {
        let g = random_piecewise(&mut rng);
        let tol = agreement_tolerance(&g);
        let h = lower_convex_hull_1d(&g).unwrap();
        let b = biconjugate_1d(&g, &SlopeGrid::Uniform(401)).unwrap();
        for (i, &x) in g.knots().iter().enumerate().step_by(8) {
            let cert = caratheodory_envelope_at(&g, x).map_err(|e| e.to_string())?;
            max_support = max_support.max(cert.combination.len());
            let (vh, vb, vc) = (h.values()[i], b.values()[i], cert.value);
            let gap = (vh - vb).abs().max((vh - vc).abs()).max((vb - vc).abs());
            worst_ratio = worst_ratio.max(gap / tol);
        }
    }
    ensure(worst_ratio <= 1.0, || format!("cross-method gap {worst_ratio:.3} x tolerance"))?;
    ensure(max_support <= 2, || format!("support {max_support} > n+1"))?;
    Ok(format!("conv(0)={at0:.1e}, worst gap {worst_ratio:.3} x tolerance, max support {max_support}"))
}

fn c8_counterexample() -> Outcome {
    let mut values = Vec::new();
    let mut slopes = Vec::new();
    for r in [4.0, 8.0, 16.0] {
        let f = GridFunction2D::sample(
            |x, y| (x * x + (-y * y).exp()).sqrt(),
            (-2.0, 2.0),
            (-r, r),
            81,
            401,
        )
        .unwrap();
        let env = biconjugate_2d(&f, None).map_err(|e| e.to_string())?.envelope;
        let v0 = env.value(40, 200);
        let dx = env.xs()[41] - env.xs()[40];
        let right = (env.value(41, 200) - v0) / dx;
        let left = (env.value(39, 200) - v0) / dx;
        values.push(v0);
        slopes.push(right.min(left));
    }
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-12) && values[1] < values[0];
    ensure(monotone, || format!("values {values:?}"))?;
    ensure(values[2] <= 0.15, || format!("value at R=16: {}", values[2]))?;
    ensure(slopes.iter().all(|s| *s >= 0.9), || format!("one-sided slopes {slopes:?}"))?;
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.2e}")).collect();
    let min_slope = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(format!("conv f(0,0) for R=4,8,16: [{}], min |slope| {min_slope:.4}", shown.join(", ")))
}

fn c9_convexification_smoothness() -> Outcome {
    let space = SequenceSpace::lp(4.0).unwrap();
    let phi = GridFunction1D::sample(|r| (r * r - 1.0).powi(2), 0.0, 3.0, 3001).unwrap();
    let radii = [0.7, 0.75, 0.8, 0.85, 0.9, 1.2, 1.4, 1.6, 1.8, 2.0];
    let set: Vec<SparseSequence> = random_unit_sequences(&space, radii.len(), 4, 29)
        .into_iter()
        .zip(radii)
        .map(|(x, r)| x.scaled(r))
        .collect();
    let cfg = SamplerConfig::default().with_samples(128);
    let demo = envelope_preserves_smoothness_demo(&phi, 4.0, &set, &log_grid(0.05, 0.5, 8), 4.0, &cfg)
        .map_err(|e| e.to_string())?;
    let (pf, pc) = (demo.fit_f.exponent, demo.fit_conv.exponent);
    ensure((3.6..=4.4).contains(&pf) && (3.6..=4.4).contains(&pc), || format!("exponents {pf}, {pc}"))?;
    let ratio = demo.fit_conv.constant / demo.fit_f.constant;
    ensure((0.25..=4.0).contains(&ratio) && demo.holds, || format!("constant ratio {ratio}"))?;
    Ok(format!("exponents f {pf:.3}, conv f {pc:.3}; constant ratio {ratio:.3}"))
}

fn c10_absolute_value_modulus() -> Outcome {
    let cfg = SamplerConfig::default().with_samples(64);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let space = SequenceSpace::lp(rng.gen_range(1.0..6.0)).unwrap();
        let (a, b, c, d): (f64, f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen(), rng.gen());
        let f = Radial {
            space,
            profile: move |r: f64| a * r + b * r * r + c * r.powi(4) + d * r.exp(),
        };
        let x = random_unit_sequences(&space, 1, 5, k).remove(0).scaled(rng.gen_range(0.2..2.0));
        for t in [0.1, 0.5, 1.0] {
            let plain = tail_modulus_fn(&f, &space, &x, t, ModulusMode::RhoBar, false, &cfg).unwrap().value;
            let abs = tail_modulus_fn(&f, &space, &x, t, ModulusMode::RhoBar, true, &cfg).unwrap().value;
            worst = worst.max((plain - abs).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("difference {worst:e}"))?;
    Ok(format!("max difference {worst:.1e}"))
}

fn c11_puc_constants() -> Outcome {
    let cfg = SamplerConfig::default();
    let k2 = match puc_constant(&NormDescriptor::lp(2.0, 3).unwrap(), 2.0, &cfg).unwrap() {
        PucOutcome::Constant(r) => r.k_hat,
        other => return Err(format!("l2: {other:?}")),
    };
    ensure((k2 - 1.0).abs() <= 4.0 * f64::EPSILON, || format!("K(l2) = {k2}"))?;
    let k4 = match puc_constant(&NormDescriptor::lp(4.0, 3).unwrap(), 4.0, &cfg).unwrap() {
        PucOutcome::Constant(r) => r.k_hat,
        other => return Err(format!("l4: {other:?}")),
    };
    ensure((k4 - 1.0).abs() <= 1e-6, || format!("K(l4) = {k4}"))?;
    match puc_constant(&NormDescriptor::lp(1.0, 3).unwrap(), 2.0, &cfg).unwrap() {
        PucOutcome::NotUniformlyConvex { x, y, .. } => {
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let n = |v: &[f64]| lp_norm(v, 1.0);
            let den = n(&s).powi(2) + n(&d).powi(2) - 2.0 * n(&x).powi(2);
            ensure(n(&y) > 0.0 && den.abs() <= 1e-12, || format!("witness denominator {den}"))?;
        }
        other => return Err(format!("l1 reported {other:?}")),
    }
    Ok(format!("K(l2)={k2}, K(l4)={k4:.9}, l1 flat face verified"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 11] = [
        ("1 lp asymptotic moduli", c1_lp_asymptotic_moduli, Duration::from_secs(1)),
        ("2 c0 flatness", c2_c0_flatness, Duration::from_secs(1)),
        ("3 constant-1 inequality N=4", c3_constant_one_quartic, Duration::from_secs(5)),
        ("4 constant-1 inequality N=6", c4_constant_one_sextic, Duration::from_secs(5)),
        ("5 extremal problem", c5_extremal, Duration::from_secs(10)),
        ("6 power types", c6_power_types, Duration::from_secs(30)),
        ("7 envelope correctness", c7_envelope_correctness, Duration::from_secs(30)),
        ("8 counterexample behavior", c8_counterexample, Duration::from_secs(60)),
        ("9 convexification preserves smoothness", c9_convexification_smoothness, Duration::from_secs(30)),
        ("10 absolute-value modulus", c10_absolute_value_modulus, Duration::from_secs(10)),
        ("11 p-uniform convexity constants", c11_puc_constants, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; runtime {elapsed:.2?} exceeds {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} ({elapsed:.2?})"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail} ({elapsed:.2?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
