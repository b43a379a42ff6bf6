//! Asymptotic moduli on the sequence-space model.
//!
//! Finite-codimensional subspaces are replaced by the tail family
//! `H_m = span{e_k : k > m}`. For `ℓ_p` and `c₀` this family attains the
//! exact values; for other functions the `ρ̄` results are upper bounds and
//! the `δ̄` results lower bounds of the true moduli.

use crate::envelope::{radial_envelope, GridFunction1D};
use crate::error::{Error, Result};
use crate::moduli::{power_fit, CurvePoint, ModulusCurve, PowerFit};
use crate::sampling::{BoundDirection, Halton, SamplerConfig};
use crate::sequence::SparseSequence;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Width of the sampled tail window `{m+1, …, m+TAIL_WIDTH}`.
pub const TAIL_WIDTH: usize = 32;
/// Tail indices tried beyond the support of `x`.
pub const EXTRA_TAILS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpace {
    Lp { p: f64 },
    C0,
}

impl SequenceSpace {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("lp space needs finite p >= 1, got {p}")));
        }
        Ok(SequenceSpace::Lp { p })
    }

    pub fn norm(&self, x: &SparseSequence) -> f64 {
        match self {
            SequenceSpace::Lp { p } => x.lp_norm(*p),
            SequenceSpace::C0 => x.sup_norm(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SequenceSpace::Lp { p } => format!("lp:{p}"),
            SequenceSpace::C0 => "c0".into(),
        }
    }

    /// Closed-form `ρ̄(t) = δ̄(t)`: `(1+t^p)^{1/p} − 1` for `ℓ_p`,
    /// `max(1, t) − 1` for `c₀`.
    pub fn closed_form(&self, t: f64) -> f64 {
        match self {
            SequenceSpace::Lp { p } if *p == 1.0 => t,
            SequenceSpace::Lp { p } => (t.powf(*p).ln_1p() / p).exp_m1(),
            SequenceSpace::C0 => t.max(1.0) - 1.0,
        }
    }
}

impl std::str::FromStr for SequenceSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c0" => Ok(SequenceSpace::C0),
            _ => {
                let p = s
                    .strip_prefix("lp:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown space '{s}' (use lp:<p> or c0)")))?;
                SequenceSpace::lp(p)
            }
        }
    }
}

/// `span{e_k : k > m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailSubspace {
    pub m: usize,
}

impl TailSubspace {
    pub fn contains(&self, h: &SparseSequence) -> bool {
        h.iter().all(|(i, _)| i > self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusMode {
    RhoBar,
    DeltaBar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum EvaluationPoint {
    Point(SparseSequence),
    Uniform(Vec<SparseSequence>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticModulusResult {
    pub t: f64,
    pub value: f64,
    pub mode: ModulusMode,
    pub at: EvaluationPoint,
    pub subspace_index: usize,
    pub analytic: bool,
    pub bound: BoundDirection,
    pub model: String,
}

/// A function on finitely supported sequences.
pub trait SequenceFunction {
    fn eval(&self, x: &SparseSequence) -> f64;
}

impl<F: Fn(&SparseSequence) -> f64> SequenceFunction for F {
    fn eval(&self, x: &SparseSequence) -> f64 {
        self(x)
    }
}

impl SequenceFunction for SequenceSpace {
    fn eval(&self, x: &SparseSequence) -> f64 {
        self.norm(x)
    }
}

/// `φ(‖x‖)` for a profile `φ`.
pub struct Radial<P> {
    pub space: SequenceSpace,
    pub profile: P,
}

impl<P: Fn(f64) -> f64> SequenceFunction for Radial<P> {
    fn eval(&self, x: &SparseSequence) -> f64 {
        (self.profile)(self.space.norm(x))
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    Ok(())
}

fn check_unit(space: &SequenceSpace, x: &SparseSequence) -> Result<()> {
    let n = space.norm(x);
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("x must be a unit vector, has norm {n}")));
    }
    Ok(())
}

fn analytic(space: &SequenceSpace, x: &SparseSequence, t: f64, mode: ModulusMode) -> Result<AsymptoticModulusResult> {
    check_t(t)?;
    check_unit(space, x)?;
    Ok(AsymptoticModulusResult {
        t,
        value: space.closed_form(t),
        mode,
        at: EvaluationPoint::Point(x.clone()),
        subspace_index: x.max_support(),
        analytic: true,
        bound: BoundDirection::Exact,
        model: "tail".into(),
    })
}

/// `δ̄(t;x) = sup_m inf{‖x+h‖ − 1 : h ∈ H_m, ‖h‖ ≥ t}`; exact on the model.
pub fn tail_delta_norm(space: &SequenceSpace, x: &SparseSequence, t: f64) -> Result<AsymptoticModulusResult> {
    analytic(space, x, t, ModulusMode::DeltaBar)
}

/// `ρ̄(t;x) = inf_m sup{‖x+h‖ − 1 : h ∈ H_m, ‖h‖ ≤ t}`; exact on the model.
pub fn tail_rho_norm(space: &SequenceSpace, x: &SparseSequence, t: f64) -> Result<AsymptoticModulusResult> {
    analytic(space, x, t, ModulusMode::RhoBar)
}

/// Raw tail directions relative to offset 0: the first coordinate vector
/// followed by low-discrepancy points of `[−1,1]^TAIL_WIDTH`.
fn tail_directions(samples: usize, seed: u64) -> Vec<Vec<(usize, f64)>> {
    let mut out = vec![vec![(1, 1.0)]];
    let mut halton = Halton::new(TAIL_WIDTH, seed);
    for _ in 0..samples {
        let u = halton.next_point();
        out.push(u.iter().enumerate().map(|(k, v)| (k + 1, 2.0 * v - 1.0)).collect());
    }
    out
}

fn scales(mode: ModulusMode) -> [f64; 4] {
    match mode {
        ModulusMode::RhoBar => [1.0, 0.75, 0.5, 0.25],
        ModulusMode::DeltaBar => [1.0, 1.25, 1.5, 2.0],
    }
}

/// Sampled `ρ̄_f(t;x)` or `δ̄_f(t;x)` over the tail family. Each direction
/// `h` is used with both signs, scaled to `‖h‖ = s·t` (`s ≤ 1` for `ρ̄`,
/// `s ≥ 1` for `δ̄`). With `use_absolute` the integrand is `|f(x+h) − f(x)|`.
pub fn tail_modulus_fn<F: SequenceFunction + ?Sized>(
    f: &F,
    space: &SequenceSpace,
    x: &SparseSequence,
    t: f64,
    mode: ModulusMode,
    use_absolute: bool,
    cfg: &SamplerConfig,
) -> Result<AsymptoticModulusResult> {
    check_t(t)?;
    let dirs = tail_directions(cfg.samples, cfg.seed);
    let (value, m) = tail_value(f, space, x, t, mode, use_absolute, &dirs);
    Ok(AsymptoticModulusResult {
        t,
        value,
        mode,
        at: EvaluationPoint::Point(x.clone()),
        subspace_index: m,
        analytic: false,
        bound: match mode {
            ModulusMode::RhoBar => BoundDirection::Upper,
            ModulusMode::DeltaBar => BoundDirection::Lower,
        },
        model: "tail".into(),
    })
}

fn tail_value<F: SequenceFunction + ?Sized>(
    f: &F,
    space: &SequenceSpace,
    x: &SparseSequence,
    t: f64,
    mode: ModulusMode,
    use_absolute: bool,
    dirs: &[Vec<(usize, f64)>],
) -> (f64, usize) {
    let fx = f.eval(x);
    let base = x.max_support();
    let mut best: Option<(f64, usize)> = None;
    for m in base..=base + EXTRA_TAILS {
        let mut inner: Option<f64> = None;
        for d in dirs {
            let h = SparseSequence::from_pairs(d.iter().map(|&(k, v)| (m + k, v)));
            let hn = space.norm(&h);
            for s in scales(mode) {
                for sign in [1.0, -1.0] {
                    let hs = h.scaled(sign * s * t / hn);
                    let mut g = f.eval(&x.add(&hs)) - fx;
                    if use_absolute {
                        g = g.abs();
                    }
                    inner = Some(match (inner, mode) {
                        (None, _) => g,
                        (Some(v), ModulusMode::RhoBar) => v.max(g),
                        (Some(v), ModulusMode::DeltaBar) => v.min(g),
                    });
                }
            }
        }
        let v = inner.expect("at least one direction");
        let better = match (best, mode) {
            (None, _) => true,
            (Some((b, _)), ModulusMode::RhoBar) => v < b,
            (Some((b, _)), ModulusMode::DeltaBar) => v > b,
        };
        if better {
            best = Some((v, m));
        }
    }
    best.expect("nonempty tail range")
}

/// `count` random unit vectors of `space` supported on `{1, …, support}`.
pub fn random_unit_sequences(space: &SequenceSpace, count: usize, support: usize, seed: u64) -> Vec<SparseSequence> {
    let mut rng = SamplerConfig::default().with_seed(seed).rng();
    (0..count)
        .map(|_| loop {
            let x = SparseSequence::from_pairs((1..=support).map(|i| (i, rng.gen_range(-1.0..1.0))));
            let n = space.norm(&x);
            if n > 1e-3 {
                break x.scaled(1.0 / n);
            }
        })
        .collect()
}

/// Uniform `ρ̄_f(t;S) = sup_{x∈S} ρ̄_f(t;x)` on a grid of `t`.
pub fn uniform_rho_curve<F: SequenceFunction + ?Sized>(
    f: &F,
    space: &SequenceSpace,
    set: &[SparseSequence],
    t_grid: &[f64],
    use_absolute: bool,
    cfg: &SamplerConfig,
) -> Result<ModulusCurve> {
    if set.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidParameter("sample set and t grid must be nonempty".into()));
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::InvalidParameter("t grid must lie in (0, 1]".into()));
    }
    let dirs = tail_directions(cfg.samples, cfg.seed);
    let samples = t_grid
        .iter()
        .map(|&t| {
            let v = set
                .iter()
                .map(|x| tail_value(f, space, x, t, ModulusMode::RhoBar, use_absolute, &dirs).0)
                .fold(f64::NEG_INFINITY, f64::max);
            CurvePoint { t, value: v }
        })
        .collect();
    Ok(ModulusCurve::new("t", samples, BoundDirection::Upper)?
        .with_meta("model", "tail")
        .with_meta("space", space.label())
        .with_meta("mode", "rho_bar")
        .with_meta("use_absolute", use_absolute)
        .with_meta("sample_set", serde_json::to_value(set).unwrap())
        .with_meta("seed", cfg.seed)
        .with_meta("samples", cfg.samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub flat: bool,
    pub fit: Option<PowerFit>,
    pub curve: ModulusCurve,
}

/// Flat iff `ρ̄_f(t;x) ≤ 1e-12` on the whole grid and set; otherwise a power
/// law is fitted to the uniform curve (positive values only).
pub fn flatness_and_power<F: SequenceFunction + ?Sized>(
    f: &F,
    space: &SequenceSpace,
    set: &[SparseSequence],
    t_grid: &[f64],
    cfg: &SamplerConfig,
) -> Result<FlatnessReport> {
    let curve = uniform_rho_curve(f, space, set, t_grid, false, cfg)?;
    let flat = curve.samples.iter().all(|p| p.value <= 1e-12);
    let fit = if flat {
        None
    } else {
        let positive: Vec<CurvePoint> = curve.samples.iter().copied().filter(|p| p.value > 1e-12).collect();
        let lo = positive.first().map_or(0.0, |p| p.t);
        let hi = positive.last().map_or(0.0, |p| p.t);
        let sub = ModulusCurve::new("t", positive, BoundDirection::Upper)?;
        power_fit(&sub, (lo, hi)).ok()
    };
    Ok(FlatnessReport { flat, fit, curve })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessDemo {
    /// Greatest convex nondecreasing minorant of the profile.
    pub psi: GridFunction1D,
    pub space: SequenceSpace,
    pub curve_f: ModulusCurve,
    pub curve_conv: ModulusCurve,
    pub fit_f: PowerFit,
    pub fit_conv: PowerFit,
    /// `C_f = max_t ρ̄_f(t;S) / t^p`.
    pub bound_constant: f64,
    pub factor: f64,
    /// `ρ̄_{conv f}(t;S) ≤ factor·C_f·t^p` on the grid and the fitted
    /// constants are within `factor` of each other.
    pub holds: bool,
}

/// Compares `ρ̄` of `f = φ∘‖·‖_p` with that of `conv f = ψ∘‖·‖_p`, where `ψ`
/// is [`radial_envelope`]`(φ)`. Both use `|f(x+h) − f(x)|`, since `f` itself
/// need not be convex.
pub fn envelope_preserves_smoothness_demo(
    phi: &GridFunction1D,
    p: f64,
    set: &[SparseSequence],
    t_grid: &[f64],
    factor: f64,
    cfg: &SamplerConfig,
) -> Result<SmoothnessDemo> {
    if phi.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("profile must be finite (bounded below) on its grid".into()));
    }
    let space = SequenceSpace::lp(p)?;
    let psi = radial_envelope(phi)?;
    let f = Radial { space, profile: |r: f64| phi.interpolate(r) };
    let g = Radial { space, profile: |r: f64| psi.interpolate(r) };
    let curve_f = uniform_rho_curve(&f, &space, set, t_grid, true, cfg)?;
    let curve_conv = uniform_rho_curve(&g, &space, set, t_grid, true, cfg)?;
    let window = (t_grid[0], t_grid[t_grid.len() - 1]);
    let fit_f = power_fit(&curve_f, window)?;
    let fit_conv = power_fit(&curve_conv, window)?;
    let bound_constant = curve_f
        .samples
        .iter()
        .map(|s| s.value / s.t.powf(p))
        .fold(0.0, f64::max);
    let pointwise = curve_conv
        .samples
        .iter()
        .all(|s| s.value <= factor * bound_constant * s.t.powf(p) * (1.0 + 1e-12));
    let ratio = fit_conv.constant / fit_f.constant;
    let holds = pointwise && ratio <= factor && ratio >= 1.0 / factor;
    Ok(SmoothnessDemo {
        psi,
        space,
        curve_f,
        curve_conv,
        fit_f,
        fit_conv,
        bound_constant,
        factor,
        holds,
    })
}
