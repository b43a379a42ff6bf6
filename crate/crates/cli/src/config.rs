use crate::args::{self, Command};
use asymconv::asymptotic::SequenceSpace;
use asymconv::expr::Expr;
use asymconv::moduli::RhoVariant;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;

/// An invalid configuration; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    Strict,
    #[default]
    Default,
}

impl ToleranceProfile {
    pub fn scale(self) -> f64 {
        match self {
            ToleranceProfile::Strict => 0.5,
            ToleranceProfile::Default => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalConfig {
    pub seed: u64,
    pub samples: usize,
    pub tolerance_profile: ToleranceProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConfig {
    pub function: String,
    pub grid: usize,
    pub window: [f64; 2],
    pub y_window: Option<[f64; 2]>,
    pub y_grid: usize,
    pub at: Vec<Vec<f64>>,
    pub slopes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Delta,
    Rho,
    Puc,
    DeltaFn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuliConfig {
    pub norm: String,
    pub dim: usize,
    pub quantity: Quantity,
    pub parameters: Vec<f64>,
    pub variant: RhoVariant,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    Analytic,
    Sampled,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub phi: String,
    pub radii: Vec<f64>,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConfig {
    pub space: SequenceSpace,
    pub mode: asymconv::asymptotic::ModulusMode,
    pub t: Vec<f64>,
    pub path: EvalPath,
    pub support: usize,
    pub demo: Option<DemoConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalConfig {
    #[serde(rename = "N")]
    pub degree: usize,
    pub t0: Vec<f64>,
    pub density: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynormConfig {
    pub form: String,
    pub dim: usize,
    pub k: f64,
    pub t0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub tolerance_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "snake_case")]
pub enum CommandConfig {
    Envelope(EnvelopeConfig),
    Moduli(ModuliConfig),
    Asymptotic(AsymptoticConfig),
    Extremal(ExtremalConfig),
    Polynorm(PolynormConfig),
    Verify(VerifyConfig),
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Envelope(_) => "envelope",
            CommandConfig::Moduli(_) => "moduli",
            CommandConfig::Asymptotic(_) => "asymptotic",
            CommandConfig::Extremal(_) => "extremal",
            CommandConfig::Polynorm(_) => "polynorm",
            CommandConfig::Verify(_) => "verify",
        }
    }
}

/// Everything that determines a run's results; the output directory is
/// deliberately excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub global: GlobalConfig,
    #[serde(flatten)]
    pub command: CommandConfig,
}

impl ExperimentConfig {
    /// First 16 hex digits of the SHA-256 of the config JSON.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))[..16].to_string()
    }

    pub fn sampler(&self) -> asymconv::sampling::SamplerConfig {
        asymconv::sampling::SamplerConfig::default()
            .with_samples(self.global.samples)
            .with_seed(self.global.seed)
    }

    pub fn tolerance_scale(&self) -> f64 {
        match &self.command {
            CommandConfig::Verify(v) => v.tolerance_scale,
            _ => self.global.tolerance_profile.scale(),
        }
    }
}

pub fn parse_range(s: &str) -> anyhow::Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return usage(format!("expected a:b, got '{s}'"));
    }
    let a: f64 = parts[0].trim().parse().or_else(|_| usage(format!("bad number in '{s}'")))?;
    let b: f64 = parts[1].trim().parse().or_else(|_| usage(format!("bad number in '{s}'")))?;
    if !(a < b) {
        return usage(format!("range '{s}' must satisfy a < b"));
    }
    Ok([a, b])
}

pub fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().or_else(|_| usage(format!("bad number '{v}' in '{s}'"))))
        .collect()
}

fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return usage(format!("expected a:b:n, got '{s}'"));
    }
    let [a, b] = parse_range(&format!("{}:{}", parts[0], parts[1]))?;
    let n: usize = parts[2].parse().or_else(|_| usage(format!("bad count in '{s}'")))?;
    if a <= 0.0 || n < 2 {
        return usage("grid needs a > 0 and at least two points");
    }
    Ok(asymconv::moduli::log_grid(a, b, n))
}

impl ExperimentConfig {
    /// Validates parsed arguments into a config; `Export` is not an experiment.
    pub fn from_args(global: GlobalConfig, command: &Command) -> anyhow::Result<Self> {
        let command = match command {
            Command::Envelope(a) => {
                let expr = Expr::parse(&a.function).or_else(|e| usage(format!("--fn: {e}")))?;
                if a.grid < 3 || a.y_grid < 3 {
                    return usage("grids need at least 3 knots");
                }
                let window = parse_range(&a.window)?;
                let y_window = match (&a.y_window, expr.uses_y()) {
                    (Some(w), _) => Some(parse_range(w)?),
                    (None, true) => Some(window),
                    (None, false) => None,
                };
                let at = a.at.iter().map(|s| parse_list(s)).collect::<anyhow::Result<Vec<_>>>()?;
                let want = if y_window.is_some() { 2 } else { 1 };
                if at.iter().any(|p| p.len() != want) {
                    return usage(format!("--at points need {want} coordinate(s)"));
                }
                CommandConfig::Envelope(EnvelopeConfig {
                    function: a.function.clone(),
                    grid: a.grid,
                    window,
                    y_window,
                    y_grid: a.y_grid,
                    at,
                    slopes: a.slopes,
                })
            }
            Command::Moduli(a) => {
                if a.dim < 2 {
                    return usage("--dim must be at least 2");
                }
                let parameters = match a.at {
                    Some(v) => vec![v],
                    None => {
                        let [lo, hi] = parse_range(&a.range)?;
                        if lo <= 0.0 || a.points < 1 {
                            return usage("--range must be positive with at least one point");
                        }
                        asymconv::moduli::log_grid(lo, hi, a.points)
                    }
                };
                CommandConfig::Moduli(ModuliConfig {
                    norm: a.norm.clone(),
                    dim: a.dim,
                    quantity: match a.quantity {
                        args::QuantityArg::Delta => Quantity::Delta,
                        args::QuantityArg::Rho => Quantity::Rho,
                        args::QuantityArg::Puc => Quantity::Puc,
                        args::QuantityArg::DeltaFn => Quantity::DeltaFn,
                    },
                    parameters,
                    variant: match a.variant {
                        args::VariantArg::PaperLiteral => RhoVariant::PaperLiteral,
                        args::VariantArg::Standard => RhoVariant::Standard,
                    },
                    p: a.p,
                })
            }
            Command::Asymptotic(a) => {
                let space: SequenceSpace = a.space.parse().or_else(|e: asymconv::Error| usage(e.to_string()))?;
                let t = match &a.t_grid {
                    Some(g) => parse_grid(g)?,
                    None => parse_list(&a.t)?,
                };
                if t.iter().any(|v| !(*v > 0.0)) {
                    return usage("t values must be positive");
                }
                let demo = if a.demo {
                    Expr::parse(&a.phi).or_else(|e| usage(format!("--phi: {e}")))?;
                    if !matches!(space, SequenceSpace::Lp { .. }) {
                        return usage("the demonstration needs an lp space");
                    }
                    Some(DemoConfig {
                        phi: a.phi.clone(),
                        radii: parse_list(&a.radii)?,
                        factor: a.factor,
                    })
                } else {
                    None
                };
                CommandConfig::Asymptotic(AsymptoticConfig {
                    space,
                    mode: match a.mode {
                        args::ModeArg::Rho => asymconv::asymptotic::ModulusMode::RhoBar,
                        args::ModeArg::Delta => asymconv::asymptotic::ModulusMode::DeltaBar,
                    },
                    t,
                    path: match a.path {
                        args::PathArg::Analytic => EvalPath::Analytic,
                        args::PathArg::Sampled => EvalPath::Sampled,
                        args::PathArg::Both => EvalPath::Both,
                    },
                    support: a.support.max(1),
                    demo,
                })
            }
            Command::Extremal(a) => {
                let t0 = parse_list(&a.t0)?;
                for &t in &t0 {
                    asymconv::extremal::ExtremalProblem::new(a.degree, t).or_else(|e| usage(e.to_string()))?;
                }
                CommandConfig::Extremal(ExtremalConfig {
                    degree: a.degree,
                    t0,
                    density: a.density,
                })
            }
            Command::Polynorm(a) => CommandConfig::Polynorm(PolynormConfig {
                form: a.form.clone(),
                dim: a.dim,
                k: a.k,
                t0: a.t0,
            }),
            Command::Verify(a) => CommandConfig::Verify(VerifyConfig {
                tolerance_scale: a.tolerance_scale.unwrap_or(global.tolerance_profile.scale()),
            }),
            Command::Export(_) => return usage("export does not run an experiment"),
        };
        Ok(ExperimentConfig { global, command })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn global() -> GlobalConfig {
        GlobalConfig { seed: 1, samples: 64, tolerance_profile: ToleranceProfile::Default }
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("-2:2").unwrap(), [-2.0, 2.0]);
        assert!(parse_range("2:-2").is_err());
        assert!(parse_range("1").is_err());
        assert_eq!(parse_list("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        let g = parse_grid("0.1:1:3").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[1] - 0.1f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hash_depends_on_every_field_and_round_trips() {
        let a = ExperimentConfig {
            global: global(),
            command: CommandConfig::Extremal(ExtremalConfig { degree: 6, t0: vec![1.0], density: 2048 }),
        };
        let mut b = a.clone();
        b.global.seed = 2;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.hash(), a.hash());
    }

    #[test]
    fn strict_profile_halves_tolerances() {
        let mut g = global();
        g.tolerance_profile = ToleranceProfile::Strict;
        let c = ExperimentConfig {
            global: g,
            command: CommandConfig::Polynorm(PolynormConfig { form: "power-sum:4".into(), dim: 2, k: 1.0, t0: 1.0 }),
        };
        assert_eq!(c.tolerance_scale(), 0.5);
    }
}
