use crate::config::ToleranceProfile;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "asymconv", version, about = "Convex envelopes, moduli of convexity and smoothness, polynomial norms")]
pub struct Cli {
    /// Seed for every sampler.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Directory under which `runs/<hash>/` is created.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Candidate count for sampled estimates.
    #[arg(long, global = true, default_value_t = 4096)]
    pub samples: usize,
    #[arg(long, global = true, value_enum, default_value_t = ToleranceProfile::Default)]
    pub tolerance_profile: ToleranceProfile,
    /// Re-run the configuration stored in a record (or config) JSON file.
    #[arg(long, global = true)]
    pub replay: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convex envelope of a sampled function of `x` (or `x` and `y`).
    Envelope(EnvelopeArgs),
    /// Moduli of convexity/smoothness and p-uniform convexity constants.
    Moduli(ModuliArgs),
    /// Asymptotic moduli on the sequence-space model.
    Asymptotic(AsymptoticArgs),
    /// The extremal problem over convex nonnegative even polynomials.
    Extremal(ExtremalArgs),
    /// Certify a polynomial norm and check its convexity inequalities.
    Polynorm(PolynormArgs),
    /// Run the full claim table.
    Verify(VerifyArgs),
    /// Write the curves of a stored record as CSV or JSON files.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    /// Expression in `x` (and optionally `y`), e.g. "(x^2-1)^2".
    #[arg(long = "fn")]
    pub function: String,
    /// Knots per axis.
    #[arg(long, default_value_t = 801)]
    pub grid: usize,
    /// `a:b` window for `x`.
    #[arg(long, default_value = "-2:2", allow_hyphen_values = true)]
    pub window: String,
    /// `c:d` window for `y` (2D functions; defaults to the x window).
    #[arg(long, allow_hyphen_values = true)]
    pub y_window: Option<String>,
    /// Knots along `y` (2D functions).
    #[arg(long, default_value_t = 201)]
    pub y_grid: usize,
    /// Points at which Carathéodory certificates are computed, e.g. `0` or `0,0`.
    #[arg(long, default_values_t = vec!["0".to_string()], allow_hyphen_values = true)]
    pub at: Vec<String>,
    /// Uniform slope count for the 1D biconjugate (hull edge slopes if absent).
    #[arg(long)]
    pub slopes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    Delta,
    Rho,
    Puc,
    DeltaFn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    PaperLiteral,
    Standard,
}

#[derive(Debug, Args)]
pub struct ModuliArgs {
    /// `lp:<p>`, `sup`, `poly:<N>` (power-sum form) or `form:<path>`.
    #[arg(long, default_value = "lp:4")]
    pub norm: String,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = QuantityArg::Delta)]
    pub quantity: QuantityArg,
    /// `a:b` parameter range (log-spaced).
    #[arg(long, default_value = "0.01:0.1")]
    pub range: String,
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    /// Single parameter value (overrides the range).
    #[arg(long)]
    pub at: Option<f64>,
    #[arg(long, value_enum, default_value_t = VariantArg::PaperLiteral)]
    pub variant: VariantArg,
    /// Exponent for `puc` and `delta-fn` (defaults to the norm's natural power).
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rho,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Analytic,
    Sampled,
    Both,
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    /// `lp:<p>` or `c0`.
    #[arg(long, default_value = "lp:4")]
    pub space: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Rho)]
    pub mode: ModeArg,
    /// Comma-separated values of `t`.
    #[arg(long, default_value = "1")]
    pub t: String,
    /// `a:b:n` log-spaced grid of `t` (overrides `--t`).
    #[arg(long)]
    pub t_grid: Option<String>,
    #[arg(long, value_enum, default_value_t = PathArg::Both)]
    pub path: PathArg,
    /// Support size of the random unit vector `x`.
    #[arg(long, default_value_t = 4)]
    pub support: usize,
    /// Run the envelope-smoothness demonstration for `f = φ(‖x‖)` instead.
    #[arg(long)]
    pub demo: bool,
    /// Radial profile φ in the variable `x` (demo only).
    #[arg(long, default_value = "(x^2-1)^2")]
    pub phi: String,
    /// Norms of the sample vectors (demo only).
    #[arg(long, default_value = "0.7,0.75,0.8,0.85,0.9,1.2,1.4,1.6,1.8,2")]
    pub radii: String,
    /// Allowed factor between the two smoothness constants (demo only).
    #[arg(long, default_value_t = 4.0)]
    pub factor: f64,
}

#[derive(Debug, Args)]
pub struct ExtremalArgs {
    /// Even degree `N ≥ 4`.
    #[arg(long = "N")]
    pub degree: usize,
    /// Comma-separated values of `t₀`.
    #[arg(long, default_value = "1")]
    pub t0: String,
    #[arg(long, default_value_t = asymconv::extremal::DEFAULT_DENSITY)]
    pub density: usize,
}

#[derive(Debug, Args)]
pub struct PolynormArgs {
    /// `power-sum:<N>` or `file:<path>` holding a symmetric form JSON.
    #[arg(long, default_value = "power-sum:4")]
    pub form: String,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Constant `K` for the p-uniform convexity check.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// `t₀` for the second-difference gap.
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Multiplies every tolerance (overrides the profile; 0 demands exact values).
    #[arg(long)]
    pub tolerance_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Record id (config hash), run directory or record file.
    #[arg(long)]
    pub record: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Destination directory (defaults to `<run>/export`).
    #[arg(long)]
    pub dest: Option<std::path::PathBuf>,
}
