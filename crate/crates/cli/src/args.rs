use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "cylbuck",
    version,
    about = "Buckling loads and Korn-constant checks for thin cylindrical shells"
)]
pub struct Cli {
    /// Directory for CSV/JSON artifacts and the run manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Master seed; SHELLSPEC_SEED overrides it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Homogeneous trivial branch (a, b) at a given load.
    TrivialBranch(TrivialBranchArgs),
    /// Discrete minimum of the classical buckling load over (m, n).
    ClassicalLoad(ClassicalLoadArgs),
    /// Koiter-circle buckling modes, optionally exported as surfaces.
    KoiterModes(KoiterModesArgs),
    /// Korn constant K(V_h) across thicknesses with exponent fit.
    Korn(KornArgs),
    /// Gradient-component bounds across thicknesses with exponent fits.
    Components(ComponentsArgs),
    /// Localized ansatz: norm limits, component scalings and load ratio.
    Ansatz(AnsatzArgs),
    /// Fixed-bottom modes and their load ratio.
    Fixedbc(FixedbcArgs),
    /// Randomized checks of the rectangle inequalities.
    RectKorn(RectKornArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::TrivialBranch(_) => "trivial-branch",
            Command::ClassicalLoad(_) => "classical-load",
            Command::KoiterModes(_) => "koiter-modes",
            Command::Korn(_) => "korn",
            Command::Components(_) => "components",
            Command::Ansatz(_) => "ansatz",
            Command::Fixedbc(_) => "fixedbc",
            Command::RectKorn(_) => "rect-korn",
        }
    }
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct MaterialArgs {
    /// Young's modulus.
    #[arg(long = "E", default_value_t = 1.0)]
    pub e: f64,
    /// Poisson ratio.
    #[arg(long, default_value_t = 0.3)]
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub mmax: Option<u32>,
    #[arg(long)]
    pub nmax: Option<u32>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrivialBranchArgs {
    #[command(flatten)]
    pub material: MaterialArgs,
    /// Applied load.
    #[arg(long)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassicalLoadArgs {
    #[arg(long)]
    pub h: f64,
    #[arg(long = "L", default_value_t = PI)]
    pub l: f64,
    #[command(flatten)]
    pub material: MaterialArgs,
    #[command(flatten)]
    pub bounds: BoundsArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KoiterModesArgs {
    #[arg(long)]
    pub h: f64,
    #[arg(long = "L", default_value_t = PI)]
    pub l: f64,
    #[command(flatten)]
    pub material: MaterialArgs,
    /// Axial indices.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1")]
    pub m: Vec<u32>,
    /// Plot amplitude ε of the deformed mid-surface.
    #[arg(long, default_value_t = 0.1)]
    pub amplitude: f64,
    /// OBJ path; a CSV twin is written next to it.
    #[arg(long)]
    pub export: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    pub n_theta: usize,
    #[arg(long, default_value_t = 64)]
    pub n_z: usize,
    /// Tangential amplitudes: the exact minimizer at (m, n(m)), or the
    /// closed form that assumes (m̂, n) lies on the Koiter circle.
    #[arg(long, value_enum, default_value = "optimal")]
    pub coefficients: CoefficientsArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientsArg {
    Optimal,
    Displayed,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KornArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub h_list: Vec<f64>,
    #[arg(long = "L", default_value_t = PI)]
    pub l: f64,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    /// Radial basis size per component.
    #[arg(long = "N", default_value_t = 8)]
    pub n: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComponentsArgs {
    #[command(flatten)]
    pub korn: KornArgs,
    /// Group tag (thth-zz, rth-thr, ur-rz-zr, thz-zth) or "all".
    #[arg(long, default_value = "all")]
    pub which: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StressArg {
    Perfect,
    Shear,
    Hoop,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnsatzArgs {
    /// Defaults to n^-4 for n = 3, 4, 5, 6, 8, 10.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub h_list: Option<Vec<f64>>,
    /// Half-width of the bump in the stretched variable.
    #[arg(long, default_value_t = 1.5)]
    pub eta0: f64,
    #[arg(long = "L", default_value_t = PI)]
    pub l: f64,
    #[command(flatten)]
    pub material: MaterialArgs,
    #[arg(long, value_enum, default_value = "perfect")]
    pub stress: StressArg,
    /// Shear of the bump used with --stress shear.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Simplified,
    Refined,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FixedbcArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub h_list: Vec<f64>,
    /// m(h) = round(c h^-alpha).
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long = "L", default_value_t = PI)]
    pub l: f64,
    #[command(flatten)]
    pub material: MaterialArgs,
    #[arg(long, value_enum, default_value = "refined")]
    pub variant: VariantArg,
    #[arg(long)]
    pub export: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 512)]
    pub n_theta: usize,
    #[arg(long, default_value_t = 128)]
    pub n_z: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RectKornArgs {
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    #[arg(long = "L", default_value_t = 1.0)]
    pub l: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}
