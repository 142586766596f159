//! Command-line and `--config` parameter blocks. Every struct doubles as a
//! serde target so a JSON config can stand in for the flags.

use std::path::PathBuf;

use clap::{ArgMatches, Args, Command as ClapCommand, FromArgMatches, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use cma_kernel::estimation::Method;

/// Defaults of an args struct as clap would fill them with no flags given.
pub fn clap_defaults<T: Args + FromArgMatches>() -> T {
    let cmd = T::augment_args(ClapCommand::new("defaults").no_binary_name(true));
    let m: ArgMatches = cmd.get_matches_from(Vec::<String>::new());
    T::from_arg_matches(&m).expect("defaults parse")
}

macro_rules! clap_default {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                clap_defaults::<$t>()
            }
        }
    )*};
}

clap_default!(
    ModelArgs,
    SimulateArgs,
    EstimateArgs,
    SpectrumArgs,
    McStudyArgs,
    GridArgs,
    Sigma2Args,
    XiArgs,
    SpArgs
);

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// CAR(1) with rate `lambda < 0`.
    Ou,
    Carma,
    /// Gamma kernel `t^(nu-1) e^(-lambda t)`.
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Dl,
    Innovations,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Dl => Method::DurbinLevinson,
            MethodArg::Innovations => Method::Innovations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriverArg {
    Gaussian,
    Poisson,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelArgs {
    #[arg(long = "model", value_enum, default_value = "ou")]
    pub kind: ModelKind,
    /// Autoregressive coefficients a_1..a_p of a(z) = z^p + a_1 z^(p-1) + ...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ar: Vec<f64>,
    /// Moving-average coefficients b_0..b_q, ascending.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ma: Vec<f64>,
    /// OU rate (negative) or gamma decay (positive); default -1 resp. 1.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.0625)]
    pub delta: f64,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub driver: DriverArg,
    /// Jump rate of the compound-Poisson driver.
    #[arg(long, default_value_t = 10.0)]
    pub rate: f64,
    /// Fine steps per output step; defaults to 1 (Gaussian) or 16 (Poisson).
    #[arg(long)]
    pub refinement: Option<usize>,
    /// Output file; `.bin` gives raw little-endian f64, anything else CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateArgs {
    /// Series file (CSV or `.bin` with a `.json` sidecar).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Use the model's exact sampled autocovariance instead of data.
    #[arg(long)]
    pub from_exact_acvf: bool,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Sampling interval; read from the sidecar when omitted.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value = "dl")]
    pub method: MethodArg,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 8.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary destination; defaults to `<out>.json`, or stderr.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridArgs {
    #[arg(long = "from", default_value_t = 1.1)]
    pub from: f64,
    #[arg(long = "to", default_value_t = 20.0)]
    pub to: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpArgs {
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sigma2Args {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Coarsest spacing 2^-k_from.
    #[arg(long, default_value_t = 4)]
    pub k_from: u32,
    #[arg(long, default_value_t = 8)]
    pub k_to: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct XiArgs {
    /// p - q; tabulates the zeros of alpha_{p-q-1}.
    #[arg(long, default_value_t = 3)]
    pub pq: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "table", rename_all = "kebab-case")]
pub enum AsymptoticsTable {
    /// C_alpha over an alpha grid.
    CAlpha(GridArgs),
    /// S_{p,alpha} over an alpha grid.
    #[command(name = "s-p-alpha")]
    #[serde(rename = "s-p-alpha")]
    SPAlpha(SpArgs),
    /// Asymptotic vs Kolmogorov sigma^2_delta for delta = 2^-k.
    Sigma2(Sigma2Args),
    /// Zeros of alpha_{p-q-1} and their eta values.
    Xi(XiArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Welch segment length; 2^22 when the series allows, else a power of
    /// two near n/16.
    #[arg(long)]
    pub segment: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub overlap: f64,
    /// Below this frequency (Hz) the raw periodogram replaces Welch.
    #[arg(long, default_value_t = 1e-3)]
    pub splice_hz: f64,
    /// Tail-index band in Hz; defaults to [Nyquist/100, Nyquist/10].
    #[arg(long)]
    pub tail_lo: Option<f64>,
    #[arg(long)]
    pub tail_hi: Option<f64>,
    #[arg(long, value_enum, default_value = "dl")]
    pub method: MethodArg,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 8.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    /// Directory for the four CSV files and the JSON summary.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McStudyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub replications: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "innovations")]
    pub method: MethodArg,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Per-replication CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Simulate a sampled CMA path.
    Simulate(SimulateArgs),
    /// Estimate the kernel from a series or an exact autocovariance.
    Estimate(EstimateArgs),
    /// Tables of the small-delta constants.
    Asymptotics {
        #[command(subcommand)]
        #[serde(flatten)]
        table: AsymptoticsTable,
    },
    /// ACF, spliced Welch spectrum, kernel estimate and kernel spectrum.
    Spectrum(SpectrumArgs),
    /// Monte Carlo replications of simulate then estimate.
    McStudy(McStudyArgs),
}
