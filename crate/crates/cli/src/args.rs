use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "convnls", version, about = "Convolution-potential NLS: evolution, ground states, analysis")]
pub struct Cli {
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Write the fully resolved config of this run to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    pub save_config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split-step evolution with diagnostics.
    Evolve(EvolveArgs),
    /// Petviashvili ground states and epsilon sweeps.
    Groundstate(GroundstateArgs),
    /// Probes and reports.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCmd,
    },
}

#[derive(Debug, Args, Default)]
pub struct GridArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    /// Points per axis (power of two).
    #[arg(long)]
    pub n: Option<usize>,
    /// Box side length.
    #[arg(long = "box")]
    pub box_len: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct PhysArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct InitArgs {
    /// gauss, phi0, townes or snapshot:PATH
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub amp: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub phys: PhysArgs,
    #[command(flatten)]
    pub init: InitArgs,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub monitor_every: Option<usize>,
    /// 2/3-rule dealiasing (true/false).
    #[arg(long)]
    pub dealias: Option<bool>,
    #[arg(long)]
    pub drift_abort: Option<f64>,
    /// zero_out or reject
    #[arg(long)]
    pub zero_mode: Option<String>,
    /// Monitor a threshold case (`auto` picks it from dim and sigma).
    #[arg(long)]
    pub threshold_case: Option<String>,
    #[arg(long)]
    pub out_series: Option<PathBuf>,
    /// Final snapshot; its JSON sidecar sits next to it.
    #[arg(long)]
    pub out_final: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GroundstateArgs {
    /// standing or zeromass
    #[arg(long)]
    pub target: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub phys: PhysArgs,
    /// Nonlinearity power p.
    #[arg(long)]
    pub power: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Remove the zero mode even when eps = 0.
    #[arg(long)]
    pub project_mean: Option<bool>,
    /// Decreasing eps list, `eps=1,0.3,0.1` or `1,0.3,0.1`.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Output stem.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCmd {
    /// Sup-norm decay of the frequency-localised linear kernel.
    DecayProbe(DecayArgs),
    /// Algebraic tail exponent of a snapshot.
    TailFit(TailArgs),
    /// Global-boundedness conditions at an initial datum.
    Thresholds(ThresholdArgs),
    /// Residue oracle for the kernel, optionally against the FFT.
    KernelOracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub phys: PhysArgs,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Explicit probe times (comma separated).
    #[arg(long)]
    pub times: Option<String>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// defocusing, n1, n2mass, n3pair, n4critical, zeromass, or auto
    #[arg(long)]
    pub case: Option<String>,
    /// Use the mass-interpolated conditions with these exponents.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub phys: PhysArgs,
    #[command(flatten)]
    pub init: InitArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Comma-separated evaluation points.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[command(flatten)]
    pub phys: PhysArgs,
    /// Cross-check against the FFT kernel.
    #[arg(long)]
    pub fft: bool,
    #[arg(long)]
    pub fft_points: Option<usize>,
    #[arg(long)]
    pub fft_box: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
