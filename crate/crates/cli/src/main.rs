//! `assouad-kit`: generate samples, evaluate closed forms, run estimators,
//! simulate fractal percolation, replay check suites and plot spectra.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or input error,
//! 3 cap or resource limit.

// Range checks are written `!(x > lo)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod manifest;
mod plot;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "assouad-kit", version, about = "Assouad-type dimensions, spectra and their estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a point set sample (CSV with a versioned header).
    Generate(GenerateArgs),
    /// Closed-form dimensions as a JSON report.
    Dimension(DimensionArgs),
    /// Closed-form spectrum curve as CSV or JSON.
    Spectrum(SpectrumArgs),
    /// Run an estimator on a point set file.
    Estimate(EstimateArgs),
    /// Simulate fractal percolation.
    Percolate(PercolateArgs),
    /// Run a named check suite and print reference, expected, observed and tolerance.
    Verify(VerifyArgs),
    /// Render spectrum curves, with optional bounds, as SVG.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Preset {
    Cantor,
    TwoThreeCarpet,
    ThreeFiveCarpet,
    TwoFourCarpet,
}

/// An IFS or carpet, given by preset or JSON file, optionally carrying weights.
#[derive(Args, Clone)]
pub struct SystemArgs {
    /// Built-in system.
    #[arg(long, conflicts_with = "system")]
    pub preset: Option<Preset>,
    /// JSON system document (`{"v":1,"kind":"carpet",...}` or `{"v":1,"kind":"ifs",...}`).
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Probability weights, one per map, replacing any in the document.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GenerateFamily {
    /// All words of length `--depth` of an IFS or carpet.
    Attractor,
    /// Random orbit driven by the weights of a measure.
    ChaosGame,
    /// `{0} ∪ {n^-p}` or `{0} ∪ {c^n}`.
    Sequence,
    /// Polynomial spiral `x^-p e^{ix}`.
    Spiral,
}

#[derive(Args)]
pub struct GenerateArgs {
    pub family: GenerateFamily,
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    #[arg(long, default_value_t = 100_000)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sequence or spiral exponent.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Use the geometric sequence `c^n` instead of `n^-p`.
    #[arg(long)]
    pub geometric: Option<f64>,
    #[arg(long, default_value_t = 1 << 20)]
    pub n_max: u64,
    #[arg(long, default_value_t = 200.0)]
    pub turns: f64,
    #[arg(long, default_value_t = 64)]
    pub samples_per_turn: usize,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Clone)]
pub enum Family {
    /// IFS, carpet or weighted measure on one.
    System {
        #[command(flatten)]
        system: SystemArgs,
        /// Assert the separation condition the formulas need.
        #[arg(long)]
        separated: bool,
        /// Depth of the affinity-dimension trace for non-similarity systems.
        #[arg(long, default_value_t = 6)]
        levels: usize,
    },
    /// `{0} ∪ {n^-p}`.
    Sequence {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Polynomial spiral `x^-p e^{ix}`.
    Spiral {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Fractal percolation with retention probability `p`.
    Percolation {
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long)]
        p: f64,
    },
    /// Three-map Lalley–Gatzouras carpet `F_λ`.
    LalleyGatzouras {
        #[arg(long)]
        lambda: f64,
    },
    /// Geometrically finite Kleinian group: limit set and Patterson–Sullivan measure.
    Kleinian {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        k_min: u32,
        #[arg(long)]
        k_max: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        no_parabolic: bool,
    },
}

#[derive(Args)]
pub struct DimensionArgs {
    #[command(subcommand)]
    pub family: Family,
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Kind {
    Assouad,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CurveFormat {
    Csv,
    Json,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[command(subcommand)]
    pub family: Family,
    #[arg(long, global = true, default_value = "assouad")]
    pub kind: Kind,
    /// Number of interior θ samples `i/(n+1)`.
    #[arg(long, global = true, default_value_t = 99)]
    pub grid: usize,
    #[arg(long, global = true, default_value = "csv")]
    pub format: CurveFormat,
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Box,
    Assouad,
    Spectrum,
    LowerSpectrum,
}

#[derive(Args)]
pub struct EstimateArgs {
    /// Point set file written by `generate` or `percolate`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub method: Method,
    #[arg(long, default_value_t = 1)]
    pub k_min: u32,
    /// Finest dyadic exponent; defaults to the finest one the resolution allows.
    #[arg(long)]
    pub k_max: Option<u32>,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Sweep the spectrum over `n` interior θ values and write a curve instead.
    #[arg(long)]
    pub curve: Option<usize>,
    /// Use every point as a center instead of a hashed subsample.
    #[arg(long)]
    pub all_centers: bool,
    #[arg(long, default_value_t = assouad_kit::estimators::DEFAULT_MAX_CENTERS)]
    pub max_centers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Smallest `R/r` ratio for the Assouad pair sweep.
    #[arg(long, default_value_t = 4.0)]
    pub ratio_floor: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Emit {
    Pointset,
    Stats,
    /// Large-deviation table over `--runs` seeds.
    Deviation,
}

#[derive(Args)]
pub struct PercolateArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub depth: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "stats")]
    pub emit: Emit,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Suite name, alias or `all`.
    pub suite: String,
    /// Write the report as JSON.
    #[arg(long)]
    pub json: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Spectrum CSV files; repeat to overlay.
    #[arg(long = "curve")]
    pub curves: Vec<PathBuf>,
    /// Dashed bounds from `box,qa` or `box,qa,rho`.
    #[arg(long)]
    pub bounds: Option<String>,
    /// Top of the value axis.
    #[arg(long, default_value_t = 2.0)]
    pub d: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// A check ran and failed; maps to exit code 1.
#[derive(Debug)]
pub struct CheckFailed(pub usize);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use assouad_kit::Error as E;
    if err.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match err.chain().find_map(|e| e.downcast_ref::<E>()) {
        Some(E::CapExceeded { .. } | E::ProductTooLarge { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Dimension(a) => commands::dimension(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Percolate(a) => commands::percolate(a),
        Command::Verify(a) => commands::verify(a),
        Command::Plot(a) => commands::plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
