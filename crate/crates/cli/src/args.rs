//! Flag definitions. Field names double as manifest keys, so a manifest's
//! `config` object replays through the same parser.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "ctrw", version, about = "Repeated-waiting-time CTRW: simulate, analyze, shuffle-test, predict")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate sessions of the model and write an event file
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Step and time ACFs of a tick or event file, with slope fits
    #[command(args_override_self = true)]
    Analyze(AnalyzeArgs),
    /// Time ACF of |dx| for the original series and three intra-session shuffles
    #[command(args_override_self = true)]
    ShuffleTest(ShuffleArgs),
    /// Exact step ACF and Laplace-inverted moments
    #[command(args_override_self = true)]
    Predict(PredictArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Analyze(_) => "analyze",
            Command::ShuffleTest(_) => "shuffle-test",
            Command::Predict(_) => "predict",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Simulate(a) => &a.common,
            Command::Analyze(a) => &a.common,
            Command::ShuffleTest(a) => &a.common,
            Command::Predict(a) => &a.common,
        }
    }
}

/// Run plumbing; none of it affects results, so it stays out of manifests.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Worker threads [default: available cores]
    #[arg(long, env = "CTRW_WORKERS")]
    pub workers: Option<usize>,
    /// Output directory, created if missing
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// JSON manifest or key=value file; explicit flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartArg {
    Stationary,
    BlockBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Auto,
    Ticks,
    Events,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarksArg {
    Absolute,
    Signed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailArg {
    PowerLaw,
    None,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Zeta exponent of the block-length law (must exceed 2)
    #[arg(long)]
    pub rho: f64,
    /// exp:RATE | lognormal:MU:SIGMA | empirical:PATH
    #[arg(long, default_value = "exp:1", value_parser = crate::spec::check_psi)]
    pub psi: String,
    /// gauss:MU:SIGMA | halfgauss:MU:SIGMA | twopoint:A | empirical:PATH
    #[arg(long, default_value = "gauss:0:1", value_parser = crate::spec::check_h)]
    pub h: String,
    /// Events per trajectory; scientific notation accepted
    #[arg(long, default_value = "1e5", value_parser = crate::spec::parse_count)]
    pub n_events: u64,
    /// Independent trajectories, one session each
    #[arg(long, default_value_t = 1)]
    pub n_trajectories: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "stationary")]
    pub start: StartArg,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

/// Reading and preprocessing shared by `analyze` and `shuffle-test`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Tick CSV (timestamp,price) or event CSV written by `simulate`
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: FormatArg,
    /// Session opening time, local HH:MM[:SS]
    #[arg(long, default_value = "09:00")]
    pub session_open: String,
    #[arg(long, default_value = "17:00")]
    pub session_close: String,
    /// Local time minus UTC, hours
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub utc_offset: f64,
    /// Keep Saturday and Sunday ticks
    #[arg(long)]
    pub weekends: bool,
    /// Divide waiting times by the intraday profile [default: on for ticks, off for events]
    #[arg(long, overrides_with = "no_stationarize")]
    pub stationarize: bool,
    #[arg(long, overrides_with = "stationarize")]
    pub no_stationarize: bool,
    /// Seasonal profile bin width, seconds
    #[arg(long, default_value_t = 300.0)]
    pub bin_width: f64,
    /// Bootstrap replicates for standard errors; 0 disables
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    /// Minimum resampling units; sessions are split to reach it
    #[arg(long, default_value_t = 20)]
    pub min_units: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Time-ACF binning and fitting.
#[derive(Debug, Clone, Args, Serialize)]
pub struct TimeArgs {
    /// Lower edge of the first lag bin, seconds
    #[arg(long, default_value_t = 1.0)]
    pub time_min: f64,
    /// Upper edge of the last lag bin, seconds
    #[arg(long, default_value_t = 1778.2794100389228)]
    pub time_max: f64,
    #[arg(long, default_value_t = 12)]
    pub bins_per_decade: usize,
    #[arg(long, default_value_t = 10.0)]
    pub time_fit_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub time_fit_max: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Concatenate sessions before the step ACF [default: on for ticks, off for events]
    #[arg(long, overrides_with = "no_join")]
    pub join: bool,
    #[arg(long, overrides_with = "join")]
    pub no_join: bool,
    #[arg(long, default_value_t = 1000)]
    pub max_lag: usize,
    #[arg(long, default_value_t = 10.0)]
    pub step_fit_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub step_fit_max: f64,
    /// Log-spaced step lags per decade used in the fit; 0 keeps every lag
    #[arg(long, default_value_t = 20)]
    pub fit_per_decade: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub time: TimeArgs,
    #[arg(long, value_enum, default_value = "absolute")]
    pub marks: MarksArg,
    /// End fits at the first bin not exceeding this many standard errors; 0 disables
    #[arg(long, default_value_t = 0.0)]
    pub noise_floor: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ShuffleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub time: TimeArgs,
    /// End fits at the first bin not exceeding this many standard errors; 0 disables
    #[arg(long, default_value_t = 3.0)]
    pub noise_floor: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value = "exp:1", value_parser = crate::spec::check_psi)]
    pub psi: String,
    #[arg(long, default_value = "gauss:0:1", value_parser = crate::spec::check_h)]
    pub h: String,
    /// Largest lag of the exact step ACF
    #[arg(long, default_value_t = 1000)]
    pub max_lag: u64,
    /// Moment grid in seconds: first point, last point, points per decade
    #[arg(long, default_value_t = 1.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 100.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 10)]
    pub t_per_decade: usize,
    /// Tail treatment of the truncated Laplace sums
    #[arg(long, value_enum, default_value = "power-law")]
    pub tail: TailArg,
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[arg(long, default_value = "4194304", value_parser = crate::spec::parse_count)]
    pub nu_max: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}
