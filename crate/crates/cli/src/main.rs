//! `nce`: command-line experiments for the non-contact electrode simulator.
//!
//! Every command writes its data to files and prints a single-line JSON
//! summary on stdout. Exit codes:
//!
//! | code  | meaning                                              |
//! |-------|------------------------------------------------------|
//! | 0     | success                                              |
//! | 2     | usage error (bad flags, empty lists, bad ranges)     |
//! | 10-19 | validation error (parameters, data too short, ...)   |
//! | 20-29 | I/O, file format or config parse error               |
//! | 30-39 | numeric error (division by zero, unstable model, ...)|

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nce_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "nce",
    version,
    about = "Non-contact electrode front-end experiments"
)]
struct Cli {
    /// Experiment config file (flat TOML). Command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frequency response of the front end, one CSV per source capacitance.
    Bode(BodeArgs),
    /// Mid-band gain against source capacitance.
    GainSweep(GainSweepArgs),
    /// Input-referred noise spectrum from a simulated noise-only recording.
    Noise(NoiseArgs),
    /// Synthetic abdominal recording with ground-truth annotations.
    Synth(SynthArgs),
    /// Fetal QRS extraction from a recorded file.
    Process(ProcessArgs),
    /// Detection scores against reference annotations.
    Eval(EvalArgs),
    /// Input-referred volts per converter code.
    Sensitivity(SensitivityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

impl OnOff {
    fn enabled(self) -> bool {
        self == OnOff::On
    }
}

#[derive(Args, Debug)]
struct BodeArgs {
    /// Lowest sweep frequency, Hz.
    #[arg(long, default_value_t = 0.1)]
    fmin: f64,
    /// Highest sweep frequency, Hz.
    #[arg(long, default_value_t = 10_000.0)]
    fmax: f64,
    /// Number of log-spaced points.
    #[arg(long, default_value_t = 400)]
    points: usize,
    /// Source capacitances in pF (comma separated). Defaults to the config value.
    #[arg(long, value_delimiter = ',')]
    cs: Vec<f64>,
    #[arg(long, value_enum)]
    neutralization: Option<OnOff>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct GainSweepArgs {
    /// Source capacitances in pF (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20,30,50,100")]
    cs_list: Vec<f64>,
    #[arg(long, value_enum, default_value = "on")]
    neutralization: OnOff,
    #[arg(long, default_value = "gain_sweep.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// Source capacitance in pF. Defaults to the config value.
    #[arg(long)]
    cs: Option<f64>,
    #[arg(long, value_enum)]
    neutralization: Option<OnOff>,
    /// Simulated record length, seconds.
    #[arg(long, default_value_t = 300.0)]
    duration: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "noise_psd.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record length, seconds. Overrides the config.
    #[arg(long)]
    duration: Option<f64>,
    /// Source capacitance in pF. Overrides the config.
    #[arg(long)]
    cs: Option<f64>,
    #[arg(long, value_enum)]
    neutralization: Option<OnOff>,
    /// Output record. Truth annotations are written next to it as
    /// `<stem>.fetal.txt` and `<stem>.maternal.txt`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ProcessArgs {
    /// Input record.
    #[arg(long = "in")]
    input: PathBuf,
    /// Detected fetal QRS times.
    #[arg(long)]
    out_annotations: PathBuf,
    /// Directory for the filtered and residual waveforms and maternal
    /// detections. Skipped when absent.
    #[arg(long)]
    artifacts_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Reference (truth) annotations.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Detections to score.
    #[arg(long)]
    det: PathBuf,
    /// Detections from a reference electrode on the same record. Produces a
    /// side-by-side comparison table.
    #[arg(long)]
    paired_reference_run: Option<PathBuf>,
    /// Record for SNR of the scored detections (band-passed, ±50 ms windows).
    #[arg(long)]
    record: Option<PathBuf>,
    /// Matching half-width, seconds.
    #[arg(long, default_value_t = nce_core::eval::DEFAULT_HALF_WIDTH_S)]
    half_width: f64,
    #[arg(long, default_value = "record")]
    record_id: String,
    /// Output CSV; a JSON twin is written with the `.json` extension.
    #[arg(long, default_value = "metrics.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SensitivityArgs {
    /// Converter config file. Takes precedence over `--config`.
    #[arg(long)]
    adc_config: Option<PathBuf>,
    #[arg(long)]
    vref: Option<f64>,
    #[arg(long)]
    pga: Option<f64>,
    #[arg(long)]
    afe: Option<f64>,
    #[arg(long)]
    bits: Option<u8>,
}

/// Failure of a command, carrying enough to pick the exit code.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Parameter { .. } => 10,
                Error::ModelValidity(_) => 11,
                Error::InsufficientData(_) => 12,
                Error::TemplateQuality(_) => 13,
                Error::UndefinedMetric(_) => 14,
                Error::Definition(_) => 15,
                Error::Io { .. } => 20,
                Error::Format(_) => 21,
                Error::Parse { .. } => 22,
                Error::DivisionByZero(_) => 30,
                Error::Unstable { .. } => 31,
                Error::Bounds(_) => 32,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    match commands::run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nce: {e}");
            let summary = serde_json::json!({
                "status": "error",
                "exit_code": e.exit_code(),
                "message": e.to_string(),
                "files": [],
            });
            println!("{summary}");
            ExitCode::from(e.exit_code())
        }
    }
}
