//! The `benford` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 malformed
//! input data, 3 degenerate analysis (singular Benford matrix). Reports go
//! to standard output and diagnostics to standard error.

pub mod input;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use benford_core::search::{DEFAULT_MAX_EXHAUSTIVE_N, DEFAULT_PERMUTATION_SAMPLES};
use benford_core::{
    max_lambda_search, max_permutation_analysis, moments, run_planted_anomaly, run_trials,
    studentized_test, BenfordError, OrderingMode, Sampler, SamplerSpec, ScanConfig, DEFAULT_ALPHA,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::input::{read_input, InputFormat};
use crate::report::{scan_text, simulation_text, AnalyzeReport, MomentsReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl From<BenfordError> for CliError {
    fn from(e: BenfordError) -> Self {
        match e {
            BenfordError::InvalidFrequencies(_) => CliError::Data(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "benford",
    version,
    about = "Benford-matrix analysis of site-visit frequencies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute lambda and test H0: lambda = 0.
    Analyze(AnalyzeArgs),
    /// Rank sites by their leave-one-out effect on lambda and search for the
    /// lambda-maximising removal set.
    Scan(ScanArgs),
    /// Run seeded simulations on synthetic frequency data.
    Simulate(SimulateArgs),
    /// Print the moments of the continuous Benford distribution.
    Moments(OutputArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Canonical,
    Exhaustive,
    Sampled,
}

impl From<OrderArg> for OrderingMode {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Canonical => OrderingMode::Canonical,
            OrderArg::Exhaustive => OrderingMode::ExhaustivePermutations,
            OrderArg::Sampled => OrderingMode::SampledPermutations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Loguniform,
    Uniform,
    Normal,
    Exponential,
    Benford,
    Constant,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub output: OutputFormat,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Frequency table; `-` reads standard input.
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
}

#[derive(Debug, Args)]
pub struct OrderingArgs {
    #[arg(long, value_enum, default_value = "canonical")]
    pub order: OrderArg,
    /// Orderings per site set in sampled mode.
    #[arg(long, default_value_t = DEFAULT_PERMUTATION_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest site count allowed in exhaustive mode.
    #[arg(long, default_value_t = DEFAULT_MAX_EXHAUSTIVE_N)]
    pub max_exhaustive: usize,
}

impl OrderingArgs {
    fn scan_config(&self, depth: usize) -> ScanConfig {
        ScanConfig {
            removal_depth: depth,
            ordering_mode: self.order.into(),
            permutation_sample_count: self.samples,
            seed: self.seed,
            max_exhaustive_n: self.max_exhaustive,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[command(flatten)]
    pub ordering: OrderingArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Maximum number of sites removed at once.
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    #[command(flatten)]
    pub ordering: OrderingArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "loguniform")]
    pub sampler: SamplerArg,
    /// Orders of magnitude for the log-uniform sampler.
    #[arg(long, default_value_t = 4)]
    pub orders: u32,
    #[arg(long, default_value_t = 1.0)]
    pub low: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub high: f64,
    #[arg(long, default_value_t = 500.0)]
    pub mean: f64,
    #[arg(long, default_value_t = 250.0)]
    pub std: f64,
    #[arg(long, default_value_t = 0.01)]
    pub rate: f64,
    /// Count produced by the constant sampler.
    #[arg(long, default_value_t = 1.0)]
    pub value: f64,
    /// Round draws to integers (values below 1 become 1).
    #[arg(long)]
    pub round: bool,
    #[arg(long, default_value_t = 20)]
    pub sites: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Sites per trial replaced by uniform outliers and scored by the
    /// leave-one-out scan.
    #[arg(long, default_value_t = 0)]
    pub planted: usize,
    #[arg(long, default_value_t = 1.0)]
    pub planted_low: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub planted_high: f64,
    #[arg(long, value_enum, default_value = "canonical")]
    pub order: OrderArg,
    #[arg(long, default_value_t = DEFAULT_PERMUTATION_SAMPLES)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl SimulateArgs {
    fn sampler(&self) -> Sampler {
        match self.sampler {
            SamplerArg::Loguniform => Sampler::LogUniform {
                orders_of_magnitude: self.orders,
            },
            SamplerArg::Uniform => Sampler::Uniform {
                low: self.low,
                high: self.high,
            },
            SamplerArg::Normal => Sampler::NormalTruncated {
                mean: self.mean,
                std: self.std,
            },
            SamplerArg::Exponential => Sampler::Exponential { rate: self.rate },
            SamplerArg::Benford => Sampler::ContinuousBenford,
            SamplerArg::Constant => Sampler::Constant { value: self.value },
        }
    }
}

fn emit<T: Serialize>(
    out: &mut dyn Write,
    format: OutputFormat,
    value: &T,
    text: impl FnOnce() -> String,
) -> Result<(), CliError> {
    let rendered = match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(value).expect("report serializes") + "\n"
        }
        OutputFormat::Text => text(),
    };
    out.write_all(rendered.as_bytes())
        .map_err(|e| CliError::Usage(format!("cannot write report: {e}")))
}

fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    check_alpha(args.alpha)?;
    let f = read_input(&args.input.input, args.input.format)?;
    let analysis = max_permutation_analysis(&f, &args.ordering.scan_config(0))?;
    let hypothesis = studentized_test(analysis.lambda, analysis.n, args.alpha)?;
    let report = AnalyzeReport {
        analysis,
        hypothesis,
    };
    emit(out, args.output.output, &report, || report.to_text())?;
    Ok(if report.analysis.degenerate {
        EXIT_DEGENERATE
    } else {
        EXIT_OK
    })
}

pub fn cmd_scan(args: &ScanArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = read_input(&args.input.input, args.input.format)?;
    if f.len() < 3 {
        return Err(CliError::Data(format!(
            "scan needs at least 3 sites, found {}",
            f.len()
        )));
    }
    let result = max_lambda_search(&f, &args.ordering.scan_config(args.depth))?;
    emit(out, args.output.output, &result, || scan_text(&result))?;
    Ok(if result.baseline_lambda.is_infinite() {
        EXIT_DEGENERATE
    } else {
        EXIT_OK
    })
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    check_alpha(args.alpha)?;
    let mut spec = SamplerSpec::new(args.sampler(), args.seed);
    spec.round_to_integer = args.round;
    spec.sampler.validate()?;
    let report = if args.planted == 0 {
        run_trials(&spec, args.sites, args.trials, args.alpha)?
    } else {
        let mut planted = SamplerSpec::new(
            Sampler::Uniform {
                low: args.planted_low,
                high: args.planted_high,
            },
            args.seed,
        );
        planted.round_to_integer = args.round;
        let scan = ScanConfig {
            removal_depth: 1,
            ordering_mode: args.order.into(),
            permutation_sample_count: args.samples,
            seed: args.seed,
            max_exhaustive_n: DEFAULT_MAX_EXHAUSTIVE_N,
        };
        run_planted_anomaly(
            &spec,
            args.sites,
            args.planted,
            &planted,
            args.trials,
            &scan,
            args.alpha,
        )?
    };
    emit(out, args.output.output, &report, || {
        simulation_text(&report)
    })?;
    Ok(EXIT_OK)
}

pub fn cmd_moments(args: &OutputArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = MomentsReport::new(moments());
    emit(out, args.output, &report, || report.to_text())?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Scan(a) => cmd_scan(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Moments(a) => cmd_moments(a, out),
    };
    match result {
        Ok(code) => {
            if code == EXIT_DEGENERATE {
                let _ = writeln!(
                    err,
                    "benford: degenerate analysis (singular Benford matrix)"
                );
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "benford: {e}");
            e.exit_code()
        }
    }
}
