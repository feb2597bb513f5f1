//! `rigcap`: certified capacity enclosures from the command line.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 enumeration budget too
//! small for the requested order, 4 internal invariant violation.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rigcap::Dyadic;

#[derive(Parser, Debug)]
#[command(name = "rigcap", version, about = "Certified capacity enclosures for colored Gaussian noise channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate or export the constructed noise spectrum.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Capacity enclosures.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Bound-sequence demonstrations.
    #[command(subcommand)]
    Demo(DemoCmd),
    /// Run an enumerator.
    #[command(subcommand)]
    Enum(EnumCmd),
}

#[derive(Subcommand, Debug)]
enum SpectrumCmd {
    /// Enclosures of N on 2^k + 1 equispaced points.
    Eval(SpectrumArgs),
    /// Band grid (noise ranges per band) usable as `--noise-csv` input.
    ExportGrid(SpectrumArgs),
}

#[derive(Subcommand, Debug)]
enum CapacityCmd {
    /// Water-filling over a noise grid (from CSV or the constructed spectrum).
    Waterfill(WaterfillArgs),
    /// Closed form at the power that floods exactly `[B/2 - f1, B/2 + f1]`.
    Constructed(ConstructedArgs),
    /// Closed form for powers above the full-band threshold.
    Highpower(HighpowerArgs),
}

#[derive(Subcommand, Debug)]
enum DemoCmd {
    /// Lower and certified upper bounds over a sweep of truncation orders.
    Stall(StallArgs),
}

#[derive(Subcommand, Debug)]
enum EnumCmd {
    /// List elements within the step budget.
    Run(EnumArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Bandwidth B in Hz (exact binary decimal).
    #[arg(long, default_value = "4", value_parser = parse_dyadic)]
    pub bandwidth: Dyadic,
    /// First series index; defaults to the smallest n0 with 1/n0 < B/2.
    #[arg(long)]
    pub n0: Option<u64>,
    /// Truncation order M.
    #[arg(long, default_value_t = 16)]
    pub terms: usize,
    /// `halting`, `recursive:NAME` (evens, odds, squares, primes) or `table:PATH`.
    #[arg(long = "enum", default_value = "halting")]
    pub enumerator: String,
    #[arg(long, default_value_t = 64)]
    pub precision_bits: u32,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Grid exponent k.
    #[arg(long, default_value_t = 6)]
    pub grid: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct WaterfillArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Total power P.
    #[arg(long, value_parser = parse_dyadic)]
    pub power: Dyadic,
    /// Noise grid CSV `f_center,delta_f,N_lo,N_hi`; otherwise the constructed spectrum is gridded.
    #[arg(long)]
    pub noise_csv: Option<PathBuf>,
    /// Grid exponent k for the constructed spectrum (2^k bands).
    #[arg(long, default_value_t = 8)]
    pub grid: u32,
    /// Requested enclosure width; defaults to 2^(1 - M).
    #[arg(long, value_parser = parse_dyadic)]
    pub request_width: Option<Dyadic>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ConstructedArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Half-width of the flooded window around B/2, in (0, B/2].
    #[arg(long, value_parser = parse_dyadic)]
    pub f1: Dyadic,
    #[arg(long, value_parser = parse_dyadic)]
    pub request_width: Option<Dyadic>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct HighpowerArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = parse_dyadic)]
    pub power: Dyadic,
    #[arg(long, value_parser = parse_dyadic)]
    pub request_width: Option<Dyadic>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct StallArgs {
    /// `--terms` is the largest order of the sweep.
    #[command(flatten)]
    pub model: ModelArgs,
    /// Smallest order of the sweep.
    #[arg(long, default_value_t = 4)]
    pub min_terms: usize,
    /// Window half-width; defaults to B/4.
    #[arg(long, value_parser = parse_dyadic)]
    pub f1: Option<Dyadic>,
    /// Refuse to run on a decidable set.
    #[arg(long)]
    pub expect_stall: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct EnumArgs {
    #[arg(long = "enum", default_value = "halting")]
    pub enumerator: String,
    /// Stop once at least this many elements are listed (the budget is spent in
    /// fixed chunks); otherwise spend the whole budget.
    #[arg(long)]
    pub terms: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_dyadic(s: &str) -> Result<Dyadic, String> {
    Dyadic::from_decimal_str(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    let result = std::panic::catch_unwind(|| commands::dispatch(cli.command));
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
        Err(_) => ExitCode::from(4),
    }
}
