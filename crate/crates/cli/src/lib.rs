//! Command-line front end. [`run`] is the whole program; the binary only
//! forwards its arguments.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;

pub const EXIT_OK: u8 = 0;
/// Domain, numerical or I/O failure.
pub const EXIT_FAILURE: u8 = 1;
/// Unparseable invocation.
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "sskit", version, about = "Stress-strength reliability for progressively censored Rayleigh samples")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Emit errors as a JSON object on stderr.
    #[arg(long, global = true)]
    json_errors: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a progressively censored Rayleigh sample.
    Simulate(SimulateArgs),
    /// Point estimates of R (joint MLE; with --mu also the known-location estimators).
    Estimate(EstimateArgs),
    /// Confidence intervals for R.
    Interval(IntervalArgs),
    /// Gibbs posterior for R.
    Bayes(BayesArgs),
    /// Monte Carlo study of estimators and intervals.
    Study(StudyArgs),
    /// Analysis of the shipped strength data.
    Analyze(AnalyzeArgs),
    /// One-sample fit and Kolmogorov-Smirnov check of a shipped dataset.
    Gof(GofArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Directory for written artifacts; created if missing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SeedArg {
    #[arg(long, env = "SSKIT_SEED")]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// CSV of the x sample (`index,value`). The scheme is read from the
    /// sidecar `<stem>.scheme.json` unless --xs-scheme is given.
    #[arg(long)]
    xs: PathBuf,
    #[arg(long)]
    xs_scheme: Option<PathBuf>,
    /// CSV of the y sample.
    #[arg(long)]
    ys: PathBuf,
    #[arg(long)]
    ys_scheme: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    lambda: f64,
    /// Units on test.
    #[arg(long = "total", short = 'N')]
    total: usize,
    /// Comma-separated removals R_1..R_n.
    #[arg(long, value_delimiter = ',', required = true)]
    removals: Vec<usize>,
    /// Base name of the written files.
    #[arg(long, default_value = "sample")]
    name: String,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    samples: SampleArgs,
    /// Known common location.
    #[arg(long)]
    mu: Option<f64>,
    /// Prior for the Lindley estimate, `a1,b1,a2,b2` or prior1..prior3.
    #[arg(long, default_value = "prior1")]
    prior: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Method {
    Exact,
    Asymptotic,
    BootP,
    BootT,
    All,
}

#[derive(Args, Debug)]
struct IntervalArgs {
    #[command(flatten)]
    samples: SampleArgs,
    #[arg(long, value_enum, default_value = "all")]
    method: Method,
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    /// Known common location (enables the exact interval for R).
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, default_value_t = 250)]
    nboot: usize,
    /// μ grid points for the exact joint region.
    #[arg(long, default_value_t = 50)]
    grid: usize,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct BayesArgs {
    #[command(flatten)]
    samples: SampleArgs,
    #[arg(long, default_value = "prior1")]
    prior: String,
    /// Total chain length.
    #[arg(long, short = 'T', default_value_t = 1000)]
    t: usize,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Kind {
    Points,
    Intervals,
    Both,
}

#[derive(Args, Debug)]
struct StudyArgs {
    /// JSON study configuration; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    kind: Kind,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    nboot: Option<usize>,
    #[arg(long)]
    gibbs_t: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    /// 100 replications and 100 bootstrap resamples.
    #[arg(long)]
    fast: bool,
    /// Validate the configuration, print it and exit.
    #[arg(long)]
    check: bool,
    /// Suppress per-cell progress on stderr.
    #[arg(long)]
    quiet: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long, default_value = "complete")]
    mode: String,
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    #[arg(long, default_value = "prior1")]
    prior: String,
    #[arg(long, short = 'T', default_value_t = 1000)]
    t: usize,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct GofArgs {
    /// gauge20 or gauge10.
    #[arg(long)]
    dataset: String,
    /// Fit the raw values instead of the values minus 0.75.
    #[arg(long)]
    unshifted: bool,
    /// Check against these parameters instead of the fit (needs --lambda).
    #[arg(long, requires = "lambda")]
    mu: Option<f64>,
    #[arg(long, requires = "mu")]
    lambda: Option<f64>,
    #[command(flatten)]
    output: Output,
}

/// Parse `args` (program name first), run the subcommand and return the
/// process exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_output(args, &mut std::io::stdout())
}

/// [`run`] with reports written to `out` instead of stdout. Diagnostics
/// still go to stderr.
pub fn run_with_output<I, T>(args: I, out: &mut (dyn std::io::Write + Send)) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json_errors = args.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            if json_errors {
                commands::print_json_error("usage", e.to_string().trim_end());
            } else {
                let _ = e.print();
            }
            return EXIT_USAGE;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| commands::dispatch(cli.command, out)),
        Err(e) => Err(sskit_core::Error::Io(format!("worker pool: {e}"))),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if cli.json_errors {
                commands::print_json_error(e.kind(), &e.to_string());
            } else {
                eprintln!("error: {e}");
            }
            EXIT_FAILURE
        }
    }
}
