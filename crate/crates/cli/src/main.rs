//! `bmdiam`: bounds, simulations and checks for the expected diameter of
//! planar Brownian motion.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use brownian_diameter::analytic::{self, SeriesControl};
use brownian_diameter::mc::{self, EstimatorConfig, Functional};
use brownian_diameter::path::{sample_path, PathConfig};
use brownian_diameter::verify::{self, Mode};
use brownian_diameter::{Error, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "bmdiam", version, about = "Expected diameter of planar Brownian motion")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text, global = true)]
    format: FormatArg,

    /// Write results to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads [default: all cores].
    #[arg(long, env = "BMDIAM_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    /// Stop the density series once the next term is below this.
    #[arg(long, default_value_t = SeriesControl::default().tail_tolerance)]
    series_tolerance: f64,

    /// Maximum number of series terms.
    #[arg(long, default_value_t = SeriesControl::default().k_max)]
    series_terms: usize,
}

impl SeriesArgs {
    fn control(&self) -> SeriesControl {
        SeriesControl { tail_tolerance: self.series_tolerance, k_max: self.series_terms }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every analytic bound, optionally with a Monte Carlo estimate of E d₁.
    Bounds {
        #[command(flatten)]
        series: SeriesArgs,

        /// Attach a Monte Carlo estimate from this many paths.
        #[arg(long)]
        paths: Option<u64>,

        #[arg(long, default_value = "1024,4096,16384", value_delimiter = ',')]
        steps: Vec<usize>,

        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Monte Carlo estimates per step level, with the per-sample audit.
    Simulate {
        #[arg(long, default_value_t = 100_000)]
        paths: u64,

        /// Step levels, strictly increasing powers of two.
        #[arg(long, default_value = "1024,4096,16384", value_delimiter = ',')]
        steps: Vec<usize>,

        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,

        /// Any of d, l, a, r, m, d2, l2 (or their long names).
        #[arg(long, default_value = "d,l,a,r", value_delimiter = ',')]
        functionals: Vec<Functional>,
    },
    /// Tabulate the range density.
    Density {
        #[command(flatten)]
        series: SeriesArgs,

        #[arg(long, default_value_t = analytic::R_MIN, allow_negative_numbers = true)]
        r_min: f64,

        #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
        r_max: f64,

        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// The second moment of the hull perimeter.
    Integrate {
        #[arg(long, default_value_t = analytic::PERIMETER_SQ_TOLERANCE, allow_negative_numbers = true)]
        tolerance: f64,
    },
    /// Maximise the lower-bound gain over (a, h).
    Optimize,
    /// Run the acceptance criteria.
    Verify {
        /// Headline estimate at 10⁵ paths with a widened interval.
        #[arg(long)]
        quick: bool,
    },
    /// Dump one sampled path as t, x, y.
    Path {
        #[arg(long, default_value_t = 1024)]
        steps: usize,

        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,

        #[arg(long, default_value_t = 0)]
        replicate: u64,
    },
}

/// Exit codes.
const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;

#[derive(Debug)]
enum Failure {
    /// Output was produced but a check did not pass.
    Check(String),
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => EXIT_FAILED,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(e) => match e {
                Error::Convergence(_) => EXIT_CONVERGENCE,
                Error::SandwichViolation { .. } | Error::Ordering(_) => EXIT_FAILED,
                Error::Domain(_) | Error::Config(_) => EXIT_USAGE,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Check(m) | Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
        FormatArg::Text => Format::Text,
    };

    let (report, check) = match cli.command {
        Command::Bounds { series, paths, steps, seed } => {
            let mc = match paths {
                Some(n) => {
                    let cfg = EstimatorConfig::new(n, steps, seed, vec![Functional::Diameter]);
                    let run = mc::simulate(&cfg)?;
                    run.finest(Functional::Diameter).cloned()
                }
                None => None,
            };
            (Report::Bounds(analytic::bounds_report(&series.control(), mc)?), None)
        }
        Command::Simulate { paths, steps, seed, functionals } => {
            let run = mc::simulate(&EstimatorConfig::new(paths, steps, seed, functionals))?;
            let check = (run.audit.total_violations() > 0).then(|| {
                let v = run.audit.first_violation.expect("a violation was counted");
                format!(
                    "{} per-sample violations; first: {} at seed {}, replicate {}, n_steps {}",
                    run.audit.total_violations(),
                    v.kind,
                    run.audit.seed,
                    v.replicate,
                    v.n_steps
                )
            });
            (Report::Simulation(run), check)
        }
        Command::Density { series, r_min, r_max, points } => {
            if points == 0 {
                return Err(Failure::Usage("--points must be at least 1".into()));
            }
            if r_max.is_nan() || r_min.is_nan() || r_max < r_min {
                return Err(Failure::Usage(format!("--r-max {r_max} is below --r-min {r_min}")));
            }
            let ctl = series.control();
            ctl.validate()?;
            let step = if points > 1 { (r_max - r_min) / (points - 1) as f64 } else { 0.0 };
            let rows = (0..points)
                .map(|k| {
                    let r = if k + 1 == points { r_max.max(r_min) } else { r_min + k as f64 * step };
                    analytic::feller_density(r, &ctl).map(|f| (r, f))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (Report::Density(rows), None)
        }
        Command::Integrate { tolerance } => (Report::Integral(analytic::perimeter_sq_integral(tolerance)?), None),
        Command::Optimize => {
            let opt = analytic::optimize_g();
            (Report::Optimum { optimum: opt, lower_bound: analytic::lower_bound_chain() }, None)
        }
        Command::Verify { quick } => {
            let mode = if quick { Mode::Quick } else { Mode::Full };
            let outcomes = verify::run_all(mode);
            let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
            let check = (!failed.is_empty()).then(|| format!("criteria failed: {failed:?}"));
            (Report::Verify(outcomes), check)
        }
        Command::Path { steps, seed, replicate } => {
            (Report::Path(sample_path(&PathConfig::new(steps, seed, replicate))?), None)
        }
    };

    let rendered = report.render(format).map_err(|e| Failure::Usage(e.to_string()))?;
    match &cli.output {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    match check {
        Some(msg) => Err(Failure::Check(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bmdiam: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
