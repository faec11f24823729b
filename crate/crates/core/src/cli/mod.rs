//! Command-line front end.
//!
//! Arguments parse into an [`ExperimentConfig`], which is validated, run, and
//! rendered as flat records. `--dump-config` prints the config instead of
//! running it; `--config FILE` runs a dumped config.
//!
//! Exit codes: 0 success, 2 usage error, 3 resource guard, 4 numerical
//! non-convergence (records are still written).

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{run, RunOutput};
pub use config::{DRange, Experiment, ExperimentConfig, IntegralKind, MeasureKind, X0Choice};
pub use output::{Format, Record};

use crate::error::Error;
use crate::spaces::ScalarField;
use config::{parse_exponent, parse_rows};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "POLARLAB_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "polarlab", version, about = "Linear polarization constants of l_p^d spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Output encoding.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Run the experiment stored in this JSON file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Print the experiment config as JSON and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,

    /// Add wall-clock time to every record.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Args, Clone)]
pub struct DimArgs {
    /// Single dimension.
    #[arg(long, conflicts_with = "d_range")]
    pub d: Option<usize>,

    /// Inclusive range `A..B`.
    #[arg(long = "d-range")]
    pub d_range: Option<DRange>,

    /// Step the range by doubling.
    #[arg(long)]
    pub geometric: bool,
}

impl DimArgs {
    fn range(&self, default: usize) -> DRange {
        let mut r = match (self.d, self.d_range) {
            (Some(d), _) => DRange::single(d),
            (None, Some(r)) => r,
            (None, None) => DRange::single(default),
        };
        r.geometric = self.geometric;
        r
    }
}

#[derive(Debug, Args, Clone)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Floor the log kernel at `−m` (default: untruncated).
    #[arg(long = "trunc-m")]
    pub trunc_m: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form Hilbert-space constants with the quadrature residual.
    Hilbert {
        #[command(flatten)]
        dims: DimArgs,
        #[arg(long, default_value = "complex")]
        field: ScalarField,
    },
    /// Lower and upper bounds for c(l_p^d) over a dimension sweep.
    Bounds {
        #[arg(long, value_parser = parse_exponent)]
        p: f64,
        #[command(flatten)]
        dims: DimArgs,
        #[arg(long, default_value = "real")]
        field: ScalarField,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, value_enum, default_value = "worst-case")]
        x0: X0Choice,
        /// Candidates for `--x0 best-of-random`.
        #[arg(long, default_value_t = 32)]
        candidates: usize,
        /// Random starts for the dual-sphere search.
        #[arg(long, default_value_t = 16)]
        starts: usize,
    },
    /// Search for ±1 matrices with a small certified polydisc sup-norm.
    Rademacher {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 32)]
        trials: usize,
        /// Enumerate every sign matrix instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Net resolution (default 24n).
        #[arg(long = "net-N")]
        net_n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sign matrices for Monte Carlo moment checks when n·d > 20.
        #[arg(long, default_value_t = 100_000)]
        moment_trials: usize,
    },
    /// Monte Carlo sphere integrals over a dimension sweep.
    Integrals {
        #[arg(long, value_enum)]
        kind: IntegralKind,
        #[arg(long, value_parser = parse_exponent, default_value = "2")]
        p: f64,
        #[command(flatten)]
        dims: DimArgs,
        #[arg(long, default_value = "real")]
        field: ScalarField,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, value_enum, default_value = "uniform")]
        measure: MeasureKind,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// L(d, K) by one-dimensional quadrature.
    #[command(name = "quadrature-L", alias = "quadrature-l")]
    QuadratureL {
        #[command(flatten)]
        dims: DimArgs,
        #[arg(long, default_value = "complex")]
        field: ScalarField,
    },
    /// Dense-grid sup-norm of a product of functionals.
    GridNorm {
        #[arg(long, value_parser = parse_exponent)]
        p: f64,
        #[arg(long, default_value = "real")]
        field: ScalarField,
        /// Functionals as `a,b;c,d` (one row per factor).
        #[arg(long, value_parser = parse_rows_arg)]
        rows: Rows,
        #[arg(long, default_value_t = 4096)]
        resolution: usize,
    },
    /// Exhaustive minimum of the torus sup-norm over sign matrices.
    SignMin {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "net-N")]
        net_n: Option<usize>,
    },
}

impl Command {
    fn into_experiment(self) -> Experiment {
        match self {
            Command::Hilbert { dims, field } => Experiment::Hilbert {
                d: dims.range(2),
                field,
            },
            Command::Bounds {
                p,
                dims,
                field,
                sampling,
                x0,
                candidates,
                starts,
            } => Experiment::Bounds {
                p,
                d: dims.range(2),
                field,
                samples: sampling.samples,
                seed: sampling.seed,
                trunc_m: sampling.trunc_m,
                x0,
                candidates,
                starts,
            },
            Command::Rademacher {
                n,
                d,
                trials,
                exhaustive,
                net_n,
                seed,
                moment_trials,
            } => Experiment::Rademacher {
                n,
                d,
                trials,
                exhaustive,
                net_n,
                seed,
                moment_trials,
            },
            Command::Integrals {
                kind,
                p,
                dims,
                field,
                sampling,
                measure,
            } => Experiment::Integrals {
                kind,
                p,
                d: dims.range(2),
                field,
                samples: sampling.samples,
                seed: sampling.seed,
                trunc_m: sampling.trunc_m,
                measure,
            },
            Command::Oracle { which } => match which {
                OracleCommand::QuadratureL { dims, field } => Experiment::QuadratureL {
                    d: dims.range(2),
                    field,
                },
                OracleCommand::GridNorm {
                    p,
                    field,
                    rows,
                    resolution,
                } => Experiment::GridNorm {
                    p,
                    field,
                    rows: rows.0,
                    resolution,
                },
                OracleCommand::SignMin { n, d, net_n } => Experiment::SignMin { n, d, net_n },
            },
        }
    }
}

/// Functional rows given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Rows(pub Vec<Vec<f64>>);

fn parse_rows_arg(s: &str) -> Result<Rows, String> {
    parse_rows(s).map(Rows)
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => EXIT_RESOURCE,
        Error::QuadratureNonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_USAGE,
    }
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&cli.config, cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        (Some(_), Some(_)) => {
            return Err(Error::InvalidArgument("--config cannot be combined with a command".into()));
        }
        (None, Some(cmd)) => ExperimentConfig {
            experiment: cmd.into_experiment(),
            format: Format::default(),
            out: None,
            timing: false,
        },
        (None, None) => return Err(Error::InvalidArgument("no command given (see --help)".into())),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cli.out.is_some() {
        cfg.out = cli.out;
    }
    cfg.timing |= cli.timing;
    Ok(cfg)
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV}={v} is not a positive integer")))?;
        if n == 0 {
            return Err(Error::InvalidArgument(format!("{THREADS_ENV} must be positive")));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args`, runs the experiment and writes its records; returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let dump = cli.dump_config;
    let result = configure_threads().and_then(|_| build_config(cli)).and_then(|cfg| {
        cfg.validate()?;
        Ok(cfg)
    });
    let cfg = match result {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if dump {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return EXIT_OK;
    }
    let out = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let text = output::render(&out.records, cfg.format);
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    if out.converged {
        EXIT_OK
    } else {
        eprintln!("warning: optimizer did not converge; see converged=false rows");
        EXIT_NONCONVERGENCE
    }
}
