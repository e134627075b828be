use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slice_clifford::harness::{
    emit_envelope, parse_grid, parse_tolerance, render_envelope, render_report, run_suite, write_output, DomainKind,
    Format, MapKind, RunConfig, Suite, DEFAULT_SEED,
};
use slice_clifford::series::DEFAULT_TRUNCATION;
use slice_clifford::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "slicecl", version, about = "Seeded numerical checks for slice regular maps of several Clifford variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify {
        /// algebra, stem, representation, regularity, extremal, growth-ball,
        /// growth-domain, gauge or all
        suite: Suite,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        map: Option<MapKind>,
        #[arg(long)]
        domain: Option<DomainKind>,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Override a check threshold, e.g. `--tol representation-formula=1e-9`.
        #[arg(long = "tol", value_name = "CHECK=VALUE")]
        tolerances: Vec<String>,
    },
    /// Write growth-envelope plot data as CSV.
    Envelope {
        #[arg(long, default_value = "koebe")]
        map: MapKind,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// `a,b,c` or `start:stop:count`.
        #[arg(long, default_value = "0:0.9:10")]
        r_grid: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, env = "SLICECL_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    #[arg(long, default_value_t = 0.9)]
    r_max: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            m: self.m,
            n: self.n,
            seed: self.seed,
            truncation: self.truncation,
            r_max: self.r_max,
            out: self.out.clone(),
            ..RunConfig::default()
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("slicecl: {e}");
    match e {
        Error::Config(_) => ExitCode::from(EXIT_USAGE),
        _ => ExitCode::from(EXIT_FAIL),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            suite,
            common,
            samples,
            theta,
            map,
            domain,
            format,
            tolerances,
        } => {
            let mut tol = BTreeMap::new();
            for t in &tolerances {
                match parse_tolerance(t) {
                    Ok((k, v)) => {
                        tol.insert(k, v);
                    }
                    Err(e) => return fail(&e),
                }
            }
            let cfg = RunConfig {
                samples,
                theta,
                map,
                domain,
                format,
                tolerances: tol,
                ..common.config()
            };
            let report = match run_suite(suite, &cfg) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let written = render_report(&report, format).and_then(|b| write_output(&b, cfg.out.as_deref()));
            if let Err(e) = written {
                return fail(&e);
            }
            for r in report.failures() {
                eprintln!("FAIL {}", r.check());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Envelope {
            map,
            theta,
            r_grid,
            common,
        } => {
            let cfg = common.config();
            let rows = parse_grid(&r_grid)
                .and_then(|grid| emit_envelope(map, theta, &grid, &cfg))
                .and_then(|rows| render_envelope(&rows))
                .and_then(|b| write_output(&b, cfg.out.as_deref()));
            match rows {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&e),
            }
        }
    }
}
