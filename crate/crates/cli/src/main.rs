//! `conespec`: degrees of balanced homogeneous harmonic maps on 2-dimensional cones.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use conespec::conemap::{conemap_count, scan_degrees_conemap, singular_conemap};
use conespec::euclid::{eigen_curves, scan_all_degrees};
use conespec::format::{
    curves_csv, eigenfunction_csv, to_json, EndpointRecord, GraphFile, KPodReport, OracleReport, PHarmonicReport,
    SingularRecord, SpectrumReport, VerifyReport,
};
use conespec::kpod::{balanced_kpod_exists, cycle_order, harmonic_kpod_degrees, p_harmonic_degree, p_harmonic_kpod_bound};
use conespec::oracle::{oracle_degrees, oracle_eigenfunctions, DEFAULT_SEED};
use conespec::{ConeGraph64, Error, ScanConfig64};

const VERIFY_MISMATCH: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "conespec", version, about = "Admissible degrees of balanced homogeneous harmonic maps on cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Graph description in JSON.
    input: PathBuf,

    /// Read every angle in degrees instead of radians.
    #[arg(long)]
    degrees: bool,

    /// Accept edges with angle at least pi (only the k-pod analysis uses them).
    #[arg(long)]
    allow_wide_angles: bool,

    /// Write the result here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Euclidean degrees in (0, alpha-max], including singular degrees.
    Scan {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, default_value_t = 3.0)]
        alpha_max: f64,
        /// Bisection tolerance on alpha.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Relative zero band for kernels and signatures.
        #[arg(long, default_value_t = 1e-9)]
        kernel_tol: f64,
        /// Distance kept from singular degrees while scanning.
        #[arg(long, default_value_t = 1e-6)]
        guard: f64,
    },
    /// Compare the scan against the metric-graph oracle; exit 1 on mismatch.
    Verify {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, default_value_t = 3.0)]
        alpha_max: f64,
        /// Segments per edge of the oracle mesh.
        #[arg(long, default_value_t = 512)]
        m: usize,
        /// Largest accepted difference between paired degrees.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Multiplies every angle seen by the oracle (fault injection).
        #[arg(long, hide = true, default_value_t = 1.0)]
        oracle_theta_scale: f64,
    },
    /// CSV of the sorted eigenvalues of the degree matrix on [a, b].
    Curves {
        #[command(flatten)]
        io: InputArgs,
        a: f64,
        b: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Degrees of maps into the cone over the same graph with angles phi.
    Conemap {
        #[command(flatten)]
        io: InputArgs,
        /// Defaults to the whole interval (0, pi/theta_max).
        #[arg(long)]
        alpha_max: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Grid resolution of the sign-condition searches.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Degrees of maps from a cycle cone into a k-pod.
    Kpod {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, default_value_t = 8)]
        visits_max: usize,
    },
    /// The p-harmonic degree on a sector and the k-pod bound.
    Pharmonic {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2.0 * std::f64::consts::PI / 3.0)]
        theta0: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Metric-graph eigenvalues and degrees with error estimates.
    Oracle {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, default_value_t = 3.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 512)]
        m: usize,
        /// Index of an eigenfunction to export (0 is the constant mode).
        #[arg(long, requires = "csv")]
        eigenfunction: Option<usize>,
        /// Destination of the eigenfunction CSV.
        #[arg(long, requires = "eigenfunction")]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

fn load(io: &InputArgs) -> Result<ConeGraph64, Failure> {
    let text = fs::read_to_string(&io.input).map_err(|e| Failure::Io(format!("{}: {e}", io.input.display())))?;
    Ok(GraphFile::parse(&text)?.to_graph(io.degrees, io.allow_wide_angles)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn scan_config(alpha_max: f64, tol: f64, kernel_tol: f64, guard: f64) -> Result<ScanConfig64, Failure> {
    for (name, v) in [("alpha-max", alpha_max), ("tol", tol), ("kernel-tol", kernel_tol), ("guard", guard)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("--{name} must be positive, got {v}")).into());
        }
    }
    let mut cfg = ScanConfig64::new(alpha_max);
    cfg.alpha_tol = tol;
    cfg.kernel_tol = kernel_tol;
    cfg.guard = guard;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Scan {
            io,
            alpha_max,
            tol,
            kernel_tol,
            guard,
        } => {
            let g = load(&io)?;
            let cfg = scan_config(alpha_max, tol, kernel_tol, guard)?;
            let (spectrum, reports) = scan_all_degrees(&g, &cfg)?;
            let mut report = SpectrumReport::new(&g, &spectrum);
            report.singular = reports.iter().map(|r| SingularRecord::from_report(&g, r)).collect();
            emit(io.output.as_deref(), &to_json(&report))
        }
        Command::Verify {
            io,
            alpha_max,
            m,
            tol,
            oracle_theta_scale,
        } => {
            let g = load(&io)?;
            let cfg = scan_config(alpha_max, 1e-10, 1e-9, 1e-6)?;
            let (spectrum, _) = scan_all_degrees(&g, &cfg)?;
            let probe = if oracle_theta_scale == 1.0 {
                g.clone()
            } else {
                g.map_thetas(|_, t| t * oracle_theta_scale)?
            };
            let oracle = oracle_degrees(&probe, m, alpha_max + tol)?;
            let scan: Vec<_> = spectrum
                .entries
                .iter()
                .map(|e| (e.alpha, e.multiplicity, e.kind))
                .collect();
            let orc: Vec<_> = oracle.degrees.iter().map(|d| (d.alpha, d.multiplicity)).collect();
            let report = VerifyReport::build(&scan, &orc, m, alpha_max, tol);
            emit(io.output.as_deref(), &to_json(&report))?;
            if report.matched {
                Ok(())
            } else {
                Err(Failure::Mismatch)
            }
        }
        Command::Curves { io, a, b, samples } => {
            let g = load(&io)?;
            let curves = eigen_curves(&g, a, b, samples)?;
            emit(io.output.as_deref(), &curves_csv(&curves))
        }
        Command::Conemap {
            io,
            alpha_max,
            tol,
            resolution,
        } => {
            let g = load(&io)?;
            let top = std::f64::consts::PI / g.theta_max();
            let mut cfg = scan_config(alpha_max.unwrap_or(top), tol, 1e-9, 1e-6)?;
            cfg.nonneg_resolution = resolution;
            let spectrum = scan_degrees_conemap(&g, &cfg)?;
            let endpoint = singular_conemap(&g, resolution)?;
            let mut report = SpectrumReport::new(&g, &spectrum);
            report.endpoint = Some(EndpointRecord::from_report(&g, &endpoint));
            report.count = Some(conemap_count(&g)?);
            emit(io.output.as_deref(), &to_json(&report))
        }
        Command::Kpod { io, visits_max } => {
            let g = load(&io)?;
            let order = cycle_order(&g)?;
            let degrees = harmonic_kpod_degrees(&g, visits_max)?;
            let certificates = degrees
                .iter()
                .map(|d| balanced_kpod_exists(&g, d.alpha))
                .collect::<Result<Vec<_>, _>>()?;
            let report = KPodReport {
                total_angle: order.total,
                degrees,
                certificates,
            };
            emit(io.output.as_deref(), &to_json(&report))
        }
        Command::Pharmonic { p, theta0, output } => {
            let report = PHarmonicReport {
                p,
                theta0,
                alpha: p_harmonic_degree(theta0, p)?,
                kpod_bound: p_harmonic_kpod_bound(p)?,
            };
            emit(output.as_deref(), &to_json(&report))
        }
        Command::Oracle {
            io,
            alpha_max,
            m,
            eigenfunction,
            csv,
        } => {
            let g = load(&io)?;
            let result = match eigenfunction {
                Some(_) => oracle_eigenfunctions(&g, m, alpha_max, DEFAULT_SEED)?,
                None => oracle_degrees(&g, m, alpha_max)?,
            };
            if let (Some(k), Some(path)) = (eigenfunction, csv.as_deref()) {
                if k >= result.eigenfunctions.len() {
                    return Err(Error::InvalidArgument(format!(
                        "eigenfunction {k} requested, {} available",
                        result.eigenfunctions.len()
                    ))
                    .into());
                }
                emit(Some(path), &eigenfunction_csv(&result.samples(k)))?;
            }
            emit(io.output.as_deref(), &to_json(&OracleReport::new(&result, alpha_max)))
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("CONESPEC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("CONESPEC_THREADS = {v:?} is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Io(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(VERIFY_MISMATCH),
        Err(failure) => {
            let (kind, message, code) = match failure {
                Failure::Core(e) => (e.kind(), e.to_string(), e.exit_code()),
                Failure::Io(msg) => ("io", msg, 2),
                Failure::Mismatch => unreachable!("handled above"),
            };
            let report = ErrorReport { error: kind, message };
            eprintln!("{}", serde_json::to_string(&report).expect("error report serializes"));
            ExitCode::from(code as u8)
        }
    }
}
