//! `ptwell`: spectra, eigenstates, series and metrics of the PT-symmetric
//! two-delta square well.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptwell::acceptance::CRITERIA;
use ptwell::perturbation::{ShiftSign, Z_ORDER};
use serde::Serialize;
use serde_json::json;

use commands::SeriesKind;
use output::{emit, error_record, Format, RunManifest};

#[derive(Parser, Debug)]
#[command(
    name = "ptwell",
    version,
    about = "PT-symmetric square well with two imaginary delta interactions"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write `<command>.<ext>` here instead of printing to stdout.
    #[arg(long, env = "PTWELL_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real levels kappa_n, optionally with complex pairs or over a sweep in xi.
    Spectrum(SpectrumArgs),
    /// One eigenfunction sampled on a uniform grid.
    Wavefunction(WavefunctionArgs),
    /// Coupling at which the first pair of real levels merges.
    Critical(CriticalArgs),
    /// Unavoided crossings at a = 1/2.
    Crossings(CrossingsArgs),
    /// Exact rational weak-coupling series.
    Series(SeriesArgs),
    /// Biorthogonal system and metric for the first N levels.
    Metric(MetricArgs),
    /// Eigenvalues of the Hamiltonian in the square-well sine basis.
    Oracle(OracleArgs),
    /// Runs the reproduction criteria and prints a pass/fail table.
    Verify(VerifyArgs),
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[arg(long, value_parser = finite)]
    a: f64,
    #[arg(long, value_parser = finite, required_unless_present = "sweep_xi")]
    xi: Option<f64>,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    /// Include complex-conjugate pairs instead of failing on them.
    #[arg(long)]
    allow_complex: bool,
    /// Inclusive grid `lo:hi:step`, evaluated in parallel.
    #[arg(long, conflicts_with = "xi")]
    sweep_xi: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct WavefunctionArgs {
    #[arg(long, value_parser = finite)]
    a: f64,
    #[arg(long, value_parser = finite)]
    xi: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 201)]
    grid_points: usize,
}

#[derive(Args, Debug, Serialize)]
struct CriticalArgs {
    #[arg(long, value_parser = finite)]
    a: f64,
    /// Number of lowest levels watched for a merger.
    #[arg(long, default_value_t = 10)]
    window: usize,
}

#[derive(Args, Debug, Serialize)]
struct CrossingsArgs {
    #[arg(long, default_value_t = 3)]
    m_max: u32,
    /// Distance in xi at which the separation is checked.
    #[arg(long, value_parser = finite, default_value = "0.001")]
    offset: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Shift {
    /// `rho = xi / kappa` on the branch.
    Minus,
    /// The substitution that reproduces the reference tables.
    Plus,
}

#[derive(Args, Debug, Serialize)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    #[serde(serialize_with = "kind_name")]
    kind: SeriesKind,
    #[arg(long, default_value_t = Z_ORDER)]
    order: u32,
    /// Sign in `rho^2 = 4 lambda^2 mu^2 / (1 -+ lambda z)^2` for `matrix` and `tan`.
    #[arg(long, value_enum, default_value = "plus")]
    shift: Shift,
}

fn kind_name<S: serde::Serializer>(k: &SeriesKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(
        k.to_possible_value()
            .expect("no skipped variants")
            .get_name(),
    )
}

#[derive(Args, Debug, Serialize)]
struct MetricArgs {
    #[arg(long, value_parser = finite)]
    a: f64,
    #[arg(long, value_parser = finite)]
    xi: f64,
    #[arg(long = "N", alias = "n", default_value_t = 8)]
    n: usize,
    /// Comma-separated positive weights, one per level; all ones by default.
    #[arg(long, value_delimiter = ',', value_parser = finite)]
    weights: Option<Vec<f64>>,
    /// Square-well states used for the separable form and the cutoff scan.
    #[arg(long, default_value_t = 40)]
    basis: usize,
    #[arg(long, value_parser = finite, default_value = "0.001")]
    cutoff_tol: f64,
}

#[derive(Args, Debug, Serialize)]
struct OracleArgs {
    #[arg(long, value_parser = finite)]
    a: f64,
    #[arg(long, value_parser = finite)]
    xi: f64,
    #[arg(long = "M", alias = "m", default_value_t = 512)]
    m: usize,
    #[arg(long, default_value_t = 8)]
    count: usize,
    /// Also diagonalize at M/2 and report `2 E(M) - E(M/2)`.
    #[arg(long)]
    richardson: bool,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Comma-separated criterion numbers; all by default.
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<u8>>,
}

fn manifest_for(command: &Command) -> RunManifest {
    use commands::*;
    let (name, params, tol) = match command {
        Command::Spectrum(a) => ("spectrum", json!(a), SPECTRUM_TOLERANCES),
        Command::Wavefunction(a) => ("wavefunction", json!(a), WAVEFUNCTION_TOLERANCES),
        Command::Critical(a) => ("critical", json!(a), CRITICAL_TOLERANCES),
        Command::Crossings(a) => ("crossings", json!(a), CROSSING_TOLERANCES),
        Command::Series(a) => ("series", json!(a), &[][..]),
        Command::Metric(a) => ("metric", json!(a), METRIC_TOLERANCES),
        Command::Oracle(a) => ("oracle", json!(a), ORACLE_TOLERANCES),
        Command::Verify(a) => ("verify", json!(a), VERIFY_TOLERANCES),
    };
    RunManifest::new(name, params, tol)
}

enum Failure {
    Compute(ptwell::Error),
    Usage(String),
}

impl From<ptwell::Error> for Failure {
    fn from(e: ptwell::Error) -> Self {
        Self::Compute(e)
    }
}

fn run(command: &Command) -> Result<output::Outcome, Failure> {
    Ok(match command {
        Command::Spectrum(a) => match (&a.sweep_xi, a.xi) {
            (Some(spec), _) => {
                let xis = commands::parse_sweep(spec).map_err(Failure::Usage)?;
                commands::spectrum_sweep(a.a, &xis, a.n_max, a.allow_complex)
            }
            (None, Some(xi)) => commands::spectrum(a.a, xi, a.n_max, a.allow_complex)?,
            (None, None) => {
                return Err(Failure::Usage(
                    "either --xi or --sweep-xi is required".into(),
                ))
            }
        },
        Command::Wavefunction(a) => {
            if a.n == 0 {
                return Err(Failure::Usage("--n counts from 1".into()));
            }
            commands::wavefunction(a.a, a.xi, a.n, a.grid_points)?
        }
        Command::Critical(a) => commands::critical(a.a, a.window)?,
        Command::Crossings(a) => commands::crossings(a.m_max, a.offset)?,
        Command::Series(a) => {
            let shift = match a.shift {
                Shift::Minus => ShiftSign::Minus,
                Shift::Plus => ShiftSign::Plus,
            };
            commands::series(a.kind, a.order, shift)?
        }
        Command::Metric(a) => commands::metric(&commands::MetricArgs {
            a: a.a,
            xi: a.xi,
            n: a.n,
            weights: a.weights.clone(),
            basis: a.basis,
            cutoff_tol: a.cutoff_tol,
        })?,
        Command::Oracle(a) => commands::oracle(a.a, a.xi, a.m, a.count, a.richardson)?,
        Command::Verify(a) => {
            let ids = a.criteria.clone().unwrap_or_else(|| CRITERIA.to_vec());
            let (outcome, reports) = commands::verify(&ids)?;
            for r in &reports {
                eprintln!("{}", r.summary_line());
                for c in r.failures() {
                    eprintln!("    {} = {:e}, required {}", c.name, c.value, c.bound);
                }
            }
            outcome
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let manifest = manifest_for(&cli.command);
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(Failure::Compute(e)) => {
            eprintln!("{}", error_record(&manifest, e.kind(), &e.to_string()));
            return ExitCode::from(2);
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{}", error_record(&manifest, "usage", &msg));
            return ExitCode::from(2);
        }
    };
    match emit(&manifest, &outcome, cli.format, cli.out_dir.as_deref()) {
        Ok(Some(path)) => eprintln!("wrote {}", path.display()),
        Ok(None) => {}
        Err(e) => {
            eprintln!("{}", error_record(&manifest, "io", &e.to_string()));
            return ExitCode::from(2);
        }
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "{}",
            error_record(
                &manifest,
                "tolerance",
                "one or more requested computations failed or missed their tolerance"
            )
        );
        ExitCode::from(1)
    }
}
