//! Command-line front end of the `cyclo-drf` binary.
//!
//! Every subcommand reads a TOML scenario (`--config PATH` or a built-in
//! `--scenario NAME`) and writes CSV to `--out PATH` or standard output.
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure or
//! non-convergence.

pub mod config;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{parse, ConfigError, Scenario};
pub use run::{compute_rows, format_rows, oracle_gap, spectra_csv, Row, RunError, CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cyclo-drf", version, about = "Distortion-rate functions of cyclostationary Gaussian sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distortion-rate curve for the methods listed in the scenario
    /// (default `drf`). Columns: rate_bits,distortion,theta,method,M,converged.
    Drf(CommonArgs),
    /// The DRF together with its polyphase lower bound.
    Bound(CommonArgs),
    /// Compare the DRF against the Karhunen-Loève oracle and report the
    /// largest relative gap; fails when it exceeds `numeric.verify_tol`.
    Verify(CommonArgs),
    /// Spectral profile on the φ grid: phi, lambda_1..lambda_M (ascending),
    /// trace; PAM adds f and weighted_spectrum. Sampled coding sources give
    /// fs,f,psd,response,folded_j.
    Spectra(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long, required_unless_present = "scenario", conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Built-in scenario.
    #[arg(long, value_enum)]
    scenario: Option<Builtin>,
    /// Output CSV path; defaults to `output.path` or standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit non-converged rows (flagged `false`) instead of failing.
    #[arg(long)]
    allow_nonconverged: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Builtin {
    /// PAM of a flat source at three symbol rates against the baseband DRF.
    Fig4,
    /// AM with a carrier close to the band edge, with its bounds.
    Fig6,
}

impl Builtin {
    pub fn text(self) -> &'static str {
        match self {
            Builtin::Fig4 => include_str!("../../scenarios/fig4.toml"),
            Builtin::Fig6 => include_str!("../../scenarios/fig6.toml"),
        }
    }
}

/// Run the CLI on `args` (including the program name); returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(RunError::Config(e)) => {
            eprintln!("{e}");
            EXIT_CONFIG
        }
        Err(e @ RunError::Numeric(_)) => {
            eprintln!("{e}");
            EXIT_NUMERIC
        }
    }
}

fn load(args: &CommonArgs) -> Result<Scenario, RunError> {
    let text = match (&args.config, args.scenario) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|e| ConfigError {
            key: "--config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?,
        (None, Some(b)) => b.text().to_string(),
        (None, None) => unreachable!("clap requires one of them"),
    };
    Ok(parse(&text)?)
}

fn emit(args: &CommonArgs, scenario: &Scenario, text: &str) -> Result<(), RunError> {
    let path = args
        .out
        .clone()
        .or_else(|| scenario.output.path.as_ref().map(PathBuf::from));
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| {
            RunError::Config(ConfigError {
                key: "--out".into(),
                message: format!("cannot write {}: {e}", p.display()),
            })
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_converged(args: &CommonArgs, rows: &[Row]) -> Result<(), RunError> {
    if !args.allow_nonconverged {
        if let Some(r) = rows.iter().find(|r| !r.converged) {
            return Err(RunError::Numeric(crate::DrfError::Divergent(format!(
                "`{}` did not converge at rate {} (M = {}); rerun with --allow-nonconverged to keep it",
                r.method, r.rate, r.m
            ))));
        }
    }
    Ok(())
}

fn execute(command: Command) -> Result<(), RunError> {
    match command {
        Command::Drf(args) => {
            let s = load(&args)?;
            let rows = compute_rows(&s, &s.methods())?;
            check_converged(&args, &rows)?;
            emit(&args, &s, &format_rows(&rows))
        }
        Command::Bound(args) => {
            let s = load(&args)?;
            let methods = vec!["drf".to_string(), "lower_bound".to_string()];
            ensure_allowed(&s, &methods)?;
            let rows = compute_rows(&s, &methods)?;
            check_converged(&args, &rows)?;
            emit(&args, &s, &format_rows(&rows))
        }
        Command::Verify(args) => {
            let s = load(&args)?;
            let methods = vec!["drf".to_string(), "oracle".to_string()];
            ensure_allowed(&s, &methods)?;
            let rows = compute_rows(&s, &methods)?;
            check_converged(&args, &rows)?;
            let gap = oracle_gap(&rows).unwrap_or(0.0);
            let tol = s.numeric.verify_tol;
            println!("max relative oracle gap: {gap:.3e} (tolerance {tol:e})");
            if args.out.is_some() || s.output.path.is_some() {
                emit(&args, &s, &format_rows(&rows))?;
            }
            if gap <= tol {
                Ok(())
            } else {
                Err(RunError::Numeric(crate::DrfError::Divergent(format!(
                    "oracle gap {gap:e} exceeds {tol:e}"
                ))))
            }
        }
        Command::Spectra(args) => {
            let s = load(&args)?;
            let text = spectra_csv(&s)?;
            emit(&args, &s, &text)
        }
    }
}

fn ensure_allowed(s: &Scenario, methods: &[String]) -> Result<(), RunError> {
    let allowed = config::allowed_methods(s.source.kind);
    for m in methods {
        if !allowed.contains(&m.as_str()) {
            return Err(RunError::Config(ConfigError {
                key: "source.kind".into(),
                message: format!("this subcommand needs `{m}`, which the source does not support"),
            }));
        }
    }
    Ok(())
}
