//! Command-line front end.
//!
//! Exit codes: 0 all checks pass, 2 AB-constraint or branch violation,
//! 3 numerical failure or failed check, 4 parse or configuration error.
//! Flags override the corresponding config fields.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use commands::{CommandOutput, Format};
use config::RunConfig;
use output::{config_hash, sidecar_path, to_json, write_atomic, Envelope, SCHEMA_VERSION, TOOL, TOOL_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONSTRAINT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "dunkl", version, about = "Dunkl-Pauli oscillator with AB flux: spectra, dynamics and oracle checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults apply to omitted fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout if omitted). CSV outputs get a `.json` sidecar.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Ermakov integrator tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized parameter sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Inner/outer indices and energies for n ≤ n_max, l ≤ l_max.
    Spectrum,
    /// Angular eigenpair residuals and orthonormality.
    Angular,
    /// Spinor samples on an (r, φ, t) grid.
    Wavefunction,
    /// Ermakov–Pinney trajectory.
    Ermakov,
    /// Consolidated identity and closed-form checks.
    Verify,
    /// Finite-difference and dense-matrix spectrum comparisons.
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Angular => "angular",
            Command::Wavefunction => "wavefunction",
            Command::Ermakov => "ermakov",
            Command::Verify => "verify",
            Command::Oracle => "oracle",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Wavefunction | Command::Ermakov => Format::Csv,
            _ => Format::Json,
        }
    }

    fn supports_csv(self) -> bool {
        !matches!(self, Command::Verify | Command::Oracle)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ConstraintViolation(_) | Error::Branch(_) | Error::Normalizability(_) | Error::Consistency(_) => {
            EXIT_CONSTRAINT
        }
        Error::Domain(_) | Error::Admissibility(_) | Error::Size(_) | Error::Grid(_) | Error::Profile(_) => EXIT_CONFIG,
        Error::Singularity { .. }
        | Error::Family(_)
        | Error::Coverage(_)
        | Error::QuadratureDegree(_)
        | Error::Convergence { .. } => EXIT_NUMERICAL,
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut cfg = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => return fail(EXIT_CONFIG, e),
        },
        None => RunConfig::default(),
    };
    if let Some(t) = cli.tol {
        cfg.ermakov.tol = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Err(e) = cfg.validate() {
        return fail(exit_code(&e), e);
    }
    let format = match cli.format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Csv) if cli.command.supports_csv() => Format::Csv,
        Some(FormatArg::Csv) => {
            return fail(EXIT_CONFIG, format!("the {} command has no CSV output", cli.command.name()));
        }
        None => cli.command.default_format(),
    };
    let result = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg, format),
        Command::Angular => commands::angular(&cfg, format),
        Command::Wavefunction => commands::wavefunction(&cfg, format),
        Command::Ermakov => commands::ermakov(&cfg, format),
        Command::Verify => commands::verify(&cfg),
        Command::Oracle => commands::oracle(&cfg),
    };
    let out = match result {
        Ok(o) => o,
        Err(e) => return fail(exit_code(&e), e),
    };
    if let Err(e) = emit(&cli, &cfg, out.pass, &out) {
        return fail(EXIT_CONFIG, format!("cannot write output: {e}"));
    }
    if out.pass {
        EXIT_OK
    } else {
        if let Some(failed) = out.report.get("failed") {
            eprintln!("checks failed: {failed}");
        } else {
            eprintln!("checks failed");
        }
        EXIT_NUMERICAL
    }
}

fn emit(cli: &Cli, cfg: &RunConfig, pass: bool, out: &CommandOutput) -> std::io::Result<()> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        tool: TOOL,
        tool_version: TOOL_VERSION,
        command: cli.command.name(),
        config_sha256: config_hash(&cfg.canonical_json()),
        pass,
        report: &out.report,
    };
    let json = to_json(&envelope);
    match (&out.csv, &cli.out) {
        (Some(csv), Some(path)) => {
            write_atomic(path, csv)?;
            write_atomic(&sidecar_path(path), &json)
        }
        (Some(csv), None) => std::io::stdout().lock().write_all(csv.as_bytes()),
        (None, Some(path)) => write_atomic(path, &json),
        (None, None) => std::io::stdout().lock().write_all(json.as_bytes()),
    }
}
