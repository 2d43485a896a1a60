//! `egl`: run verification suites and Hausdorff decisions, print reports.
//!
//! Exit codes: 0 when every check and decision passes, 1 when one fails,
//! 2 for configuration or input errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use egl_core::groupoid::model_catalogue;
use egl_core::report::{
    run_decide, run_verify, DecisionKind, ModelRequest, OutputFormat, ProfileOverrides, RunConfig, RunReport,
};
use egl_core::verify::check_catalogue;

#[derive(Parser)]
#[command(name = "egl", version, about = "Verification suites for elliptic Lie groupoid charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Smooth,
    DoubleCover,
    NormalCrossing,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks on models.
    Verify {
        /// Model name; repeat for several models.
        #[arg(long = "model", required = true)]
        models: Vec<String>,
        /// Base dimension, applied to every model that takes one.
        #[arg(long)]
        dim: Option<usize>,
        /// Number of divisor factors for `caseIV`.
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated check names; all applicable checks when omitted.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// `N` for every check, or `check=N,...`.
        #[arg(long)]
        samples: Option<String>,
        /// Tolerance overrides, `abs_tol=1e-8,subspace_tol=1e-5`; a bare number sets abs_tol.
        #[arg(long)]
        tol: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Record wall-clock time per check (the report is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Decide Hausdorff integrability or the double cover from decision documents.
    Decide {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Decision documents; relative paths fall back to $EGL_FIXTURES.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// List model names.
    ListModels,
    /// List check names.
    ListChecks,
}

fn output_format(f: Format) -> OutputFormat {
    match f {
        Format::Json => OutputFormat::Json,
        Format::Text => OutputFormat::Text,
    }
}

fn parse_samples(s: &str) -> Result<(Option<usize>, BTreeMap<String, usize>), String> {
    if let Ok(n) = s.trim().parse::<usize>() {
        return Ok((Some(n), BTreeMap::new()));
    }
    let mut map = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (check, n) = part.split_once('=').ok_or_else(|| format!("malformed sample count `{part}`"))?;
        let n: usize = n.trim().parse().map_err(|_| format!("malformed sample count `{part}`"))?;
        map.insert(check.trim().to_string(), n);
    }
    Ok((None, map))
}

fn emit(report: &RunReport, format: OutputFormat, out: Option<&PathBuf>) -> ExitCode {
    let text = report.render(format);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            eprint!("{}", report.to_text());
        }
        None => print!("{text}"),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { models, dim, k, checks, seed, samples, tol, out, format, timings } => {
            let mut config = RunConfig::new(
                models.iter().map(|m| ModelRequest::new(m, dim, k)).collect(),
                checks.into_iter().map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect(),
                seed,
            );
            if let Some(s) = samples {
                match parse_samples(&s) {
                    Ok((all, map)) => {
                        config.default_samples_all = all;
                        config.samples = map;
                    }
                    Err(e) => return config_error(e),
                }
            }
            if let Some(t) = tol {
                match ProfileOverrides::parse(&t) {
                    Ok(o) => config.tolerances = o,
                    Err(e) => return config_error(e),
                }
            }
            config.out = out.clone();
            config.format = output_format(format);
            config.timings = timings;
            match run_verify(&config) {
                Ok(report) => emit(&report, config.format, out.as_ref()),
                Err(e) => config_error(e),
            }
        }
        Command::Decide { kind, inputs, out, format } => {
            let kind = match kind {
                Kind::Smooth => DecisionKind::Smooth,
                Kind::DoubleCover => DecisionKind::DoubleCover,
                Kind::NormalCrossing => DecisionKind::NormalCrossing,
            };
            match run_decide(&inputs, kind) {
                Ok(report) => emit(&report, output_format(format), out.as_ref()),
                Err(e) => config_error(e),
            }
        }
        Command::ListModels => {
            for (name, about) in model_catalogue() {
                println!("{name:<18} {about}");
            }
            ExitCode::SUCCESS
        }
        Command::ListChecks => {
            for (name, about) in check_catalogue() {
                println!("{name:<18} {about}");
            }
            ExitCode::SUCCESS
        }
    }
}
