use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use curvlab_cli::{
    classify_case, parse_config, run_gallery, to_csv, to_json, CliError, GalleryConfig, RunOptions, DEFAULT_GALLERY,
};
use curvlab_core::{registry, CHART_KINDS, CLAIMS};

#[derive(Parser)]
#[command(name = "curvlab", version, about = "Pointwise curvature identity auditor")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every audit over every gallery case.
    Verify {
        /// Gallery configuration (defaults to the built-in gallery).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Treat errored cases as failures.
        #[arg(long)]
        strict: bool,
        /// Offset added to every algebraic case seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exactness tolerance; premises use a tenth of it.
        #[arg(long)]
        tol: Option<f64>,
        /// Omit timestamps and timings so reports are byte-reproducible.
        #[arg(long)]
        no_meta: bool,
    },
    /// Print the classification of one gallery case.
    Classify {
        #[arg(long)]
        case: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List audits, claims and chart kinds.
    List,
}

fn load(path: Option<&PathBuf>) -> Result<GalleryConfig, CliError> {
    match path {
        None => parse_config(DEFAULT_GALLERY),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            parse_config(&text)
        }
    }
}

fn check_tol(tol: Option<f64>) -> Result<(), CliError> {
    match tol {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(CliError::Config("--tol must be positive".into())),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Verify { config, out, format, workers, strict, seed, tol, no_meta } => {
            check_tol(tol)?;
            let cfg = load(config.as_ref())?;
            let opts = RunOptions { workers, seed, tol, meta: !no_meta };
            let report = run_gallery(&cfg, &opts)?;
            let text = match format {
                Format::Json => to_json(&report),
                Format::Csv => to_csv(&report)?,
            };
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            let s = &report.summary;
            eprintln!(
                "{} cases: {} passed, {} failed, {} errored; {} audits, {} with premise holding",
                s.cases, s.passed, s.failed, s.errored, s.audits_run, s.premises_held
            );
            for c in &report.cases {
                for a in c.failing_audits() {
                    eprintln!("FAIL {}/{} (max residual {:.3e})", c.name, a.name, a.max_residual());
                }
                if let Some(e) = &c.error {
                    eprintln!("ERROR {}: {e}", c.name);
                }
            }
            Ok(report.exit_code(strict))
        }
        Cmd::Classify { case, config, tol } => {
            check_tol(tol)?;
            let cfg = load(config.as_ref())?;
            let opts = RunOptions { tol, ..RunOptions::default() };
            print!("{}", to_json(&classify_case(&cfg, &case, &opts)?));
            Ok(0)
        }
        Cmd::List => {
            println!("audits:");
            for a in registry() {
                let scope = scope_name(a.scope);
                println!("  {:<18} {:<13} {}", a.name, scope, a.summary);
            }
            println!("claims:");
            for c in CLAIMS {
                println!("  {c}");
            }
            println!("chart kinds:");
            for k in CHART_KINDS {
                println!("  {k}");
            }
            Ok(0)
        }
    }
}

fn scope_name(s: curvlab_core::Scope) -> &'static str {
    match s {
        curvlab_core::Scope::Any => "any",
        curvlab_core::Scope::Hypersurface => "hypersurface",
        curvlab_core::Scope::Chart => "chart",
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("curvlab: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => 2,
                CliError::Io(_) => 1,
            })
        }
    }
}
