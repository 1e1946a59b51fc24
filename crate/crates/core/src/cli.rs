//! Command-line front end; `src/bin/meridian.rs` only forwards to [`run`].

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::classifier::classify_meridian;
use crate::config::AnalysisConfig;
use crate::error::GeomError;
use crate::numkit::TolerancePolicy;
use crate::report::{run_analysis, write_csv, write_json};
use crate::verify::{render, run_verify};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_EVAL: i32 = 3;
pub const EXIT_NOT_MERIDIAN: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "meridian",
    version,
    about = "Invariants and semi-parallelity of meridian surfaces in E^4"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every grid point of a config and write a table.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Print the case and semi-parallel branch of a meridian config as JSON.
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in verification groups.
    Verify {
        /// Group name or tag (meridian, immersion, analytic, numeric).
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match cli.command {
        Command::Analyze {
            config,
            out: path,
            format,
        } => analyze(&config, &path, format, err),
        Command::Classify { config } => classify(&config, out, err),
        Command::Verify { filter } => verify(filter.as_deref(), out, err),
    }
}

fn analyze(config: &Path, path: &Path, format: Format, err: &mut dyn Write) -> i32 {
    let analysis = match AnalysisConfig::load(config).and_then(AnalysisConfig::build) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let report = match run_analysis(&analysis) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_EVAL;
        }
    };
    if report.summary.rows_skipped > 0 {
        let _ = writeln!(
            err,
            "warning: skipped {} grid points outside the surface domain",
            report.summary.rows_skipped
        );
    }
    let mut buf = Vec::new();
    let written = match format {
        Format::Csv => write_csv(&report, &mut buf),
        Format::Json => write_json(&report, &mut buf),
    };
    if let Err(e) = written.and_then(|_| std::fs::write(path, &buf)) {
        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
        return EXIT_FAILED;
    }
    EXIT_OK
}

fn classify(config: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let analysis = match AnalysisConfig::load(config).and_then(AnalysisConfig::build) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    match classify_meridian(&analysis.handle, &analysis.grid, &analysis.policy) {
        Ok(result) => match serde_json::to_string_pretty(&result) {
            Ok(text) => {
                let _ = writeln!(out, "{text}");
                EXIT_OK
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_FAILED
            }
        },
        Err(GeomError::NotAMeridian) => {
            let _ = writeln!(err, "error: {}", GeomError::NotAMeridian);
            EXIT_NOT_MERIDIAN
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_EVAL
        }
    }
}

fn verify(filter: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let policy = match TolerancePolicy::default().with_env_overrides() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let Some(results) = run_verify(filter, &policy) else {
        let _ = writeln!(
            err,
            "error: no verification group matches {:?}",
            filter.unwrap_or_default()
        );
        return EXIT_FAILED;
    };
    let _ = write!(out, "{}", render(&results));
    if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
