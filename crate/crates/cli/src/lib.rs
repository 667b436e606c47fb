//! The `reqexec` command line: loading model files, the `check` and
//! `metrics` reports, the `run` REPL and `bench` timings. `main.rs` only
//! parses flags and maps results to exit codes.

pub mod bench;
pub mod check;
pub mod repl;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use reqexec_core::{load_model, Diagnostic, LoadOptions, LoadedModel, SourceFile};

/// Exit status for CI: 0 success, 1 model errors, 2 environment errors.
pub const EXIT_OK: u8 = 0;
pub const EXIT_MODEL: u8 = 1;
pub const EXIT_ENV: u8 = 2;

#[derive(Debug)]
pub enum CliError {
    /// The model has errors.
    Model(Vec<Diagnostic>),
    /// Files, ports and the like.
    Env(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Model(_) => EXIT_MODEL,
            CliError::Env(_) => EXIT_ENV,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Model(diags) => {
                for (i, d) in diags.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
            CliError::Env(msg) => write!(f, "error: {msg}"),
        }
    }
}

pub fn read_sources(paths: &[PathBuf]) -> Result<Vec<SourceFile>, CliError> {
    if paths.is_empty() {
        return Err(CliError::Env("no model files given".into()));
    }
    paths
        .iter()
        .map(|p| {
            std::fs::read_to_string(p)
                .map(|text| SourceFile::new(p.display().to_string(), text))
                .map_err(|e| CliError::Env(format!("cannot read {}: {e}", p.display())))
        })
        .collect()
}

pub fn load_files(paths: &[PathBuf], opts: LoadOptions) -> Result<LoadedModel, CliError> {
    let sources = read_sources(paths)?;
    load_model(&sources, opts).map_err(CliError::Model)
}

/// The report name for a set of files: their stems joined with `+`.
pub fn model_name(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| Path::new(p).file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()))
        .collect::<Vec<_>>()
        .join("+")
}
