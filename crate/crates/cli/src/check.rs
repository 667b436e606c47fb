//! `reqexec check`: load diagnostics, one warning per hook, optionally the
//! rule trace of every operation, and the executability summary.

use std::fmt::Write;
use std::path::PathBuf;

use reqexec_core::decompose::analyze_executability;
use reqexec_core::{Diagnostic, LoadOptions};

use crate::{load_files, CliError};

pub struct CheckOptions {
    pub include_crud: bool,
    pub trace: bool,
}

/// The text printed for a model that loads. Errors come back as
/// `CliError::Model`.
pub fn check(paths: &[PathBuf], opts: &CheckOptions) -> Result<String, CliError> {
    let loaded = load_files(paths, LoadOptions { include_crud: opts.include_crud })?;
    let single = (paths.len() == 1).then(|| paths[0].display().to_string());
    let mut out = String::new();
    for d in &loaded.warnings {
        let _ = writeln!(out, "{d}");
    }
    for op in &loaded.compiled.operations {
        for h in &op.hooks {
            let mut d = Diagnostic::warning(
                h.origin,
                format!("{} needs hook `{}` for `{}`", op.qualified_name(), h.name, h.conjunct),
            );
            if let Some(p) = &single {
                d = d.in_file(p);
            }
            let _ = writeln!(out, "{d}");
        }
    }
    if opts.trace {
        for op in &loaded.compiled.operations {
            let _ = writeln!(out, "== {}", op.qualified_name());
            out.push_str(&op.trace_text());
        }
    }
    let rep = analyze_executability(&loaded.compiled);
    let _ = writeln!(out, "{}/{} executable ({:.2}%)", rep.executable(), rep.total(), rep.success_rate());
    Ok(out)
}
