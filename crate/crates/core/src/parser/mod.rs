//! Parser for the `.rqm` requirements DSL and its OCL expression subset.
//!
//! The grammar is documented in `docs/grammar.md`.

mod decl;
mod expr;
mod lexer;

use std::fmt;

use crate::expr::{Expr, Span};
use crate::model::RequirementsModel;

pub use lexer::{tokenize, Tok, Token};

#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: String,
    pub content: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, content: impl Into<String>) -> Self {
        SourceFile { path: path.into(), content: content.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    pub file: Option<String>,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, span, message: message.into(), file: None }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, span, message: message.into(), file: None }
    }

    pub fn in_file(mut self, path: &str) -> Self {
        self.file = Some(path.to_string());
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match &self.file {
            Some(p) => write!(f, "{p}:{}: {sev}: {}", self.span, self.message),
            None => write!(f, "{}: {sev}: {}", self.span, self.message),
        }
    }
}

/// Parses and merges every source into one model. Any error diagnostic
/// prevents model construction; all errors found are returned.
pub fn parse_model(sources: &[SourceFile]) -> Result<RequirementsModel, Vec<Diagnostic>> {
    let mut model = RequirementsModel::default();
    let mut diags = Vec::new();
    for src in sources {
        match tokenize(&src.content) {
            Ok(tokens) => {
                let (m, d) = decl::parse_declarations(tokens);
                model.merge(m);
                diags.extend(d.into_iter().map(|d| d.in_file(&src.path)));
            }
            Err(d) => diags.push(d.in_file(&src.path)),
        }
    }
    if diags.iter().any(|d| d.severity == Severity::Error) {
        Err(diags)
    } else {
        Ok(model)
    }
}

/// Convenience wrapper for a single in-memory source.
pub fn parse_model_str(text: &str) -> Result<RequirementsModel, Vec<Diagnostic>> {
    parse_model(&[SourceFile::new("<input>", text)])
}

/// Parses one OCL expression; the whole input must be consumed.
pub fn parse_ocl_expr(text: &str) -> Result<Expr, Diagnostic> {
    let tokens = tokenize(text)?;
    let mut p = expr::ExprParser::new(&tokens);
    let e = p.parse_expr()?;
    p.expect_eof()?;
    Ok(e)
}
