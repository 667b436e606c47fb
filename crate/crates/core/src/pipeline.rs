//! Parse, synthesize, resolve, type-check and compile in one call.

use std::sync::Arc;

use crate::decompose::{compile_model, CompiledModel};
use crate::exec::crud::synthesize_crud;
use crate::model::RequirementsModel;
use crate::parser::{parse_model, Diagnostic, Severity, SourceFile};
use crate::resolve::{check_types, resolve_names, ResolvedModel};
use crate::schema::Schema;

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Adds the `Manage<Class>` use cases for classes marked `crud`.
    pub include_crud: bool,
}

/// A model ready to execute.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub resolved: ResolvedModel,
    pub compiled: CompiledModel,
    pub schema: Arc<Schema>,
    pub warnings: Vec<Diagnostic>,
}

impl LoadedModel {
    pub fn model(&self) -> &RequirementsModel {
        &self.resolved.model
    }
}

pub fn load_model(sources: &[SourceFile], opts: LoadOptions) -> Result<LoadedModel, Vec<Diagnostic>> {
    let model = parse_model(sources)?;
    load_parsed(model, opts)
}

pub fn load_model_str(text: &str, opts: LoadOptions) -> Result<LoadedModel, Vec<Diagnostic>> {
    load_model(&[SourceFile::new("<input>", text)], opts)
}

pub fn load_parsed(mut model: RequirementsModel, opts: LoadOptions) -> Result<LoadedModel, Vec<Diagnostic>> {
    let mut warnings = Vec::new();
    if opts.include_crud {
        let (extra, diags) = synthesize_crud(&model);
        if diags.iter().any(|d| d.severity == Severity::Error) {
            return Err(diags);
        }
        warnings.extend(diags);
        model.merge(extra);
    }
    let resolved = resolve_names(&model)
        .map_err(|errs| errs.into_iter().map(|e| Diagnostic::error(e.span, e.message)).collect::<Vec<_>>())?;
    let type_errors = check_types(&resolved);
    if !type_errors.is_empty() {
        return Err(type_errors.into_iter().map(|e| Diagnostic::error(e.span, format!("type error: {}", e.message))).collect());
    }
    let compiled = compile_model(&resolved).map_err(|errs| {
        errs.into_iter().map(|e| Diagnostic::error(e.span, format!("{}: {}", e.contract, e.message))).collect::<Vec<_>>()
    })?;
    warnings.extend(resolved.warnings.iter().cloned());
    let schema = Arc::new(resolved.schema.clone());
    Ok(LoadedModel { resolved, compiled, schema, warnings })
}
