//! CRUD contracts for classes marked `crud`.
//!
//! The contracts are generated as DSL text and parsed, so they go through
//! the same resolver and compiler as hand-written ones. Read, update and
//! delete are keyed on the first attribute.

use std::fmt::Write;

use crate::model::{ConceptualClass, RequirementsModel};
use crate::parser::{parse_model_str, Diagnostic};
use crate::schema::Schema;

const TARGET: &str = "crudTarget";
const ITEM: &str = "crudItem";
const NEW: &str = "crudNew";

pub fn crud_use_case(class: &str) -> String {
    format!("Manage{class}")
}

/// Source text of the `Manage<Class>` use case and its four contracts, or
/// `None` when the class has no attribute to key on.
pub fn crud_source(class: &ConceptualClass, schema: &Schema, actor: &str) -> Option<String> {
    let c = &class.name;
    let attrs = &schema.class(c)?.attributes;
    let (key, key_ty) = attrs.first()?;
    let uc = crud_use_case(c);
    let params = attrs.iter().map(|(n, t)| format!("{n}: {t}")).collect::<Vec<_>>().join(", ");
    let find = format!("{TARGET}:{c} = {c}.allInstances()->any({ITEM}:{c} | {ITEM}.{key} = {key})");

    let mut s = String::new();
    let _ = writeln!(s, "usecase {uc} actor {actor} {{ create{c}; read{c}; update{c}; delete{c}; }}");

    let sets: String = attrs.iter().map(|(n, _)| format!(" and {NEW}.{n} = {n}")).collect();
    let _ = writeln!(
        s,
        "contract {uc}::create{c}({params}) : Boolean {{\n  definition: {find}\n  precondition: {TARGET}.oclIsUndefined() = true\n  postcondition: let {NEW}:{c} in {NEW}.oclIsNew(){sets} and {c}.allInstances()->includes({NEW}) and result = true\n}}"
    );
    let _ = writeln!(
        s,
        "contract {uc}::read{c}({key}: {key_ty}) : {c} {{\n  definition: {find}\n  precondition: {TARGET}.oclIsUndefined() = false\n  postcondition: result = {TARGET}\n}}"
    );
    let updates: String = attrs.iter().skip(1).map(|(n, _)| format!("{TARGET}.{n} = {n} and ")).collect();
    let _ = writeln!(
        s,
        "contract {uc}::update{c}({params}) : Boolean {{\n  definition: {find}\n  precondition: {TARGET}.oclIsUndefined() = false\n  postcondition: {updates}result = true\n}}"
    );
    let _ = writeln!(
        s,
        "contract {uc}::delete{c}({key}: {key_ty}) : Boolean {{\n  definition: {find}\n  precondition: {TARGET}.oclIsUndefined() = false\n  postcondition: {c}.allInstances()->excludes({TARGET}) and result = true\n}}"
    );
    Some(s)
}

/// Generates the CRUD use cases and contracts for every marked class of
/// `model`. The actor is the first declared one, or `Administrator`, which
/// is then declared too. Marked classes without attributes get a warning.
pub fn synthesize_crud(model: &RequirementsModel) -> (RequirementsModel, Vec<Diagnostic>) {
    let schema = Schema::build(model);
    let mut out = RequirementsModel::default();
    let mut diags = Vec::new();
    let actor = match model.actors.first() {
        Some(a) => a.clone(),
        None => {
            if model.classes.iter().any(|c| c.crud) {
                out.actors.push("Administrator".to_string());
            }
            "Administrator".to_string()
        }
    };
    for class in model.classes.iter().filter(|c| c.crud) {
        let Some(src) = crud_source(class, &schema, &actor) else {
            diags.push(Diagnostic::warning(class.span, format!("class `{}` is marked crud but has no attribute to key on", class.name)));
            continue;
        };
        match parse_model_str(&src) {
            Ok(m) => out.merge(m),
            Err(ds) => diags.extend(ds),
        }
    }
    (out, diags)
}
