//! Executable requirements models.
//!
//! A requirements model (conceptual classes, associations, use cases, OCL
//! operation contracts and invariants) is parsed from `.rqm` text, each
//! contract is compiled into a plan of primitive object-store operations,
//! and the plans run against a live object graph with precondition guards,
//! invariant checking and checkpoints.

pub mod analyze;
pub mod decompose;
pub mod exec;
pub mod explore;
pub mod expr;
pub mod fixtures;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod printer;
pub mod resolve;
pub mod schema;
pub mod store;
pub mod value;

pub use expr::{Expr, ExprKind, PrimType, Span, TypeRef};
pub use model::RequirementsModel;
pub use pipeline::{load_model, load_model_str, LoadOptions, LoadedModel};
pub use parser::{parse_model, parse_model_str, parse_ocl_expr, Diagnostic, Severity, SourceFile};
pub use value::{ObjectId, Value};
