//! Model size and executability statistics.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::decompose::{analyze_executability, CompiledModel, Executability, ExecutabilityReport};
use crate::model::RequirementsModel;

pub const REPORT_SCHEMA: &str = "reqexec-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComplexityMetrics {
    pub actors: usize,
    pub use_cases: usize,
    pub system_operations: usize,
    pub entity_classes: usize,
    /// Directed association ends.
    pub associations: usize,
    pub invariants: usize,
    /// Instructions across all definition and postcondition plans, loop
    /// bodies included. Informational only.
    pub plan_instructions: usize,
}

pub fn complexity_metrics(model: &RequirementsModel, compiled: &CompiledModel) -> ComplexityMetrics {
    ComplexityMetrics {
        actors: model.actors.len(),
        use_cases: model.use_cases.len(),
        system_operations: model.contracts.len(),
        entity_classes: model.classes.len(),
        associations: model.associations.len(),
        invariants: model.invariants.len(),
        plan_instructions: compiled.operations.iter().map(|o| o.plan_size()).sum(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OperationEntry {
    pub use_case: String,
    pub operation: String,
    pub executable: bool,
    pub hooks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExecutabilitySummary {
    pub total: usize,
    pub executable: usize,
    pub success_rate: f64,
    pub operations: Vec<OperationEntry>,
}

impl From<&ExecutabilityReport> for ExecutabilitySummary {
    fn from(r: &ExecutabilityReport) -> Self {
        ExecutabilitySummary {
            total: r.total(),
            executable: r.executable(),
            success_rate: r.success_rate(),
            operations: r
                .operations
                .iter()
                .map(|o| OperationEntry {
                    use_case: o.use_case.clone(),
                    operation: o.operation.clone(),
                    executable: o.status == Executability::Executable,
                    hooks: match &o.status {
                        Executability::Executable => Vec::new(),
                        Executability::PartiallyExecutable { hooks } => hooks.clone(),
                    },
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub model: String,
    pub metrics: ComplexityMetrics,
    pub executability: ExecutabilitySummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}` (expected text or json)")),
        }
    }
}

pub fn build_report(name: &str, model: &RequirementsModel, compiled: &CompiledModel) -> Report {
    Report {
        schema: REPORT_SCHEMA.to_string(),
        model: name.to_string(),
        metrics: complexity_metrics(model, compiled),
        executability: (&analyze_executability(compiled)).into(),
    }
}

pub fn render_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text(report),
    }
}

fn render_text(r: &Report) -> String {
    let m = &r.metrics;
    let mut s = String::new();
    let _ = writeln!(s, "model: {}", r.model);
    for (label, n) in [
        ("actors", m.actors),
        ("use cases", m.use_cases),
        ("system operations", m.system_operations),
        ("entity classes", m.entity_classes),
        ("associations", m.associations),
        ("invariants", m.invariants),
        ("plan instructions", m.plan_instructions),
    ] {
        let _ = writeln!(s, "  {label:<20}{n:>6}");
    }
    let e = &r.executability;
    let _ = writeln!(s, "executability: {}/{} executable ({:.2}%)", e.executable, e.total, e.success_rate);
    for o in &e.operations {
        let name = format!("{}::{}", o.use_case, o.operation);
        if o.executable {
            let _ = writeln!(s, "  {name:<40} executable");
        } else {
            let _ = writeln!(s, "  {name:<40} partial: {}", o.hooks.join(", "));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{load_model_str, LoadOptions};

    const SRC: &str = r#"
actor A
actor B
class K crud { Id: Integer; }
class L { N: Integer; }
assoc K.ls -> L many
assoc L.k -> K one
inv Pos on L: self.N >= 0
usecase U actor A { make; report; }
contract U::make(n: Integer) : Boolean {
  postcondition: let l:L in l.oclIsNew() and l.N = n and L.allInstances()->includes(l) and result = true
}
contract U::report() : Boolean {
  postcondition: Mail::send(L.allInstances()->size()) and result = true
}
"#;

    fn report(crud: bool) -> Report {
        let m = load_model_str(SRC, LoadOptions { include_crud: crud }).unwrap();
        build_report("t", m.model(), &m.compiled)
    }

    #[test]
    fn counts_with_and_without_crud() {
        let r = report(false);
        assert_eq!(
            r.metrics,
            ComplexityMetrics {
                actors: 2,
                use_cases: 1,
                system_operations: 2,
                entity_classes: 2,
                associations: 2,
                invariants: 1,
                plan_instructions: 6,
            }
        );
        assert_eq!((r.executability.executable, r.executability.total), (1, 2));
        let r = report(true);
        assert_eq!((r.metrics.use_cases, r.metrics.system_operations, r.metrics.actors), (2, 6, 2));
        assert_eq!((r.executability.executable, r.executability.total), (5, 6));
    }

    #[test]
    fn json_round_trips() {
        let r = report(false);
        let text = render_report(&r, ReportFormat::Json);
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(render_report(&r, ReportFormat::Text).contains("partial: Mail_send"));
        assert!("xml".parse::<ReportFormat>().is_err());
    }

    #[test]
    fn empty_model() {
        let m = load_model_str("", LoadOptions::default()).unwrap();
        let r = build_report("empty", m.model(), &m.compiled);
        assert_eq!(r.metrics, ComplexityMetrics::default());
        assert_eq!(r.executability.success_rate, 100.0);
    }
}
