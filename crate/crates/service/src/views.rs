//! JSON renderings of the model, the store and invocation outcomes. Values
//! use the checkpoint's typed encoding.

use serde_json::{json, Map, Value as Json};

use reqexec_core::exec::{Executor, InvariantReport, Outcome};
use reqexec_core::store::Link;

pub fn model_summary(ex: &Executor) -> Json {
    let loaded = ex.model();
    let m = loaded.model();
    let use_cases: Vec<Json> = m
        .use_cases
        .iter()
        .map(|uc| {
            let ops: Vec<Json> = uc
                .operations
                .iter()
                .filter_map(|name| loaded.compiled.operation(&uc.name, name))
                .map(|op| {
                    let params: Vec<Json> =
                        op.signature.params.iter().map(|p| json!({ "name": p.name, "type": p.ty.name() })).collect();
                    json!({
                        "name": op.signature.name,
                        "params": params,
                        "returns": op.signature.ret.as_ref().map(|t| t.to_string()),
                        "executable": op.is_executable(),
                        "hooks": op.hooks.iter().map(|h| h.name.clone()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({ "name": uc.name, "actor": uc.actor, "operations": ops })
        })
        .collect();
    let classes: Vec<Json> = loaded
        .schema
        .class_names()
        .iter()
        .filter_map(|c| loaded.schema.class(c))
        .map(|c| {
            json!({
                "name": c.name,
                "superClass": c.super_class,
                "attributes": c.attributes.iter().map(|(n, t)| json!({ "name": n, "type": t.name() })).collect::<Vec<_>>(),
                "roles": c.roles.iter().map(|r| json!({
                    "name": r.name, "target": r.target, "multiplicity": r.multiplicity.keyword()
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "actors": m.actors,
        "useCases": use_cases,
        "classes": classes,
        "invariants": m.invariants.iter().map(|i| i.name.clone()).collect::<Vec<_>>(),
    })
}

pub fn state_view(ex: &Executor) -> Json {
    let store = ex.store();
    let schema = store.schema();
    let mut counts = Map::new();
    let mut attrs = Map::new();
    for c in schema.class_names() {
        counts.insert(c.clone(), json!(store.count_exact(c)));
        attrs.insert(c.clone(), Json::Array(Vec::new()));
    }
    let mut links = Vec::new();
    for r in store.records().filter(|r| r.added) {
        let values: Map<String, Json> = r.attrs.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        if let Some(Json::Array(rows)) = attrs.get_mut(&r.class) {
            rows.push(json!({ "id": r.id.0, "attrs": values }));
        }
        for (role, l) in &r.links {
            let (targets, mult) = match l {
                Link::One(t) => (t.iter().map(|t| t.0).collect::<Vec<_>>(), "one"),
                Link::Many(ts) => (ts.iter().map(|t| t.0).collect(), "many"),
            };
            if !targets.is_empty() {
                links.push(json!({ "source": r.id.0, "class": r.class, "role": role, "targets": targets, "multiplicity": mult }));
            }
        }
    }
    json!({ "objectCounts": counts, "attributeTable": attrs, "linkTable": links })
}

pub fn invariant_report(report: &InvariantReport) -> Json {
    let results: Vec<Json> = report
        .results
        .iter()
        .map(|r| {
            let mut o = json!({
                "name": r.name,
                "holds": r.holds,
                "witnesses": r.witnesses.iter().map(|w| w.0).collect::<Vec<_>>(),
            });
            if let Some(note) = &r.note {
                o["note"] = json!(note);
            }
            o
        })
        .collect();
    json!({ "allHold": report.all_hold(), "results": results })
}

/// `current` is the report for the store after the call; on failures the
/// store is unchanged, so it is the report from before.
pub fn outcome(out: &Outcome, current: &InvariantReport) -> Json {
    let mut o = json!({ "kind": out.kind() });
    match out {
        Outcome::Ok { value, invariants } => {
            o["value"] = value.to_json();
            o["invariants"] = invariant_report(invariants);
            return o;
        }
        Outcome::PreconditionViolated { guard } => o["guard"] = json!(guard),
        Outcome::HookUnbound { hook } => o["hook"] = json!(hook),
        Outcome::RuntimeFault { message } => o["message"] = json!(message),
    }
    o["invariants"] = invariant_report(current);
    o
}
