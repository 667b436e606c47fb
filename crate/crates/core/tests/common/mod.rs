#![allow(dead_code)]

use std::sync::Arc;

use reqexec_core::exec::{Executor, SessionId};
use reqexec_core::explore::{explore, ExploreConfig, ExploreReport};
use reqexec_core::fixtures::load_fixture_compiled;
use reqexec_core::{LoadOptions, Value};

/// Stubs for every hook, and a credit bureau that approves about half of
/// the applicants so the loan workflow gets past evaluation.
pub fn bind_hooks(ex: &mut Executor) {
    ex.register_stub_hooks();
    if ex.model().compiled.hooks().iter().any(|h| h.name == "CreditBureau_score") {
        ex.register_hook("CreditBureau_score", |args, _| match args {
            [Value::Str(ssn)] => Ok(Value::Int(if ssn.len() % 2 == 0 { 720 } else { 540 })),
            _ => Err("score expects one String".into()),
        })
        .unwrap();
    }
}

pub fn walk(name: &str, seed: u64) -> ExploreReport {
    let m = Arc::new(load_fixture_compiled(name, LoadOptions { include_crud: true }).unwrap());
    explore(m, &bind_hooks, &ExploreConfig { seed, ..ExploreConfig::default() })
}

pub fn executor(name: &str) -> Executor {
    let m = load_fixture_compiled(name, LoadOptions { include_crud: true }).unwrap();
    Executor::new(Arc::new(m))
}

pub fn int(i: i64) -> Value {
    Value::Int(i)
}

pub fn real(r: f64) -> Value {
    Value::Real(r)
}

pub fn s(x: &str) -> Value {
    Value::Str(x.to_string())
}

/// Invokes and insists on an `Ok` outcome.
pub fn ok(ex: &mut Executor, sid: SessionId, op: &str, args: Vec<Value>) -> Value {
    match ex.invoke(sid, op, args).unwrap() {
        reqexec_core::exec::Outcome::Ok { value, .. } => value,
        other => panic!("{op}: {other:?}"),
    }
}
