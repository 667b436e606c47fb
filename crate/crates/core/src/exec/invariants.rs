use crate::exec::eval::{Bindings, Ctx, Env};
use crate::model::Invariant;
use crate::store::ObjectStore;
use crate::value::{ObjectId, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantResult {
    pub name: String,
    pub holds: bool,
    /// Context instances for which the invariant is false or undefined.
    pub witnesses: Vec<ObjectId>,
    /// Set when evaluation itself failed.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InvariantReport {
    pub results: Vec<InvariantResult>,
}

impl InvariantReport {
    pub fn all_hold(&self) -> bool {
        self.results.iter().all(|r| r.holds)
    }

    pub fn get(&self, name: &str) -> Option<&InvariantResult> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn violated(&self) -> impl Iterator<Item = &InvariantResult> {
        self.results.iter().filter(|r| !r.holds)
    }
}

fn check_one(inv: &Invariant, store: &ObjectStore, tolerance: f64) -> InvariantResult {
    let empty = Bindings::new();
    let mut res = InvariantResult { name: inv.name.clone(), holds: true, witnesses: Vec::new(), note: None };
    let mut env = Env::new();
    match &inv.context {
        Some(class) => {
            let ids = store.all_instances(class).unwrap_or_default();
            for id in ids {
                let ctx = Ctx { self_obj: Some(id), ..Ctx::new(store, &empty, tolerance) };
                match ctx.eval(&inv.expr, &mut env) {
                    Ok(Value::Bool(true)) => {}
                    Ok(_) => res.witnesses.push(id),
                    Err(e) => {
                        res.witnesses.push(id);
                        res.note.get_or_insert_with(|| e.to_string());
                    }
                }
            }
            res.holds = res.witnesses.is_empty();
        }
        None => match Ctx::new(store, &empty, tolerance).eval(&inv.expr, &mut env) {
            Ok(Value::Bool(true)) => {}
            Ok(_) => res.holds = false,
            Err(e) => {
                res.holds = false;
                res.note = Some(e.to_string());
            }
        },
    }
    res
}

/// Evaluates every invariant: context invariants once per live instance
/// with `self` bound, the others once. Undefined counts as a violation.
pub fn check_invariants(invariants: &[Invariant], store: &ObjectStore, tolerance: f64) -> InvariantReport {
    InvariantReport { results: invariants.iter().map(|i| check_one(i, store, tolerance)).collect() }
}
