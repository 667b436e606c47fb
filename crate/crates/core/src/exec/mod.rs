//! Running compiled operations: sessions, guards, rollback, hooks,
//! invariants and checkpoints.

pub mod crud;
pub mod eval;
pub mod hooks;
pub mod invariants;
pub mod oracle;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::decompose::{CompiledOperation, Cond, Instruction};
use crate::expr::{Expr, ExprKind};
use crate::model::Multiplicity;
use crate::pipeline::LoadedModel;
use crate::printer::print_expr;
use crate::store::{CheckpointError, ObjectStore, StoreError};
use crate::value::{ObjectId, Value};

pub use eval::{Bindings, Ctx, Env, EvalError};
pub use hooks::{stub_hook, HookFn, HookRegistry};
pub use invariants::{check_invariants, InvariantReport, InvariantResult};
pub use oracle::{verify_postcondition, PostState, PreState};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SessionId(pub u64);

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub use_case: String,
    pub bindings: Bindings,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ok { value: Value, invariants: InvariantReport },
    PreconditionViolated { guard: String },
    HookUnbound { hook: String },
    RuntimeFault { message: String },
}

impl Outcome {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::Ok { .. } => "ok",
            Outcome::PreconditionViolated { .. } => "precondition_violated",
            Outcome::HookUnbound { .. } => "hook_unbound",
            Outcome::RuntimeFault { .. } => "fault",
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Outcome::Ok { .. })
    }
}

/// Rejections that happen before any state is touched.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvokeError {
    #[error("no session {0}")]
    UnknownSession(u64),
    #[error("unknown use case `{0}`")]
    UnknownUseCase(String),
    #[error("use case `{use_case}` has no operation `{op}`")]
    UnknownOperation { use_case: String, op: String },
    #[error("`{op}` takes {expected} argument(s), got {found}")]
    ArityMismatch { op: String, expected: usize, found: usize },
    #[error("parameter `{param}` is {expected}, got {found}")]
    TypeMismatch { param: String, expected: String, found: String },
}

/// An invocation with the states the oracle needs.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub outcome: Outcome,
    pub pre_store: ObjectStore,
    pub pre_session: Bindings,
    /// Parameters, definitions, `let` objects and temporaries.
    pub env: Env,
}

enum Fault {
    Hook(String),
    Runtime(String),
}

impl From<EvalError> for Fault {
    fn from(e: EvalError) -> Self {
        Fault::Runtime(e.0)
    }
}

impl From<StoreError> for Fault {
    fn from(e: StoreError) -> Self {
        Fault::Runtime(e.to_string())
    }
}

/// Checks and converts arguments against a signature.
pub fn coerce_args(op: &CompiledOperation, args: Vec<Value>) -> Result<Vec<Value>, InvokeError> {
    let params = &op.signature.params;
    if params.len() != args.len() {
        return Err(InvokeError::ArityMismatch { op: op.qualified_name(), expected: params.len(), found: args.len() });
    }
    params
        .iter()
        .zip(args)
        .map(|(p, a)| {
            a.coerce_to(p.ty).filter(|v| !v.is_undefined()).ok_or_else(|| InvokeError::TypeMismatch {
                param: p.name.clone(),
                expected: p.ty.name().to_string(),
                found: a.type_name().to_string(),
            })
        })
        .collect()
}

struct Run<'a> {
    store: &'a mut ObjectStore,
    session: &'a mut Bindings,
    env: Env,
    pre: Option<(&'a ObjectStore, &'a Bindings)>,
    captures: Vec<(Expr, Value)>,
    hooks: &'a HookRegistry,
    tolerance: f64,
    ret: Value,
}

impl Run<'_> {
    fn eval(&mut self, e: &Expr, strict: bool) -> Result<Value, Fault> {
        let ctx = Ctx {
            store: self.store,
            session: self.session,
            pre: self.pre,
            captures: &self.captures,
            self_obj: None,
            result: None,
            tolerance: self.tolerance,
            strict,
        };
        Ok(ctx.eval(e, &mut self.env)?)
    }

    fn object(&mut self, e: &Expr, what: &str) -> Result<ObjectId, Fault> {
        match self.eval(e, false)? {
            Value::Ref(id) if self.store.contains(id) => Ok(id),
            Value::Ref(id) => Err(Fault::Runtime(format!("{what} `{}` refers to released object {id}", print_expr(e)))),
            other => Err(Fault::Runtime(format!("{what} `{}` is {other}, not an object", print_expr(e)))),
        }
    }

    /// Runs `find` with an optional filter over candidate ids.
    fn filter(&mut self, cond: &Option<Cond>, ids: Vec<ObjectId>, first: bool) -> Result<Value, Fault> {
        let mut out = Vec::new();
        for id in ids {
            let keep = match cond {
                Some(c) => {
                    self.env.push(&c.var, Value::Ref(id));
                    let r = self.eval(&c.body, false);
                    self.env.pop();
                    r? == Value::Bool(true)
                }
                None => true,
            };
            if keep {
                if first {
                    return Ok(Value::Ref(id));
                }
                out.push(id);
            }
        }
        Ok(if first { Value::Undefined } else { Value::RefSet(out) })
    }

    fn linked(&mut self, src: &Expr, role: &str, cond: &Option<Cond>, first: bool) -> Result<Value, Fault> {
        let id = match self.eval(src, false)? {
            Value::Ref(id) if self.store.contains(id) => id,
            _ => return Ok(Value::Undefined),
        };
        let class = self.store.class_of(id).unwrap_or_default().to_string();
        let many = match self.store.schema().role(&class, role) {
            Some(r) => r.multiplicity == Multiplicity::Many,
            None => return Err(StoreError::UnknownRole { class, role: role.to_string() }.into()),
        };
        let ids = if many {
            match self.store.find_linked_objects::<StoreError>(id, role, None)? {
                Value::RefSet(ids) => ids,
                _ => Vec::new(),
            }
        } else {
            match self.store.find_linked_object(id, role)? {
                Value::Ref(t) if self.store.contains(t) => vec![t],
                _ => Vec::new(),
            }
        };
        if !many && first && cond.is_none() {
            return Ok(ids.first().map_or(Value::Undefined, |t| Value::Ref(*t)));
        }
        self.filter(cond, ids, first)
    }

    fn exec(&mut self, plan: &[Instruction]) -> Result<(), Fault> {
        for ins in plan {
            self.step(ins)?;
        }
        Ok(())
    }

    fn step(&mut self, ins: &Instruction) -> Result<(), Fault> {
        use Instruction::*;
        match ins {
            FindObject { dest, class, cond } | FindObjects { dest, class, cond } => {
                let ids = self.store.all_instances(class)?;
                let v = self.filter(cond, ids, matches!(ins, FindObject { .. }))?;
                self.env.set(dest, v);
            }
            FindLinked { dest, src, role, cond } | FindLinkedMany { dest, src, role, cond } => {
                let v = self.linked(src, role, cond, matches!(ins, FindLinked { .. }))?;
                self.env.set(dest, v);
            }
            Create { dest, class } => {
                let id = self.store.create_object(class)?;
                self.env.set(dest, Value::Ref(id));
            }
            Add { class, src } => {
                let id = self.object(src, "added object")?;
                self.store.add_object(class, id)?;
            }
            Release { class, src } => {
                if let Value::Ref(id) = self.eval(src, false)? {
                    self.store.release_object(class, id)?;
                }
            }
            SetAttr { src, attr, value } => {
                let id = self.object(src, "assignment target")?;
                let v = self.eval(value, true)?;
                let class = self.store.class_of(id).unwrap_or_default().to_string();
                if self.store.schema().attribute(&class, attr).is_some() {
                    self.store.set_attribute(id, attr, v)?;
                } else {
                    match (self.store.schema().role(&class, attr).map(|r| r.multiplicity), v) {
                        (Some(Multiplicity::One), Value::Ref(t)) => {
                            self.store.add_link_one_to_one(id, attr, t)?;
                        }
                        (Some(Multiplicity::One), Value::Undefined) => {
                            self.store.remove_link_one_to_one(id, attr)?;
                        }
                        (_, v) => {
                            return Err(Fault::Runtime(format!("cannot assign {v} to `{attr}` of a {class}")));
                        }
                    }
                }
            }
            LinkOne { src, role, target } | LinkMany { src, role, target } => {
                let id = self.object(src, "link source")?;
                let t = self.object(target, "link target")?;
                if matches!(ins, LinkOne { .. }) {
                    self.store.add_link_one_to_one(id, role, t)?;
                } else {
                    self.store.add_link_one_to_many(id, role, t)?;
                }
            }
            UnlinkOne { src, role } => {
                let id = self.object(src, "link source")?;
                self.store.remove_link_one_to_one(id, role)?;
            }
            UnlinkMany { src, role, target } => {
                let id = self.object(src, "link source")?;
                if let Value::Ref(t) = self.eval(target, false)? {
                    self.store.remove_link_one_to_many(id, role, t)?;
                }
            }
            ForEach { collection, var, body } => {
                let ids = match self.eval(collection, false)? {
                    Value::RefSet(ids) => ids,
                    other => {
                        return Err(Fault::Runtime(format!("cannot iterate over {other} (`{}`)", print_expr(collection))))
                    }
                };
                for id in ids {
                    self.env.push(var, Value::Ref(id));
                    let r = self.exec(body);
                    self.env.pop();
                    r?;
                }
            }
            BindSession { name, value } => {
                let v = self.eval(value, true)?;
                self.session.insert(name.clone(), v);
            }
            EvalToTemp { dest, expr } => {
                let v = self.eval(expr, false)?;
                self.env.set(dest, v);
            }
            Assert { cond } => {
                if self.eval(cond, false)? != Value::Bool(true) {
                    return Err(Fault::Runtime(format!("postcondition check failed: {}", print_expr(cond))));
                }
            }
            ExternalCall { hook, args, dest } => {
                let f = match self.hooks.get(hook) {
                    Some(f) => Arc::clone(f),
                    None => return Err(Fault::Hook(hook.clone())),
                };
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, false)?);
                }
                let v = f(&vals, self.store).map_err(|m| Fault::Runtime(format!("hook `{hook}` failed: {m}")))?;
                self.store.check_integrity().map_err(|m| Fault::Runtime(format!("hook `{hook}` broke the store: {m}")))?;
                if let Some(d) = dest {
                    self.env.set(d, v);
                }
            }
            Return(e) => {
                self.ret = self.eval(e, true)?;
            }
        }
        Ok(())
    }
}

/// One model, one store, any number of use-case sessions. Invocations are
/// serialized through `&mut self`.
#[derive(Debug, Clone)]
pub struct Executor {
    model: Arc<LoadedModel>,
    store: ObjectStore,
    sessions: BTreeMap<SessionId, Session>,
    next_session: u64,
    hooks: HookRegistry,
    tolerance: f64,
}

impl Executor {
    pub fn new(model: Arc<LoadedModel>) -> Self {
        let store = ObjectStore::new(Arc::clone(&model.schema));
        Executor { model, store, sessions: BTreeMap::new(), next_session: 1, hooks: HookRegistry::new(), tolerance: DEFAULT_TOLERANCE }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn model(&self) -> &LoadedModel {
        &self.model
    }

    pub fn model_arc(&self) -> Arc<LoadedModel> {
        Arc::clone(&self.model)
    }

    pub fn store(&self) -> &ObjectStore {
        &self.store
    }

    /// Direct store access, for seeding objects in tests and tools.
    pub fn store_mut(&mut self) -> &mut ObjectStore {
        &mut self.store
    }

    pub fn hooks(&self) -> &HookRegistry {
        &self.hooks
    }

    /// Binds an implementation to a hook the model declares.
    pub fn register_hook<F>(&mut self, name: &str, f: F) -> Result<(), String>
    where
        F: Fn(&[Value], &mut ObjectStore) -> Result<Value, String> + Send + Sync + 'static,
    {
        if !self.model.compiled.hooks().iter().any(|h| h.name == name) {
            return Err(format!("the model declares no hook `{name}`"));
        }
        self.hooks.register(name, f);
        Ok(())
    }

    pub fn clear_hooks(&mut self) {
        self.hooks.clear();
    }

    /// Registers a placeholder for every declared hook; returns their names.
    pub fn register_stub_hooks(&mut self) -> Vec<String> {
        let specs: Vec<_> = self.model.compiled.hooks().into_iter().cloned().collect();
        specs
            .iter()
            .map(|s| {
                self.hooks.register(&s.name, stub_hook(s));
                s.name.clone()
            })
            .collect()
    }

    pub fn open_session(&mut self, use_case: &str) -> Result<SessionId, InvokeError> {
        if self.model.model().use_case(use_case).is_none() {
            return Err(InvokeError::UnknownUseCase(use_case.to_string()));
        }
        let id = SessionId(self.next_session);
        self.next_session += 1;
        self.sessions.insert(id, Session { use_case: use_case.to_string(), bindings: Bindings::new() });
        Ok(id)
    }

    pub fn close_session(&mut self, id: SessionId) -> bool {
        self.sessions.remove(&id).is_some()
    }

    pub fn session(&self, id: SessionId) -> Option<&Session> {
        self.sessions.get(&id)
    }

    pub fn sessions(&self) -> impl Iterator<Item = (SessionId, &Session)> {
        self.sessions.iter().map(|(k, v)| (*k, v))
    }

    pub fn check_invariants(&self) -> InvariantReport {
        check_invariants(&self.model.model().invariants, &self.store, self.tolerance)
    }

    pub fn invoke(&mut self, session: SessionId, op: &str, args: Vec<Value>) -> Result<Outcome, InvokeError> {
        self.invoke_detailed(session, op, args).map(|i| i.outcome)
    }

    /// Guard, plan, invariants. Any outcome other than `Ok` leaves the
    /// store and the session exactly as they were.
    pub fn invoke_detailed(&mut self, session: SessionId, op: &str, args: Vec<Value>) -> Result<Invocation, InvokeError> {
        let use_case = self.sessions.get(&session).ok_or(InvokeError::UnknownSession(session.0))?.use_case.clone();
        let model = Arc::clone(&self.model);
        let compiled = model
            .compiled
            .operation(&use_case, op)
            .ok_or_else(|| InvokeError::UnknownOperation { use_case: use_case.clone(), op: op.to_string() })?;
        let args = coerce_args(compiled, args)?;

        let pre_store = self.store.clone();
        let sess = self.sessions.get_mut(&session).expect("session checked above");
        let pre_session = sess.bindings.clone();

        let mut env = Env::new();
        for (p, a) in compiled.signature.params.iter().zip(args) {
            env.push(&p.name, a);
        }
        let mut run = Run {
            store: &mut self.store,
            session: &mut sess.bindings,
            env,
            pre: None,
            captures: Vec::new(),
            hooks: &self.hooks,
            tolerance: self.tolerance,
            ret: Value::Undefined,
        };

        let result = (|| -> Result<Option<String>, Fault> {
            run.exec(&compiled.definition_plan)?;
            for g in compiled.guard.conjuncts() {
                if run.eval(g, false)? != Value::Bool(true) {
                    return Ok(Some(print_expr(g)));
                }
            }
            let mut caps = Vec::with_capacity(compiled.pre_captures.len());
            for c in &compiled.pre_captures {
                if let ExprKind::AtPre(inner) = &c.kind {
                    caps.push((c.clone(), run.eval(inner, false)?));
                }
            }
            run.captures = caps;
            run.pre = Some((&pre_store, &pre_session));
            run.exec(&compiled.post_plan)?;
            Ok(None)
        })();

        let env = std::mem::take(&mut run.env);
        let ret = std::mem::replace(&mut run.ret, Value::Undefined);
        let outcome = match result {
            Ok(None) => match self.store.check_integrity() {
                Ok(()) => Outcome::Ok { value: ret, invariants: InvariantReport::default() },
                Err(m) => Outcome::RuntimeFault { message: m },
            },
            Ok(Some(guard)) => Outcome::PreconditionViolated { guard },
            Err(Fault::Hook(hook)) => Outcome::HookUnbound { hook },
            Err(Fault::Runtime(message)) => Outcome::RuntimeFault { message },
        };
        let outcome = match outcome {
            Outcome::Ok { value, .. } => Outcome::Ok { value, invariants: self.check_invariants() },
            other => {
                self.store = pre_store.clone();
                if let Some(s) = self.sessions.get_mut(&session) {
                    s.bindings = pre_session.clone();
                }
                other
            }
        };
        Ok(Invocation { outcome, pre_store, pre_session, env })
    }

    pub fn save_checkpoint(&self) -> String {
        self.store.save_checkpoint()
    }

    /// Replaces the whole store. Sessions end, since their bindings may
    /// name objects that no longer exist.
    pub fn load_checkpoint(&mut self, text: &str) -> Result<(), CheckpointError> {
        let store = ObjectStore::load_checkpoint(Arc::clone(&self.model.schema), text)?;
        self.store = store;
        self.sessions.clear();
        Ok(())
    }

    /// Replaces the store with an empty one and ends all sessions.
    pub fn reset(&mut self) {
        self.store = ObjectStore::new(Arc::clone(&self.model.schema));
        self.sessions.clear();
    }
}

#[cfg(test)]
mod tests;
