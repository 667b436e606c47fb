//! Expression evaluation over a live store, with OCL's three-valued logic.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{ArithOp, CompareOp, Expr, ExprKind, IterOp, NavKind, PrimType, VarKind};
use crate::model::Multiplicity;
use crate::printer::print_expr;
use crate::store::{ObjectStore, StoreError};
use crate::value::{ObjectId, Value};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct EvalError(pub String);

impl From<StoreError> for EvalError {
    fn from(e: StoreError) -> Self {
        EvalError(e.to_string())
    }
}

/// Name/value pairs in scope; later entries shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Env {
    vars: Vec<(String, Value)>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Binds or rebinds `name` in the outermost frame that has it.
    pub fn set(&mut self, name: &str, v: Value) {
        match self.vars.iter_mut().rev().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = v,
            None => self.vars.push((name.to_string(), v)),
        }
    }

    pub fn push(&mut self, name: &str, v: Value) {
        self.vars.push((name.to_string(), v));
    }

    pub fn pop(&mut self) {
        self.vars.pop();
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, Value)> {
        self.vars.iter()
    }
}

pub type Bindings = BTreeMap<String, Value>;

/// Everything an expression may read.
#[derive(Clone, Copy)]
pub struct Ctx<'a> {
    pub store: &'a ObjectStore,
    pub session: &'a Bindings,
    /// Pre-state for `@pre` and `oclIsNew`.
    pub pre: Option<(&'a ObjectStore, &'a Bindings)>,
    pub captures: &'a [(Expr, Value)],
    pub self_obj: Option<ObjectId>,
    pub result: Option<&'a Value>,
    pub tolerance: f64,
    /// Faults on Undefined arithmetic and division by zero instead of
    /// yielding Undefined. Used when computing values a plan will store.
    pub strict: bool,
}

impl<'a> Ctx<'a> {
    pub fn new(store: &'a ObjectStore, session: &'a Bindings, tolerance: f64) -> Self {
        Ctx { store, session, pre: None, captures: &[], self_obj: None, result: None, tolerance, strict: false }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Evaluates a predicate; only `true` counts as holding.
    pub fn holds(&self, e: &Expr, env: &mut Env) -> Result<bool, EvalError> {
        Ok(matches!(self.eval(e, env)?, Value::Bool(true)))
    }

    fn live_ref(&self, v: &Value) -> Option<ObjectId> {
        match v {
            Value::Ref(id) if self.store.contains(*id) => Some(*id),
            _ => None,
        }
    }

    fn set_of(&self, v: Value, what: &str) -> Result<Option<Vec<ObjectId>>, EvalError> {
        match v {
            Value::RefSet(ids) => Ok(Some(ids)),
            Value::Undefined => Ok(None),
            other => Err(EvalError(format!("{what} needs a collection, got {other}"))),
        }
    }

    fn navigate(&self, target: Value, name: &str, kind: NavKind) -> Result<Value, EvalError> {
        let Some(id) = self.live_ref(&target) else {
            return match target {
                Value::Ref(_) | Value::Undefined => Ok(Value::Undefined),
                other => Err(EvalError(format!("cannot read `.{name}` of {other}"))),
            };
        };
        let kind = match kind {
            NavKind::Dynamic | NavKind::Unresolved => {
                let class = self.store.class_of(id).unwrap_or_default();
                if self.store.schema().attribute(class, name).is_some() {
                    NavKind::Attribute
                } else {
                    match self.store.schema().role(class, name).map(|r| r.multiplicity) {
                        Some(Multiplicity::One) => NavKind::RoleOne,
                        Some(Multiplicity::Many) => NavKind::RoleMany,
                        None => return Err(EvalError(format!("class `{class}` has no attribute or role `{name}`"))),
                    }
                }
            }
            k => k,
        };
        Ok(match kind {
            NavKind::Attribute => self.store.get_attribute(id, name)?,
            NavKind::RoleOne => {
                let v = self.store.find_linked_object(id, name)?;
                if self.live_ref(&v).is_some() { v } else { Value::Undefined }
            }
            NavKind::RoleMany => self.store.find_linked_objects::<StoreError>(id, name, None)?,
            _ => unreachable!(),
        })
    }

    fn compare(&self, op: CompareOp, l: &Value, r: &Value) -> Result<Value, EvalError> {
        let tol = self.tolerance;
        Ok(match op {
            CompareOp::Eq | CompareOp::Ne => {
                let eq = l.ocl_eq(r, tol);
                Value::Bool(if op == CompareOp::Eq { eq } else { !eq })
            }
            _ => {
                let ord = match (l, r) {
                    (Value::Str(a), Value::Str(b)) => a.cmp(b) as i8,
                    (Value::Int(a), Value::Int(b)) => a.cmp(b) as i8,
                    (a, b) => match (a.as_f64(), b.as_f64()) {
                        (Some(x), Some(y)) if (x - y).abs() <= tol => 0,
                        (Some(x), Some(y)) if x < y => -1,
                        (Some(_), Some(_)) => 1,
                        _ => return Err(EvalError(format!("cannot order {l} and {r}"))),
                    },
                };
                Value::Bool(match op {
                    CompareOp::Lt => ord < 0,
                    CompareOp::Le => ord <= 0,
                    CompareOp::Gt => ord > 0,
                    _ => ord >= 0,
                })
            }
        })
    }

    fn arith(&self, op: ArithOp, l: Value, r: Value) -> Result<Value, EvalError> {
        let undefined = |why: String| if self.strict { Err(EvalError(why)) } else { Ok(Value::Undefined) };
        if l.is_undefined() || r.is_undefined() {
            return undefined(format!("arithmetic on an undefined value ({l} {} {r})", op.symbol()));
        }
        if let (Value::Int(a), Value::Int(b)) = (&l, &r) {
            let v = match op {
                ArithOp::Add => a.checked_add(*b),
                ArithOp::Sub => a.checked_sub(*b),
                ArithOp::Mul => a.checked_mul(*b),
                ArithOp::Div => None,
            };
            if let Some(v) = v {
                return Ok(Value::Int(v));
            }
        }
        let (Some(a), Some(b)) = (l.as_f64(), r.as_f64()) else {
            return Err(EvalError(format!("`{}` needs numbers, got {l} and {r}", op.symbol())));
        };
        if op == ArithOp::Div && b == 0.0 {
            return undefined(format!("division by zero ({l} / {r})"));
        }
        let v = match op {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => a / b,
        };
        if v.is_finite() {
            Ok(Value::Real(v))
        } else {
            undefined(format!("numeric overflow ({l} {} {r})", op.symbol()))
        }
    }

    pub fn eval(&self, e: &Expr, env: &mut Env) -> Result<Value, EvalError> {
        use ExprKind::*;
        Ok(match &e.kind {
            IntLit(i) => Value::Int(*i),
            RealLit(r) => Value::Real(*r),
            StrLit(s) => Value::Str(s.clone()),
            BoolLit(b) => Value::Bool(*b),
            Null => Value::Undefined,
            Var { name, kind: VarKind::Session } => self.session.get(name).cloned().unwrap_or(Value::Undefined),
            Var { name, .. } => env.get(name).cloned().unwrap_or(Value::Undefined),
            SelfRef => self.self_obj.map_or(Value::Undefined, Value::Ref),
            ResultRef => self.result.cloned().unwrap_or(Value::Undefined),
            Nav { target, name, kind: NavKind::Session } if matches!(target.kind, SelfRef) => {
                self.session.get(name).cloned().unwrap_or(Value::Undefined)
            }
            Nav { target, name, kind } => {
                let t = self.eval(target, env)?;
                self.navigate(t, name, *kind)?
            }
            AtPre(inner) => {
                if let Some((_, v)) = self.captures.iter().find(|(x, _)| x == e) {
                    return Ok(v.clone());
                }
                match self.pre {
                    Some((store, session)) => {
                        let pre_ctx = Ctx { store, session, pre: None, captures: &[], ..*self };
                        pre_ctx.eval(inner, env)?
                    }
                    None => self.eval(inner, env)?,
                }
            }
            AllInstances(c) => Value::RefSet(self.store.all_instances(c)?),
            Iterate { op, source, var, body } => {
                let src = self.eval(source, env)?;
                let Some(ids) = self.set_of(src, op.name())? else { return Ok(Value::Undefined) };
                self.iterate(*op, ids, &var.name, body, env)?
            }
            Fold { source, var, acc, init, body, .. } => {
                let src = self.eval(source, env)?;
                let Some(ids) = self.set_of(src, "iterate")? else { return Ok(Value::Undefined) };
                let mut a = self.eval(init, env)?;
                for id in ids {
                    env.push(&var.name, Value::Ref(id));
                    env.push(acc, a);
                    let r = self.eval(body, env);
                    env.pop();
                    env.pop();
                    a = r?;
                }
                a
            }
            Includes(s, x) | Excludes(s, x) => {
                let sv = self.eval(s, env)?;
                let xv = self.eval(x, env)?;
                let Some(ids) = self.set_of(sv, "includes")? else { return Ok(Value::Undefined) };
                let inside = matches!(xv, Value::Ref(id) if ids.contains(&id));
                Value::Bool(if matches!(e.kind, Includes(..)) { inside } else { !inside })
            }
            Size(s) => match self.set_of(self.eval(s, env)?, "size")? {
                Some(ids) => Value::Int(ids.len() as i64),
                None => Value::Undefined,
            },
            IsEmpty(s) | NotEmpty(s) => match self.set_of(self.eval(s, env)?, "isEmpty")? {
                Some(ids) => Value::Bool(ids.is_empty() == matches!(e.kind, IsEmpty(_))),
                None => Value::Undefined,
            },
            OclIsNew(x) => {
                let v = self.eval(x, env)?;
                match (v, self.pre) {
                    (Value::Ref(id), Some((pre, _))) => Value::Bool(self.store.contains(id) && !pre.contains(id)),
                    (Value::Ref(_), None) => Value::Bool(false),
                    _ => Value::Bool(false),
                }
            }
            OclIsUndefined(x) => {
                let v = self.eval(x, env)?;
                Value::Bool(v.is_undefined() || matches!(v, Value::Ref(_)) && self.live_ref(&v).is_none())
            }
            OclIsTypeOf(x, ty) => {
                let v = self.eval(x, env)?;
                let ok = match (PrimType::from_name(ty), &v) {
                    (Some(p), v) => !v.is_undefined() && v.type_name() == p.name(),
                    (None, Value::Ref(id)) => self.store.class_of(*id) == Some(ty.as_str()),
                    _ => false,
                };
                Value::Bool(ok)
            }
            LetIn { body, .. } => self.eval(body, env)?,
            And(l, r) => match self.eval(l, env)? {
                Value::Bool(false) => Value::Bool(false),
                lv => match (lv, self.eval(r, env)?) {
                    (_, Value::Bool(false)) => Value::Bool(false),
                    (Value::Bool(true), Value::Bool(true)) => Value::Bool(true),
                    (a, b) => self.logic_operands(a, b, "and")?,
                },
            },
            Or(l, r) => match self.eval(l, env)? {
                Value::Bool(true) => Value::Bool(true),
                lv => match (lv, self.eval(r, env)?) {
                    (_, Value::Bool(true)) => Value::Bool(true),
                    (Value::Bool(false), Value::Bool(false)) => Value::Bool(false),
                    (a, b) => self.logic_operands(a, b, "or")?,
                },
            },
            Not(x) => match self.eval(x, env)? {
                Value::Bool(b) => Value::Bool(!b),
                Value::Undefined => Value::Undefined,
                other => return Err(EvalError(format!("`not` needs a Boolean, got {other}"))),
            },
            Compare(op, l, r) => {
                let lv = self.eval(l, env)?;
                let rv = self.eval(r, env)?;
                let null_check = matches!(l.kind, Null) || matches!(r.kind, Null);
                if null_check && matches!(op, CompareOp::Eq | CompareOp::Ne) {
                    let undef = |v: &Value| v.is_undefined() || matches!(v, Value::Ref(_)) && self.live_ref(v).is_none();
                    let both = undef(&lv) && undef(&rv);
                    return Ok(Value::Bool(if *op == CompareOp::Eq { both } else { !both }));
                }
                if lv.is_undefined() || rv.is_undefined() {
                    return Ok(Value::Undefined);
                }
                self.compare(*op, &lv, &rv)?
            }
            Arith(op, l, r) => {
                let lv = self.eval(l, env)?;
                let rv = self.eval(r, env)?;
                self.arith(*op, lv, rv)?
            }
            External { service, op, .. } => {
                return Err(EvalError(format!("`{service}::{op}` is an external service and cannot be evaluated here")))
            }
            Call { name, .. } => return Err(EvalError(format!("operation `{name}` is not supported by the evaluator"))),
        })
    }

    fn logic_operands(&self, a: Value, b: Value, op: &str) -> Result<Value, EvalError> {
        for v in [&a, &b] {
            if !matches!(v, Value::Bool(_) | Value::Undefined) {
                return Err(EvalError(format!("`{op}` needs Boolean operands, got {v}")));
            }
        }
        Ok(Value::Undefined)
    }

    fn iterate(&self, op: IterOp, ids: Vec<ObjectId>, var: &str, body: &Expr, env: &mut Env) -> Result<Value, EvalError> {
        let mut results = Vec::with_capacity(ids.len());
        for id in &ids {
            env.push(var, Value::Ref(*id));
            let r = self.eval(body, env);
            env.pop();
            let r = r?;
            if op == IterOp::Any && r == Value::Bool(true) {
                return Ok(Value::Ref(*id));
            }
            results.push(r);
        }
        Ok(match op {
            IterOp::Any => Value::Undefined,
            IterOp::Select | IterOp::Reject => {
                let want = op == IterOp::Select;
                Value::RefSet(
                    ids.into_iter().zip(&results).filter(|(_, r)| **r == Value::Bool(want)).map(|(id, _)| id).collect(),
                )
            }
            IterOp::ForAll => {
                if results.contains(&Value::Bool(false)) {
                    Value::Bool(false)
                } else if results.iter().all(|r| *r == Value::Bool(true)) {
                    Value::Bool(true)
                } else {
                    Value::Undefined
                }
            }
            IterOp::Exists => {
                if results.contains(&Value::Bool(true)) {
                    Value::Bool(true)
                } else if results.iter().all(|r| *r == Value::Bool(false)) {
                    Value::Bool(false)
                } else {
                    Value::Undefined
                }
            }
            IterOp::IsUnique => {
                let mut unique = true;
                'outer: for (i, a) in results.iter().enumerate() {
                    for b in &results[i + 1..] {
                        if a.ocl_eq(b, self.tolerance) {
                            unique = false;
                            break 'outer;
                        }
                    }
                }
                Value::Bool(unique)
            }
        })
    }
}

/// Text of an expression for user-facing messages.
pub fn expr_text(e: &Expr) -> String {
    print_expr(e)
}
