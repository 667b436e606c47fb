//! Name resolution and type inference.
//!
//! Resolution classifies every simple name (parameter, definition, `let`,
//! iterator variable or use-case session binding) and every navigation
//! (attribute, one/many role, session slot), writing the result back into the
//! AST. Type inference runs over the same walk.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::expr::{ArithOp, CompareOp, Expr, ExprKind, IterOp, NavKind, PrimType, Span, TypeRef, VarKind};
use crate::model::{Contract, Multiplicity, RequirementsModel};
use crate::parser::Diagnostic;
use crate::schema::Schema;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SemType {
    Prim(PrimType),
    Ref(String),
    RefSet(String),
    Null,
    /// The use-case session object (`self` inside a contract).
    Session,
    Unknown,
}

impl SemType {
    pub fn from_type_ref(t: &TypeRef) -> SemType {
        match t {
            TypeRef::Prim(p) => SemType::Prim(*p),
            TypeRef::Class(c) => SemType::Ref(c.clone()),
            TypeRef::Set(c) => SemType::RefSet(c.clone()),
        }
    }

    fn is_numeric(&self) -> bool {
        matches!(self, SemType::Prim(PrimType::Integer | PrimType::Real) | SemType::Unknown)
    }

    fn is_bool(&self) -> bool {
        matches!(self, SemType::Prim(PrimType::Boolean) | SemType::Unknown)
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::Prim(p) => write!(f, "{p}"),
            SemType::Ref(c) => f.write_str(c),
            SemType::RefSet(c) => write!(f, "Set({c})"),
            SemType::Null => f.write_str("null"),
            SemType::Session => f.write_str("session"),
            SemType::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameKind {
    Class,
    Attribute,
    Role,
    Member,
    Variable,
    Actor,
    UseCase,
    Operation,
    Contract,
    Type,
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NameKind::Class => "class",
            NameKind::Attribute => "attribute",
            NameKind::Role => "association role",
            NameKind::Member => "attribute or role",
            NameKind::Variable => "variable",
            NameKind::Actor => "actor",
            NameKind::UseCase => "use case",
            NameKind::Operation => "operation",
            NameKind::Contract => "contract",
            NameKind::Type => "type",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {message}")]
pub struct NameError {
    pub span: Span,
    pub name: String,
    pub expected: NameKind,
    pub message: String,
}

impl NameError {
    fn new(span: Span, name: &str, expected: NameKind, message: impl Into<String>) -> Self {
        NameError { span, name: name.to_string(), expected, message: message.into() }
    }

    fn unknown(span: Span, name: &str, expected: NameKind, context: &str) -> Self {
        NameError::new(span, name, expected, format!("unknown {expected} `{name}`{context}"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: type error: {message}")]
pub struct TypeError {
    pub span: Span,
    pub message: String,
}

/// A model whose names are all resolved. Session binding types are inferred
/// per use case from the post-condition assignments that write them.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub model: RequirementsModel,
    pub schema: Schema,
    pub sessions: BTreeMap<String, BTreeMap<String, SemType>>,
    pub warnings: Vec<Diagnostic>,
}

impl ResolvedModel {
    pub fn session_types(&self, use_case: &str) -> Option<&BTreeMap<String, SemType>> {
        self.sessions.get(use_case)
    }

    /// Type of `expr` evaluated in the post-condition scope of the given
    /// contract (parameters, definitions, session bindings and `result`).
    pub fn type_of_in_contract(&self, contract: &Contract, expr: &Expr) -> Result<SemType, TypeError> {
        self.type_of_in_scope(contract, &[], expr)
    }

    /// As `type_of_in_contract`, with extra `let`-style locals in scope.
    pub fn type_of_in_scope(
        &self,
        contract: &Contract,
        locals: &[(String, SemType)],
        expr: &Expr,
    ) -> Result<SemType, TypeError> {
        let empty = BTreeMap::new();
        let sessions = self.sessions.get(&contract.use_case).unwrap_or(&empty);
        let mut w = Walker::for_contract(&self.schema, sessions, contract, Section::Post);
        for d in &contract.definitions {
            w.scope.push((d.name.clone(), VarKind::Definition, SemType::from_type_ref(&d.ty)));
        }
        for (n, t) in locals {
            w.scope.push((n.clone(), VarKind::Let, t.clone()));
        }
        let mut e = expr.clone();
        let t = w.infer(&mut e);
        match w.type_errors.into_iter().next() {
            Some(err) => Err(err),
            None => Ok(t),
        }
    }

    /// Type of a closed expression (no free variables besides class names).
    pub fn type_of(&self, expr: &Expr) -> Result<SemType, TypeError> {
        let mut w = Walker::new(&self.schema, None, SelfTy::None, None);
        let mut e = expr.clone();
        let t = w.infer(&mut e);
        match w.type_errors.into_iter().next() {
            Some(err) => Err(err),
            None => Ok(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Definition,
    Pre,
    Post,
}

#[derive(Debug, Clone, PartialEq)]
enum SelfTy {
    None,
    Session,
    Object(String),
}

struct Walker<'a> {
    schema: &'a Schema,
    /// `None` outside contracts: free names are errors there.
    sessions: Option<&'a BTreeMap<String, SemType>>,
    self_ty: SelfTy,
    /// `Some` only while walking a post-condition.
    result_ty: Option<SemType>,
    scope: Vec<(String, VarKind, SemType)>,
    name_errors: Vec<NameError>,
    type_errors: Vec<TypeError>,
    session_uses: Vec<(String, Span)>,
    session_writes: Vec<(String, SemType)>,
}

impl<'a> Walker<'a> {
    fn new(
        schema: &'a Schema,
        sessions: Option<&'a BTreeMap<String, SemType>>,
        self_ty: SelfTy,
        result_ty: Option<SemType>,
    ) -> Self {
        Walker {
            schema,
            sessions,
            self_ty,
            result_ty,
            scope: Vec::new(),
            name_errors: Vec::new(),
            type_errors: Vec::new(),
            session_uses: Vec::new(),
            session_writes: Vec::new(),
        }
    }

    fn for_contract(
        schema: &'a Schema,
        sessions: &'a BTreeMap<String, SemType>,
        c: &Contract,
        section: Section,
    ) -> Self {
        let result_ty = (section == Section::Post).then(|| {
            c.signature.ret.as_ref().map(SemType::from_type_ref).unwrap_or(SemType::Unknown)
        });
        let mut w = Walker::new(schema, Some(sessions), SelfTy::Session, result_ty);
        for p in &c.signature.params {
            w.scope.push((p.name.clone(), VarKind::Param, SemType::Prim(p.ty)));
        }
        w
    }

    fn type_err(&mut self, span: Span, msg: impl Into<String>) {
        self.type_errors.push(TypeError { span, message: msg.into() });
    }

    fn expect_bool(&mut self, t: &SemType, span: Span, what: &str) {
        if !t.is_bool() {
            self.type_err(span, format!("{what} must be Boolean, found {t}"));
        }
    }

    fn lookup(&self, name: &str) -> Option<(VarKind, SemType)> {
        self.scope.iter().rev().find(|(n, _, _)| n == name).map(|(_, k, t)| (*k, t.clone()))
    }

    fn check_class(&mut self, name: &str, span: Span) -> bool {
        if self.schema.has_class(name) {
            true
        } else {
            self.name_errors.push(NameError::unknown(span, name, NameKind::Class, ""));
            false
        }
    }

    fn element_class(&mut self, t: &SemType, span: Span, op: &str) -> SemType {
        match t {
            SemType::RefSet(c) => SemType::Ref(c.clone()),
            SemType::Unknown => SemType::Unknown,
            other => {
                self.type_err(span, format!("`{op}` needs a collection, found {other}"));
                SemType::Unknown
            }
        }
    }

    fn assignable(&self, target: &SemType, value: &SemType) -> bool {
        match (target, value) {
            (SemType::Unknown, _) | (_, SemType::Unknown) => true,
            (SemType::Ref(_), SemType::Null) | (SemType::Prim(_), SemType::Null) => true,
            (SemType::Prim(PrimType::Real), SemType::Prim(PrimType::Integer)) => true,
            (SemType::Prim(a), SemType::Prim(b)) => a == b,
            (SemType::Ref(a), SemType::Ref(b)) | (SemType::RefSet(a), SemType::RefSet(b)) => {
                self.schema.conforms(b, a)
            }
            _ => false,
        }
    }

    fn comparable(&self, op: CompareOp, l: &SemType, r: &SemType) -> bool {
        use SemType::*;
        if matches!(l, Unknown) || matches!(r, Unknown) {
            return true;
        }
        match op {
            CompareOp::Eq | CompareOp::Ne => match (l, r) {
                (Null, _) | (_, Null) => true,
                (a, b) if a.is_numeric() && b.is_numeric() => true,
                (Prim(a), Prim(b)) => a == b,
                (Ref(a), Ref(b)) | (RefSet(a), RefSet(b)) => {
                    self.schema.conforms(a, b) || self.schema.conforms(b, a)
                }
                _ => false,
            },
            _ => (l.is_numeric() && r.is_numeric()) || (*l == Prim(PrimType::String) && *r == Prim(PrimType::String)),
        }
    }

    fn with_binding<T>(&mut self, name: &str, kind: VarKind, ty: SemType, f: impl FnOnce(&mut Self) -> T) -> T {
        self.scope.push((name.to_string(), kind, ty));
        let out = f(self);
        self.scope.pop();
        out
    }

    fn infer(&mut self, e: &mut Expr) -> SemType {
        let span = e.span;
        match &mut e.kind {
            ExprKind::IntLit(_) => SemType::Prim(PrimType::Integer),
            ExprKind::RealLit(_) => SemType::Prim(PrimType::Real),
            ExprKind::StrLit(_) => SemType::Prim(PrimType::String),
            ExprKind::BoolLit(_) => SemType::Prim(PrimType::Boolean),
            ExprKind::Null => SemType::Null,
            ExprKind::Var { name, kind } => {
                if let Some((k, t)) = self.lookup(name) {
                    *kind = k;
                    return t;
                }
                match self.sessions {
                    Some(s) => {
                        *kind = VarKind::Session;
                        self.session_uses.push((name.clone(), span));
                        s.get(name.as_str()).cloned().unwrap_or(SemType::Unknown)
                    }
                    None => {
                        self.name_errors.push(NameError::unknown(span, name, NameKind::Variable, ""));
                        SemType::Unknown
                    }
                }
            }
            ExprKind::SelfRef => match &self.self_ty {
                SelfTy::Session => SemType::Session,
                SelfTy::Object(c) => SemType::Ref(c.clone()),
                SelfTy::None => {
                    self.name_errors.push(NameError::new(
                        span,
                        "self",
                        NameKind::Variable,
                        "`self` is only meaningful in contracts and context-class invariants",
                    ));
                    SemType::Unknown
                }
            },
            ExprKind::ResultRef => match &self.result_ty {
                Some(t) => t.clone(),
                None => {
                    self.name_errors.push(NameError::new(
                        span,
                        "result",
                        NameKind::Variable,
                        "`result` may only appear in a postcondition",
                    ));
                    SemType::Unknown
                }
            },
            ExprKind::Nav { target, name, kind } => {
                let t = self.infer(target);
                match t {
                    SemType::Session => {
                        *kind = NavKind::Session;
                        self.session_uses.push((name.clone(), span));
                        self.sessions
                            .and_then(|s| s.get(name.as_str()).cloned())
                            .unwrap_or(SemType::Unknown)
                    }
                    SemType::Ref(ref class) => {
                        if let Some(p) = self.schema.attribute(class, name) {
                            *kind = NavKind::Attribute;
                            SemType::Prim(p)
                        } else if let Some(r) = self.schema.role(class, name) {
                            match r.multiplicity {
                                Multiplicity::One => {
                                    *kind = NavKind::RoleOne;
                                    SemType::Ref(r.target.clone())
                                }
                                Multiplicity::Many => {
                                    *kind = NavKind::RoleMany;
                                    SemType::RefSet(r.target.clone())
                                }
                            }
                        } else {
                            if self.schema.has_class(class) {
                                let ctx = format!(" on class `{class}`");
                                self.name_errors.push(NameError::unknown(span, name, NameKind::Member, &ctx));
                            }
                            SemType::Unknown
                        }
                    }
                    SemType::Unknown => {
                        *kind = NavKind::Dynamic;
                        SemType::Unknown
                    }
                    other => {
                        self.type_err(span, format!("cannot navigate `.{name}` on a value of type {other}"));
                        SemType::Unknown
                    }
                }
            }
            ExprKind::AtPre(inner) => self.infer(inner),
            ExprKind::AllInstances(c) => {
                if self.check_class(c, span) {
                    SemType::RefSet(c.clone())
                } else {
                    SemType::Unknown
                }
            }
            ExprKind::Iterate { op, source, var, body } => {
                let st = self.infer(source);
                let mut elem = self.element_class(&st, span, op.name());
                if let Some(ty) = &var.ty {
                    if self.check_class(ty, span) {
                        elem = SemType::Ref(ty.clone());
                    }
                }
                let op = *op;
                let bt = self.with_binding(&var.name, VarKind::Bound, elem.clone(), |w| w.infer(body));
                if op != IterOp::IsUnique {
                    self.expect_bool(&bt, body.span, &format!("the body of `{}`", op.name()));
                }
                match op {
                    IterOp::Any => elem,
                    IterOp::Select | IterOp::Reject => st,
                    IterOp::ForAll | IterOp::Exists | IterOp::IsUnique => SemType::Prim(PrimType::Boolean),
                }
            }
            ExprKind::Fold { source, var, acc, acc_ty, init, body } => {
                let st = self.infer(source);
                let mut elem = self.element_class(&st, span, "iterate");
                if let Some(ty) = &var.ty {
                    if self.check_class(ty, span) {
                        elem = SemType::Ref(ty.clone());
                    }
                }
                let acc_t = SemType::Prim(*acc_ty);
                let it = self.infer(init);
                if !self.assignable(&acc_t, &it) {
                    self.type_err(init.span, format!("accumulator of type {acc_t} cannot start from {it}"));
                }
                let acc_name = acc.clone();
                let bt = self.with_binding(&var.name, VarKind::Bound, elem, |w| {
                    w.with_binding(&acc_name, VarKind::Bound, acc_t.clone(), |w| w.infer(body))
                });
                if !self.assignable(&acc_t, &bt) {
                    self.type_err(body.span, format!("iterate body yields {bt}, accumulator is {acc_t}"));
                }
                acc_t
            }
            ExprKind::Includes(s, a) | ExprKind::Excludes(s, a) => {
                let st = self.infer(s);
                let elem = self.element_class(&st, span, "includes/excludes");
                let at = self.infer(a);
                if !matches!(at, SemType::Ref(_) | SemType::Unknown | SemType::Null) {
                    self.type_err(a.span, format!("collection membership needs an object, found {at}"));
                } else if !self.comparable(CompareOp::Eq, &elem, &at) {
                    self.type_err(a.span, format!("{at} can never be a member of {st}"));
                }
                SemType::Prim(PrimType::Boolean)
            }
            ExprKind::Size(s) => {
                let st = self.infer(s);
                self.element_class(&st, span, "size");
                SemType::Prim(PrimType::Integer)
            }
            ExprKind::IsEmpty(s) | ExprKind::NotEmpty(s) => {
                let st = self.infer(s);
                self.element_class(&st, span, "isEmpty");
                SemType::Prim(PrimType::Boolean)
            }
            ExprKind::OclIsNew(s) => {
                let t = self.infer(s);
                if !matches!(t, SemType::Ref(_) | SemType::Unknown) {
                    self.type_err(span, format!("`oclIsNew` applies to objects, found {t}"));
                }
                SemType::Prim(PrimType::Boolean)
            }
            ExprKind::OclIsUndefined(s) => {
                self.infer(s);
                SemType::Prim(PrimType::Boolean)
            }
            ExprKind::OclIsTypeOf(s, ty) => {
                self.infer(s);
                if PrimType::from_name(ty).is_none() && !self.schema.has_class(ty) {
                    self.name_errors.push(NameError::unknown(span, ty, NameKind::Type, ""));
                }
                SemType::Prim(PrimType::Boolean)
            }
            ExprKind::LetIn { name, class, body } => {
                let ty = if self.check_class(class, span) { SemType::Ref(class.clone()) } else { SemType::Unknown };
                let name = name.clone();
                self.with_binding(&name, VarKind::Let, ty, |w| w.infer(body))
            }
            ExprKind::And(l, r) | ExprKind::Or(l, r) => {
                let lt = self.infer(l);
                let rt = self.infer(r);
                self.expect_bool(&lt, l.span, "operand of a logical connective");
                self.expect_bool(&rt, r.span, "operand of a logical connective");
                SemType::Prim(PrimType::Boolean)
            }
            ExprKind::Not(inner) => {
                let t = self.infer(inner);
                self.expect_bool(&t, inner.span, "operand of `not`");
                SemType::Prim(PrimType::Boolean)
            }
            ExprKind::Compare(op, l, r) => {
                let op = *op;
                let lt = self.infer(l);
                let rt = self.infer(r);
                if !self.comparable(op, &lt, &rt) {
                    self.type_err(span, format!("cannot compare {lt} {} {rt}", op.symbol()));
                }
                if op == CompareOp::Eq && self.result_ty.is_some() {
                    if let ExprKind::Nav { name, kind: NavKind::Attribute, .. } = &l.kind {
                        if lt == SemType::Prim(PrimType::Integer) && rt == SemType::Prim(PrimType::Real) {
                            self.type_err(span, format!("`{name}` is Integer but would be assigned a Real"));
                        }
                    }
                    let session_name = match &l.kind {
                        ExprKind::Nav { name, kind: NavKind::Session, .. } => Some(name.clone()),
                        ExprKind::Var { name, kind: VarKind::Session } => Some(name.clone()),
                        _ => None,
                    };
                    if let Some(n) = session_name {
                        self.session_writes.push((n, rt));
                    }
                }
                SemType::Prim(PrimType::Boolean)
            }
            ExprKind::Arith(op, l, r) => {
                let op = *op;
                let lt = self.infer(l);
                let rt = self.infer(r);
                if !lt.is_numeric() || !rt.is_numeric() {
                    self.type_err(span, format!("`{}` needs numeric operands, found {lt} and {rt}", op.symbol()));
                    return SemType::Unknown;
                }
                match (&lt, &rt) {
                    (SemType::Unknown, _) | (_, SemType::Unknown) => SemType::Unknown,
                    _ if op == ArithOp::Div => SemType::Prim(PrimType::Real),
                    (SemType::Prim(PrimType::Integer), SemType::Prim(PrimType::Integer)) => {
                        SemType::Prim(PrimType::Integer)
                    }
                    _ => SemType::Prim(PrimType::Real),
                }
            }
            ExprKind::External { args, .. } => {
                for a in args.iter_mut() {
                    self.infer(a);
                }
                SemType::Unknown
            }
            ExprKind::Call { source, binder, args, .. } => {
                let st = self.infer(source);
                match binder {
                    Some(b) => {
                        let elem = match &st {
                            SemType::RefSet(c) => SemType::Ref(c.clone()),
                            _ => SemType::Unknown,
                        };
                        let name = b.name.clone();
                        self.with_binding(&name, VarKind::Bound, elem, |w| {
                            for a in args.iter_mut() {
                                w.infer(a);
                            }
                        });
                    }
                    None => {
                        for a in args.iter_mut() {
                            self.infer(a);
                        }
                    }
                }
                SemType::Unknown
            }
        }
    }
}

struct ContractOutcome {
    name_errors: Vec<NameError>,
    type_errors: Vec<TypeError>,
    session_uses: Vec<(String, Span)>,
    session_writes: Vec<(String, SemType)>,
}

fn walk_contract(schema: &Schema, sessions: &BTreeMap<String, SemType>, c: &mut Contract) -> ContractOutcome {
    let mut out = ContractOutcome {
        name_errors: Vec::new(),
        type_errors: Vec::new(),
        session_uses: Vec::new(),
        session_writes: Vec::new(),
    };
    let mut seen = BTreeSet::new();
    for p in &c.signature.params {
        if !seen.insert(p.name.clone()) {
            out.name_errors.push(NameError::new(c.span, &p.name, NameKind::Variable, format!("duplicate parameter `{}`", p.name)));
        }
    }
    if let Some(TypeRef::Class(cl) | TypeRef::Set(cl)) = &c.signature.ret {
        if !schema.has_class(cl) {
            out.name_errors.push(NameError::unknown(c.span, cl, NameKind::Class, " in return type"));
        }
    }

    let snapshot = c.clone();
    let mut defs_scope: Vec<(String, VarKind, SemType)> = Vec::new();
    for d in c.definitions.iter_mut() {
        let mut w = Walker::for_contract(schema, sessions, &snapshot, Section::Definition);
        w.scope.extend(defs_scope.iter().cloned());
        if !seen.insert(d.name.clone()) {
            w.name_errors.push(NameError::new(d.span, &d.name, NameKind::Variable, format!("duplicate binding `{}`", d.name)));
        }
        if let TypeRef::Class(cl) | TypeRef::Set(cl) = &d.ty {
            w.check_class(cl, d.span);
        }
        let declared = SemType::from_type_ref(&d.ty);
        let t = w.infer(&mut d.expr);
        if !w.assignable(&declared, &t) {
            w.type_err(d.expr.span, format!("definition `{}` is declared {declared} but its value has type {t}", d.name));
        }
        defs_scope.push((d.name.clone(), VarKind::Definition, declared));
        absorb(&mut out, w);
    }

    for section in [Section::Pre, Section::Post] {
        let mut w = Walker::for_contract(schema, sessions, &snapshot, section);
        w.scope.extend(defs_scope.iter().cloned());
        let e = if section == Section::Pre { &mut c.precondition } else { &mut c.postcondition };
        let t = w.infer(e);
        let what = if section == Section::Pre { "precondition" } else { "postcondition" };
        w.expect_bool(&t, e.span, what);
        absorb(&mut out, w);
    }
    out
}

fn absorb(out: &mut ContractOutcome, w: Walker<'_>) {
    out.name_errors.extend(w.name_errors);
    out.type_errors.extend(w.type_errors);
    out.session_uses.extend(w.session_uses);
    out.session_writes.extend(w.session_writes);
}

fn structural_checks(model: &RequirementsModel, errors: &mut Vec<NameError>) {
    let mut classes = BTreeSet::new();
    for c in &model.classes {
        if !classes.insert(c.name.as_str()) {
            errors.push(NameError::new(c.span, &c.name, NameKind::Class, format!("duplicate class `{}`", c.name)));
        }
        let mut attrs = BTreeSet::new();
        for a in &c.attributes {
            if !attrs.insert(a.name.as_str()) {
                errors.push(NameError::new(c.span, &a.name, NameKind::Attribute, format!("duplicate attribute `{}` in class `{}`", a.name, c.name)));
            }
        }
    }
    for c in &model.classes {
        if let Some(s) = &c.super_class {
            if !classes.contains(s.as_str()) {
                errors.push(NameError::unknown(c.span, s, NameKind::Class, " as superclass"));
                continue;
            }
            // cycle check
            let mut cur = Some(s.as_str());
            let mut steps = 0;
            while let Some(n) = cur {
                if n == c.name {
                    errors.push(NameError::new(c.span, &c.name, NameKind::Class, format!("class `{}` inherits from itself", c.name)));
                    break;
                }
                steps += 1;
                if steps > model.classes.len() {
                    break;
                }
                cur = model.class(n).and_then(|k| k.super_class.as_deref());
            }
        }
    }
    let schema = Schema::build(model);
    let mut ends = BTreeSet::new();
    for a in &model.associations {
        if !classes.contains(a.owner.as_str()) {
            errors.push(NameError::unknown(a.span, &a.owner, NameKind::Class, " as association owner"));
        }
        if !classes.contains(a.target.as_str()) {
            errors.push(NameError::unknown(a.span, &a.target, NameKind::Class, " as association target"));
        }
        if !ends.insert((a.owner.as_str(), a.role.as_str())) {
            errors.push(NameError::new(a.span, &a.role, NameKind::Role, format!("duplicate role `{}.{}`", a.owner, a.role)));
        }
        if schema.attribute(&a.owner, &a.role).is_some() {
            errors.push(NameError::new(a.span, &a.role, NameKind::Role, format!("role `{}.{}` clashes with an attribute", a.owner, a.role)));
        }
    }
    let actors: BTreeSet<&str> = model.actors.iter().map(String::as_str).collect();
    let mut use_cases = BTreeSet::new();
    for u in &model.use_cases {
        if !use_cases.insert(u.name.as_str()) {
            errors.push(NameError::new(u.span, &u.name, NameKind::UseCase, format!("duplicate use case `{}`", u.name)));
        }
        if !actors.contains(u.actor.as_str()) {
            errors.push(NameError::unknown(u.span, &u.actor, NameKind::Actor, ""));
        }
        let mut ops = BTreeSet::new();
        for op in &u.operations {
            if !ops.insert(op.as_str()) {
                errors.push(NameError::new(u.span, op, NameKind::Operation, format!("operation `{op}` listed twice in `{}`", u.name)));
            }
            let n = model.contracts.iter().filter(|c| c.use_case == u.name && c.signature.name == *op).count();
            if n == 0 {
                errors.push(NameError::new(u.span, op, NameKind::Contract, format!("operation `{}::{op}` has no contract", u.name)));
            }
        }
    }
    let mut contracts = BTreeSet::new();
    for c in &model.contracts {
        if !contracts.insert((c.use_case.as_str(), c.signature.name.as_str())) {
            errors.push(NameError::new(c.span, &c.signature.name, NameKind::Contract, format!("duplicate contract `{}`", c.qualified_name())));
        }
        match model.use_case(&c.use_case) {
            None => errors.push(NameError::unknown(c.span, &c.use_case, NameKind::UseCase, "")),
            Some(u) if !u.operations.contains(&c.signature.name) => errors.push(NameError::new(
                c.span,
                &c.signature.name,
                NameKind::Operation,
                format!("contract `{}` is not listed in use case `{}`", c.qualified_name(), c.use_case),
            )),
            _ => {}
        }
    }
    let mut invs = BTreeSet::new();
    for i in &model.invariants {
        if !invs.insert(i.name.as_str()) {
            errors.push(NameError::new(i.span, &i.name, NameKind::Variable, format!("duplicate invariant `{}`", i.name)));
        }
    }
}

struct Resolution {
    resolved: ResolvedModel,
    name_errors: Vec<NameError>,
    type_errors: Vec<TypeError>,
}

fn resolve_all(model: &RequirementsModel) -> Resolution {
    let mut name_errors = Vec::new();
    structural_checks(model, &mut name_errors);
    let schema = Schema::build(model);
    let mut out = model.clone();
    let mut type_errors = Vec::new();
    let mut warnings = Vec::new();

    // Session binding types: iterate until the inferred table is stable.
    let mut use_case_names: Vec<String> = model.use_cases.iter().map(|u| u.name.clone()).collect();
    for c in &model.contracts {
        if !use_case_names.contains(&c.use_case) {
            use_case_names.push(c.use_case.clone());
        }
    }
    let mut sessions: BTreeMap<String, BTreeMap<String, SemType>> = BTreeMap::new();
    for uc in &use_case_names {
        let mut table: BTreeMap<String, SemType> = BTreeMap::new();
        for _ in 0..4 {
            let mut next = BTreeMap::new();
            for c in model.contracts.iter().filter(|c| c.use_case == *uc) {
                let mut scratch = c.clone();
                let o = walk_contract(&schema, &table, &mut scratch);
                for (n, t) in o.session_writes {
                    let slot = next.entry(n).or_insert(SemType::Unknown);
                    if *slot == SemType::Unknown || *slot == SemType::Null {
                        *slot = t;
                    }
                }
            }
            if next == table {
                break;
            }
            table = next;
        }
        sessions.insert(uc.clone(), table);
    }

    let empty = BTreeMap::new();
    for c in out.contracts.iter_mut() {
        let table = sessions.get(&c.use_case).unwrap_or(&empty);
        let o = walk_contract(&schema, table, c);
        name_errors.extend(o.name_errors);
        type_errors.extend(o.type_errors);
        let mut warned = BTreeSet::new();
        for (n, span) in o.session_uses {
            if !table.contains_key(&n) && warned.insert(n.clone()) {
                warnings.push(Diagnostic::warning(
                    span,
                    format!("`{n}` is read as a session binding of `{}` but no operation of that use case assigns it", c.use_case),
                ));
            }
        }
    }

    for inv in out.invariants.iter_mut() {
        let self_ty = match &inv.context {
            Some(cl) => {
                if !schema.has_class(cl) {
                    name_errors.push(NameError::unknown(inv.span, cl, NameKind::Class, " as invariant context"));
                }
                SelfTy::Object(cl.clone())
            }
            None => SelfTy::None,
        };
        let mut w = Walker::new(&schema, None, self_ty, None);
        let t = w.infer(&mut inv.expr);
        w.expect_bool(&t, inv.expr.span, "an invariant");
        name_errors.extend(w.name_errors);
        type_errors.extend(w.type_errors);
    }

    Resolution {
        resolved: ResolvedModel { model: out, schema, sessions, warnings },
        name_errors,
        type_errors,
    }
}

/// Resolves every name in the model. All-or-nothing: any failure returns
/// the complete list of located errors.
pub fn resolve_names(model: &RequirementsModel) -> Result<ResolvedModel, Vec<NameError>> {
    let r = resolve_all(model);
    if r.name_errors.is_empty() {
        Ok(r.resolved)
    } else {
        Err(r.name_errors)
    }
}

/// Type-checks every contract and invariant of a resolved model.
pub fn check_types(model: &ResolvedModel) -> Vec<TypeError> {
    resolve_all(&model.model).type_errors
}

#[cfg(test)]
mod tests;
