//! AST for the supported OCL subset.

use std::fmt;

/// Line/column position in a source file (1-based).
///
/// Spans never take part in structural equality: two expressions parsed from
/// differently formatted text compare equal when their trees match.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimType {
    Integer,
    Real,
    Boolean,
    String,
}

impl PrimType {
    pub fn from_name(name: &str) -> Option<PrimType> {
        match name {
            "Integer" => Some(PrimType::Integer),
            "Real" => Some(PrimType::Real),
            "Boolean" => Some(PrimType::Boolean),
            "String" => Some(PrimType::String),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PrimType::Integer => "Integer",
            PrimType::Real => "Real",
            PrimType::Boolean => "Boolean",
            PrimType::String => "String",
        }
    }
}

impl fmt::Display for PrimType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A declared type: primitive, a class reference or a set of class references.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Prim(PrimType),
    Class(String),
    Set(String),
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Prim(p) => write!(f, "{p}"),
            TypeRef::Class(c) => f.write_str(c),
            TypeRef::Set(c) => write!(f, "Set({c})"),
        }
    }
}

/// What a simple name refers to. Filled in by name resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Unresolved,
    Param,
    Definition,
    Let,
    Bound,
    Session,
}

/// What `target.name` refers to. Filled in by name resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NavKind {
    Unresolved,
    Attribute,
    RoleOne,
    RoleMany,
    /// `self.x` inside a contract: a session binding of the use case.
    Session,
    /// Target type unknown statically; decided on the live object.
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "<>",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

/// Iterator-style collection operations: `source->op(v | body)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IterOp {
    Any,
    Select,
    Reject,
    ForAll,
    Exists,
    IsUnique,
}

impl IterOp {
    pub fn from_name(name: &str) -> Option<IterOp> {
        match name {
            "any" => Some(IterOp::Any),
            "select" => Some(IterOp::Select),
            "reject" => Some(IterOp::Reject),
            "forAll" => Some(IterOp::ForAll),
            "exists" => Some(IterOp::Exists),
            "isUnique" => Some(IterOp::IsUnique),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IterOp::Any => "any",
            IterOp::Select => "select",
            IterOp::Reject => "reject",
            IterOp::ForAll => "forAll",
            IterOp::Exists => "exists",
            IterOp::IsUnique => "isUnique",
        }
    }
}

/// Bound iterator variable with optional declared class.
#[derive(Debug, Clone, PartialEq)]
pub struct Binder {
    pub name: String,
    pub ty: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    IntLit(i64),
    RealLit(f64),
    StrLit(String),
    BoolLit(bool),
    Null,
    Var { name: String, kind: VarKind },
    SelfRef,
    ResultRef,
    Nav { target: Box<Expr>, name: String, kind: NavKind },
    AtPre(Box<Expr>),
    AllInstances(String),
    Iterate { op: IterOp, source: Box<Expr>, var: Binder, body: Box<Expr> },
    /// `source->iterate(v; acc:T = init | body)`
    Fold { source: Box<Expr>, var: Binder, acc: String, acc_ty: PrimType, init: Box<Expr>, body: Box<Expr> },
    Includes(Box<Expr>, Box<Expr>),
    Excludes(Box<Expr>, Box<Expr>),
    Size(Box<Expr>),
    IsEmpty(Box<Expr>),
    NotEmpty(Box<Expr>),
    OclIsNew(Box<Expr>),
    OclIsUndefined(Box<Expr>),
    OclIsTypeOf(Box<Expr>, String),
    /// `let name:Class in body`
    LetIn { name: String, class: String, body: Box<Expr> },
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    /// `Service::op(args)`
    External { service: String, op: String, args: Vec<Expr> },
    /// Any operation call outside the supported vocabulary, kept so the
    /// decomposer can flag it instead of the parser rejecting the model.
    Call { source: Box<Expr>, arrow: bool, name: String, binder: Option<Binder>, args: Vec<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn var(name: &str, span: Span) -> Self {
        Expr::new(ExprKind::Var { name: name.to_string(), kind: VarKind::Unresolved }, span)
    }

    /// Immediate children, in source order.
    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match &self.kind {
            IntLit(_) | RealLit(_) | StrLit(_) | BoolLit(_) | Null | Var { .. } | SelfRef | ResultRef
            | AllInstances(_) => vec![],
            Nav { target, .. } => vec![target],
            AtPre(e) | Size(e) | IsEmpty(e) | NotEmpty(e) | OclIsNew(e) | OclIsUndefined(e) | Not(e)
            | OclIsTypeOf(e, _) => vec![e],
            Iterate { source, body, .. } => vec![source, body],
            Fold { source, init, body, .. } => vec![source, init, body],
            Includes(a, b) | Excludes(a, b) | And(a, b) | Or(a, b) | Compare(_, a, b) | Arith(_, a, b) => vec![a, b],
            LetIn { body, .. } => vec![body],
            External { args, .. } => args.iter().collect(),
            Call { source, args, .. } => std::iter::once(source.as_ref()).chain(args.iter()).collect(),
        }
    }

    /// Pre-order walk.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn any_node(&self, pred: impl Fn(&Expr) -> bool) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if pred(e) {
                found = true;
            }
        });
        found
    }

    /// Splits a top-level `and` chain into its conjuncts, left to right.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        fn go<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
            match &e.kind {
                ExprKind::And(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                _ => out.push(e),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::IntLit(_) | ExprKind::RealLit(_) | ExprKind::StrLit(_) | ExprKind::BoolLit(_) | ExprKind::Null
        )
    }

    pub fn as_var(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Var { name, .. } => Some(name),
            _ => None,
        }
    }
}

/// Joins expressions with `and`, left-associatively.
pub fn conjoin(mut parts: Vec<Expr>) -> Option<Expr> {
    if parts.is_empty() {
        return None;
    }
    let first = parts.remove(0);
    Some(parts.into_iter().fold(first, |acc, e| {
        let span = acc.span;
        Expr::new(ExprKind::And(Box::new(acc), Box::new(e)), span)
    }))
}
