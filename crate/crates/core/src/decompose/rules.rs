//! Syntactic rule matching, one table per contract section.

use crate::expr::{CompareOp, Expr, ExprKind, IterOp, NavKind, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Section {
    Definition,
    Precondition,
    Postcondition,
}

impl Section {
    pub fn name(self) -> &'static str {
        match self {
            Section::Definition => "definition",
            Section::Precondition => "precondition",
            Section::Postcondition => "postcondition",
        }
    }

    /// The rule numbers a section may produce.
    pub fn rule_range(self) -> std::ops::RangeInclusive<u8> {
        match self {
            Section::Definition => 1..=7,
            Section::Precondition => 8..=15,
            Section::Postcondition => 16..=26,
        }
    }
}

fn is_nav(e: &Expr, kinds: &[NavKind]) -> bool {
    matches!(&e.kind, ExprKind::Nav { kind, .. } if kinds.contains(kind))
}

fn is_bool_lit(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::BoolLit(_))
}

/// Left-hand sides an equality may assign through a session binding.
pub(crate) fn session_target(e: &Expr) -> Option<&str> {
    match &e.kind {
        ExprKind::Nav { target, name, kind: NavKind::Session } if matches!(target.kind, ExprKind::SelfRef) => {
            Some(name)
        }
        ExprKind::Var { name, kind: VarKind::Session } => Some(name),
        _ => None,
    }
}

/// Matches a definition's value expression. `many` tells whether the
/// definition is declared as a set, which decides dynamic navigations.
pub fn match_definition(e: &Expr, many: bool) -> Option<u8> {
    use ExprKind::*;
    match &e.kind {
        AllInstances(_) => Some(1),
        Iterate { op: IterOp::Select, source, .. } if matches!(source.kind, AllInstances(_)) => Some(2),
        Iterate { op: IterOp::Any, source, .. } if matches!(source.kind, AllInstances(_)) => Some(3),
        Nav { kind: NavKind::RoleOne, .. } => Some(4),
        Nav { kind: NavKind::RoleMany, .. } => Some(5),
        Nav { kind: NavKind::Dynamic, .. } => Some(if many { 5 } else { 4 }),
        Iterate { op: IterOp::Select, source, .. } if is_nav(source, &[NavKind::RoleMany, NavKind::Dynamic]) => Some(6),
        Iterate { op: IterOp::Any, source, .. } if is_nav(source, &[NavKind::RoleMany, NavKind::Dynamic]) => Some(7),
        _ => None,
    }
}

pub fn match_precondition(e: &Expr) -> Option<u8> {
    use ExprKind::*;
    match &e.kind {
        OclIsUndefined(_) => Some(8),
        Compare(CompareOp::Eq | CompareOp::Ne, l, r) if matches!(l.kind, OclIsUndefined(_)) && is_bool_lit(r) => {
            Some(8)
        }
        OclIsTypeOf(..) => Some(9),
        IsEmpty(_) | NotEmpty(_) => Some(10),
        Compare(CompareOp::Eq | CompareOp::Ne, l, r) if matches!(l.kind, IsEmpty(_) | NotEmpty(_)) && is_bool_lit(r) => {
            Some(10)
        }
        Compare(_, l, _) if matches!(l.kind, Size(_)) => Some(11),
        Compare(_, l, _) if is_nav(l, &[NavKind::Attribute, NavKind::Dynamic]) => Some(12),
        Includes(s, _) if matches!(s.kind, AllInstances(_)) => Some(13),
        Excludes(s, _) if matches!(s.kind, AllInstances(_)) => Some(14),
        Iterate { op: IterOp::IsUnique, source, var, body } if matches!(source.kind, AllInstances(_)) => {
            match &body.kind {
                Nav { target, kind: NavKind::Attribute | NavKind::Dynamic, .. }
                    if target.as_var() == Some(var.name.as_str()) =>
                {
                    Some(15)
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// Matches one post-condition conjunct. `let` wrappers are flattened by
/// the compiler beforehand, so R16 is recognized on `v.oclIsNew()`.
pub fn match_postcondition(e: &Expr) -> Option<u8> {
    use ExprKind::*;
    match &e.kind {
        OclIsNew(v) if matches!(v.kind, Var { kind: VarKind::Let, .. }) => Some(16),
        LetIn { body, name, .. } => match body.conjuncts().first().map(|c| &c.kind) {
            Some(OclIsNew(v)) if v.as_var() == Some(name.as_str()) => Some(16),
            _ => None,
        },
        Includes(s, _) if matches!(s.kind, AllInstances(_)) => Some(17),
        Excludes(s, _) if matches!(s.kind, AllInstances(_)) => Some(18),
        Includes(s, _) if is_nav(s, &[NavKind::RoleMany, NavKind::Dynamic]) => Some(19),
        Excludes(s, _) if is_nav(s, &[NavKind::RoleMany, NavKind::Dynamic]) => Some(20),
        Compare(CompareOp::Eq, l, r) if matches!(r.kind, External { .. }) && assignable(l) => Some(26),
        Compare(CompareOp::Eq, l, r) if matches!(r.kind, Null) && (is_nav(l, &[NavKind::RoleOne]) || session_target(l).is_some()) => {
            Some(22)
        }
        Compare(CompareOp::Eq, l, _) if is_nav(l, &[NavKind::RoleOne]) || session_target(l).is_some() => Some(21),
        Compare(CompareOp::Eq, l, _) if is_nav(l, &[NavKind::Attribute, NavKind::Dynamic]) => Some(23),
        Iterate { op: IterOp::ForAll, body, var, .. } => {
            let ok = body.conjuncts().iter().all(|c| match match_postcondition(c) {
                Some(19..=23) => assigns_through(c, &var.name),
                _ => false,
            });
            ok.then_some(24)
        }
        Compare(CompareOp::Eq, l, _) if matches!(l.kind, ResultRef) => Some(25),
        External { .. } => Some(26),
        _ => None,
    }
}

/// True for left-hand sides that a post-condition equality can establish.
pub(crate) fn assignable(l: &Expr) -> bool {
    matches!(l.kind, ExprKind::ResultRef)
        || is_nav(l, &[NavKind::Attribute, NavKind::Dynamic, NavKind::RoleOne])
        || session_target(l).is_some()
}

/// A `forAll` body conjunct must write through the iterator variable;
/// writing some unrelated object once per element is not a loop body.
fn assigns_through(c: &Expr, var: &str) -> bool {
    let target = match &c.kind {
        ExprKind::Compare(_, l, _) => match &l.kind {
            ExprKind::Nav { target, .. } => target,
            _ => return false,
        },
        ExprKind::Includes(s, _) | ExprKind::Excludes(s, _) => match &s.kind {
            ExprKind::Nav { target, .. } => target,
            _ => return false,
        },
        _ => return false,
    };
    target.as_var() == Some(var)
}

pub fn match_rule(e: &Expr, section: Section) -> Option<u8> {
    match section {
        Section::Definition => match_definition(e, false),
        Section::Precondition => match_precondition(e),
        Section::Postcondition => match_postcondition(e),
    }
}
