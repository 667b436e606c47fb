//! Pretty-printer producing `.rqm` text that parses back to the same tree.

use std::fmt::Write;

use crate::expr::{ArithOp, Binder, Expr, ExprKind};
use crate::model::{Contract, RequirementsModel};
use crate::value::format_real;

const P_LET: u8 = 0;
const P_OR: u8 = 1;
const P_AND: u8 = 2;
const P_CMP: u8 = 3;
const P_ADD: u8 = 4;
const P_MUL: u8 = 5;
const P_UNARY: u8 = 6;
const P_POSTFIX: u8 = 7;

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::LetIn { .. } => P_LET,
        ExprKind::Or(..) => P_OR,
        ExprKind::And(..) => P_AND,
        ExprKind::Compare(..) => P_CMP,
        ExprKind::Arith(ArithOp::Add | ArithOp::Sub, ..) => P_ADD,
        ExprKind::Arith(..) => P_MUL,
        ExprKind::Not(_) => P_UNARY,
        ExprKind::IntLit(i) if *i < 0 => P_UNARY,
        ExprKind::RealLit(r) if r.is_sign_negative() => P_UNARY,
        _ => P_POSTFIX,
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, P_LET, true);
    out
}

/// `min` is the lowest precedence allowed without parentheses; `tail` is
/// true when nothing follows `e` before the enclosing delimiter, which is the
/// only place an unparenthesized `let` may appear.
fn write_expr(out: &mut String, e: &Expr, min: u8, tail: bool) {
    let p = prec(e);
    let needs_parens = if p == P_LET { !tail } else { p < min };
    if needs_parens {
        out.push('(');
        write_bare(out, e, true);
        out.push(')');
    } else {
        write_bare(out, e, tail);
    }
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            '\r' => q.push_str("\\r"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

fn binder(b: &Binder) -> String {
    match &b.ty {
        Some(t) => format!("{}:{}", b.name, t),
        None => b.name.clone(),
    }
}

fn write_args(out: &mut String, args: &[Expr]) {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a, P_LET, true);
    }
}

fn write_bare(out: &mut String, e: &Expr, tail: bool) {
    use ExprKind::*;
    match &e.kind {
        IntLit(i) => write!(out, "{i}").unwrap(),
        RealLit(r) => out.push_str(&format_real(*r)),
        StrLit(s) => out.push_str(&quote(s)),
        BoolLit(b) => write!(out, "{b}").unwrap(),
        Null => out.push_str("null"),
        Var { name, .. } => out.push_str(name),
        SelfRef => out.push_str("self"),
        ResultRef => out.push_str("result"),
        Nav { target, name, .. } => {
            write_expr(out, target, P_POSTFIX, false);
            write!(out, ".{name}").unwrap();
        }
        AtPre(inner) => {
            write_expr(out, inner, P_POSTFIX, false);
            out.push_str("@pre");
        }
        AllInstances(c) => write!(out, "{c}.allInstances()").unwrap(),
        Iterate { op, source, var, body } => {
            write_expr(out, source, P_POSTFIX, false);
            write!(out, "->{}({} | ", op.name(), binder(var)).unwrap();
            write_expr(out, body, P_LET, true);
            out.push(')');
        }
        Fold { source, var, acc, acc_ty, init, body } => {
            write_expr(out, source, P_POSTFIX, false);
            write!(out, "->iterate({}; {acc}:{acc_ty} = ", binder(var)).unwrap();
            write_expr(out, init, P_LET, true);
            out.push_str(" | ");
            write_expr(out, body, P_LET, true);
            out.push(')');
        }
        Includes(s, a) | Excludes(s, a) => {
            write_expr(out, s, P_POSTFIX, false);
            out.push_str(if matches!(e.kind, Includes(..)) { "->includes(" } else { "->excludes(" });
            write_expr(out, a, P_LET, true);
            out.push(')');
        }
        Size(s) | IsEmpty(s) | NotEmpty(s) => {
            write_expr(out, s, P_POSTFIX, false);
            out.push_str(match e.kind {
                Size(_) => "->size()",
                IsEmpty(_) => "->isEmpty()",
                _ => "->notEmpty()",
            });
        }
        OclIsNew(s) | OclIsUndefined(s) => {
            write_expr(out, s, P_POSTFIX, false);
            out.push_str(if matches!(e.kind, OclIsNew(_)) { ".oclIsNew()" } else { ".oclIsUndefined()" });
        }
        OclIsTypeOf(s, t) => {
            write_expr(out, s, P_POSTFIX, false);
            write!(out, ".oclIsTypeOf({t})").unwrap();
        }
        LetIn { name, class, body } => {
            write!(out, "let {name}:{class} in ").unwrap();
            write_expr(out, body, P_LET, tail);
        }
        And(l, r) | Or(l, r) => {
            let (p, kw) = if matches!(e.kind, And(..)) { (P_AND, " and ") } else { (P_OR, " or ") };
            write_expr(out, l, p, false);
            out.push_str(kw);
            write_expr(out, r, p + 1, tail);
        }
        Not(inner) => {
            out.push_str("not ");
            write_expr(out, inner, P_UNARY, tail);
        }
        Compare(op, l, r) => {
            write_expr(out, l, P_CMP + 1, false);
            write!(out, " {} ", op.symbol()).unwrap();
            write_expr(out, r, P_CMP + 1, tail);
        }
        Arith(op, l, r) => {
            let p = if matches!(op, ArithOp::Add | ArithOp::Sub) { P_ADD } else { P_MUL };
            write_expr(out, l, p, false);
            write!(out, " {} ", op.symbol()).unwrap();
            write_expr(out, r, p + 1, tail);
        }
        External { service, op, args } => {
            write!(out, "{service}::{op}(").unwrap();
            write_args(out, args);
            out.push(')');
        }
        Call { source, arrow, name, binder: b, args } => {
            write_expr(out, source, P_POSTFIX, false);
            write!(out, "{}{name}(", if *arrow { "->" } else { "." }).unwrap();
            if let Some(b) = b {
                write!(out, "{} | ", binder(b)).unwrap();
            }
            write_args(out, args);
            out.push(')');
        }
    }
}

pub fn print_contract(c: &Contract) -> String {
    let mut out = String::new();
    let params: Vec<String> = c.signature.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
    write!(out, "contract {}::{}({})", c.use_case, c.signature.name, params.join(", ")).unwrap();
    if let Some(ret) = &c.signature.ret {
        write!(out, " : {ret}").unwrap();
    }
    out.push_str(" {\n");
    if !c.definitions.is_empty() {
        out.push_str("  definition:\n");
        for d in &c.definitions {
            writeln!(out, "    {}:{} = {};", d.name, d.ty, print_expr(&d.expr)).unwrap();
        }
    }
    writeln!(out, "  precondition:\n    {}", print_expr(&c.precondition)).unwrap();
    writeln!(out, "  postcondition:\n    {}", print_expr(&c.postcondition)).unwrap();
    out.push_str("}\n");
    out
}

pub fn print_model(m: &RequirementsModel) -> String {
    let mut out = String::new();
    for a in &m.actors {
        writeln!(out, "actor {a}").unwrap();
    }
    for c in &m.classes {
        write!(out, "\nclass {}", c.name).unwrap();
        if let Some(s) = &c.super_class {
            write!(out, " extends {s}").unwrap();
        }
        if c.crud {
            out.push_str(" crud");
        }
        out.push_str(" {\n");
        for a in &c.attributes {
            writeln!(out, "  {}: {};", a.name, a.ty).unwrap();
        }
        out.push_str("}\n");
    }
    if !m.associations.is_empty() {
        out.push('\n');
    }
    for a in &m.associations {
        writeln!(out, "assoc {}.{} -> {} {}", a.owner, a.role, a.target, a.multiplicity.keyword()).unwrap();
    }
    for u in &m.use_cases {
        writeln!(out, "\nusecase {} actor {} {{", u.name, u.actor).unwrap();
        for op in &u.operations {
            writeln!(out, "  {op};").unwrap();
        }
        out.push_str("}\n");
    }
    if !m.invariants.is_empty() {
        out.push('\n');
    }
    for i in &m.invariants {
        match &i.context {
            Some(c) => writeln!(out, "inv {} on {}: {};", i.name, c, print_expr(&i.expr)).unwrap(),
            None => writeln!(out, "inv {}: {};", i.name, print_expr(&i.expr)).unwrap(),
        }
    }
    for c in &m.contracts {
        out.push('\n');
        out.push_str(&print_contract(c));
    }
    out
}
