//! Contract decomposition: each definition, precondition conjunct and
//! postcondition conjunct is matched against the rule tables and turned into
//! primitive store instructions. Postcondition conjuncts no rule covers
//! become named hooks for an external implementation.

mod rules;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::expr::{CompareOp, Expr, ExprKind, NavKind, Span, TypeRef, VarKind};
use crate::model::{Contract, OperationSignature};
use crate::printer::print_expr;
use crate::resolve::{ResolvedModel, SemType};

pub use rules::{match_definition, match_postcondition, match_precondition, match_rule, Section};

/// `var | body`, the filter of a find.
#[derive(Debug, Clone, PartialEq)]
pub struct Cond {
    pub var: String,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    FindObject { dest: String, class: String, cond: Option<Cond> },
    FindObjects { dest: String, class: String, cond: Option<Cond> },
    FindLinked { dest: String, src: Expr, role: String, cond: Option<Cond> },
    FindLinkedMany { dest: String, src: Expr, role: String, cond: Option<Cond> },
    Create { dest: String, class: String },
    Add { class: String, src: Expr },
    Release { class: String, src: Expr },
    SetAttr { src: Expr, attr: String, value: Expr },
    LinkOne { src: Expr, role: String, target: Expr },
    LinkMany { src: Expr, role: String, target: Expr },
    UnlinkOne { src: Expr, role: String },
    UnlinkMany { src: Expr, role: String, target: Expr },
    ForEach { collection: Expr, var: String, body: Vec<Instruction> },
    BindSession { name: String, value: Expr },
    EvalToTemp { dest: String, expr: Expr },
    /// A postcondition equality that is a check rather than an assignment.
    Assert { cond: Expr },
    ExternalCall { hook: String, args: Vec<Expr>, dest: Option<String> },
    Return(Expr),
}

impl Instruction {
    /// Instruction count including loop bodies.
    pub fn weight(&self) -> usize {
        match self {
            Instruction::ForEach { body, .. } => 1 + body.iter().map(Instruction::weight).sum::<usize>(),
            _ => 1,
        }
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        use Instruction::*;
        let pad = " ".repeat(indent);
        let p = print_expr;
        let cond = |c: &Option<Cond>| match c {
            Some(c) => format!(" ({} | {})", c.var, p(&c.body)),
            None => String::new(),
        };
        match self {
            FindObject { dest, class, cond: c } => write!(f, "{pad}FindObject {dest} <- {class}{}", cond(c)),
            FindObjects { dest, class, cond: c } => write!(f, "{pad}FindObjects {dest} <- {class}{}", cond(c)),
            FindLinked { dest, src, role, cond: c } => {
                write!(f, "{pad}FindLinked {dest} <- {}.{role}{}", p(src), cond(c))
            }
            FindLinkedMany { dest, src, role, cond: c } => {
                write!(f, "{pad}FindLinkedMany {dest} <- {}.{role}{}", p(src), cond(c))
            }
            Create { dest, class } => write!(f, "{pad}Create {dest} : {class}"),
            Add { class, src } => write!(f, "{pad}Add {class} {}", p(src)),
            Release { class, src } => write!(f, "{pad}Release {class} {}", p(src)),
            SetAttr { src, attr, value } => write!(f, "{pad}SetAttr {}.{attr} <- {}", p(src), p(value)),
            LinkOne { src, role, target } => write!(f, "{pad}LinkOne {}.{role} <- {}", p(src), p(target)),
            LinkMany { src, role, target } => write!(f, "{pad}LinkMany {}.{role} <- {}", p(src), p(target)),
            UnlinkOne { src, role } => write!(f, "{pad}UnlinkOne {}.{role}", p(src)),
            UnlinkMany { src, role, target } => write!(f, "{pad}UnlinkMany {}.{role} -> {}", p(src), p(target)),
            ForEach { collection, var, body } => {
                writeln!(f, "{pad}ForEach {var} in {} {{", p(collection))?;
                for i in body {
                    i.fmt_indented(f, indent + 2)?;
                    writeln!(f)?;
                }
                write!(f, "{pad}}}")
            }
            BindSession { name, value } => write!(f, "{pad}BindSession {name} <- {}", p(value)),
            EvalToTemp { dest, expr } => write!(f, "{pad}EvalToTemp {dest} <- {}", p(expr)),
            Assert { cond: c } => write!(f, "{pad}Assert {}", p(c)),
            ExternalCall { hook, args, dest } => {
                let args: Vec<String> = args.iter().map(p).collect();
                match dest {
                    Some(d) => write!(f, "{pad}ExternalCall {d} <- {hook}({})", args.join(", ")),
                    None => write!(f, "{pad}ExternalCall {hook}({})", args.join(", ")),
                }
            }
            Return(e) => write!(f, "{pad}Return {}", p(e)),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleOutcome {
    Rule(u8),
    /// R21/R22 writing a use-case session binding instead of a link.
    SessionRule(u8),
    Hook,
    /// Kept as a runtime check (precondition conjuncts the tables do not
    /// cover, postcondition equalities with nothing to assign).
    Check,
    /// A definition evaluated as a plain expression.
    Eval,
}

impl RuleOutcome {
    pub fn rule_id(self) -> Option<u8> {
        match self {
            RuleOutcome::Rule(n) | RuleOutcome::SessionRule(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for RuleOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleOutcome::Rule(n) => write!(f, "R{n}"),
            RuleOutcome::SessionRule(n) => write!(f, "R{n}*"),
            RuleOutcome::Hook => f.write_str("HOOK"),
            RuleOutcome::Check => f.write_str("CHECK"),
            RuleOutcome::Eval => f.write_str("EVAL"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub section: Section,
    pub index: usize,
    pub outcome: RuleOutcome,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HookSpec {
    pub name: String,
    pub param_types: Vec<String>,
    pub return_type: Option<String>,
    pub origin: Span,
    /// Source text of the conjunct the hook stands in for.
    pub conjunct: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {contract}: {message}")]
pub struct CompileError {
    pub span: Span,
    pub contract: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledOperation {
    pub use_case: String,
    pub signature: OperationSignature,
    /// The resolved contract, kept for guard texts and the oracle.
    pub contract: Contract,
    pub definition_plan: Vec<Instruction>,
    pub guard: Expr,
    /// Distinct `@pre` expressions evaluated once, right after the guard.
    /// Those under a loop variable or a `let` are evaluated on demand.
    pub pre_captures: Vec<Expr>,
    pub post_plan: Vec<Instruction>,
    pub hooks: Vec<HookSpec>,
    pub trace: Vec<TraceEntry>,
}

impl CompiledOperation {
    pub fn qualified_name(&self) -> String {
        format!("{}::{}", self.use_case, self.signature.name)
    }

    pub fn is_executable(&self) -> bool {
        self.hooks.is_empty()
    }

    pub fn plan_size(&self) -> usize {
        self.definition_plan.iter().chain(&self.post_plan).map(Instruction::weight).sum()
    }

    /// One line per conjunct under section headers: `#<i> <outcome> <line:col>`.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        let mut current = None;
        for t in &self.trace {
            if current != Some(t.section) {
                out.push_str(t.section.name());
                out.push_str(":\n");
                current = Some(t.section);
            }
            out.push_str(&format!("#{} {} {}\n", t.index, t.outcome, t.span));
        }
        out
    }

    pub fn plan_text(&self) -> String {
        let mut out = String::new();
        for (title, plan) in [("definition", &self.definition_plan), ("postcondition", &self.post_plan)] {
            if plan.is_empty() {
                continue;
            }
            out.push_str(title);
            out.push_str(":\n");
            for i in plan {
                for line in i.to_string().lines() {
                    out.push_str("  ");
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Position of the leftmost token of an expression.
fn start_span(e: &Expr) -> Span {
    let mut best = e.span;
    e.walk(&mut |n| {
        if (n.span.line, n.span.col) < (best.line, best.col) && n.span.line > 0 {
            best = n.span;
        }
    });
    best
}

fn contains_at_pre(e: &Expr) -> bool {
    e.any_node(|n| matches!(n.kind, ExprKind::AtPre(_)))
}

fn mentions_var(e: &Expr, names: &BTreeSet<String>) -> Option<String> {
    let mut hit = None;
    e.walk(&mut |n| {
        if let ExprKind::Var { name, kind: VarKind::Let } = &n.kind {
            if hit.is_none() && names.contains(name) {
                hit = Some(name.clone());
            }
        }
    });
    hit
}

/// Variables (and `self.x` session reads) an unmatched conjunct depends on,
/// in first-appearance order. These become the hook's arguments.
fn free_inputs(e: &Expr) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    let mut seen = BTreeSet::new();
    e.walk(&mut |n| {
        let key = match &n.kind {
            ExprKind::Var { name, kind } if *kind != VarKind::Bound => name.clone(),
            ExprKind::Nav { target, name, kind: NavKind::Session } if matches!(target.kind, ExprKind::SelfRef) => {
                format!("self.{name}")
            }
            _ => return,
        };
        if seen.insert(key) {
            out.push(n.clone());
        }
    });
    out
}

fn nav_parts(e: &Expr) -> (Expr, String) {
    match &e.kind {
        ExprKind::Nav { target, name, .. } => ((**target).clone(), name.clone()),
        _ => unreachable!("rule matched a navigation"),
    }
}

fn let_var(name: &str, span: Span) -> Expr {
    Expr::new(ExprKind::Var { name: name.to_string(), kind: VarKind::Let }, span)
}

struct Compiler<'a> {
    rm: &'a ResolvedModel,
    contract: &'a Contract,
    name: String,
    locals: Vec<(String, SemType)>,
    hooks: Vec<HookSpec>,
    temps: usize,
}

impl<'a> Compiler<'a> {
    fn error(&self, span: Span, message: impl Into<String>) -> CompileError {
        CompileError { span, contract: self.name.clone(), message: message.into() }
    }

    fn type_name(&self, e: &Expr) -> String {
        self.rm
            .type_of_in_scope(self.contract, &self.locals, e)
            .map(|t| t.to_string())
            .unwrap_or_else(|_| "unknown".into())
    }

    fn add_hook(&mut self, spec: HookSpec) {
        if !self.hooks.iter().any(|h| h.name == spec.name) {
            self.hooks.push(spec);
        }
    }

    fn definition(&mut self, i: usize, def: &crate::model::Definition) -> Result<(Instruction, TraceEntry), CompileError> {
        if contains_at_pre(&def.expr) {
            return Err(self.error(start_span(&def.expr), "`@pre` is only meaningful in a postcondition"));
        }
        let many = matches!(def.ty, TypeRef::Set(_));
        let dest = def.name.clone();
        let rule = match_definition(&def.expr, many);
        let instr = match (&def.expr.kind, rule) {
            (ExprKind::AllInstances(class), Some(1)) => Instruction::FindObjects { dest, class: class.clone(), cond: None },
            (ExprKind::Iterate { source, var, body, .. }, Some(n @ (2 | 3 | 6 | 7))) => {
                let cond = Some(Cond { var: var.name.clone(), body: (**body).clone() });
                match (&source.kind, n) {
                    (ExprKind::AllInstances(class), 2) => Instruction::FindObjects { dest, class: class.clone(), cond },
                    (ExprKind::AllInstances(class), 3) => Instruction::FindObject { dest, class: class.clone(), cond },
                    (_, 6) => {
                        let (src, role) = nav_parts(source);
                        Instruction::FindLinkedMany { dest, src, role, cond }
                    }
                    _ => {
                        let (src, role) = nav_parts(source);
                        Instruction::FindLinked { dest, src, role, cond }
                    }
                }
            }
            (_, Some(4)) => {
                let (src, role) = nav_parts(&def.expr);
                Instruction::FindLinked { dest, src, role, cond: None }
            }
            (_, Some(5)) => {
                let (src, role) = nav_parts(&def.expr);
                Instruction::FindLinkedMany { dest, src, role, cond: None }
            }
            _ => Instruction::EvalToTemp { dest, expr: def.expr.clone() },
        };
        let outcome = match rule {
            Some(n) if !matches!(instr, Instruction::EvalToTemp { .. }) => RuleOutcome::Rule(n),
            _ => RuleOutcome::Eval,
        };
        let entry = TraceEntry { section: Section::Definition, index: i, outcome, span: def.span };
        Ok((instr, entry))
    }

    /// Instructions for a conjunct that matched `rule`.
    fn emit(&mut self, rule: u8, c: &Expr, out: &mut Vec<Instruction>) -> Result<RuleOutcome, CompileError> {
        use ExprKind::*;
        let mut outcome = RuleOutcome::Rule(rule);
        match (&c.kind, rule) {
            (Includes(s, x), 17) | (Excludes(s, x), 18) => {
                let AllInstances(class) = &s.kind else { unreachable!() };
                let class = class.clone();
                let src = (**x).clone();
                out.push(if rule == 17 { Instruction::Add { class, src } } else { Instruction::Release { class, src } });
            }
            (Includes(s, x), 19) => {
                let (src, role) = nav_parts(s);
                out.push(Instruction::LinkMany { src, role, target: (**x).clone() });
            }
            (Excludes(s, x), 20) => {
                let (src, role) = nav_parts(s);
                out.push(Instruction::UnlinkMany { src, role, target: (**x).clone() });
            }
            (Compare(_, l, r), 21 | 22) => {
                if let Some(name) = rules::session_target(l) {
                    outcome = RuleOutcome::SessionRule(rule);
                    out.push(Instruction::BindSession { name: name.to_string(), value: (**r).clone() });
                } else {
                    let (src, role) = nav_parts(l);
                    out.push(if rule == 21 {
                        Instruction::LinkOne { src, role, target: (**r).clone() }
                    } else {
                        Instruction::UnlinkOne { src, role }
                    });
                }
            }
            (Compare(_, l, r), 23) => {
                let (src, attr) = nav_parts(l);
                out.push(Instruction::SetAttr { src, attr, value: (**r).clone() });
            }
            (Iterate { source, var, body, .. }, 24) => {
                let mut inner = Vec::new();
                for b in body.conjuncts() {
                    let r = match_postcondition(b).expect("forAll body was matched");
                    self.emit(r, b, &mut inner)?;
                }
                out.push(Instruction::ForEach { collection: (**source).clone(), var: var.name.clone(), body: inner });
            }
            (Compare(_, _, r), 25) => out.push(Instruction::Return((**r).clone())),
            (External { service, op, args }, 26) => {
                let hook = format!("{service}_{op}");
                self.external_hook(&hook, args, None, c);
                out.push(Instruction::ExternalCall { hook, args: args.clone(), dest: None });
            }
            (Compare(_, l, r), 26) => {
                let External { service, op, args } = &r.kind else { unreachable!() };
                let hook = format!("{service}_{op}");
                let dest = format!("${}", self.temps);
                self.temps += 1;
                let ret = self.type_name(l);
                self.external_hook(&hook, args, Some(ret), c);
                out.push(Instruction::ExternalCall { hook, args: args.clone(), dest: Some(dest.clone()) });
                let assign = Expr::new(Compare(CompareOp::Eq, l.clone(), Box::new(let_var(&dest, r.span))), c.span);
                let inner = match_postcondition(&assign).expect("assignable left side");
                self.emit(inner, &assign, out)?;
            }
            _ => unreachable!("rule {rule} does not match {}", print_expr(c)),
        }
        Ok(outcome)
    }

    fn external_hook(&mut self, name: &str, args: &[Expr], ret: Option<String>, c: &Expr) {
        let param_types = args.iter().map(|a| self.type_name(a)).collect();
        self.add_hook(HookSpec {
            name: name.to_string(),
            param_types,
            return_type: ret,
            origin: start_span(c),
            conjunct: print_expr(c),
        });
    }

    fn postcondition(&mut self, post: &Expr) -> Result<(Vec<Instruction>, Vec<TraceEntry>), CompileError> {
        enum Item<'e> {
            Let(&'e str, &'e str, Span),
            Conj(&'e Expr),
        }
        fn flatten<'e>(e: &'e Expr, out: &mut Vec<Item<'e>>) {
            for c in e.conjuncts() {
                match &c.kind {
                    ExprKind::LetIn { name, class, body } => {
                        out.push(Item::Let(name, class, c.span));
                        flatten(body, out);
                    }
                    _ => out.push(Item::Conj(c)),
                }
            }
        }
        let mut items = Vec::new();
        flatten(post, &mut items);

        let mut plan = Vec::new();
        let mut trace = Vec::new();
        let mut pending: BTreeSet<String> = BTreeSet::new();
        let mut created: BTreeSet<String> = BTreeSet::new();
        let mut classes = std::collections::BTreeMap::new();
        let mut index = 0;
        for item in items {
            let c = match item {
                Item::Let(name, class, span) => {
                    if pending.contains(name) || created.contains(name) {
                        return Err(self.error(span, format!("`{name}` is bound twice")));
                    }
                    pending.insert(name.to_string());
                    classes.insert(name.to_string(), class.to_string());
                    self.locals.push((name.to_string(), SemType::Ref(class.to_string())));
                    continue;
                }
                Item::Conj(c) => c,
            };
            let span = start_span(c);
            let i = index;
            index += 1;

            if let ExprKind::OclIsNew(v) = &c.kind {
                if let Some(name) = v.as_var() {
                    if pending.remove(name) {
                        created.insert(name.to_string());
                        plan.push(Instruction::Create { dest: name.to_string(), class: classes[name].clone() });
                        trace.push(TraceEntry { section: Section::Postcondition, index: i, outcome: RuleOutcome::Rule(16), span });
                        continue;
                    }
                    if created.contains(name) {
                        return Err(self.error(span, format!("`{name}` is created twice")));
                    }
                }
            }
            if let Some(name) = mentions_var(c, &pending) {
                return Err(self.error(
                    span,
                    format!("`{name}` is used before the conjunct `{name}.oclIsNew()` that creates it"),
                ));
            }

            let outcome = match match_postcondition(c) {
                Some(rule) => self.emit(rule, c, &mut plan)?,
                None => match &c.kind {
                    ExprKind::Compare(CompareOp::Eq, l, r) if l.is_literal() && r.is_literal() => {
                        return Err(self.error(span, format!("`{}` compares two literals", print_expr(c))));
                    }
                    ExprKind::Compare(CompareOp::Eq, ..) => {
                        plan.push(Instruction::Assert { cond: c.clone() });
                        RuleOutcome::Check
                    }
                    _ => {
                        let hook = format!("hook_{}_{}_{}", self.contract.use_case, self.contract.signature.name, i);
                        let args = free_inputs(c);
                        let param_types = args.iter().map(|a| self.type_name(a)).collect();
                        self.add_hook(HookSpec {
                            name: hook.clone(),
                            param_types,
                            return_type: None,
                            origin: span,
                            conjunct: print_expr(c),
                        });
                        plan.push(Instruction::ExternalCall { hook, args, dest: None });
                        RuleOutcome::Hook
                    }
                },
            };
            trace.push(TraceEntry { section: Section::Postcondition, index: i, outcome, span });
        }
        if let Some(name) = pending.into_iter().next() {
            return Err(self.error(post.span, format!("`let {name}` is never created with `{name}.oclIsNew()`")));
        }
        Ok((plan, trace))
    }
}

/// Distinct `@pre` sub-expressions that can be captured before the plan
/// runs: those not depending on loop variables or fresh objects.
fn pre_captures(post: &Expr) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    post.walk(&mut |n| {
        if let ExprKind::AtPre(inner) = &n.kind {
            let local = inner.any_node(|m| matches!(m.kind, ExprKind::Var { kind: VarKind::Bound | VarKind::Let, .. }));
            if !local && !out.contains(n) {
                out.push(n.clone());
            }
        }
    });
    out
}

/// Compiles one resolved contract.
pub fn compile_contract(contract: &Contract, rm: &ResolvedModel) -> Result<CompiledOperation, CompileError> {
    let mut c = Compiler { rm, contract, name: contract.qualified_name(), locals: Vec::new(), hooks: Vec::new(), temps: 0 };
    let mut definition_plan = Vec::new();
    let mut trace = Vec::new();
    for (i, d) in contract.definitions.iter().enumerate() {
        let (instr, entry) = c.definition(i, d)?;
        definition_plan.push(instr);
        trace.push(entry);
    }

    if contains_at_pre(&contract.precondition) {
        let at = contract.precondition.clone();
        return Err(c.error(start_span(&at), "`@pre` is only meaningful in a postcondition"));
    }
    for (i, p) in contract.precondition.conjuncts().into_iter().enumerate() {
        let outcome = match match_precondition(p) {
            Some(n) => RuleOutcome::Rule(n),
            None => RuleOutcome::Check,
        };
        trace.push(TraceEntry { section: Section::Precondition, index: i, outcome, span: start_span(p) });
    }

    let (post_plan, post_trace) = c.postcondition(&contract.postcondition)?;
    trace.extend(post_trace);

    Ok(CompiledOperation {
        use_case: contract.use_case.clone(),
        signature: contract.signature.clone(),
        contract: contract.clone(),
        definition_plan,
        guard: contract.precondition.clone(),
        pre_captures: pre_captures(&contract.postcondition),
        post_plan,
        hooks: c.hooks,
        trace,
    })
}

/// Every contract of a resolved model, compiled in declaration order.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    pub operations: Vec<CompiledOperation>,
}

impl CompiledModel {
    pub fn operation(&self, use_case: &str, op: &str) -> Option<&CompiledOperation> {
        self.operations.iter().find(|o| o.use_case == use_case && o.signature.name == op)
    }

    /// Hooks across all operations, first occurrence wins.
    pub fn hooks(&self) -> Vec<&HookSpec> {
        let mut seen = BTreeSet::new();
        self.operations.iter().flat_map(|o| &o.hooks).filter(|h| seen.insert(h.name.as_str())).collect()
    }
}

pub fn compile_model(rm: &ResolvedModel) -> Result<CompiledModel, Vec<CompileError>> {
    let mut operations = Vec::new();
    let mut errors = Vec::new();
    for c in &rm.model.contracts {
        match compile_contract(c, rm) {
            Ok(op) => operations.push(op),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(CompiledModel { operations })
    } else {
        Err(errors)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Executability {
    Executable,
    PartiallyExecutable { hooks: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationStatus {
    pub use_case: String,
    pub operation: String,
    pub status: Executability,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutabilityReport {
    pub operations: Vec<OperationStatus>,
}

impl ExecutabilityReport {
    pub fn total(&self) -> usize {
        self.operations.len()
    }

    pub fn executable(&self) -> usize {
        self.operations.iter().filter(|o| o.status == Executability::Executable).count()
    }

    /// Percentage; an empty model counts as fully executable.
    pub fn success_rate(&self) -> f64 {
        if self.operations.is_empty() {
            100.0
        } else {
            100.0 * self.executable() as f64 / self.total() as f64
        }
    }
}

pub fn analyze_executability(model: &CompiledModel) -> ExecutabilityReport {
    let operations = model
        .operations
        .iter()
        .map(|o| OperationStatus {
            use_case: o.use_case.clone(),
            operation: o.signature.name.clone(),
            status: if o.hooks.is_empty() {
                Executability::Executable
            } else {
                Executability::PartiallyExecutable { hooks: o.hooks.iter().map(|h| h.name.clone()).collect() }
            },
        })
        .collect();
    ExecutabilityReport { operations }
}
