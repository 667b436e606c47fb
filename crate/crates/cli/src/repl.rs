//! The line-oriented REPL behind `reqexec run`.
//!
//! Commands:
//!
//! ```text
//! list                         use cases and their operations
//! open <UseCase>               start a fresh session for a use case
//! invoke [<UseCase>::]<op>(<args>)
//! state [<Class>]              object counts, attributes, links
//! invariants
//! stub                         bind placeholder hooks
//! save <file> | load <file>
//! help | quit
//! ```
//!
//! Arguments are literals: `12`, `2.5`, `"text"`, `true`, `false`, `null`.
//! Each use case has one current session, opened on first use.
//!
//! With `echo` on, every input line is written back as `> line` before its
//! output, and blank or `#` lines are copied through unchanged, so a script
//! run through the REPL reproduces a transcript that can be diffed.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use reqexec_core::exec::{Executor, InvariantReport, Outcome, SessionId};
use reqexec_core::store::Link;
use reqexec_core::Value;

pub struct Repl {
    ex: Executor,
    sessions: BTreeMap<String, SessionId>,
}

const HELP: &str = "\
commands:
  list
  open <UseCase>
  invoke [<UseCase>::]<op>(<args>)
  state [<Class>]
  invariants
  stub
  save <file>
  load <file>
  quit";

impl Repl {
    pub fn new(ex: Executor) -> Self {
        Repl { ex, sessions: BTreeMap::new() }
    }

    pub fn executor(&self) -> &Executor {
        &self.ex
    }

    /// Reads commands until end of input or `quit`.
    pub fn run(&mut self, input: impl BufRead, out: &mut impl Write, echo: bool, prompt: bool) -> io::Result<()> {
        if prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        for line in input.lines() {
            let line = line?;
            let cmd = line.trim();
            if echo {
                if cmd.is_empty() || cmd.starts_with('#') {
                    writeln!(out, "{line}")?;
                    continue;
                }
                writeln!(out, "> {cmd}")?;
            }
            if matches!(cmd, "quit" | "exit") {
                break;
            }
            if !cmd.is_empty() && !cmd.starts_with('#') {
                for l in self.execute(cmd) {
                    writeln!(out, "{l}")?;
                }
            }
            if prompt {
                write!(out, "> ")?;
                out.flush()?;
            }
        }
        Ok(())
    }

    /// Runs one command and returns its output lines.
    pub fn execute(&mut self, cmd: &str) -> Vec<String> {
        let (word, rest) = cmd.split_once(char::is_whitespace).map_or((cmd, ""), |(w, r)| (w, r.trim()));
        match word {
            "help" => HELP.lines().map(String::from).collect(),
            "list" => self.list(),
            "open" => self.open(rest),
            "invoke" => self.invoke(rest),
            "state" => self.state(rest),
            "invariants" => report_lines(&self.ex.check_invariants(), true),
            "stub" => {
                let names = self.ex.register_stub_hooks();
                if names.is_empty() {
                    vec!["no hooks to stub".into()]
                } else {
                    vec![format!("stubbed {} hook(s): {}", names.len(), names.join(", "))]
                }
            }
            "save" => self.save(rest),
            "load" => self.load(rest),
            other => vec![format!("error: unknown command `{other}` (try `help`)")],
        }
    }

    fn list(&self) -> Vec<String> {
        let loaded = self.ex.model();
        let mut out = Vec::new();
        for uc in &loaded.model().use_cases {
            out.push(format!("{} (actor {})", uc.name, uc.actor));
            for name in &uc.operations {
                let Some(op) = loaded.compiled.operation(&uc.name, name) else { continue };
                let params: Vec<String> = op.signature.params.iter().map(|p| format!("{}: {}", p.name, p.ty.name())).collect();
                let mut line = format!("  {}({})", op.signature.name, params.join(", "));
                if let Some(t) = &op.signature.ret {
                    line.push_str(&format!(" : {t}"));
                }
                if !op.hooks.is_empty() {
                    let hooks: Vec<&str> = op.hooks.iter().map(|h| h.name.as_str()).collect();
                    line.push_str(&format!("  [hooks: {}]", hooks.join(", ")));
                }
                out.push(line);
            }
        }
        if out.is_empty() {
            out.push("no use cases".into());
        }
        out
    }

    fn open(&mut self, use_case: &str) -> Vec<String> {
        match self.ex.open_session(use_case) {
            Ok(id) => {
                if let Some(old) = self.sessions.insert(use_case.to_string(), id) {
                    self.ex.close_session(old);
                }
                vec![format!("session {} for {use_case}", id.0)]
            }
            Err(e) => vec![format!("error: {e}")],
        }
    }

    fn session_for(&mut self, use_case: &str) -> Result<SessionId, String> {
        if let Some(&id) = self.sessions.get(use_case) {
            if self.ex.session(id).is_some() {
                return Ok(id);
            }
        }
        let id = self.ex.open_session(use_case).map_err(|e| e.to_string())?;
        self.sessions.insert(use_case.to_string(), id);
        Ok(id)
    }

    /// Finds the use case of `name`, which is either `UseCase::op` or an
    /// operation name that only one use case declares.
    fn resolve_op(&self, name: &str) -> Result<(String, String), String> {
        if let Some((uc, op)) = name.split_once("::") {
            return Ok((uc.to_string(), op.to_string()));
        }
        let owners: Vec<&str> = self
            .ex
            .model()
            .model()
            .use_cases
            .iter()
            .filter(|uc| uc.operations.iter().any(|o| o == name))
            .map(|uc| uc.name.as_str())
            .collect();
        match owners.as_slice() {
            [one] => Ok((one.to_string(), name.to_string())),
            [] => Err(format!("unknown operation `{name}`")),
            many => Err(format!("`{name}` is ambiguous; qualify it with one of {}", many.join(", "))),
        }
    }

    fn invoke(&mut self, call: &str) -> Vec<String> {
        let result = (|| {
            let (name, args) = parse_call(call)?;
            let (uc, op) = self.resolve_op(&name)?;
            let sid = self.session_for(&uc)?;
            self.ex.invoke(sid, &op, args).map_err(|e| e.to_string())
        })();
        match result {
            Ok(outcome) => outcome_lines(&outcome),
            Err(e) => vec![format!("error: {e}")],
        }
    }

    fn state(&self, only: &str) -> Vec<String> {
        let store = self.ex.store();
        let schema = store.schema();
        if !only.is_empty() && !schema.has_class(only) {
            return vec![format!("error: unknown class `{only}`")];
        }
        let shown = |c: &str| only.is_empty() || c == only;
        let mut out = vec!["objects:".to_string()];
        for c in schema.class_names().iter().filter(|c| shown(c)) {
            out.push(format!("  {c} {}", store.count_exact(c)));
        }
        let records: Vec<_> = store.records().filter(|r| r.added && shown(&r.class)).collect();
        if !records.is_empty() {
            out.push("attributes:".into());
        }
        for r in &records {
            let mut line = format!("  {} {}", r.id, r.class);
            let order = schema.class(&r.class).map(|c| c.attributes.clone()).unwrap_or_default();
            for (name, _) in &order {
                if let Some(v) = r.attrs.get(name).filter(|v| !v.is_undefined()) {
                    line.push_str(&format!(" {name}={v}"));
                }
            }
            out.push(line);
        }
        let mut links = Vec::new();
        for r in &records {
            for (role, l) in &r.links {
                match l {
                    Link::One(Some(t)) => links.push(format!("  {}.{role} -> {t}", r.id)),
                    Link::Many(ts) if !ts.is_empty() => {
                        links.push(format!("  {}.{role} -> {}", r.id, Value::RefSet(ts.clone())))
                    }
                    _ => {}
                }
            }
        }
        if !links.is_empty() {
            out.push("links:".into());
            out.extend(links);
        }
        out
    }

    fn save(&self, path: &str) -> Vec<String> {
        if path.is_empty() {
            return vec!["error: save needs a file name".into()];
        }
        match std::fs::write(path, self.ex.save_checkpoint()) {
            Ok(()) => vec![format!("saved {} object(s) to {path}", self.ex.store().records().count())],
            Err(e) => vec![format!("error: cannot write {path}: {e}")],
        }
    }

    fn load(&mut self, path: &str) -> Vec<String> {
        if path.is_empty() {
            return vec!["error: load needs a file name".into()];
        }
        match self.load_file(path) {
            Ok(()) => vec![format!("loaded {} object(s) from {path}; sessions reset", self.ex.store().records().count())],
            Err(e) => vec![format!("error: {e}")],
        }
    }

    /// Replaces the store with the checkpoint in `path`.
    pub fn load_file(&mut self, path: &str) -> Result<(), String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        self.ex.load_checkpoint(&text).map_err(|e| format!("{path}: {e}"))?;
        self.sessions.clear();
        Ok(())
    }
}

fn outcome_lines(out: &Outcome) -> Vec<String> {
    match out {
        Outcome::Ok { value, invariants } => {
            let mut lines = vec![format!("ok: {value}")];
            lines.extend(report_lines(invariants, false));
            lines
        }
        Outcome::PreconditionViolated { guard } => vec![format!("precondition violated: {guard}")],
        Outcome::HookUnbound { hook } => vec![format!("hook unbound: {hook}")],
        Outcome::RuntimeFault { message } => vec![format!("fault: {message}")],
    }
}

/// With `all`, one line per invariant; otherwise only the violated ones.
fn report_lines(report: &InvariantReport, all: bool) -> Vec<String> {
    let mut out = Vec::new();
    for r in &report.results {
        if r.holds && !all {
            continue;
        }
        let mut line = format!("{} {}", if r.holds { "ok " } else { "RED" }, r.name);
        if !r.witnesses.is_empty() {
            let ws: Vec<String> = r.witnesses.iter().map(|w| w.to_string()).collect();
            line.push_str(&format!(" ({})", ws.join(", ")));
        }
        if let Some(n) = &r.note {
            line.push_str(&format!(" [{n}]"));
        }
        out.push(if all { line } else { format!("invariant {line}") });
    }
    if all && out.is_empty() {
        out.push("no invariants".into());
    }
    out
}

/// Splits `name(arg, ...)` into the name and literal values.
pub fn parse_call(text: &str) -> Result<(String, Vec<Value>), String> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        if text.is_empty() {
            return Err("invoke needs an operation".into());
        }
        return Ok((text.to_string(), Vec::new()));
    };
    let inner = text[open + 1..].strip_suffix(')').ok_or("missing `)`")?;
    let name = text[..open].trim().to_string();
    let mut args = Vec::new();
    for piece in split_args(inner)? {
        args.push(parse_literal(&piece)?);
    }
    Ok((name, args))
}

fn split_args(inner: &str) -> Result<Vec<String>, String> {
    let mut pieces = Vec::new();
    let mut cur = String::new();
    let mut in_str = false;
    let mut escaped = false;
    for ch in inner.chars() {
        if in_str {
            cur.push(ch);
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_str = false;
            }
            continue;
        }
        match ch {
            '"' => {
                in_str = true;
                cur.push(ch);
            }
            ',' => pieces.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    if in_str {
        return Err("unterminated string".into());
    }
    if !cur.trim().is_empty() || !pieces.is_empty() {
        pieces.push(cur);
    }
    Ok(pieces.into_iter().map(|p| p.trim().to_string()).collect())
}

fn parse_literal(s: &str) -> Result<Value, String> {
    if let Some(body) = s.strip_prefix('"') {
        let body = body.strip_suffix('"').ok_or_else(|| format!("bad string literal {s}"))?;
        let mut out = String::new();
        let mut chars = body.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                match chars.next() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some(other) => out.push(other),
                    None => return Err(format!("bad string literal {s}")),
                }
            } else {
                out.push(c);
            }
        }
        return Ok(Value::Str(out));
    }
    match s {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        "null" => return Ok(Value::Undefined),
        "" => return Err("empty argument".into()),
        _ => {}
    }
    if let Ok(i) = s.parse::<i64>() {
        return Ok(Value::Int(i));
    }
    match s.parse::<f64>() {
        Ok(r) if r.is_finite() => Ok(Value::Real(r)),
        _ => Err(format!("cannot read `{s}` as a value")),
    }
}
