use crate::expr::{ArithOp, Binder, CompareOp, Expr, ExprKind, IterOp, PrimType, Span};

use super::lexer::{Tok, Token};
use super::Diagnostic;

const RESERVED: &[&str] = &["and", "or", "not", "let", "in", "true", "false", "null", "self", "result"];

pub(crate) type PResult<T> = Result<T, Diagnostic>;

/// Recursive-descent parser over a token slice. Shared by the declaration
/// parser, which drives it for embedded expressions.
pub(crate) struct ExprParser<'t> {
    pub(crate) tokens: &'t [Token],
    pub(crate) pos: usize,
}

impl<'t> ExprParser<'t> {
    pub(crate) fn new(tokens: &'t [Token]) -> Self {
        ExprParser { tokens, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    pub(crate) fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    pub(crate) fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    pub(crate) fn bump(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn unexpected(&self, expected: &str) -> Diagnostic {
        Diagnostic::error(self.span(), format!("expected {expected}, found {}", self.peek().describe()))
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> PResult<Span> {
        if self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub(crate) fn expect_ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub(crate) fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of expression"))
        }
    }

    pub(crate) fn parse_expr(&mut self) -> PResult<Expr> {
        if self.at_kw("let") {
            return self.parse_let();
        }
        self.parse_or()
    }

    /// `let` extends as far right as possible, so it may start any operand.
    fn operand(&mut self, next: fn(&mut Self) -> PResult<Expr>) -> PResult<Expr> {
        if self.at_kw("let") {
            self.parse_let()
        } else {
            next(self)
        }
    }

    fn parse_let(&mut self) -> PResult<Expr> {
        let span = self.expect_kw("let")?;
        let (name, _) = self.expect_ident()?;
        self.expect(&Tok::Colon)?;
        let (class, _) = self.expect_ident()?;
        self.expect_kw("in")?;
        let body = self.parse_expr()?;
        Ok(Expr::new(ExprKind::LetIn { name, class, body: Box::new(body) }, span))
    }

    fn parse_or(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_and()?;
        while self.at_kw("or") {
            self.bump();
            let rhs = self.operand(Self::parse_and)?;
            let span = lhs.span;
            lhs = Expr::new(ExprKind::Or(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_cmp()?;
        while self.at_kw("and") {
            self.bump();
            let rhs = self.operand(Self::parse_cmp)?;
            let span = lhs.span;
            lhs = Expr::new(ExprKind::And(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn cmp_op(&self) -> Option<CompareOp> {
        Some(match self.peek() {
            Tok::Eq => CompareOp::Eq,
            Tok::Ne => CompareOp::Ne,
            Tok::Lt => CompareOp::Lt,
            Tok::Le => CompareOp::Le,
            Tok::Gt => CompareOp::Gt,
            Tok::Ge => CompareOp::Ge,
            _ => return None,
        })
    }

    fn parse_cmp(&mut self) -> PResult<Expr> {
        let lhs = self.parse_add()?;
        if let Some(op) = self.cmp_op() {
            self.bump();
            let rhs = self.operand(Self::parse_add)?;
            if self.cmp_op().is_some() {
                return Err(Diagnostic::error(self.span(), "comparison operators do not chain; add parentheses"));
            }
            let span = lhs.span;
            return Ok(Expr::new(ExprKind::Compare(op, Box::new(lhs), Box::new(rhs)), span));
        }
        Ok(lhs)
    }

    fn parse_add(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_mul()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.operand(Self::parse_mul)?;
            let span = lhs.span;
            lhs = Expr::new(ExprKind::Arith(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn parse_mul(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.operand(Self::parse_unary)?;
            let span = lhs.span;
            lhs = Expr::new(ExprKind::Arith(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        if self.eat_kw("not") {
            let e = self.operand(Self::parse_unary)?;
            return Ok(Expr::new(ExprKind::Not(Box::new(e)), span));
        }
        if self.eat(&Tok::Minus) {
            let e = self.operand(Self::parse_unary)?;
            let kind = match e.kind {
                ExprKind::IntLit(i) => ExprKind::IntLit(-i),
                ExprKind::RealLit(r) => ExprKind::RealLit(-r),
                _ => ExprKind::Arith(ArithOp::Sub, Box::new(Expr::new(ExprKind::IntLit(0), span)), Box::new(e)),
            };
            return Ok(Expr::new(kind, span));
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let mut e = self.parse_primary()?;
        loop {
            match self.peek() {
                Tok::Dot => {
                    self.bump();
                    let (name, name_span) = self.expect_ident()?;
                    if *self.peek() == Tok::LParen {
                        e = self.dot_call(e, name, name_span)?;
                    } else {
                        e = Expr::new(
                            ExprKind::Nav { target: Box::new(e), name, kind: crate::expr::NavKind::Unresolved },
                            name_span,
                        );
                    }
                }
                Tok::Arrow => {
                    self.bump();
                    let (name, name_span) = self.expect_ident()?;
                    e = self.arrow_call(e, name, name_span)?;
                }
                Tok::At => {
                    self.bump();
                    self.expect_kw("pre")?;
                    let span = e.span;
                    e = Expr::new(ExprKind::AtPre(Box::new(e)), span);
                }
                _ => return Ok(e),
            }
        }
    }

    fn call_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.parse_expr()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(&Tok::RParen)?;
            return Ok(args);
        }
    }

    fn no_args(&mut self, name: &str, span: Span) -> PResult<()> {
        let args = self.call_args()?;
        if !args.is_empty() {
            return Err(Diagnostic::error(span, format!("`{name}` takes no arguments")));
        }
        Ok(())
    }

    fn one_arg(&mut self, name: &str, span: Span) -> PResult<Expr> {
        let mut args = self.call_args()?;
        if args.len() != 1 {
            return Err(Diagnostic::error(span, format!("`{name}` takes exactly one argument")));
        }
        Ok(args.pop().unwrap())
    }

    fn dot_call(&mut self, target: Expr, name: String, name_span: Span) -> PResult<Expr> {
        let span = target.span;
        let t = Box::new(target);
        let kind = match name.as_str() {
            "oclIsUndefined" => {
                self.no_args(&name, name_span)?;
                ExprKind::OclIsUndefined(t)
            }
            "oclIsNew" => {
                self.no_args(&name, name_span)?;
                ExprKind::OclIsNew(t)
            }
            "oclIsTypeOf" => {
                self.expect(&Tok::LParen)?;
                let (ty, _) = self.expect_ident()?;
                self.expect(&Tok::RParen)?;
                ExprKind::OclIsTypeOf(t, ty)
            }
            "isEmpty" => {
                self.no_args(&name, name_span)?;
                ExprKind::IsEmpty(t)
            }
            "notEmpty" => {
                self.no_args(&name, name_span)?;
                ExprKind::NotEmpty(t)
            }
            "size" => {
                self.no_args(&name, name_span)?;
                ExprKind::Size(t)
            }
            _ => {
                let args = self.call_args()?;
                ExprKind::Call { source: t, arrow: false, name, binder: None, args }
            }
        };
        Ok(Expr::new(kind, span))
    }

    /// `v |` or `v:Type |`, consumed only when present.
    fn try_binder(&mut self) -> Option<Binder> {
        match (self.peek().clone(), self.peek_at(1).clone(), self.peek_at(2).clone(), self.peek_at(3).clone()) {
            (Tok::Ident(v), Tok::Pipe, _, _) if !RESERVED.contains(&v.as_str()) => {
                self.bump();
                self.bump();
                Some(Binder { name: v, ty: None })
            }
            (Tok::Ident(v), Tok::Colon, Tok::Ident(t), Tok::Pipe) if !RESERVED.contains(&v.as_str()) => {
                for _ in 0..4 {
                    self.bump();
                }
                Some(Binder { name: v, ty: Some(t) })
            }
            _ => None,
        }
    }

    fn arrow_call(&mut self, source: Expr, name: String, name_span: Span) -> PResult<Expr> {
        let span = source.span;
        let s = Box::new(source);
        let kind = match name.as_str() {
            "includes" => ExprKind::Includes(s, Box::new(self.one_arg(&name, name_span)?)),
            "excludes" => ExprKind::Excludes(s, Box::new(self.one_arg(&name, name_span)?)),
            "size" => {
                self.no_args(&name, name_span)?;
                ExprKind::Size(s)
            }
            "isEmpty" => {
                self.no_args(&name, name_span)?;
                ExprKind::IsEmpty(s)
            }
            "notEmpty" => {
                self.no_args(&name, name_span)?;
                ExprKind::NotEmpty(s)
            }
            "iterate" => self.parse_fold(s)?,
            _ => {
                if let Some(op) = IterOp::from_name(&name) {
                    self.expect(&Tok::LParen)?;
                    let var = self.try_binder().ok_or_else(|| {
                        Diagnostic::error(self.span(), format!("`{name}` needs an iterator variable: `{name}(v | ...)`"))
                    })?;
                    let body = self.parse_expr()?;
                    self.expect(&Tok::RParen)?;
                    ExprKind::Iterate { op, source: s, var, body: Box::new(body) }
                } else {
                    self.expect(&Tok::LParen)?;
                    let binder = self.try_binder();
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.parse_expr()?);
                            if self.eat(&Tok::Comma) {
                                continue;
                            }
                            self.expect(&Tok::RParen)?;
                            break;
                        }
                    }
                    ExprKind::Call { source: s, arrow: true, name, binder, args }
                }
            }
        };
        Ok(Expr::new(kind, span))
    }

    /// `iterate(v[:T]; acc:Type = init | body)`
    fn parse_fold(&mut self, source: Box<Expr>) -> PResult<ExprKind> {
        self.expect(&Tok::LParen)?;
        let (v, _) = self.expect_ident()?;
        let ty = if self.eat(&Tok::Colon) { Some(self.expect_ident()?.0) } else { None };
        self.expect(&Tok::Semi)?;
        let (acc, _) = self.expect_ident()?;
        self.expect(&Tok::Colon)?;
        let (tname, tspan) = self.expect_ident()?;
        let acc_ty = PrimType::from_name(&tname)
            .ok_or_else(|| Diagnostic::error(tspan, format!("iterate accumulator must have a primitive type, not `{tname}`")))?;
        self.expect(&Tok::Eq)?;
        let init = self.parse_expr()?;
        self.expect(&Tok::Pipe)?;
        let body = self.parse_expr()?;
        self.expect(&Tok::RParen)?;
        Ok(ExprKind::Fold {
            source,
            var: Binder { name: v, ty },
            acc,
            acc_ty,
            init: Box::new(init),
            body: Box::new(body),
        })
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let tok = self.peek().clone();
        let kind = match tok {
            Tok::Int(i) => {
                self.bump();
                ExprKind::IntLit(i)
            }
            Tok::Real(r) => {
                self.bump();
                ExprKind::RealLit(r)
            }
            Tok::Str(s) => {
                self.bump();
                ExprKind::StrLit(s)
            }
            Tok::LParen => {
                self.bump();
                let mut e = self.parse_expr()?;
                self.expect(&Tok::RParen)?;
                e.span = span;
                return Ok(e);
            }
            Tok::Ident(id) => match id.as_str() {
                "true" | "false" => {
                    self.bump();
                    ExprKind::BoolLit(id == "true")
                }
                "null" => {
                    self.bump();
                    ExprKind::Null
                }
                "self" => {
                    self.bump();
                    ExprKind::SelfRef
                }
                "result" => {
                    self.bump();
                    ExprKind::ResultRef
                }
                _ if RESERVED.contains(&id.as_str()) => return Err(self.unexpected("expression")),
                _ => {
                    self.bump();
                    if *self.peek() == Tok::ColonColon {
                        self.bump();
                        let (op, _) = self.expect_ident()?;
                        let args = self.call_args()?;
                        ExprKind::External { service: id, op, args }
                    } else if *self.peek() == Tok::Dot
                        && matches!(self.peek_at(1), Tok::Ident(n) if n == "allInstances" || n == "allInstance")
                        && *self.peek_at(2) == Tok::LParen
                    {
                        self.bump();
                        let n = self.bump().span;
                        self.no_args("allInstances", n)?;
                        ExprKind::AllInstances(id)
                    } else {
                        ExprKind::Var { name: id, kind: crate::expr::VarKind::Unresolved }
                    }
                }
            },
            _ => return Err(self.unexpected("expression")),
        };
        Ok(Expr::new(kind, span))
    }
}
