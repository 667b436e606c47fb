use crate::expr::{Expr, ExprKind, PrimType, TypeRef};
use crate::model::{
    AssociationEnd, Attribute, ConceptualClass, Contract, Definition, Invariant, Multiplicity, OperationSignature,
    Param, RequirementsModel, UseCase,
};

use super::expr::{ExprParser, PResult};
use super::lexer::{Tok, Token};
use super::Diagnostic;

const TOP_LEVEL: &[&str] = &["actor", "class", "assoc", "usecase", "inv", "contract", "Contract"];
const SECTIONS: &[&str] = &["definition", "precondition", "postcondition"];

pub(crate) fn parse_declarations(tokens: Vec<Token>) -> (RequirementsModel, Vec<Diagnostic>) {
    let mut p = ExprParser::new(&tokens);
    let mut model = RequirementsModel::default();
    let mut diags = Vec::new();
    while *p.peek() != Tok::Eof {
        let start = p.pos;
        if let Err(d) = parse_one(&mut p, &mut model) {
            diags.push(d);
            recover(&mut p, start);
        }
    }
    (model, diags)
}

/// Skips to the next token that plausibly starts a top-level declaration:
/// a declaration keyword at brace depth zero that follows `}` or `;` or
/// opens a line.
fn recover(p: &mut ExprParser<'_>, start: usize) {
    let mut depth: i64 = 0;
    let mut i = start;
    let toks = p.tokens;
    loop {
        if i >= toks.len() - 1 {
            p.pos = toks.len() - 1;
            return;
        }
        if i > start && depth <= 0 {
            if let Tok::Ident(k) = &toks[i].tok {
                let prev = &toks[i - 1];
                let line_start = prev.span.line < toks[i].span.line;
                if TOP_LEVEL.contains(&k.as_str())
                    && (line_start || matches!(prev.tok, Tok::RBrace | Tok::Semi))
                {
                    p.pos = i;
                    return;
                }
            }
        }
        match toks[i].tok {
            Tok::LBrace => depth += 1,
            Tok::RBrace => depth -= 1,
            _ => {}
        }
        i += 1;
    }
}

fn parse_one(p: &mut ExprParser<'_>, m: &mut RequirementsModel) -> PResult<()> {
    let kw = match p.peek() {
        Tok::Ident(k) => k.clone(),
        _ => return Err(p.unexpected("a top-level declaration")),
    };
    match kw.as_str() {
        "actor" => {
            p.bump();
            let (name, _) = p.expect_ident()?;
            p.eat(&Tok::Semi);
            m.actors.push(name);
        }
        "class" => m.classes.push(parse_class(p)?),
        "assoc" => m.associations.push(parse_assoc(p)?),
        "usecase" => m.use_cases.push(parse_use_case(p)?),
        "inv" => m.invariants.push(parse_invariant(p)?),
        "contract" | "Contract" => m.contracts.push(parse_contract(p)?),
        _ => return Err(p.unexpected("a top-level declaration (actor, class, assoc, usecase, inv, contract)")),
    }
    Ok(())
}

fn parse_class(p: &mut ExprParser<'_>) -> PResult<ConceptualClass> {
    let span = p.expect_kw("class")?;
    let (name, _) = p.expect_ident()?;
    let super_class = if p.eat_kw("extends") { Some(p.expect_ident()?.0) } else { None };
    let crud = p.eat_kw("crud");
    p.expect(&Tok::LBrace)?;
    let mut attributes = Vec::new();
    while !p.eat(&Tok::RBrace) {
        let (aname, _) = p.expect_ident()?;
        p.expect(&Tok::Colon)?;
        let ty = parse_prim_type(p)?;
        p.eat(&Tok::Semi);
        attributes.push(Attribute { name: aname, ty });
    }
    Ok(ConceptualClass { name, super_class, attributes, crud, span })
}

fn parse_assoc(p: &mut ExprParser<'_>) -> PResult<AssociationEnd> {
    let span = p.expect_kw("assoc")?;
    let (owner, _) = p.expect_ident()?;
    p.expect(&Tok::Dot)?;
    let (role, _) = p.expect_ident()?;
    p.expect(&Tok::Arrow)?;
    let (target, _) = p.expect_ident()?;
    let multiplicity = if p.eat_kw("one") {
        Multiplicity::One
    } else if p.eat_kw("many") {
        Multiplicity::Many
    } else {
        return Err(p.unexpected("`one` or `many`"));
    };
    p.eat(&Tok::Semi);
    Ok(AssociationEnd { owner, role, target, multiplicity, span })
}

fn parse_use_case(p: &mut ExprParser<'_>) -> PResult<UseCase> {
    let span = p.expect_kw("usecase")?;
    let (name, _) = p.expect_ident()?;
    p.expect_kw("actor")?;
    let (actor, _) = p.expect_ident()?;
    p.expect(&Tok::LBrace)?;
    let mut operations = Vec::new();
    while !p.eat(&Tok::RBrace) {
        let (op, _) = p.expect_ident()?;
        // `op()` is accepted as a spelling of `op`
        if p.eat(&Tok::LParen) {
            p.expect(&Tok::RParen)?;
        }
        if !p.eat(&Tok::Semi) {
            p.eat(&Tok::Comma);
        }
        operations.push(op);
    }
    Ok(UseCase { name, actor, operations, span })
}

fn parse_invariant(p: &mut ExprParser<'_>) -> PResult<Invariant> {
    let span = p.expect_kw("inv")?;
    let (name, _) = p.expect_ident()?;
    let context = if p.eat_kw("on") { Some(p.expect_ident()?.0) } else { None };
    p.expect(&Tok::Colon)?;
    let expr = p.parse_expr()?;
    p.eat(&Tok::Semi);
    Ok(Invariant { name, context, expr, span })
}

fn parse_prim_type(p: &mut ExprParser<'_>) -> PResult<PrimType> {
    let span = p.span();
    let (name, _) = p.expect_ident()?;
    PrimType::from_name(&name).ok_or_else(|| {
        Diagnostic::error(span, format!("expected a primitive type (Integer, Real, Boolean, String), found `{name}`"))
    })
}

fn parse_type(p: &mut ExprParser<'_>) -> PResult<TypeRef> {
    let (name, _) = p.expect_ident()?;
    if let Some(prim) = PrimType::from_name(&name) {
        return Ok(TypeRef::Prim(prim));
    }
    if name == "Set" && *p.peek() == Tok::LParen {
        p.bump();
        let span = p.span();
        let (inner, _) = p.expect_ident()?;
        if PrimType::from_name(&inner).is_some() {
            return Err(Diagnostic::error(span, "sets of primitive values are not supported"));
        }
        p.expect(&Tok::RParen)?;
        return Ok(TypeRef::Set(inner));
    }
    Ok(TypeRef::Class(name))
}

fn at_section(p: &ExprParser<'_>) -> bool {
    matches!(p.peek(), Tok::Ident(k) if SECTIONS.contains(&k.as_str())) && *p.peek_at(1) == Tok::Colon
}

fn parse_contract(p: &mut ExprParser<'_>) -> PResult<Contract> {
    let span = p.span();
    p.bump();
    let (use_case, _) = p.expect_ident()?;
    p.expect(&Tok::ColonColon)?;
    let (name, _) = p.expect_ident()?;
    p.expect(&Tok::LParen)?;
    let mut params = Vec::new();
    if !p.eat(&Tok::RParen) {
        loop {
            let (pname, _) = p.expect_ident()?;
            p.expect(&Tok::Colon)?;
            let ty = parse_prim_type(p)?;
            params.push(Param { name: pname, ty });
            if p.eat(&Tok::Comma) {
                continue;
            }
            p.expect(&Tok::RParen)?;
            break;
        }
    }
    let ret = if p.eat(&Tok::Colon) { Some(parse_type(p)?) } else { None };
    p.expect(&Tok::LBrace)?;

    let mut definitions = Vec::new();
    if p.at_kw("definition") && *p.peek_at(1) == Tok::Colon {
        p.bump();
        p.bump();
        while !at_section(p) && *p.peek() != Tok::RBrace && *p.peek() != Tok::Eof {
            let dspan = p.span();
            let (dname, _) = p.expect_ident()?;
            p.expect(&Tok::Colon)?;
            let ty = parse_type(p)?;
            p.expect(&Tok::Eq)?;
            let expr = p.parse_expr()?;
            if !p.eat(&Tok::Semi) {
                p.eat(&Tok::Comma);
            }
            definitions.push(Definition { name: dname, ty, expr, span: dspan });
        }
    }

    let precondition = if p.at_kw("precondition") && *p.peek_at(1) == Tok::Colon {
        p.bump();
        p.bump();
        p.parse_expr()?
    } else {
        Expr::new(ExprKind::BoolLit(true), p.span())
    };

    if !(p.at_kw("postcondition") && *p.peek_at(1) == Tok::Colon) {
        let found = p.peek().describe();
        return Err(Diagnostic::error(
            p.span(),
            format!("contract {use_case}::{name} is missing its `postcondition:` section (found {found})"),
        ));
    }
    p.bump();
    p.bump();
    let postcondition = p.parse_expr()?;
    p.expect(&Tok::RBrace)?;

    Ok(Contract {
        use_case,
        signature: OperationSignature { name, params, ret },
        definitions,
        precondition,
        postcondition,
        span,
    })
}
