use super::*;
use crate::parser::{parse_model_str, parse_ocl_expr};

const SALES: &str = r#"
actor Cashier
class Item { Barcode: String; Price: Real; StockNumber: Real; }
class Sale { IsComplete: Boolean; Amount: Real; }
class SalesLineItem { Quantity: Real; Subamount: Real; }
assoc Sale.ContainedSalesLine -> SalesLineItem many
assoc SalesLineItem.BelongedSale -> Sale one
assoc SalesLineItem.BelongedItem -> Item one

usecase ProcessSale actor Cashier { makeNewSale; enterItem; }

contract ProcessSale::makeNewSale() : Boolean {
  precondition: currentSale.oclIsUndefined() = true or currentSale.IsComplete = true
  postcondition:
    let s:Sale in s.oclIsNew() and s.IsComplete = false and
    self.currentSale = s and Sale.allInstances()->includes(s) and result = true
}

contract ProcessSale::enterItem(barcode: String, quantity: Real) : Boolean {
  definition:
    item:Item = Item.allInstance()->any(i:Item | i.Barcode = barcode)
  precondition:
    currentSale.oclIsUndefined() = false and currentSale.IsComplete = false and
    item.oclIsUndefined() = false and item.StockNumber > 0
  postcondition:
    let sli:SalesLineItem in
    sli.oclIsNew() and self.currentSaleLine = sli and
    sli.BelongedSale = currentSale and currentSale.ContainedSalesLine->includes(sli) and
    sli.BelongedItem = item and sli.Quantity = quantity and
    sli.Subamount = item.Price * quantity and
    item.StockNumber = item.StockNumber@pre - quantity and
    SalesLineItem.allInstance()->includes(sli) and result = true
}
"#;

fn resolved(src: &str) -> ResolvedModel {
    resolve_names(&parse_model_str(src).unwrap()).unwrap()
}

fn expr(text: &str) -> Expr {
    parse_ocl_expr(text).unwrap()
}

#[test]
fn enter_item_resolves_with_session_binding() {
    let r = resolved(SALES);
    let sess = r.session_types("ProcessSale").unwrap();
    assert_eq!(sess.get("currentSale"), Some(&SemType::Ref("Sale".into())));
    assert_eq!(sess.get("currentSaleLine"), Some(&SemType::Ref("SalesLineItem".into())));
    let c = r.model.contract("ProcessSale", "enterItem").unwrap();
    let mut kinds = Vec::new();
    c.precondition.walk(&mut |e| {
        if let ExprKind::Var { name, kind } = &e.kind {
            kinds.push((name.clone(), *kind));
        }
    });
    assert!(kinds.contains(&("currentSale".into(), VarKind::Session)));
    assert!(kinds.contains(&("item".into(), VarKind::Definition)));
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    assert!(check_types(&r).is_empty(), "{:?}", check_types(&r));
}

#[test]
fn misspelled_attribute_is_a_located_name_error() {
    let src = SALES.replace("item.Price * quantity", "item.Prize * quantity");
    let errs = resolve_names(&parse_model_str(&src).unwrap()).unwrap_err();
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].name, "Prize");
    assert_eq!(errs[0].expected, NameKind::Member);
    assert!(errs[0].span.line > 1);
}

#[test]
fn empty_model_resolves() {
    let r = resolve_names(&RequirementsModel::default()).unwrap();
    assert!(r.sessions.is_empty());
    assert!(check_types(&r).is_empty());
}

#[test]
fn expression_types() {
    let r = resolved(SALES);
    let c = r.model.contract("ProcessSale", "enterItem").unwrap().clone();
    let ty = |t: &str| r.type_of_in_contract(&c, &expr(t));
    assert_eq!(ty("item.Price * quantity"), Ok(SemType::Prim(PrimType::Real)));
    assert_eq!(ty("item.StockNumber - 1"), Ok(SemType::Prim(PrimType::Real)));
    assert_eq!(r.type_of(&expr("3 - 1")), Ok(SemType::Prim(PrimType::Integer)));
    assert_eq!(ty("currentSale.ContainedSalesLine"), Ok(SemType::RefSet("SalesLineItem".into())));
    assert_eq!(ty("item.StockNumber / 2"), Ok(SemType::Prim(PrimType::Real)));
    assert_eq!(ty("Item.allInstances()->select(i | i.Price > 1)->size()"), Ok(SemType::Prim(PrimType::Integer)));
    assert!(r.type_of(&expr("1 + \"a\"")).is_err());
    assert!(r.type_of(&expr("not 3")).is_err());
    assert_eq!(r.type_of(&expr("1 < 2.5")), Ok(SemType::Prim(PrimType::Boolean)));
}

#[test]
fn ill_typed_contract_is_reported() {
    let src = SALES.replace("sli.Quantity = quantity", "sli.Quantity = barcode");
    let r = resolved(&src);
    let errs = check_types(&r);
    assert_eq!(errs.len(), 1, "{errs:?}");
    assert!(errs[0].message.contains("cannot compare"));
}

#[test]
fn unassigned_session_name_warns() {
    let src = SALES.replace("self.currentSale = s and", "");
    let r = resolved(&src);
    assert!(r.warnings.iter().any(|w| w.message.contains("currentSale")));
}

#[test]
fn structural_errors() {
    let src = "actor A\nclass X { a: Integer; a: Real; }\nclass X { }\nclass Y extends Z { }\n\
               assoc X.r -> Q one\nusecase U actor B { op; }\n";
    let errs = resolve_names(&parse_model_str(src).unwrap()).unwrap_err();
    let kinds: Vec<NameKind> = errs.iter().map(|e| e.expected).collect();
    for k in [NameKind::Attribute, NameKind::Class, NameKind::Actor, NameKind::Contract] {
        assert!(kinds.contains(&k), "{k:?} missing from {errs:?}");
    }
}

#[test]
fn invariants_resolve_against_context_class() {
    let src = "class Item { Price: Real; }\ninv PositivePrice on Item: self.Price >= 0;\n\
               inv Few: Item.allInstances()->size() < 10;\n";
    assert!(resolve_names(&parse_model_str(src).unwrap()).is_ok());
    let bad = "class Item { Price: Real; }\ninv Loose: Price > 0;\n";
    let errs = resolve_names(&parse_model_str(bad).unwrap()).unwrap_err();
    assert_eq!(errs[0].name, "Price");
}

#[test]
fn declaration_order_does_not_matter() {
    let m = parse_model_str(SALES).unwrap();
    let mut shuffled = m.clone();
    shuffled.classes.reverse();
    shuffled.associations.reverse();
    shuffled.contracts.reverse();
    let a = resolve_names(&m).unwrap();
    let b = resolve_names(&shuffled).unwrap();
    assert_eq!(a.sessions, b.sessions);
    for c in &a.model.contracts {
        let d = b.model.contract(&c.use_case, &c.signature.name).unwrap();
        assert_eq!(c, d);
    }
}
