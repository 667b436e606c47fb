use std::sync::Arc;

use super::*;
use crate::pipeline::{load_model_str, LoadOptions};

const SHOP: &str = r#"
actor Cashier
class Item { Barcode: String; Price: Real; StockNumber: Integer; }
class Sale { IsComplete: Boolean; Amount: Real; }
class SalesLineItem { Quantity: Real; Subamount: Real; }
class Store crud { Id: Integer; Name: String; Address: String; }
assoc Sale.ContainedSalesLine -> SalesLineItem many
assoc SalesLineItem.BelongedSale -> Sale one
assoc SalesLineItem.BelongedItem -> Item one

inv NonNegativeAmount on Sale: self.Amount.oclIsUndefined() or self.Amount >= 0
inv StockKnown: Item.allInstances()->forAll(i | i.StockNumber >= 0)

usecase ProcessSale actor Cashier { makeNewSale; enterItem; endSale; split; topItems; }
usecase Inventory actor Cashier { addItem; }

contract Inventory::addItem(barcode: String, price: Real, stock: Integer) : Boolean {
  precondition: Item.allInstances()->isUnique(i | i.Barcode) and price >= 0
  postcondition:
    let it:Item in it.oclIsNew() and it.Barcode = barcode and it.Price = price and
    it.StockNumber = stock and Item.allInstances()->includes(it) and result = true
}

contract ProcessSale::makeNewSale() : Boolean {
  precondition: currentSale.oclIsUndefined() = true or currentSale.IsComplete = true
  postcondition:
    let s:Sale in s.oclIsNew() and s.IsComplete = false and
    self.currentSale = s and Sale.allInstances()->includes(s) and result = true
}

contract ProcessSale::enterItem(barcode: String, quantity: Integer) : Boolean {
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

contract ProcessSale::endSale(discount: Real) : Real {
  definition:
    lines:Set(SalesLineItem) = currentSale.ContainedSalesLine;
    total:Real = lines->iterate(l; acc:Real = 0 | acc + l.Subamount)
  precondition: currentSale.oclIsUndefined() = false and currentSale.IsComplete = false
  postcondition:
    currentSale.Amount = total - discount and currentSale.IsComplete = true and
    result = currentSale.Amount
}

contract ProcessSale::split(ways: Integer) : Real {
  precondition: currentSale.oclIsUndefined() = false
  postcondition:
    currentSale.Amount = currentSale.Amount@pre / ways and result = currentSale.Amount
}

contract ProcessSale::topItems() : Set(Item) {
  definition:
    items:Set(Item) = Item.allInstances()
  postcondition:
    result = Sorting::descending(items)
}
"#;

fn executor(crud: bool) -> Executor {
    let m = load_model_str(SHOP, LoadOptions { include_crud: crud }).unwrap_or_else(|d| panic!("{d:?}"));
    Executor::new(Arc::new(m))
}

fn s(x: &str) -> Value {
    Value::Str(x.to_string())
}

fn stocked(ex: &mut Executor) -> SessionId {
    let inv = ex.open_session("Inventory").unwrap();
    assert!(ex.invoke(inv, "addItem", vec![s("A001"), Value::Real(1.5), Value::Int(10)]).unwrap().is_ok());
    assert!(ex.invoke(inv, "addItem", vec![s("B001"), Value::Real(3.0), Value::Int(5)]).unwrap().is_ok());
    ex.open_session("ProcessSale").unwrap()
}

#[test]
fn enter_item_updates_stock_and_line() {
    let mut ex = executor(false);
    let sale = stocked(&mut ex);
    assert!(ex.invoke(sale, "makeNewSale", vec![]).unwrap().is_ok());
    let out = ex.invoke(sale, "enterItem", vec![s("B001"), Value::Int(2)]).unwrap();
    assert!(matches!(out, Outcome::Ok { value: Value::Bool(true), .. }), "{out:?}");

    let store = ex.store();
    let lines = store.all_instances("SalesLineItem").unwrap();
    assert_eq!(lines.len(), 1);
    assert_eq!(store.get_attribute(lines[0], "Quantity").unwrap(), Value::Real(2.0));
    assert_eq!(store.get_attribute(lines[0], "Subamount").unwrap(), Value::Real(6.0));
    let item = store.all_instances("Item").unwrap()[1];
    assert_eq!(store.get_attribute(item, "StockNumber").unwrap(), Value::Int(3));
    assert_eq!(ex.session(sale).unwrap().bindings.get("currentSaleLine"), Some(&Value::Ref(lines[0])));
}

#[test]
fn guard_failure_rolls_back() {
    let mut ex = executor(false);
    let sale = stocked(&mut ex);
    let before = ex.save_checkpoint();
    let out = ex.invoke(sale, "enterItem", vec![s("B001"), Value::Int(2)]).unwrap();
    assert_eq!(out, Outcome::PreconditionViolated { guard: "currentSale.oclIsUndefined() = false".into() });
    assert_eq!(ex.save_checkpoint(), before);

    ex.invoke(sale, "makeNewSale", vec![]).unwrap();
    let out = ex.invoke(sale, "enterItem", vec![s("ZZZ"), Value::Int(1)]).unwrap();
    assert_eq!(out.kind(), "precondition_violated");
}

#[test]
fn argument_checks_come_first() {
    let mut ex = executor(false);
    let sale = ex.open_session("ProcessSale").unwrap();
    assert!(matches!(ex.invoke(sale, "enterItem", vec![s("x")]), Err(InvokeError::ArityMismatch { .. })));
    assert!(matches!(ex.invoke(sale, "enterItem", vec![Value::Int(1), Value::Int(1)]), Err(InvokeError::TypeMismatch { .. })));
    assert!(matches!(ex.invoke(sale, "addItem", vec![]), Err(InvokeError::UnknownOperation { .. })));
    assert!(matches!(ex.invoke(SessionId(99), "makeNewSale", vec![]), Err(InvokeError::UnknownSession(99))));
    assert!(matches!(ex.open_session("Nope"), Err(InvokeError::UnknownUseCase(_))));
}

#[test]
fn division_by_zero_faults_and_rolls_back() {
    let mut ex = executor(false);
    let sale = stocked(&mut ex);
    ex.invoke(sale, "makeNewSale", vec![]).unwrap();
    ex.invoke(sale, "enterItem", vec![s("A001"), Value::Int(2)]).unwrap();
    ex.invoke(sale, "endSale", vec![Value::Real(0.0)]).unwrap();
    let before = ex.save_checkpoint();
    let bindings = ex.session(sale).unwrap().bindings.clone();
    let out = ex.invoke(sale, "split", vec![Value::Int(0)]).unwrap();
    assert_eq!(out.kind(), "fault", "{out:?}");
    assert_eq!(ex.save_checkpoint(), before);
    assert_eq!(ex.session(sale).unwrap().bindings, bindings);
    let out = ex.invoke(sale, "split", vec![Value::Int(2)]).unwrap();
    assert!(matches!(out, Outcome::Ok { value: Value::Real(r), .. } if (r - 1.5).abs() < 1e-12));
}

#[test]
fn unbound_hook_then_stub() {
    let mut ex = executor(false);
    let sale = stocked(&mut ex);
    let before = ex.save_checkpoint();
    let out = ex.invoke(sale, "topItems", vec![]).unwrap();
    assert_eq!(out, Outcome::HookUnbound { hook: "Sorting_descending".into() });
    assert_eq!(ex.save_checkpoint(), before);

    assert!(ex.register_hook("Nope_nope", |_, _| Ok(Value::Undefined)).is_err());
    ex.register_hook("Sorting_descending", |args, _| match &args[0] {
        Value::RefSet(ids) => Ok(Value::RefSet(ids.iter().rev().copied().collect())),
        _ => Err("expected a set".into()),
    })
    .unwrap();
    let out = ex.invoke(sale, "topItems", vec![]).unwrap();
    let items = ex.store().all_instances("Item").unwrap();
    assert!(matches!(out, Outcome::Ok { value: Value::RefSet(ids), .. } if ids == vec![items[1], items[0]]));
}

#[test]
fn failing_hook_is_a_fault() {
    let mut ex = executor(false);
    let sale = ex.open_session("ProcessSale").unwrap();
    ex.register_hook("Sorting_descending", |_, store| {
        store.create_object("Item").map_err(|e| e.to_string())?;
        Err("service down".into())
    })
    .unwrap();
    let before = ex.save_checkpoint();
    let out = ex.invoke(sale, "topItems", vec![]).unwrap();
    assert!(matches!(&out, Outcome::RuntimeFault { message } if message.contains("service down")));
    assert_eq!(ex.save_checkpoint(), before);
}

#[test]
fn invariants_reported_after_ok() {
    let mut ex = executor(false);
    let sale = stocked(&mut ex);
    ex.invoke(sale, "makeNewSale", vec![]).unwrap();
    ex.invoke(sale, "enterItem", vec![s("A001"), Value::Int(2)]).unwrap();
    let out = ex.invoke(sale, "endSale", vec![Value::Real(5.0)]).unwrap();
    let Outcome::Ok { value, invariants } = out else { panic!() };
    assert_eq!(value, Value::Real(-2.0));
    let r = invariants.get("NonNegativeAmount").unwrap();
    assert!(!r.holds);
    assert_eq!(r.witnesses, ex.store().all_instances("Sale").unwrap());
    assert!(invariants.get("StockKnown").unwrap().holds);
}

#[test]
fn invariant_edge_cases() {
    let ex = executor(false);
    assert!(ex.check_invariants().all_hold());

    let mut ex = executor(false);
    let id = ex.store_mut().create_object("Sale").unwrap();
    ex.store_mut().add_object("Sale", id).unwrap();
    ex.store_mut().set_attribute(id, "Amount", Value::Real(-1e-12)).unwrap();
    assert!(ex.check_invariants().get("NonNegativeAmount").unwrap().holds);
    ex.store_mut().set_attribute(id, "Amount", Value::Real(-1.0)).unwrap();
    let rep = ex.check_invariants();
    assert_eq!(rep.get("NonNegativeAmount").unwrap().witnesses, vec![id]);
}

#[test]
fn oracle_accepts_runs_and_rejects_corruption() {
    let mut ex = executor(false);
    let sale = stocked(&mut ex);
    ex.invoke(sale, "makeNewSale", vec![]).unwrap();
    let inv = ex.invoke_detailed(sale, "enterItem", vec![s("B001"), Value::Int(2)]).unwrap();
    let Outcome::Ok { value, .. } = &inv.outcome else { panic!() };
    let op = ex.model().compiled.operation("ProcessSale", "enterItem").unwrap().contract.clone();
    let pre = PreState { store: &inv.pre_store, session: &inv.pre_session };
    let session = ex.session(sale).unwrap().bindings.clone();
    let post = PostState { store: ex.store(), session: &session, env: &inv.env, result: value };
    assert!(verify_postcondition(&op, pre, post, DEFAULT_TOLERANCE));

    let mut corrupt = ex.store().clone();
    let line = corrupt.all_instances("SalesLineItem").unwrap()[0];
    corrupt.set_attribute(line, "Subamount", Value::Real(7.0)).unwrap();
    let post = PostState { store: &corrupt, ..post };
    assert!(!verify_postcondition(&op, pre, post, DEFAULT_TOLERANCE));
    let post = PostState { store: ex.store(), result: &Value::Bool(false), ..post };
    assert!(!verify_postcondition(&op, pre, post, DEFAULT_TOLERANCE));
}

#[test]
fn sessions_are_isolated() {
    let mut ex = executor(false);
    let a = ex.open_session("ProcessSale").unwrap();
    let b = ex.open_session("ProcessSale").unwrap();
    assert_ne!(a, b);
    ex.invoke(a, "makeNewSale", vec![]).unwrap();
    assert!(ex.session(a).unwrap().bindings.contains_key("currentSale"));
    assert!(ex.session(b).unwrap().bindings.is_empty());
    assert_eq!(ex.invoke(b, "endSale", vec![Value::Real(0.0)]).unwrap().kind(), "precondition_violated");
}

#[test]
fn checkpoint_load_replaces_store_and_ends_sessions() {
    let mut ex = executor(false);
    let sale = stocked(&mut ex);
    let saved = ex.save_checkpoint();
    ex.invoke(sale, "makeNewSale", vec![]).unwrap();
    assert!(ex.load_checkpoint("{ not json").is_err());
    assert_eq!(ex.store().all_instances("Sale").unwrap().len(), 1);
    ex.load_checkpoint(&saved).unwrap();
    assert_eq!(ex.save_checkpoint(), saved);
    assert!(ex.session(sale).is_none());
}

#[test]
fn crud_round_trip() {
    assert!(executor(false).open_session("ManageStore").is_err());
    let mut ex = executor(true);
    let m = ex.open_session("ManageStore").unwrap();
    let out = ex.invoke(m, "createStore", vec![Value::Int(1), s("UMStore"), s("Taipa")]).unwrap();
    assert!(out.is_ok(), "{out:?}");
    let id = ex.store().all_instances("Store").unwrap()[0];
    assert_eq!(ex.store().get_attribute(id, "Name").unwrap(), s("UMStore"));
    assert_eq!(ex.store().get_attribute(id, "Address").unwrap(), s("Taipa"));

    let dup = ex.invoke(m, "createStore", vec![Value::Int(1), s("x"), s("y")]).unwrap();
    assert_eq!(dup.kind(), "precondition_violated");
    assert!(matches!(ex.invoke(m, "readStore", vec![Value::Int(1)]).unwrap(), Outcome::Ok { value: Value::Ref(r), .. } if r == id));
    assert!(ex.invoke(m, "updateStore", vec![Value::Int(1), s("UM"), s("Coloane")]).unwrap().is_ok());
    assert_eq!(ex.store().get_attribute(id, "Address").unwrap(), s("Coloane"));
    assert!(ex.invoke(m, "deleteStore", vec![Value::Int(1)]).unwrap().is_ok());
    assert_eq!(ex.invoke(m, "readStore", vec![Value::Int(1)]).unwrap().kind(), "precondition_violated");
    assert_eq!(ex.invoke(m, "deleteStore", vec![Value::Int(1)]).unwrap().kind(), "precondition_violated");
}

#[test]
fn crud_without_attributes_warns() {
    let (extra, diags) = crud::synthesize_crud(&crate::parse_model_str("class Empty crud { }").unwrap());
    assert!(extra.contracts.is_empty());
    assert_eq!(diags.len(), 1);
    let (extra, _) = crud::synthesize_crud(&crate::parse_model_str("class P crud { K: Integer; }").unwrap());
    assert_eq!(extra.actors, ["Administrator"]);
    assert_eq!(extra.contracts.len(), 4);
}
