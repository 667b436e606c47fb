use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::parser::parse_model_str;

const SHOP: &str = "
class Item { Barcode: String; Price: Real; StockNumber: Integer; }
class Sale { Amount: Real; }
class SalesLineItem { Quantity: Real; }
class Payment { Amount: Real; }
class CashPayment extends Payment { Tendered: Real; }
assoc Sale.ContainedSalesLine -> SalesLineItem many
assoc SalesLineItem.BelongedSale -> Sale one
assoc Sale.AssoicatedPayment -> Payment one
";

fn schema() -> Arc<Schema> {
    Arc::new(Schema::build(&parse_model_str(SHOP).unwrap()))
}

fn store() -> ObjectStore {
    ObjectStore::new(schema())
}

fn item(s: &mut ObjectStore, code: &str) -> ObjectId {
    let id = s.create_object("Item").unwrap();
    s.set_attribute(id, "Barcode", Value::Str(code.into())).unwrap();
    s.add_object("Item", id).unwrap();
    id
}

fn by_barcode<'a>(s: &'a ObjectStore, code: &'a str) -> impl FnMut(ObjectId) -> Result<bool, StoreError> + 'a {
    move |id| Ok(s.get_attribute(id, "Barcode")?.ocl_eq(&Value::Str(code.into()), 0.0))
}

#[test]
fn find_object_first_match_in_creation_order() {
    let mut s = store();
    let a = item(&mut s, "A");
    let b = item(&mut s, "B");
    let b2 = item(&mut s, "B");
    assert_eq!(s.find_object("Item", by_barcode(&s, "B")), Ok(Value::Ref(b)));
    assert_eq!(s.find_object("Item", by_barcode(&s, "C")), Ok(Value::Undefined));
    let mut cond = by_barcode(&s, "B");
    assert_eq!(s.find_objects("Item", Some(&mut cond)), Ok(Value::RefSet(vec![b, b2])));
    assert_eq!(s.find_objects::<StoreError>("Item", None), Ok(Value::RefSet(vec![a, b, b2])));
    assert_eq!(store().find_object("Item", |_| Ok::<_, StoreError>(true)), Ok(Value::Undefined));
    assert_eq!(s.find_object("Nope", |_| Ok::<_, StoreError>(true)), Err(StoreError::UnknownClass("Nope".into())));
}

#[test]
fn created_objects_are_invisible_until_added() {
    let mut s = store();
    let x = s.create_object("SalesLineItem").unwrap();
    let y = s.create_object("SalesLineItem").unwrap();
    assert!(y > x);
    assert_eq!(s.all_instances("SalesLineItem").unwrap(), vec![]);
    assert_eq!(s.add_object("SalesLineItem", x), Ok(true));
    assert_eq!(s.add_object("SalesLineItem", x), Ok(false));
    assert_eq!(s.all_instances("SalesLineItem").unwrap(), vec![x]);
    assert_eq!(s.create_object("NoSuchClass"), Err(StoreError::UnknownClass("NoSuchClass".into())));
}

#[test]
fn subclass_instances_are_visible_from_superclass() {
    let mut s = store();
    let p = s.create_object("Payment").unwrap();
    let c = s.create_object("CashPayment").unwrap();
    s.add_object("Payment", c).unwrap();
    s.add_object("Payment", p).unwrap();
    assert_eq!(s.all_instances("Payment").unwrap(), vec![p, c]);
    assert_eq!(s.all_instances("CashPayment").unwrap(), vec![c]);
    s.set_attribute(c, "Amount", Value::Int(4)).unwrap();
    assert_eq!(s.get_attribute(c, "Amount"), Ok(Value::Real(4.0)));
    assert!(s.add_object("CashPayment", p).is_err());
}

#[test]
fn attributes_are_typed() {
    let mut s = store();
    let i = item(&mut s, "A");
    assert_eq!(s.get_attribute(i, "Price"), Ok(Value::Undefined));
    s.set_attribute(i, "Price", Value::Int(3)).unwrap();
    assert_eq!(s.get_attribute(i, "Price"), Ok(Value::Real(3.0)));
    s.set_attribute(i, "Price", Value::Real(2.5)).unwrap();
    assert_eq!(s.get_attribute(i, "Price"), Ok(Value::Real(2.5)));
    assert!(matches!(s.set_attribute(i, "Price", Value::Str("x".into())), Err(StoreError::TypeMismatch { .. })));
    assert!(matches!(s.get_attribute(i, "Prize"), Err(StoreError::UnknownAttribute { .. })));
    assert_eq!(s.get_attribute(ObjectId(99), "Price"), Err(StoreError::DanglingRef(ObjectId(99))));
}

#[test]
fn links_and_release() {
    let mut s = store();
    let sale = s.create_object("Sale").unwrap();
    s.add_object("Sale", sale).unwrap();
    let mut lines = Vec::new();
    for q in [1, 3, 5] {
        let l = s.create_object("SalesLineItem").unwrap();
        s.set_attribute(l, "Quantity", Value::Int(q)).unwrap();
        s.add_object("SalesLineItem", l).unwrap();
        assert_eq!(s.add_link_one_to_many(sale, "ContainedSalesLine", l), Ok(true));
        s.add_link_one_to_one(l, "BelongedSale", sale).unwrap();
        lines.push(l);
    }
    assert_eq!(s.add_link_one_to_many(sale, "ContainedSalesLine", lines[0]), Ok(false));
    let mut big = |id| Ok::<_, StoreError>(s.get_attribute(id, "Quantity")?.as_f64().unwrap() > 2.0);
    assert_eq!(
        s.find_linked_objects(sale, "ContainedSalesLine", Some(&mut big)),
        Ok(Value::RefSet(vec![lines[1], lines[2]]))
    );
    assert_eq!(s.find_linked_object(lines[0], "BelongedSale"), Ok(Value::Ref(sale)));
    assert!(matches!(
        s.find_linked_object(sale, "ContainedSalesLine"),
        Err(StoreError::MultiplicityMismatch { .. })
    ));
    assert!(matches!(s.add_link_one_to_one(sale, "AssoicatedPayment", lines[0]), Err(StoreError::TargetMismatch { .. })));

    assert_eq!(s.remove_link_one_to_many(sale, "ContainedSalesLine", lines[2]), Ok(true));
    assert_eq!(s.remove_link_one_to_many(sale, "ContainedSalesLine", lines[2]), Ok(false));
    assert_eq!(s.remove_link_one_to_one(lines[2], "BelongedSale"), Ok(true));
    assert_eq!(s.find_linked_object(lines[2], "BelongedSale"), Ok(Value::Undefined));

    // releasing the sale empties every inbound link
    assert_eq!(s.release_object("Sale", sale), Ok(true));
    assert_eq!(s.release_object("Sale", sale), Ok(false));
    assert_eq!(s.find_linked_object(lines[0], "BelongedSale"), Ok(Value::Undefined));
    assert_eq!(s.find_linked_object(lines[1], "BelongedSale"), Ok(Value::Undefined));
    s.check_integrity().unwrap();
}

#[test]
fn checkpoint_round_trip_and_format() {
    let s = store();
    assert_eq!(ObjectStore::load_checkpoint(schema(), &s.save_checkpoint()).unwrap(), s);

    let mut s = store();
    let sale = s.create_object("Sale").unwrap();
    s.add_object("Sale", sale).unwrap();
    s.set_attribute(sale, "Amount", Value::Real(40.0)).unwrap();
    let l = s.create_object("SalesLineItem").unwrap();
    s.add_link_one_to_many(sale, "ContainedSalesLine", l).unwrap();
    s.add_link_one_to_one(l, "BelongedSale", sale).unwrap();
    let text = s.save_checkpoint();
    let back = ObjectStore::load_checkpoint(schema(), &text).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.save_checkpoint(), text);
    assert!(text.contains(r#""Amount": {"#) && text.contains(r#""Real": 40.0"#));
    assert!(text.contains(r#""detached": true"#));

    assert!(ObjectStore::load_checkpoint(schema(), &text[..text.len() / 2]).is_err());
    let dangling = text.replace("\"BelongedSale\": 1", "\"BelongedSale\": 9");
    assert!(ObjectStore::load_checkpoint(schema(), &dangling).is_err());
    let wrong_type = text.replace(r#""Real": 40.0"#, r#""String": "x""#);
    assert!(ObjectStore::load_checkpoint(schema(), &wrong_type).is_err());
}

#[derive(Debug, Clone)]
enum Op {
    Create(usize),
    Add(usize, usize),
    Release(usize, usize),
    Link(usize, usize),
    Unlink(usize),
}

const CLASSES: [&str; 3] = ["Payment", "CashPayment", "Sale"];

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0..3usize).prop_map(Op::Create),
        (0..3usize, 0..20usize).prop_map(|(c, i)| Op::Add(c, i)),
        (0..3usize, 0..20usize).prop_map(|(c, i)| Op::Release(c, i)),
        (0..20usize, 0..20usize).prop_map(|(a, b)| Op::Link(a, b)),
        (0..20usize).prop_map(Op::Unlink),
    ]
}

/// Naive model: plain vectors, no indexes.
#[derive(Default)]
struct Shadow {
    objects: Vec<(ObjectId, &'static str, bool, bool)>, // id, class, added, released
    payment: Vec<(ObjectId, ObjectId)>,                  // Sale.AssoicatedPayment
}

impl Shadow {
    fn conforms(sub: &str, sup: &str) -> bool {
        sub == sup || (sub == "CashPayment" && sup == "Payment")
    }

    fn all(&self, class: &str) -> Vec<ObjectId> {
        self.objects
            .iter()
            .filter(|(_, c, added, released)| *added && !released && Self::conforms(c, class))
            .map(|o| o.0)
            .collect()
    }
}

proptest! {
    #[test]
    fn store_matches_shadow_model(ops in prop::collection::vec(op(), 0..80)) {
        let mut s = store();
        let mut sh = Shadow::default();
        let mut ids: Vec<ObjectId> = Vec::new();
        for op in ops {
            let pick = |i: usize| if ids.is_empty() { ObjectId(999) } else { ids[i % ids.len()] };
            match op {
                Op::Create(c) => {
                    let id = s.create_object(CLASSES[c]).unwrap();
                    sh.objects.push((id, CLASSES[c], false, false));
                    ids.push(id);
                }
                Op::Add(c, i) => {
                    let id = pick(i);
                    let got = s.add_object(CLASSES[c], id);
                    match sh.objects.iter_mut().find(|o| o.0 == id && !o.3) {
                        None => prop_assert!(got.is_err()),
                        Some(o) if !Shadow::conforms(o.1, CLASSES[c]) => prop_assert!(got.is_err()),
                        Some(o) => {
                            prop_assert_eq!(got, Ok(!o.2));
                            o.2 = true;
                        }
                    }
                }
                Op::Release(c, i) => {
                    let id = pick(i);
                    let got = s.release_object(CLASSES[c], id).unwrap();
                    let expect = sh.all(CLASSES[c]).contains(&id);
                    prop_assert_eq!(got, expect);
                    if expect {
                        sh.objects.iter_mut().find(|o| o.0 == id).unwrap().3 = true;
                        sh.payment.retain(|(a, b)| *a != id && *b != id);
                    }
                }
                Op::Link(a, b) => {
                    let (sale, pay) = (pick(a), pick(b));
                    let live = |id: ObjectId, sup: &str| sh.objects.iter().any(|o| o.0 == id && !o.3 && Shadow::conforms(o.1, sup));
                    let ok = live(sale, "Sale") && live(pay, "Payment");
                    let got = s.add_link_one_to_one(sale, "AssoicatedPayment", pay);
                    prop_assert_eq!(got.is_ok(), ok);
                    if ok {
                        sh.payment.retain(|(x, _)| *x != sale);
                        sh.payment.push((sale, pay));
                    }
                }
                Op::Unlink(a) => {
                    let sale = pick(a);
                    if s.remove_link_one_to_one(sale, "AssoicatedPayment").is_ok() {
                        sh.payment.retain(|(x, _)| *x != sale);
                    }
                }
            }
            s.check_integrity().map_err(TestCaseError::fail)?;
            for c in CLASSES {
                prop_assert_eq!(s.all_instances(c).unwrap(), sh.all(c));
            }
            for (sale, pay) in &sh.payment {
                prop_assert_eq!(s.find_linked_object(*sale, "AssoicatedPayment").unwrap(), Value::Ref(*pay));
            }
        }
        let back = ObjectStore::load_checkpoint(schema(), &s.save_checkpoint()).unwrap();
        prop_assert_eq!(back, s);
    }
}
