//! Operations that need outside services are reported with the hooks they
//! need, and run once implementations are bound.

mod common;

use common::{executor, ok, real, s};
use reqexec_core::analyze::build_report;
use reqexec_core::decompose::{analyze_executability, Executability};
use reqexec_core::exec::Outcome;
use reqexec_core::fixtures::load_fixture_compiled;
use reqexec_core::{LoadOptions, Value};

#[test]
fn mini_cocome_reports_are_partially_executable_with_named_hooks() {
    let m = load_fixture_compiled("miniCocome", LoadOptions::default()).unwrap();
    let rep = analyze_executability(&m.compiled);
    let partial: Vec<(String, Vec<String>)> = rep
        .operations
        .iter()
        .filter_map(|o| match &o.status {
            Executability::PartiallyExecutable { hooks } => Some((o.operation.clone(), hooks.clone())),
            Executability::Executable => None,
        })
        .collect();
    let expected = [
        ("listTopTenItems", vec!["Ranking_topTen"]),
        ("sortItemsByPrice", vec!["hook_StoreReports_sortItemsByPrice_0"]),
        ("emailOutOfStock", vec!["Mail_send"]),
    ];
    assert_eq!(partial.len(), 3);
    for ((op, hooks), (want_op, want_hooks)) in partial.iter().zip(expected) {
        assert_eq!(op, want_op);
        assert_eq!(hooks, &want_hooks);
    }
    assert_eq!((rep.executable(), rep.total()), (7, 10));

    let report = build_report("miniCocome", m.model(), &m.compiled);
    assert_eq!(report.executability.executable, 7);
    assert!((report.executability.success_rate - 70.0).abs() < 1e-9);
}

#[test]
fn stub_hooks_make_the_flagged_reports_invocable() {
    let mut ex = executor("miniCocome");
    let items = ex.open_session("ManageItems").unwrap();
    ok(&mut ex, items, "addItem", vec![s("1"), s("Tea"), real(3.0), real(0.0)]);
    ok(&mut ex, items, "addItem", vec![s("2"), s("Rice"), real(9.5), real(4.0)]);
    let rep = ex.open_session("StoreReports").unwrap();
    let calls: [(&str, Vec<Value>); 3] =
        [("listTopTenItems", vec![]), ("sortItemsByPrice", vec![]), ("emailOutOfStock", vec![s("boss@store")])];
    for (op, args) in &calls {
        assert_eq!(ex.invoke(rep, op, args.clone()).unwrap().kind(), "hook_unbound");
    }
    let mut bound = ex.register_stub_hooks();
    bound.sort();
    assert_eq!(bound, ["Mail_send", "Ranking_topTen", "hook_StoreReports_sortItemsByPrice_0"]);
    for (op, args) in calls {
        let out = ex.invoke(rep, op, args).unwrap();
        assert!(out.is_ok(), "{op}: {out:?}");
    }
}

#[test]
fn real_hook_implementations_are_used() {
    let mut ex = executor("miniCocome");
    let items = ex.open_session("ManageItems").unwrap();
    for (code, price) in [("1", 3.0), ("2", 9.5), ("3", 1.0)] {
        ok(&mut ex, items, "addItem", vec![s(code), s("x"), real(price), real(1.0)]);
    }
    ex.register_hook("Ranking_topTen", |args, store| {
        let Some(Value::RefSet(ids)) = args.first() else { return Err("expects a set".into()) };
        let mut ids = ids.clone();
        let price = |id| store.get_attribute(id, "Price").ok().and_then(|v| v.as_f64()).unwrap_or(0.0);
        ids.sort_by(|a, b| price(*b).total_cmp(&price(*a)));
        ids.truncate(10);
        Ok(Value::RefSet(ids))
    })
    .unwrap();
    let rep = ex.open_session("StoreReports").unwrap();
    let Outcome::Ok { value: Value::RefSet(ids), .. } = ex.invoke(rep, "listTopTenItems", vec![]).unwrap() else {
        panic!()
    };
    let codes: Vec<Value> = ids.iter().map(|id| ex.store().get_attribute(*id, "Barcode").unwrap()).collect();
    assert_eq!(codes, [s("2"), s("1"), s("3")]);
    assert!(ex.register_hook("Nobody_nothing", |_, _| Ok(Value::Bool(true))).is_err());
}
