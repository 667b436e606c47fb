//! One PASS/FAIL line per headline requirement. Runs without the test
//! harness so the lines are always printed; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use reqexec_cli::bench::{bench, bundled};
use reqexec_core::decompose::{analyze_executability, Executability};
use reqexec_core::exec::{Executor, Outcome, SessionId};
use reqexec_core::explore::{explore, ExploreConfig};
use reqexec_core::fixtures::{load_fixture_compiled, FIXTURES};
use reqexec_core::model::Multiplicity;
use reqexec_core::schema::Schema;
use reqexec_core::store::ObjectStore;
use reqexec_core::{LoadOptions, ObjectId, PrimType, Value};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture_path(file: &str) -> String {
    root().join("fixtures").join(file).display().to_string()
}

fn reqexec(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_reqexec")).args(args).env_remove("REQEXEC_TOLERANCE").output().unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn executor(name: &str) -> Executor {
    Executor::new(Arc::new(load_fixture_compiled(name, LoadOptions { include_crud: true }).unwrap()))
}

fn call(ex: &mut Executor, sid: SessionId, op: &str, args: Vec<Value>) -> Outcome {
    ex.invoke(sid, op, args).unwrap_or_else(|e| panic!("{op}: {e}"))
}

fn ok(ex: &mut Executor, sid: SessionId, op: &str, args: Vec<Value>) -> Value {
    match call(ex, sid, op, args) {
        Outcome::Ok { value, .. } => value,
        other => panic!("{op}: {other:?}"),
    }
}

fn s(x: &str) -> Value {
    Value::Str(x.into())
}

fn atm_reproduction() -> Check {
    let start = Instant::now();
    let (code, json) = reqexec(&["metrics", "--format", "json", &fixture_path("atm.rqm")]);
    ensure(code == Some(0), format!("metrics exit {code:?}"))?;
    let v: serde_json::Value = serde_json::from_str(&json).map_err(|e| e.to_string())?;
    let m = &v["metrics"];
    let got: Vec<i64> = ["actors", "useCases", "systemOperations", "entityClasses", "associations", "invariants"]
        .iter()
        .map(|k| m[k].as_i64().unwrap_or(-1))
        .collect();
    ensure(got == [2, 6, 15, 3, 4, 5], format!("metrics {got:?}"))?;
    let (code, text) = reqexec(&["check", &fixture_path("atm.rqm")]);
    ensure(code == Some(0), format!("check exit {code:?}"))?;
    ensure(text.contains("15/15 executable (100.00%)"), format!("check said {text:?}"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, format!("took {secs:.2} s"))?;
    Ok(format!("actors=2 useCases=6 SO=15 classes=3 assocs=4 invs=5; 15/15 = 100%; {secs:.2} s"))
}

fn enter_item_golden() -> Check {
    let m = load_fixture_compiled("miniCocome", LoadOptions::default()).map_err(|e| e.to_string())?;
    let op = m.compiled.operation("CoCoMEProcessSale", "enterItem").ok_or("no enterItem")?;
    ensure(op.post_plan.len() == 10, format!("{} post instructions", op.post_plan.len()))?;
    let golden = std::fs::read_to_string(root().join("fixtures/golden/enter_item.plan.txt")).map_err(|e| e.to_string())?;
    ensure(format!("{}{}", op.plan_text(), op.trace_text()) == golden, "plan or trace differs from the golden file")?;
    Ok("10 instructions, plan and rule trace match".into())
}

fn bind_hooks(ex: &mut Executor) {
    ex.register_stub_hooks();
    if ex.model().compiled.hooks().iter().any(|h| h.name == "CreditBureau_score") {
        ex.register_hook("CreditBureau_score", |args, _| match args {
            [Value::Str(ssn)] => Ok(Value::Int(if ssn.len() % 2 == 0 { 720 } else { 540 })),
            _ => Err("score expects one String".into()),
        })
        .unwrap();
    }
}

fn oracle_suite() -> Check {
    let start = Instant::now();
    let (mut ops, mut checked) = (0, 0);
    for (k, f) in FIXTURES.iter().enumerate() {
        let m = Arc::new(load_fixture_compiled(f.name, LoadOptions { include_crud: true }).map_err(|e| e.to_string())?);
        let rep = explore(m, &bind_hooks, &ExploreConfig { seed: 500 + k as u64, ..ExploreConfig::default() });
        if let Some(o) = rep.short_of(200).first() {
            return Err(format!("{} {}: only {} valid invocations", f.name, o.name, o.oracle_checked));
        }
        if let Some(o) = rep.ops.iter().find(|o| !o.oracle_failures.is_empty()) {
            return Err(format!("{} {}: oracle false on {:?}", f.name, o.name, o.oracle_failures.first()));
        }
        for o in rep.ops.iter().filter(|o| !o.hooked) {
            ops += 1;
            checked += o.oracle_checked;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, format!("took {secs:.1} s"))?;
    Ok(format!("{ops} hook-free contracts, {checked} invocations, 100% oracle-true, {secs:.1} s"))
}

/// Runs one invocation that must fail with `kind` and compares checkpoints.
fn rolls_back(ex: &mut Executor, sid: SessionId, op: &str, args: Vec<Value>, kind: &str) -> Result<(), String> {
    let before = ex.save_checkpoint();
    let out = call(ex, sid, op, args);
    ensure(out.kind() == kind, format!("{op}: expected {kind}, got {out:?}"))?;
    ensure(ex.save_checkpoint() == before, format!("{op}: store changed after {kind}"))
}

fn atomicity() -> Check {
    let mut atm = executor("atm");
    let clerk = atm.open_session("ManageAccount").unwrap();
    ok(&mut atm, clerk, "openAccount", vec![Value::Int(7), Value::Real(100.0), Value::Real(500.0)]);
    let cards = atm.open_session("ManageCard").unwrap();
    ok(&mut atm, cards, "issueCard", vec![Value::Int(70), s("2468"), Value::Int(7)]);
    let w = atm.open_session("WithdrawCash").unwrap();
    ok(&mut atm, w, "insertCard", vec![Value::Int(70)]);
    ok(&mut atm, w, "enterPassword", vec![s("2468")]);
    rolls_back(&mut atm, w, "withdraw", vec![Value::Real(400.0)], "precondition_violated")?;

    let mut cocome = executor("miniCocome");
    let items = cocome.open_session("ManageItems").unwrap();
    ok(&mut cocome, items, "addItem", vec![s("1"), s("Tea"), Value::Real(2.0), Value::Real(3.0)]);
    let reports = cocome.open_session("StoreReports").unwrap();
    rolls_back(&mut cocome, reports, "listTopTenItems", vec![], "hook_unbound")?;

    let mut loans = executor("loanpsSubset");
    loans.register_hook("CreditBureau_score", |_, _| Ok(Value::Int(700))).unwrap();
    let sub = loans.open_session("SubmitLoanRequest").unwrap();
    ok(&mut loans, sub, "submitRequest", vec![Value::Int(1), Value::Real(1200.0), Value::Int(0)]);
    let eval = loans.open_session("EvaluateLoanRequest").unwrap();
    ok(&mut loans, eval, "chooseRequest", vec![Value::Int(1)]);
    ok(&mut loans, eval, "checkCredit", vec![s("123-45-6789")]);
    ok(&mut loans, eval, "approve", vec![]);
    let book = loans.open_session("BookNewLoan").unwrap();
    ok(&mut loans, book, "chooseApproved", vec![Value::Int(1)]);
    rolls_back(&mut loans, book, "bookLoan", vec![Value::Int(9)], "fault")?;
    Ok("guard false, unbound hook and division by zero leave the checkpoint byte-identical".into())
}

fn forty_dollar_sale(fixture: &str) -> (Executor, SessionId) {
    let mut ex = executor(fixture);
    let items = ex.open_session("ManageItems").unwrap();
    ok(&mut ex, items, "addItem", vec![s("4711"), s("Coffee"), Value::Real(20.0), Value::Real(10.0)]);
    let sale = ex.open_session("CoCoMEProcessSale").unwrap();
    ok(&mut ex, sale, "makeNewSale", vec![]);
    ok(&mut ex, sale, "enterItem", vec![s("4711"), Value::Real(2.0)]);
    (ex, sale)
}

fn red_after(out: Outcome) -> Result<Vec<String>, String> {
    match out {
        Outcome::Ok { invariants, .. } => Ok(invariants.violated().map(|r| r.name.clone()).collect()),
        other => Err(format!("expected ok, got {other:?}")),
    }
}

fn faulty_scenarios() -> Check {
    let (mut ex, sale) = forty_dollar_sale("cashPaymentMissingGuard");
    ok(&mut ex, sale, "endSale", vec![]);
    let red = red_after(call(&mut ex, sale, "makeCashPayment", vec![Value::Real(20.0)]))?;
    ensure(red == ["CashPaymentBalance"], format!("underpayment: red {red:?}"))?;

    let mut ex = executor("withdrawWrongGuard");
    let clerk = ex.open_session("ManageAccount").unwrap();
    ok(&mut ex, clerk, "openAccount", vec![Value::Int(7), Value::Real(10000.0), Value::Real(2000.0)]);
    let cards = ex.open_session("ManageCard").unwrap();
    ok(&mut ex, cards, "issueCard", vec![Value::Int(70), s("2468"), Value::Int(7)]);
    let w = ex.open_session("WithdrawCash").unwrap();
    ok(&mut ex, w, "insertCard", vec![Value::Int(70)]);
    ok(&mut ex, w, "enterPassword", vec![s("2468")]);
    let first = red_after(call(&mut ex, w, "withdraw", vec![Value::Real(1800.0)]))?;
    ensure(first.is_empty(), format!("first withdrawal: red {first:?}"))?;
    let red = red_after(call(&mut ex, w, "withdraw", vec![Value::Real(500.0)]))?;
    ensure(red == ["WithinDailyLimit"], format!("daily limit: red {red:?}"))?;

    let (mut ex, sale) = forty_dollar_sale("endSaleSignTypo");
    let out = call(&mut ex, sale, "endSale", vec![]);
    ensure(matches!(&out, Outcome::Ok { value: Value::Real(v), .. } if *v == -40.0), format!("sign typo: {out:?}"))?;
    let red = red_after(out)?;
    ensure(red == ["SalePrice"], format!("sign typo: red {red:?}"))?;
    Ok("CashPaymentBalance, WithinDailyLimit and SalePrice turn red".into())
}

fn cocome_non_executability() -> Check {
    let m = load_fixture_compiled("miniCocome", LoadOptions::default()).map_err(|e| e.to_string())?;
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
        ("listTopTenItems", "Ranking_topTen"),
        ("sortItemsByPrice", "hook_StoreReports_sortItemsByPrice_0"),
        ("emailOutOfStock", "Mail_send"),
    ];
    ensure(partial.len() == 3, format!("partial ops {partial:?}"))?;
    for ((op, hooks), (eop, ehook)) in partial.iter().zip(expected) {
        ensure(op == eop && hooks == &[ehook.to_string()], format!("{op}: {hooks:?}"))?;
    }
    let mut ex = executor("miniCocome");
    let items = ex.open_session("ManageItems").unwrap();
    ok(&mut ex, items, "addItem", vec![s("1"), s("Tea"), Value::Real(2.0), Value::Real(0.0)]);
    let reports = ex.open_session("StoreReports").unwrap();
    ensure(call(&mut ex, reports, "listTopTenItems", vec![]).kind() == "hook_unbound", "unbound hook ran")?;
    ex.register_stub_hooks();
    for (op, args) in [("listTopTenItems", vec![]), ("sortItemsByPrice", vec![]), ("emailOutOfStock", vec![s("m@x.org")])] {
        let out = call(&mut ex, reports, op, args);
        ensure(out.is_ok(), format!("{op} with stubs: {out:?}"))?;
    }
    Ok("3 report ops flagged with named hooks; all invocable with stubs".into())
}

fn performance() -> Check {
    let rep = bench(&bundled(), 3).map_err(|e| e.to_string())?;
    let total = rep.total();
    ensure(total < 5000.0, format!("{total:.2} ms"))?;
    let note = if total < 1000.0 { "under 1000 ms" } else { "over 1000 ms, under the 5 s bound" };
    Ok(format!("four fixtures parse+compile in {total:.2} ms ({note})"))
}

fn random_value(ty: PrimType, rng: &mut StdRng) -> Value {
    match ty {
        PrimType::Integer => Value::Int(rng.gen_range(-1000..1000)),
        PrimType::Real => Value::Real(rng.gen_range(-1e6..1e6)),
        PrimType::Boolean => Value::Bool(rng.gen()),
        PrimType::String => Value::Str(["", "a", "q\"uote", "new\nline", "ünï"].choose(rng).unwrap().to_string()),
    }
}

fn random_store(schema: &Arc<Schema>, rng: &mut StdRng) -> (ObjectStore, usize) {
    let mut s = ObjectStore::new(Arc::clone(schema));
    let classes = schema.class_names().to_vec();
    let mut ids: Vec<(ObjectId, String)> = Vec::new();
    for _ in 0..rng.gen_range(0..=100) {
        let c = classes.choose(rng).unwrap().clone();
        let id = s.create_object(&c).unwrap();
        if rng.gen_bool(0.9) {
            s.add_object(&c, id).unwrap();
        }
        for (a, ty) in schema.class(&c).unwrap().attributes.clone() {
            if rng.gen_bool(0.8) {
                s.set_attribute(id, &a, random_value(ty, rng)).unwrap();
            }
        }
        ids.push((id, c));
    }
    let mut links = 0;
    if !ids.is_empty() {
        for _ in 0..rng.gen_range(0..=200) {
            let (src, c) = ids.choose(rng).unwrap().clone();
            let roles = schema.class(&c).unwrap().roles.clone();
            let Some(role) = roles.choose(rng) else { continue };
            let targets: Vec<ObjectId> =
                ids.iter().filter(|(_, tc)| schema.conforms(tc, &role.target)).map(|(t, _)| *t).collect();
            let Some(&t) = targets.choose(rng) else { continue };
            links += 1;
            match role.multiplicity {
                Multiplicity::One => s.add_link_one_to_one(src, &role.name, t).map(drop),
                Multiplicity::Many => s.add_link_one_to_many(src, &role.name, t).map(drop),
            }
            .unwrap();
        }
    }
    (s, links)
}

fn checkpoint_round_trip() -> Check {
    let mut rng = StdRng::seed_from_u64(77);
    let names = ["atm", "miniCocome", "libmsSubset", "loanpsSubset"];
    let schemas: Vec<_> = names
        .iter()
        .map(|n| Arc::clone(&load_fixture_compiled(n, LoadOptions::default()).unwrap().schema))
        .collect();
    for trial in 0..1000 {
        let schema = &schemas[trial % schemas.len()];
        let (store, links) = random_store(schema, &mut rng);
        ensure(store.records().count() <= 100 && links <= 200, "generator out of bounds")?;
        let text = store.save_checkpoint();
        let back = ObjectStore::load_checkpoint(Arc::clone(schema), &text).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(back == store && back.save_checkpoint() == text, format!("trial {trial}: round trip differs"))?;
    }
    Ok("1000 random stores (<=100 objects, <=200 links) reload identically".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("ATM reproduction", atm_reproduction),
        ("enterItem golden", enter_item_golden),
        ("oracle suite", oracle_suite),
        ("atomicity", atomicity),
        ("faulty scenarios", faulty_scenarios),
        ("mini-CoCoME non-executability", cocome_non_executability),
        ("performance", performance),
        ("checkpoint round trip", checkpoint_round_trip),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
