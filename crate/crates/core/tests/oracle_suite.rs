//! Randomized valid invocations of every hook-free contract, each checked
//! against its own postcondition.

mod common;

use std::time::Instant;

use reqexec_core::fixtures::FIXTURES;

#[test]
fn every_hook_free_contract_satisfies_its_postcondition() {
    let start = Instant::now();
    for (k, f) in FIXTURES.iter().enumerate() {
        let rep = common::walk(f.name, 11 + k as u64);
        let short: Vec<_> = rep.short_of(200).iter().map(|o| (o.name.clone(), o.oracle_checked)).collect();
        assert!(short.is_empty(), "{}: fewer than 200 Ok invocations for {short:?}", f.name);
        for op in &rep.ops {
            assert!(op.oracle_failures.is_empty(), "{} {}: {:?}", f.name, op.name, op.oracle_failures);
        }
    }
    assert!(start.elapsed().as_secs() < 60, "took {:?}", start.elapsed());
}
