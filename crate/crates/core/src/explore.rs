//! Randomized exploration of a loaded model.
//!
//! A seeded walk picks operations across all use cases, draws arguments
//! from the values already in the store (plus a few constants and fresh
//! keys), and checks every outcome: `Ok` results of hook-free operations
//! against the postcondition oracle, everything else against the store
//! checkpoint taken before the call.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::exec::{verify_postcondition, Executor, Outcome, PostState, PreState, SessionId};
use crate::expr::{ExprKind, PrimType};
use crate::pipeline::LoadedModel;
use crate::value::Value;

#[derive(Debug, Clone)]
pub struct ExploreConfig {
    pub seed: u64,
    /// Stop once every hook-free operation has this many `Ok` outcomes.
    pub ok_target: usize,
    pub max_steps: usize,
    /// Start over from an empty store this often, to keep stores small.
    pub reset_every: usize,
    /// How often a hooked operation is also tried with no hooks bound.
    pub bare_hook_rate: f64,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig { seed: 7, ok_target: 200, max_steps: 400_000, reset_every: 300, bare_hook_rate: 0.3 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OpStats {
    pub name: String,
    pub hooked: bool,
    /// False when the guard is absent or the literal `true`.
    pub guarded: bool,
    pub outcomes: BTreeMap<&'static str, usize>,
    pub oracle_checked: usize,
    pub oracle_failures: Vec<String>,
    pub rollback_checked: usize,
    pub rollback_failures: Vec<String>,
}

impl OpStats {
    pub fn count(&self, kind: &str) -> usize {
        self.outcomes.get(kind).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct ExploreReport {
    pub steps: usize,
    pub ops: Vec<OpStats>,
}

impl ExploreReport {
    pub fn op(&self, name: &str) -> Option<&OpStats> {
        self.ops.iter().find(|o| o.name == name)
    }

    /// Hook-free operations that fell short of `target` oracle checks.
    pub fn short_of(&self, target: usize) -> Vec<&OpStats> {
        self.ops.iter().filter(|o| !o.hooked && o.oracle_checked < target).collect()
    }

    pub fn oracle_failures(&self) -> usize {
        self.ops.iter().map(|o| o.oracle_failures.len()).sum()
    }

    pub fn rollback_failures(&self) -> usize {
        self.ops.iter().map(|o| o.rollback_failures.len()).sum()
    }

    pub fn rollback_checked(&self) -> usize {
        self.ops.iter().map(|o| o.rollback_checked).sum()
    }
}

const INTS: &[i64] = &[-1, 0, 1, 2, 3, 5, 10, 30, 600, 700, 1000];
const REALS: &[f64] = &[0.0, 0.5, 1.0, 2.5, 10.0, 20.0, 40.0, 100.0, 500.0, 1800.0, 2000.0];
const STRS: &[&str] = &["A1", "B2", "C3", "x"];

struct Pools {
    ints: Vec<i64>,
    reals: Vec<f64>,
    strs: Vec<String>,
}

impl Pools {
    fn of(ex: &Executor) -> Pools {
        let mut p = Pools { ints: Vec::new(), reals: Vec::new(), strs: Vec::new() };
        for r in ex.store().records() {
            for v in r.attrs.values() {
                match v {
                    Value::Int(i) => p.ints.push(*i),
                    Value::Real(x) => p.reals.push(*x),
                    Value::Str(s) => p.strs.push(s.clone()),
                    _ => {}
                }
            }
        }
        p
    }

    fn draw(&self, ty: PrimType, rng: &mut StdRng) -> Value {
        let from_store = rng.gen_bool(0.6);
        match ty {
            PrimType::Boolean => Value::Bool(rng.gen()),
            PrimType::Integer => match self.ints.choose(rng) {
                Some(i) if from_store => Value::Int(*i),
                _ if rng.gen_bool(0.5) => Value::Int(rng.gen_range(1..=60)),
                _ => Value::Int(*INTS.choose(rng).unwrap()),
            },
            PrimType::Real => match self.reals.choose(rng) {
                Some(x) if from_store => Value::Real(*x),
                _ if rng.gen_bool(0.3) => Value::Real(rng.gen_range(1..=400) as f64 / 4.0),
                _ => Value::Real(*REALS.choose(rng).unwrap()),
            },
            PrimType::String => match self.strs.choose(rng) {
                Some(s) if from_store => Value::Str(s.clone()),
                _ if rng.gen_bool(0.5) => Value::Str(format!("s{}", rng.gen_range(0..40))),
                _ => Value::Str(STRS.choose(rng).unwrap().to_string()),
            },
        }
    }
}

/// Walks `model` with a fresh executor; `setup` binds hooks and is rerun
/// after every reset.
pub fn explore(model: Arc<LoadedModel>, setup: &dyn Fn(&mut Executor), cfg: &ExploreConfig) -> ExploreReport {
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut ex = Executor::new(Arc::clone(&model));
    setup(&mut ex);
    let ops = &model.compiled.operations;
    let mut stats: Vec<OpStats> = ops
        .iter()
        .map(|o| OpStats {
            name: o.qualified_name(),
            hooked: !o.is_executable(),
            guarded: !matches!(o.guard.kind, ExprKind::BoolLit(true)),
            ..OpStats::default()
        })
        .collect();
    let mut sessions: BTreeMap<String, SessionId> = BTreeMap::new();

    let mut steps = 0;
    while steps < cfg.max_steps {
        if stats.iter().all(|s| s.hooked || s.oracle_checked >= cfg.ok_target) {
            break;
        }
        steps += 1;
        if steps % cfg.reset_every == 0 {
            ex.reset();
            sessions.clear();
        }
        let lagging: Vec<usize> =
            (0..ops.len()).filter(|&i| !stats[i].hooked && stats[i].oracle_checked < cfg.ok_target).collect();
        // Half the time, work on the use case of an operation still short
        // of its target, so the steps that set up its session get chosen too.
        let i = match lagging.choose(&mut rng) {
            Some(&l) if rng.gen_bool(0.5) => {
                let same: Vec<usize> = (0..ops.len()).filter(|&j| ops[j].use_case == ops[l].use_case).collect();
                if rng.gen_bool(0.5) { l } else { *same.choose(&mut rng).unwrap() }
            }
            _ => rng.gen_range(0..ops.len()),
        };
        let op = &ops[i];
        let sid = match sessions.get(&op.use_case) {
            Some(&s) if !rng.gen_bool(0.02) => s,
            _ => {
                let s = ex.open_session(&op.use_case).expect("use case exists");
                sessions.insert(op.use_case.clone(), s);
                s
            }
        };
        let pools = Pools::of(&ex);
        let args: Vec<Value> = op.signature.params.iter().map(|p| pools.draw(p.ty, &mut rng)).collect();
        let call = |args: &[Value]| format!("{}({})", op.signature.name, args.iter().map(Value::to_string).collect::<Vec<_>>().join(", "));
        let shown = args.clone();

        // Hooked operations are sometimes replayed on a copy with no hooks bound.
        let bare = stats[i].hooked && rng.gen_bool(cfg.bare_hook_rate);
        let mut copy;
        let target = if bare {
            copy = ex.clone();
            copy.clear_hooks();
            &mut copy
        } else {
            &mut ex
        };

        let before = target.store().clone();
        let before_session = target.session(sid).expect("open").bindings.clone();
        let inv = target.invoke_detailed(sid, &op.signature.name, args).expect("arguments are drawn by type");
        let st = &mut stats[i];
        *st.outcomes.entry(inv.outcome.kind()).or_default() += 1;
        match &inv.outcome {
            Outcome::Ok { value, .. } => {
                if !st.hooked {
                    let contract = &op.contract;
                    let session = &target.session(sid).expect("open").bindings;
                    let pre = PreState { store: &inv.pre_store, session: &inv.pre_session };
                    let post = PostState { store: target.store(), session, env: &inv.env, result: value };
                    st.oracle_checked += 1;
                    if !verify_postcondition(contract, pre, post, target.tolerance()) {
                        st.oracle_failures.push(call(&shown));
                    }
                }
            }
            _ => {
                st.rollback_checked += 1;
                // Checkpoints serialize deterministically, so equal stores
                // give equal bytes; the bytes are still compared now and then.
                let same_store = if st.rollback_checked % 8 == 1 {
                    before.save_checkpoint() == target.save_checkpoint()
                } else {
                    before == *target.store()
                };
                let same_session = target.session(sid).expect("open").bindings == before_session;
                if !same_store || !same_session {
                    st.rollback_failures.push(format!("{}: {:?}", call(&shown), inv.outcome));
                }
            }
        }
    }
    ExploreReport { steps, ops: stats }
}
