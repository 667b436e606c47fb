use crate::exec::eval::{Bindings, Ctx, Env};
use crate::model::Contract;
use crate::store::ObjectStore;
use crate::value::Value;

/// The state an invocation started from.
#[derive(Debug, Clone, Copy)]
pub struct PreState<'a> {
    pub store: &'a ObjectStore,
    pub session: &'a Bindings,
}

/// The state it ended in, with the names the plan bound.
#[derive(Debug, Clone, Copy)]
pub struct PostState<'a> {
    pub store: &'a ObjectStore,
    pub session: &'a Bindings,
    pub env: &'a Env,
    pub result: &'a Value,
}

/// Reads the original postcondition as a predicate over the post-state:
/// `@pre` looks at the pre-state, `oclIsNew` asks whether the object is
/// absent from it, `result` is the returned value.
pub fn verify_postcondition(contract: &Contract, pre: PreState<'_>, post: PostState<'_>, tolerance: f64) -> bool {
    let ctx = Ctx {
        pre: Some((pre.store, pre.session)),
        result: Some(post.result),
        ..Ctx::new(post.store, post.session, tolerance)
    };
    let mut env = post.env.clone();
    matches!(ctx.eval(&contract.postcondition, &mut env), Ok(Value::Bool(true)))
}
