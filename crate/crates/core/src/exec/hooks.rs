//! Implementations for the external hooks a compiled model leaves open.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::decompose::HookSpec;
use crate::store::ObjectStore;
use crate::value::Value;

/// A hook receives its evaluated arguments and read-write store access.
pub type HookFn = Arc<dyn Fn(&[Value], &mut ObjectStore) -> Result<Value, String> + Send + Sync>;

#[derive(Clone, Default)]
pub struct HookRegistry {
    hooks: BTreeMap<String, HookFn>,
}

impl fmt::Debug for HookRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.hooks.keys()).finish()
    }
}

impl HookRegistry {
    pub fn new() -> Self {
        HookRegistry::default()
    }

    pub fn register<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&[Value], &mut ObjectStore) -> Result<Value, String> + Send + Sync + 'static,
    {
        self.hooks.insert(name.to_string(), Arc::new(f));
    }

    pub fn get(&self, name: &str) -> Option<&HookFn> {
        self.hooks.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.hooks.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.hooks.keys().map(String::as_str)
    }

    pub fn clear(&mut self) {
        self.hooks.clear();
    }
}

/// A placeholder implementation shaped by the hook's declared return type:
/// a set-valued hook hands back its first set argument (or nothing), a
/// Boolean hook answers true, other primitives get their zero value and
/// object-valued hooks yield null.
pub fn stub_hook(spec: &HookSpec) -> impl Fn(&[Value], &mut ObjectStore) -> Result<Value, String> + Send + Sync + 'static {
    let ret = spec.return_type.clone();
    move |args: &[Value], _store: &mut ObjectStore| {
        Ok(match ret.as_deref() {
            None => Value::Bool(true),
            Some(t) if t.starts_with("Set(") => {
                args.iter().find(|a| matches!(a, Value::RefSet(_))).cloned().unwrap_or(Value::RefSet(Vec::new()))
            }
            Some("Boolean") => Value::Bool(true),
            Some("Integer") => Value::Int(0),
            Some("Real") => Value::Real(0.0),
            Some("String") => Value::Str(String::new()),
            Some(_) => Value::Undefined,
        })
    }
}
