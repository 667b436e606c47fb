//! Runtime values.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::expr::PrimType;

/// Default absolute tolerance for Real equality.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub u64);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
    Str(String),
    Ref(ObjectId),
    /// Ordered, duplicate-free.
    RefSet(Vec<ObjectId>),
    Undefined,
}

impl Value {
    pub fn is_undefined(&self) -> bool {
        matches!(self, Value::Undefined)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "Integer",
            Value::Real(_) => "Real",
            Value::Bool(_) => "Boolean",
            Value::Str(_) => "String",
            Value::Ref(_) => "Object",
            Value::RefSet(_) => "Set",
            Value::Undefined => "null",
        }
    }

    /// Converts into a value storable under `ty`, widening Integer to Real.
    /// Undefined is storable everywhere.
    pub fn coerce_to(&self, ty: PrimType) -> Option<Value> {
        match (ty, self) {
            (_, Value::Undefined) => Some(Value::Undefined),
            (PrimType::Integer, Value::Int(_))
            | (PrimType::Real, Value::Real(_))
            | (PrimType::Boolean, Value::Bool(_))
            | (PrimType::String, Value::Str(_)) => Some(self.clone()),
            (PrimType::Real, Value::Int(i)) => Some(Value::Real(*i as f64)),
            _ => None,
        }
    }

    /// OCL equality under the given Real tolerance. Numbers compare across
    /// Integer/Real; refs by identity; sets element-wise in order-insensitive
    /// fashion. Undefined equals only Undefined.
    pub fn ocl_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (a, b) if a.as_f64().is_some() && b.as_f64().is_some() => {
                (a.as_f64().unwrap() - b.as_f64().unwrap()).abs() <= tol
            }
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Ref(a), Value::Ref(b)) => a == b,
            (Value::RefSet(a), Value::RefSet(b)) => {
                a.len() == b.len() && a.iter().all(|x| b.contains(x))
            }
            (Value::Undefined, Value::Undefined) => true,
            _ => false,
        }
    }
}

/// Tagged JSON encoding shared by checkpoints and the HTTP service:
/// `{"Integer":5}`, `{"Real":2.5}`, `{"Boolean":true}`, `{"String":"x"}`,
/// `{"Ref":3}`, `{"RefSet":[1,2]}`, and `null` for Undefined.
impl Value {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => json!({ "Integer": i }),
            Value::Real(r) => json!({ "Real": r }),
            Value::Bool(b) => json!({ "Boolean": b }),
            Value::Str(s) => json!({ "String": s }),
            Value::Ref(id) => json!({ "Ref": id.0 }),
            Value::RefSet(ids) => json!({ "RefSet": ids.iter().map(|i| i.0).collect::<Vec<_>>() }),
            Value::Undefined => serde_json::Value::Null,
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Value, String> {
        let obj = match v {
            serde_json::Value::Null => return Ok(Value::Undefined),
            serde_json::Value::Object(o) if o.len() == 1 => o,
            other => return Err(format!("expected a typed value like {{\"Integer\": 1}}, found {other}")),
        };
        let (tag, inner) = obj.iter().next().expect("one entry");
        let bad = || format!("malformed {tag} value {inner}");
        Ok(match tag.as_str() {
            "Integer" => Value::Int(inner.as_i64().ok_or_else(bad)?),
            "Real" => Value::Real(inner.as_f64().ok_or_else(bad)?),
            "Boolean" => Value::Bool(inner.as_bool().ok_or_else(bad)?),
            "String" => Value::Str(inner.as_str().ok_or_else(bad)?.to_string()),
            "Ref" => Value::Ref(ObjectId(inner.as_u64().ok_or_else(bad)?)),
            "RefSet" => {
                let arr = inner.as_array().ok_or_else(bad)?;
                let mut ids = Vec::with_capacity(arr.len());
                for x in arr {
                    let id = ObjectId(x.as_u64().ok_or_else(bad)?);
                    if !ids.contains(&id) {
                        ids.push(id);
                    }
                }
                Value::RefSet(ids)
            }
            other => return Err(format!("unknown value tag `{other}`")),
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => f.write_str(&format_real(*r)),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Ref(id) => write!(f, "{id}"),
            Value::RefSet(ids) => {
                f.write_str("{")?;
                for (i, id) in ids.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{id}")?;
                }
                f.write_str("}")
            }
            Value::Undefined => f.write_str("null"),
        }
    }
}

/// Formats a Real so that it always reads back as a Real (`6` becomes `6.0`).
pub fn format_real(r: f64) -> String {
    let s = format!("{r}");
    if r.is_finite() && !s.contains(['.', 'e', 'E']) {
        format!("{s}.0")
    } else {
        s
    }
}
