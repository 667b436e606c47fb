//! The live object graph and its primitive operations.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Map};
use thiserror::Error;

use crate::model::Multiplicity;
use crate::schema::Schema;
use crate::value::{ObjectId, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StoreError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class `{class}` has no attribute `{attr}`")]
    UnknownAttribute { class: String, attr: String },
    #[error("class `{class}` has no association role `{role}`")]
    UnknownRole { class: String, role: String },
    #[error("role `{role}` is {actual}-valued")]
    MultiplicityMismatch { role: String, actual: &'static str },
    #[error("object {0} does not exist")]
    DanglingRef(ObjectId),
    #[error("attribute `{attr}` is {expected}, cannot store {found}")]
    TypeMismatch { attr: String, expected: String, found: String },
    #[error("object {id} of class `{class}` cannot play role `{role}` (needs `{expected}`)")]
    TargetMismatch { id: ObjectId, class: String, role: String, expected: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("checkpoint: {0}")]
pub struct CheckpointError(pub String);

#[derive(Debug, Clone, PartialEq)]
pub enum Link {
    One(Option<ObjectId>),
    Many(Vec<ObjectId>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRecord {
    pub id: ObjectId,
    pub class: String,
    pub attrs: BTreeMap<String, Value>,
    pub links: BTreeMap<String, Link>,
    /// False between creation and `add_object`.
    pub added: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectStore {
    schema: Arc<Schema>,
    records: BTreeMap<ObjectId, ObjectRecord>,
    /// Added objects by their own class; `all_instances` merges subclasses.
    instances: BTreeMap<String, BTreeSet<ObjectId>>,
    next_id: u64,
}

impl ObjectStore {
    pub fn new(schema: Arc<Schema>) -> Self {
        let instances = schema.class_names().iter().map(|c| (c.clone(), BTreeSet::new())).collect();
        ObjectStore { schema, records: BTreeMap::new(), instances, next_id: 1 }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn schema_arc(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn record(&self, id: ObjectId) -> Option<&ObjectRecord> {
        self.records.get(&id)
    }

    /// All records, added or not, in id order.
    pub fn records(&self) -> impl Iterator<Item = &ObjectRecord> {
        self.records.values()
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        self.records.contains_key(&id)
    }

    pub fn class_of(&self, id: ObjectId) -> Option<&str> {
        self.records.get(&id).map(|r| r.class.as_str())
    }

    fn live(&self, id: ObjectId) -> Result<&ObjectRecord, StoreError> {
        self.records.get(&id).ok_or(StoreError::DanglingRef(id))
    }

    fn live_mut(&mut self, id: ObjectId) -> Result<&mut ObjectRecord, StoreError> {
        self.records.get_mut(&id).ok_or(StoreError::DanglingRef(id))
    }

    fn known_class(&self, class: &str) -> Result<(), StoreError> {
        if self.schema.has_class(class) {
            Ok(())
        } else {
            Err(StoreError::UnknownClass(class.to_string()))
        }
    }

    /// Added objects of `class` and its subclasses, in creation order.
    pub fn all_instances(&self, class: &str) -> Result<Vec<ObjectId>, StoreError> {
        self.known_class(class)?;
        let mut ids: Vec<ObjectId> = self
            .schema
            .descendants(class)
            .into_iter()
            .filter_map(|c| self.instances.get(c))
            .flatten()
            .copied()
            .collect();
        ids.sort_unstable();
        Ok(ids)
    }

    /// Number of added objects whose own class is `class`.
    pub fn count_exact(&self, class: &str) -> usize {
        self.instances.get(class).map_or(0, BTreeSet::len)
    }

    pub fn find_object<E: From<StoreError>>(
        &self,
        class: &str,
        mut cond: impl FnMut(ObjectId) -> Result<bool, E>,
    ) -> Result<Value, E> {
        for id in self.all_instances(class)? {
            if cond(id)? {
                return Ok(Value::Ref(id));
            }
        }
        Ok(Value::Undefined)
    }

    pub fn find_objects<E: From<StoreError>>(
        &self,
        class: &str,
        mut cond: Option<&mut dyn FnMut(ObjectId) -> Result<bool, E>>,
    ) -> Result<Value, E> {
        let mut out = Vec::new();
        for id in self.all_instances(class)? {
            let keep = match cond.as_mut() {
                Some(f) => f(id)?,
                None => true,
            };
            if keep {
                out.push(id);
            }
        }
        Ok(Value::RefSet(out))
    }

    pub fn create_object(&mut self, class: &str) -> Result<ObjectId, StoreError> {
        let info = self.schema.class(class).ok_or_else(|| StoreError::UnknownClass(class.to_string()))?;
        let id = ObjectId(self.next_id);
        self.next_id += 1;
        let attrs = info.attributes.iter().map(|(n, _)| (n.clone(), Value::Undefined)).collect();
        let links = info
            .roles
            .iter()
            .map(|r| {
                let l = match r.multiplicity {
                    Multiplicity::One => Link::One(None),
                    Multiplicity::Many => Link::Many(Vec::new()),
                };
                (r.name.clone(), l)
            })
            .collect();
        self.records.insert(id, ObjectRecord { id, class: class.to_string(), attrs, links, added: false });
        Ok(id)
    }

    pub fn add_object(&mut self, class: &str, id: ObjectId) -> Result<bool, StoreError> {
        self.known_class(class)?;
        let schema = Arc::clone(&self.schema);
        let rec = self.live_mut(id)?;
        if !schema.conforms(&rec.class, class) {
            return Err(StoreError::TargetMismatch {
                id,
                class: rec.class.clone(),
                role: "allInstances".into(),
                expected: class.to_string(),
            });
        }
        if rec.added {
            return Ok(false);
        }
        rec.added = true;
        let own = rec.class.clone();
        self.instances.entry(own).or_default().insert(id);
        Ok(true)
    }

    /// Removes the object and severs every link pointing at it. False when
    /// the object is not an added instance of `class`.
    pub fn release_object(&mut self, class: &str, id: ObjectId) -> Result<bool, StoreError> {
        self.known_class(class)?;
        let Some(rec) = self.records.get(&id) else { return Ok(false) };
        if !rec.added || !self.schema.conforms(&rec.class, class) {
            return Ok(false);
        }
        let own = rec.class.clone();
        self.records.remove(&id);
        if let Some(set) = self.instances.get_mut(&own) {
            set.remove(&id);
        }
        for r in self.records.values_mut() {
            for l in r.links.values_mut() {
                match l {
                    Link::One(t) if *t == Some(id) => *t = None,
                    Link::Many(ts) => ts.retain(|t| *t != id),
                    _ => {}
                }
            }
        }
        Ok(true)
    }

    pub fn get_attribute(&self, id: ObjectId, attr: &str) -> Result<Value, StoreError> {
        let rec = self.live(id)?;
        rec.attrs.get(attr).cloned().ok_or_else(|| StoreError::UnknownAttribute {
            class: rec.class.clone(),
            attr: attr.to_string(),
        })
    }

    pub fn set_attribute(&mut self, id: ObjectId, attr: &str, value: Value) -> Result<bool, StoreError> {
        let schema = Arc::clone(&self.schema);
        let rec = self.live_mut(id)?;
        let ty = schema.attribute(&rec.class, attr).ok_or_else(|| StoreError::UnknownAttribute {
            class: rec.class.clone(),
            attr: attr.to_string(),
        })?;
        let v = value.coerce_to(ty).ok_or_else(|| StoreError::TypeMismatch {
            attr: attr.to_string(),
            expected: ty.to_string(),
            found: value.type_name().to_string(),
        })?;
        rec.attrs.insert(attr.to_string(), v);
        Ok(true)
    }

    fn role_of(&self, id: ObjectId, role: &str, want: Multiplicity) -> Result<String, StoreError> {
        let rec = self.live(id)?;
        let r = self.schema.role(&rec.class, role).ok_or_else(|| StoreError::UnknownRole {
            class: rec.class.clone(),
            role: role.to_string(),
        })?;
        if r.multiplicity != want {
            return Err(StoreError::MultiplicityMismatch {
                role: role.to_string(),
                actual: match r.multiplicity {
                    Multiplicity::One => "single",
                    Multiplicity::Many => "multi",
                },
            });
        }
        Ok(r.target.clone())
    }

    fn check_target(&self, role: &str, target_class: &str, target: ObjectId) -> Result<(), StoreError> {
        let t = self.live(target)?;
        if self.schema.conforms(&t.class, target_class) {
            Ok(())
        } else {
            Err(StoreError::TargetMismatch {
                id: target,
                class: t.class.clone(),
                role: role.to_string(),
                expected: target_class.to_string(),
            })
        }
    }

    pub fn find_linked_object(&self, id: ObjectId, role: &str) -> Result<Value, StoreError> {
        self.role_of(id, role, Multiplicity::One)?;
        match self.live(id)?.links.get(role) {
            Some(Link::One(Some(t))) => Ok(Value::Ref(*t)),
            _ => Ok(Value::Undefined),
        }
    }

    pub fn find_linked_objects<E: From<StoreError>>(
        &self,
        id: ObjectId,
        role: &str,
        mut cond: Option<&mut dyn FnMut(ObjectId) -> Result<bool, E>>,
    ) -> Result<Value, E> {
        self.role_of(id, role, Multiplicity::Many)?;
        let ids = match self.live(id)?.links.get(role) {
            Some(Link::Many(ts)) => ts.clone(),
            _ => Vec::new(),
        };
        let mut out = Vec::with_capacity(ids.len());
        for t in ids {
            let keep = match cond.as_mut() {
                Some(f) => f(t)?,
                None => true,
            };
            if keep {
                out.push(t);
            }
        }
        Ok(Value::RefSet(out))
    }

    pub fn add_link_one_to_many(&mut self, id: ObjectId, role: &str, target: ObjectId) -> Result<bool, StoreError> {
        let tc = self.role_of(id, role, Multiplicity::Many)?;
        self.check_target(role, &tc, target)?;
        let rec = self.live_mut(id)?;
        match rec.links.entry(role.to_string()).or_insert_with(|| Link::Many(Vec::new())) {
            Link::Many(ts) if ts.contains(&target) => Ok(false),
            Link::Many(ts) => {
                ts.push(target);
                Ok(true)
            }
            l => {
                *l = Link::Many(vec![target]);
                Ok(true)
            }
        }
    }

    pub fn add_link_one_to_one(&mut self, id: ObjectId, role: &str, target: ObjectId) -> Result<bool, StoreError> {
        let tc = self.role_of(id, role, Multiplicity::One)?;
        self.check_target(role, &tc, target)?;
        self.live_mut(id)?.links.insert(role.to_string(), Link::One(Some(target)));
        Ok(true)
    }

    pub fn remove_link_one_to_many(&mut self, id: ObjectId, role: &str, target: ObjectId) -> Result<bool, StoreError> {
        self.role_of(id, role, Multiplicity::Many)?;
        let rec = self.live_mut(id)?;
        match rec.links.get_mut(role) {
            Some(Link::Many(ts)) => match ts.iter().position(|t| *t == target) {
                Some(i) => {
                    ts.remove(i);
                    Ok(true)
                }
                None => Ok(false),
            },
            _ => Ok(false),
        }
    }

    pub fn remove_link_one_to_one(&mut self, id: ObjectId, role: &str) -> Result<bool, StoreError> {
        self.role_of(id, role, Multiplicity::One)?;
        self.live_mut(id)?.links.insert(role.to_string(), Link::One(None));
        Ok(true)
    }

    /// Checks the structural invariants: link targets resolve, many-links
    /// hold no duplicates, the instance index agrees with the records.
    pub fn check_integrity(&self) -> Result<(), String> {
        for r in self.records.values() {
            for (role, l) in &r.links {
                let targets: Vec<ObjectId> = match l {
                    Link::One(t) => t.iter().copied().collect(),
                    Link::Many(ts) => ts.clone(),
                };
                let unique: BTreeSet<_> = targets.iter().collect();
                if unique.len() != targets.len() {
                    return Err(format!("{}.{role} holds duplicates", r.id));
                }
                if let Some(t) = targets.iter().find(|t| !self.records.contains_key(t)) {
                    return Err(format!("{}.{role} points at missing {t}", r.id));
                }
            }
            let indexed = self.instances.get(&r.class).is_some_and(|s| s.contains(&r.id));
            if indexed != r.added {
                return Err(format!("instance index disagrees for {}", r.id));
            }
        }
        let indexed: usize = self.instances.values().map(BTreeSet::len).sum();
        if indexed != self.records.values().filter(|r| r.added).count() {
            return Err("instance index holds released objects".into());
        }
        Ok(())
    }

    /// Canonical checkpoint document. Keys are sorted, objects are in id
    /// order, so equal stores always serialize to identical bytes.
    pub fn save_checkpoint(&self) -> String {
        let objects: Vec<serde_json::Value> = self
            .records
            .values()
            .map(|r| {
                let mut o = Map::new();
                let attrs: Map<String, serde_json::Value> =
                    r.attrs.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
                o.insert("attrs".into(), serde_json::Value::Object(attrs));
                o.insert("class".into(), json!(r.class));
                if !r.added {
                    o.insert("detached".into(), json!(true));
                }
                o.insert("id".into(), json!(r.id.0));
                let links: Map<String, serde_json::Value> = r
                    .links
                    .iter()
                    .map(|(k, l)| {
                        let v = match l {
                            Link::One(t) => t.map_or(serde_json::Value::Null, |t| json!(t.0)),
                            Link::Many(ts) => json!(ts.iter().map(|t| t.0).collect::<Vec<_>>()),
                        };
                        (k.clone(), v)
                    })
                    .collect();
                o.insert("links".into(), serde_json::Value::Object(links));
                serde_json::Value::Object(o)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("nextId".into(), json!(self.next_id));
        doc.insert("objects".into(), serde_json::Value::Array(objects));
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("serializable");
        s.push('\n');
        s
    }

    /// Parses and validates a checkpoint against `schema`. Never partially
    /// applies: the caller swaps stores only on success.
    pub fn load_checkpoint(schema: Arc<Schema>, text: &str) -> Result<ObjectStore, CheckpointError> {
        let err = |m: String| CheckpointError(m);
        let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| err(format!("not valid JSON: {e}")))?;
        let doc = doc.as_object().ok_or_else(|| err("top level must be an object".into()))?;
        let next_id = doc
            .get("nextId")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| err("missing or non-integer `nextId`".into()))?;
        let objects = doc
            .get("objects")
            .and_then(serde_json::Value::as_array)
            .ok_or_else(|| err("missing `objects` array".into()))?;

        let mut store = ObjectStore::new(schema);
        store.next_id = next_id;
        let mut pending_links = Vec::new();
        for (i, o) in objects.iter().enumerate() {
            let o = o.as_object().ok_or_else(|| err(format!("objects[{i}] is not an object")))?;
            let id = o
                .get("id")
                .and_then(serde_json::Value::as_u64)
                .filter(|n| *n > 0)
                .map(ObjectId)
                .ok_or_else(|| err(format!("objects[{i}] has no positive integer `id`")))?;
            if id.0 >= next_id {
                return Err(err(format!("object {id} is not below nextId {next_id}")));
            }
            if store.records.contains_key(&id) {
                return Err(err(format!("duplicate object id {id}")));
            }
            let class = o
                .get("class")
                .and_then(serde_json::Value::as_str)
                .ok_or_else(|| err(format!("object {id} has no `class`")))?;
            let added = match o.get("detached") {
                None => true,
                Some(serde_json::Value::Bool(d)) => !d,
                Some(_) => return Err(err(format!("object {id}: `detached` must be a boolean"))),
            };
            // create_object would bump the counter; build the record directly
            let saved = store.next_id;
            store.next_id = id.0;
            store.create_object(class).map_err(|e| err(format!("object {id}: {e}")))?;
            store.next_id = saved;
            if added {
                store.add_object(class, id).map_err(|e| err(format!("object {id}: {e}")))?;
            }
            if let Some(attrs) = o.get("attrs") {
                let attrs = attrs.as_object().ok_or_else(|| err(format!("object {id}: `attrs` must be an object")))?;
                for (k, v) in attrs {
                    let v = Value::from_json(v).map_err(|m| err(format!("object {id}.{k}: {m}")))?;
                    if matches!(v, Value::Ref(_) | Value::RefSet(_)) {
                        return Err(err(format!("object {id}.{k}: attributes hold primitive values only")));
                    }
                    store.set_attribute(id, k, v).map_err(|e| err(format!("object {id}: {e}")))?;
                }
            }
            if let Some(links) = o.get("links") {
                let links = links.as_object().ok_or_else(|| err(format!("object {id}: `links` must be an object")))?;
                for (role, v) in links {
                    pending_links.push((id, role.clone(), v.clone()));
                }
            }
        }
        for (id, role, v) in pending_links {
            let fail = |e: StoreError| err(format!("object {id}.{role}: {e}"));
            let as_id = |x: &serde_json::Value| {
                x.as_u64().map(ObjectId).ok_or_else(|| err(format!("object {id}.{role}: link targets must be ids")))
            };
            match &v {
                serde_json::Value::Null => {
                    store.remove_link_one_to_one(id, &role).map_err(fail)?;
                }
                serde_json::Value::Array(ts) => {
                    for t in ts {
                        let t = as_id(t)?;
                        if !store.add_link_one_to_many(id, &role, t).map_err(fail)? {
                            return Err(err(format!("object {id}.{role}: duplicate target {t}")));
                        }
                    }
                }
                other => {
                    let t = as_id(other)?;
                    store.add_link_one_to_one(id, &role, t).map_err(fail)?;
                }
            }
        }
        Ok(store)
    }
}

#[cfg(test)]
mod tests;
