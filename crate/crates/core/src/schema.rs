//! Flattened view of the class diagram: inherited attributes and roles,
//! subclass relations. Built once per model and shared by the resolver, the
//! object store and the executor.

use std::collections::BTreeMap;

use crate::expr::PrimType;
use crate::model::{Multiplicity, RequirementsModel};

#[derive(Debug, Clone, PartialEq)]
pub struct RoleInfo {
    pub name: String,
    pub target: String,
    pub multiplicity: Multiplicity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassInfo {
    pub name: String,
    pub super_class: Option<String>,
    /// Inherited attributes first, then the class's own.
    pub attributes: Vec<(String, PrimType)>,
    pub roles: Vec<RoleInfo>,
    /// The class itself followed by its superclasses, nearest first.
    pub ancestors: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schema {
    classes: BTreeMap<String, ClassInfo>,
    order: Vec<String>,
}

impl Schema {
    /// Builds the index, skipping anything inconsistent (unknown superclass,
    /// cycles, duplicate names). The resolver reports those separately.
    pub fn build(model: &RequirementsModel) -> Schema {
        let mut supers: BTreeMap<&str, Option<&str>> = BTreeMap::new();
        let mut order = Vec::new();
        for c in &model.classes {
            if supers.contains_key(c.name.as_str()) {
                continue;
            }
            supers.insert(&c.name, c.super_class.as_deref());
            order.push(c.name.clone());
        }
        let mut classes = BTreeMap::new();
        for name in &order {
            let mut ancestors = vec![name.clone()];
            let mut cur = supers[name.as_str()];
            while let Some(s) = cur {
                if ancestors.iter().any(|a| a == s) || !supers.contains_key(s) {
                    break;
                }
                ancestors.push(s.to_string());
                cur = supers[s];
            }
            let mut attributes: Vec<(String, PrimType)> = Vec::new();
            let mut roles: Vec<RoleInfo> = Vec::new();
            for anc in ancestors.iter().rev() {
                if let Some(decl) = model.class(anc) {
                    for a in &decl.attributes {
                        if !attributes.iter().any(|(n, _)| *n == a.name) {
                            attributes.push((a.name.clone(), a.ty));
                        }
                    }
                }
                for end in model.associations.iter().filter(|e| e.owner == *anc) {
                    if !roles.iter().any(|r| r.name == end.role) {
                        roles.push(RoleInfo {
                            name: end.role.clone(),
                            target: end.target.clone(),
                            multiplicity: end.multiplicity,
                        });
                    }
                }
            }
            let super_class = supers[name.as_str()].map(str::to_string);
            classes.insert(name.clone(), ClassInfo { name: name.clone(), super_class, attributes, roles, ancestors });
        }
        Schema { classes, order }
    }

    pub fn class(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.get(name)
    }

    pub fn has_class(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    /// Class names in declaration order.
    pub fn class_names(&self) -> &[String] {
        &self.order
    }

    pub fn attribute(&self, class: &str, attr: &str) -> Option<PrimType> {
        self.class(class)?.attributes.iter().find(|(n, _)| n == attr).map(|(_, t)| *t)
    }

    pub fn role(&self, class: &str, role: &str) -> Option<&RoleInfo> {
        self.class(class)?.roles.iter().find(|r| r.name == role)
    }

    /// True when `sub` is `sup` or one of its descendants.
    pub fn conforms(&self, sub: &str, sup: &str) -> bool {
        self.class(sub).is_some_and(|c| c.ancestors.iter().any(|a| a == sup))
    }

    /// `class` and all of its descendants, in declaration order.
    pub fn descendants(&self, class: &str) -> Vec<&str> {
        self.order
            .iter()
            .filter(|c| self.conforms(c, class))
            .map(String::as_str)
            .collect()
    }
}
