//! Requirements-model data types: classes, associations, use cases, contracts
//! and invariants.

use crate::expr::{Expr, PrimType, Span, TypeRef};

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub ty: PrimType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptualClass {
    pub name: String,
    pub super_class: Option<String>,
    pub attributes: Vec<Attribute>,
    pub crud: bool,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    One,
    Many,
}

impl Multiplicity {
    pub fn keyword(self) -> &'static str {
        match self {
            Multiplicity::One => "one",
            Multiplicity::Many => "many",
        }
    }
}

/// One directed association end: `owner.role -> target`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationEnd {
    pub owner: String,
    pub role: String,
    pub target: String,
    pub multiplicity: Multiplicity,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UseCase {
    pub name: String,
    pub actor: String,
    /// System operations in sequence-diagram order.
    pub operations: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: PrimType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperationSignature {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Option<TypeRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Definition {
    pub name: String,
    pub ty: TypeRef,
    pub expr: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contract {
    pub use_case: String,
    pub signature: OperationSignature,
    pub definitions: Vec<Definition>,
    pub precondition: Expr,
    pub postcondition: Expr,
    pub span: Span,
}

impl Contract {
    /// `UseCase::op`
    pub fn qualified_name(&self) -> String {
        format!("{}::{}", self.use_case, self.signature.name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invariant {
    pub name: String,
    /// When present, `self` ranges over the live instances of this class.
    pub context: Option<String>,
    pub expr: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RequirementsModel {
    pub actors: Vec<String>,
    pub classes: Vec<ConceptualClass>,
    pub associations: Vec<AssociationEnd>,
    pub use_cases: Vec<UseCase>,
    pub contracts: Vec<Contract>,
    pub invariants: Vec<Invariant>,
}

impl RequirementsModel {
    pub fn class(&self, name: &str) -> Option<&ConceptualClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn use_case(&self, name: &str) -> Option<&UseCase> {
        self.use_cases.iter().find(|u| u.name == name)
    }

    pub fn contract(&self, use_case: &str, op: &str) -> Option<&Contract> {
        self.contracts
            .iter()
            .find(|c| c.use_case == use_case && c.signature.name == op)
    }

    /// Appends every declaration of `other`.
    pub fn merge(&mut self, other: RequirementsModel) {
        self.actors.extend(other.actors);
        self.classes.extend(other.classes);
        self.associations.extend(other.associations);
        self.use_cases.extend(other.use_cases);
        self.contracts.extend(other.contracts);
        self.invariants.extend(other.invariants);
    }
}
