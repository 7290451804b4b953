//! Terms, ontologies and the purely syntactic transformations over them.

mod concept;
mod hierarchy;
mod metrics;
mod ontology;
mod simple_form;

pub use concept::{Concept, Name, Role, RESERVED_PREFIX};
pub use hierarchy::RoleHierarchy;
pub use metrics::{metrics, ConceptMetrics};
pub use ontology::{ABox, ConceptAssertion, Gci, Ontology, RoleAssertion, Signature, TBox};
pub use simple_form::{to_simple_form, SIMPLE_FORM_PREFIX};

pub fn inv(r: &Role) -> Role {
    r.inv()
}

pub fn nnf(c: &Concept) -> Concept {
    c.nnf()
}

pub fn role_closure(t: &TBox) -> RoleHierarchy {
    RoleHierarchy::new(t)
}
