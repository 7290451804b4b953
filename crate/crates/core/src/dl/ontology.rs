use std::collections::BTreeSet;

use super::concept::{Concept, Name, Role};

/// General concept inclusion `lhs ⊑ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gci {
    pub lhs: Concept,
    pub rhs: Concept,
}

impl Gci {
    pub fn new(lhs: Concept, rhs: Concept) -> Self {
        Gci { lhs, rhs }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TBox {
    pub gcis: Vec<Gci>,
    pub role_inclusions: Vec<(Role, Role)>,
    pub transitive: BTreeSet<Name>,
}

impl TBox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_gci(&mut self, lhs: Concept, rhs: Concept) {
        self.gcis.push(Gci::new(lhs, rhs));
    }

    /// `lhs ≡ rhs`, stored as two inclusions.
    pub fn add_equivalence(&mut self, lhs: Concept, rhs: Concept) {
        self.gcis.push(Gci::new(lhs.clone(), rhs.clone()));
        self.gcis.push(Gci::new(rhs, lhs));
    }

    pub fn add_role_inclusion(&mut self, sub: Role, sup: Role) {
        self.role_inclusions.push((sub, sup));
    }

    pub fn add_transitive(&mut self, role: impl Into<Name>) {
        self.transitive.insert(role.into());
    }

    /// `Trans(R)` holds when `R` or `Inv(R)` was declared transitive; both share a name.
    pub fn is_transitive(&self, role: &Role) -> bool {
        self.transitive.contains(role.name())
    }

    pub fn is_empty(&self) -> bool {
        self.gcis.is_empty() && self.role_inclusions.is_empty() && self.transitive.is_empty()
    }

    pub fn concept_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for g in &self.gcis {
            out.extend(g.lhs.atomic_names());
            out.extend(g.rhs.atomic_names());
        }
        out
    }

    pub fn role_names(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.transitive.iter().cloned().collect();
        for g in &self.gcis {
            out.extend(g.lhs.role_names());
            out.extend(g.rhs.role_names());
        }
        for (a, b) in &self.role_inclusions {
            out.insert(a.name().clone());
            out.insert(b.name().clone());
        }
        out
    }

    pub fn nominals(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for g in &self.gcis {
            out.extend(g.lhs.nominals());
            out.extend(g.rhs.nominals());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptAssertion {
    pub concept: Concept,
    pub individual: Name,
}

/// `role(subject, object)`; always over a role name, never an inverse.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleAssertion {
    pub role: Name,
    pub subject: Name,
    pub object: Name,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ABox {
    pub concept_assertions: Vec<ConceptAssertion>,
    pub role_assertions: Vec<RoleAssertion>,
    pub individuals: BTreeSet<Name>,
}

impl ABox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assert_concept(&mut self, concept: Concept, individual: impl Into<Name>) {
        let individual = individual.into();
        self.individuals.insert(individual.clone());
        self.concept_assertions.push(ConceptAssertion { concept, individual });
    }

    pub fn assert_role(&mut self, role: impl Into<Name>, subject: impl Into<Name>, object: impl Into<Name>) {
        let (subject, object) = (subject.into(), object.into());
        self.individuals.insert(subject.clone());
        self.individuals.insert(object.clone());
        self.role_assertions.push(RoleAssertion { role: role.into(), subject, object });
    }

    pub fn is_empty(&self) -> bool {
        self.concept_assertions.is_empty() && self.role_assertions.is_empty()
    }

    /// Asserted concepts of one individual, in insertion order.
    pub fn concepts_of<'a>(&'a self, ind: &'a Name) -> impl Iterator<Item = &'a Concept> + 'a {
        self.concept_assertions
            .iter()
            .filter(move |ca| &ca.individual == ind)
            .map(|ca| &ca.concept)
    }
}

/// Every name the ontology mentions, by kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<Name>,
    pub roles: BTreeSet<Name>,
    pub individuals: BTreeSet<Name>,
}

impl Signature {
    pub fn of(tbox: &TBox, abox: &ABox) -> Self {
        let mut concepts = tbox.concept_names();
        let mut roles = tbox.role_names();
        let mut individuals = tbox.nominals();
        individuals.extend(abox.individuals.iter().cloned());
        for ca in &abox.concept_assertions {
            concepts.extend(ca.concept.atomic_names());
            roles.extend(ca.concept.role_names());
            individuals.extend(ca.concept.nominals());
        }
        for ra in &abox.role_assertions {
            roles.insert(ra.role.clone());
        }
        Signature { concepts, roles, individuals }
    }

    /// First name in `c` that is not part of this signature.
    pub fn unknown_name(&self, c: &Concept) -> Option<Name> {
        let mut missing = None;
        c.visit(&mut |sub| {
            if missing.is_some() {
                return;
            }
            match sub {
                Concept::Atomic(n) if !self.concepts.contains(n) => missing = Some(n.clone()),
                Concept::Nominal(n) if !self.individuals.contains(n) => missing = Some(n.clone()),
                Concept::Exists(r, _) | Concept::Forall(r, _) if !self.roles.contains(r.name()) => {
                    missing = Some(r.name().clone())
                }
                _ => {}
            }
        });
        missing
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ontology {
    pub tbox: TBox,
    pub abox: ABox,
    pub signature: Signature,
}

impl Ontology {
    pub fn new(tbox: TBox, abox: ABox) -> Self {
        let signature = Signature::of(&tbox, &abox);
        Ontology { tbox, abox, signature }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Recomputes the signature after direct edits to the boxes.
    pub fn refresh_signature(&mut self) {
        self.signature = Signature::of(&self.tbox, &self.abox);
    }
}
