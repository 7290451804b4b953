//! Tableau decision procedure for SHIO concepts with respect to a TBox.
//!
//! GCIs are internalized: every node receives `nnf(¬lhs ⊔ rhs)` for each
//! inclusion. Nominal nodes and ABox individuals are never blocked; other nodes
//! use equality anywhere blocking. Disjunctions are explored with dependency
//! directed backjumping over persistent snapshots.

mod deps;
mod engine;
pub mod model_check;
mod sat;
mod store;

use std::sync::Arc;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::dl::{ABox, Concept, Name, RoleHierarchy, TBox};
use engine::{Engine, Stop};
use store::{CId, Store};

pub use model_check::{bounded_model_check, Model};

/// Resource limits for one reasoning call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: usize,
    pub timeout: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: 100_000, timeout: None }
    }
}

/// A limit was hit before an answer was found. Never a "no".
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReasonerError {
    #[error("node budget of {0} exceeded")]
    NodeBudget(usize),
    #[error("time budget of {0} ms exceeded")]
    Timeout(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SatReport {
    pub satisfiable: bool,
    /// Live nodes of the final completion graph.
    pub nodes: usize,
    pub steps: u64,
    /// Digest of the rule applications, for reproducibility checks.
    pub trace_digest: u64,
}

/// Reasoner bound to one TBox. Cheap to share; every call works on a private
/// copy of the concept table.
#[derive(Clone)]
pub struct Reasoner {
    store: Store,
    clauses: Arc<[CId]>,
    budget: Budget,
}

fn clause(lhs: &Concept, rhs: &Concept) -> Concept {
    Concept::or([lhs.negated_nnf(), rhs.nnf()])
}

impl Reasoner {
    pub fn new(tbox: &TBox, budget: Budget) -> Self {
        let hier = Arc::new(RoleHierarchy::new(tbox));
        let mut store = Store::new(hier);
        let mut clauses: Vec<CId> = Vec::new();
        for g in &tbox.gcis {
            let c = clause(&g.lhs, &g.rhs);
            if c == Concept::Top {
                continue;
            }
            let id = store.intern(&c);
            if !clauses.contains(&id) {
                clauses.push(id);
            }
        }
        Reasoner { store, clauses: clauses.into(), budget }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn with_budget(&self, budget: Budget) -> Self {
        Reasoner { budget, ..self.clone() }
    }

    fn engine(&self) -> Engine {
        Engine::new(self.store.clone(), self.clauses.clone(), self.budget)
    }

    pub fn check_satisfiable(&self, c: &Concept) -> Result<SatReport, ReasonerError> {
        let mut e = self.engine();
        let cid = e.store.intern(&c.nnf());
        let setup = (|| {
            e.ensure_homes()?;
            let root = e.new_root()?;
            e.add(root, cid, deps::Deps::none())
        })();
        let satisfiable = e.settle(setup)? && e.run()?;
        Ok(SatReport { satisfiable, nodes: e.live_nodes(), steps: e.steps, trace_digest: e.digest })
    }

    pub fn is_satisfiable(&self, c: &Concept) -> Result<bool, ReasonerError> {
        Ok(self.check_satisfiable(c)?.satisfiable)
    }

    /// `T ⊨ sub ⊑ sup`, decided as unsatisfiability of `sub ⊓ ¬sup`.
    pub fn is_subsumed(&self, sub: &Concept, sup: &Concept) -> Result<bool, ReasonerError> {
        let test = Concept::and([sub.nnf(), sup.negated_nnf()]);
        Ok(!self.is_satisfiable(&test)?)
    }

    fn load(&self, e: &mut Engine, abox: &ABox) -> Result<(), Stop> {
        let mut homes = std::collections::BTreeMap::new();
        for a in &abox.individuals {
            let nom = e.store.nominal(a);
            homes.insert(a.clone(), nom);
        }
        let assertions: Vec<(Name, CId)> = abox
            .concept_assertions
            .iter()
            .map(|ca| (ca.individual.clone(), e.store.intern(&ca.concept.nnf())))
            .collect();
        let roles: Vec<_> = abox
            .role_assertions
            .iter()
            .map(|ra| (e.store.roles.id(&crate::dl::Role::named(ra.role.clone())), ra.subject.clone(), ra.object.clone()))
            .collect();
        for nom in homes.values() {
            e.home(*nom)?;
        }
        e.ensure_homes()?;
        for (a, c) in assertions {
            let (x, d) = e.home(homes[&a])?;
            e.add(x, c, d)?;
        }
        for (r, a, b) in roles {
            let (x, dx) = e.home(homes[&a])?;
            let (y, dy) = e.home(homes[&b])?;
            e.add_edge(x, y, r, dx.union(&dy))?;
        }
        Ok(())
    }

    pub fn is_consistent(&self, abox: &ABox) -> Result<bool, ReasonerError> {
        let mut e = self.engine();
        let r = self.load(&mut e, abox);
        Ok(e.settle(r)? && e.run()?)
    }

    /// `K ⊨ c(a)`: true iff `K ∪ {nnf(¬c)(a)}` is inconsistent.
    pub fn is_instance(&self, abox: &ABox, c: &Concept, a: &Name) -> Result<bool, ReasonerError> {
        let mut e = self.engine();
        let nom = e.store.nominal(a);
        let neg = e.store.intern(&c.negated_nnf());
        let r = self.load(&mut e, abox).and_then(|_| e.add_extra(nom, neg));
        Ok(!(e.settle(r)? && e.run()?))
    }

    /// Decides consistency once and keeps the completed graph, so later
    /// instance checks only add `¬c(a)` on top of it.
    pub fn abox_session(&self, abox: &ABox) -> Result<AboxSession, ReasonerError> {
        let mut e = self.engine();
        let r = self.load(&mut e, abox);
        let consistent = e.settle(r)? && e.run()?;
        Ok(AboxSession { engine: consistent.then_some(e) })
    }
}

/// A completed consistency test of one ABox.
#[derive(Clone)]
pub struct AboxSession {
    engine: Option<Engine>,
}

impl AboxSession {
    pub fn is_consistent(&self) -> bool {
        self.engine.is_some()
    }

    pub fn is_instance(&self, c: &Concept, a: &Name) -> Result<bool, ReasonerError> {
        let Some(base) = &self.engine else { return Ok(true) };
        let mut e = base.clone();
        e.restart_clock();
        let nom = e.store.nominal(a);
        let neg = e.store.intern(&c.negated_nnf());
        let r = e.ensure_homes().and_then(|_| e.add_extra(nom, neg));
        Ok(!(e.settle(r)? && e.run()?))
    }
}

/// Convenience wrappers over a fresh reasoner with the default budget.
pub fn is_satisfiable(t: &TBox, c: &Concept) -> Result<bool, ReasonerError> {
    Reasoner::new(t, Budget::default()).is_satisfiable(c)
}

pub fn is_subsumed(t: &TBox, sub: &Concept, sup: &Concept) -> Result<bool, ReasonerError> {
    Reasoner::new(t, Budget::default()).is_subsumed(sub, sup)
}

pub fn is_consistent(k: &crate::dl::Ontology) -> Result<bool, ReasonerError> {
    Reasoner::new(&k.tbox, Budget::default()).is_consistent(&k.abox)
}

pub fn is_instance(k: &crate::dl::Ontology, c: &Concept, a: &Name) -> Result<bool, ReasonerError> {
    Reasoner::new(&k.tbox, Budget::default()).is_instance(&k.abox, c, a)
}

