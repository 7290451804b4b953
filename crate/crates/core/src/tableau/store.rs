use std::sync::Arc;

use crate::dl::{Concept, Name, Role, RoleHierarchy};

pub(crate) type CId = u32;
pub(crate) type RId = u32;

/// Hash-consed NNF concept.
#[derive(Clone, Debug)]
pub(crate) enum Term {
    Top,
    Bottom,
    Atom,
    Nominal(Name),
    /// Negated atom or nominal; holds the positive literal.
    Neg(CId),
    And(Arc<[CId]>),
    Or(Arc<[CId]>),
    Exists(RId, CId),
    Forall(RId, CId),
}

/// Directed role ids: `2 * index + inverted`. Roles unknown to the TBox are
/// appended after the hierarchy's roles and relate only to themselves.
#[derive(Clone)]
pub(crate) struct RoleTable {
    hier: Arc<RoleHierarchy>,
    /// `trans_subs[s]`: transitive roles `t ⊑* s`.
    trans_subs: Arc<Vec<Vec<RId>>>,
    extra: im::HashMap<Name, u32>,
    extra_names: im::Vector<Name>,
}

impl RoleTable {
    pub fn new(hier: Arc<RoleHierarchy>) -> Self {
        let n = hier.role_count();
        let trans_subs = (0..n)
            .map(|s| {
                (0..n)
                    .filter(|&t| hier.is_sub_id(t, s) && hier.is_transitive(&hier.role_of(t)))
                    .map(|t| t as RId)
                    .collect()
            })
            .collect();
        RoleTable { hier, trans_subs: Arc::new(trans_subs), extra: im::HashMap::new(), extra_names: im::Vector::new() }
    }

    fn base(&self) -> u32 {
        self.hier.role_count() as u32
    }

    pub fn id(&mut self, r: &Role) -> RId {
        if let Some(i) = self.hier.id_of(r) {
            return i as RId;
        }
        let k = match self.extra.get(r.name()) {
            Some(&k) => k,
            None => {
                let k = self.extra_names.len() as u32;
                self.extra.insert(r.name().clone(), k);
                self.extra_names.push_back(r.name().clone());
                k
            }
        };
        self.base() + 2 * k + r.is_inverse() as u32
    }

    pub fn role(&self, id: RId) -> Role {
        let base = self.base();
        if id < base {
            return self.hier.role_of(id as usize);
        }
        let name = self.extra_names[((id - base) / 2) as usize].clone();
        if (id - base) % 2 == 1 {
            Role::inverse_of(name)
        } else {
            Role::named(name)
        }
    }

    pub fn is_sub(&self, a: RId, b: RId) -> bool {
        a == b || (a < self.base() && b < self.base() && self.hier.is_sub_id(a as usize, b as usize))
    }

    pub fn trans_subs(&self, s: RId) -> &[RId] {
        if s < self.base() {
            &self.trans_subs[s as usize]
        } else {
            &[]
        }
    }
}

pub(crate) fn inv(r: RId) -> RId {
    r ^ 1
}

/// Growable concept table. Cloning is O(1), so a reasoning call can extend a
/// private copy of a shared base store.
#[derive(Clone)]
pub(crate) struct Store {
    terms: im::Vector<Term>,
    ids: im::HashMap<Concept, CId>,
    neg: im::Vector<CId>,
    pub roles: RoleTable,
    /// For `∀S.f`: `(t, ∀t.f)` for every transitive `t ⊑* S`.
    trans_variants: im::HashMap<CId, Arc<[(RId, CId)]>>,
    /// Positive literal `A` ↦ disjunctions having `¬A` as a disjunct.
    neg_watch: im::HashMap<CId, im::Vector<CId>>,
    /// Positive literal `A` ↦ disjunctions having some `∀R.¬A` as a disjunct.
    forall_watch: im::HashMap<CId, im::Vector<CId>>,
    nominals: im::OrdMap<Name, CId>,
}

const PENDING: CId = CId::MAX;

impl Store {
    pub fn new(hier: Arc<RoleHierarchy>) -> Self {
        let mut s = Store {
            terms: im::Vector::new(),
            ids: im::HashMap::new(),
            neg: im::Vector::new(),
            roles: RoleTable::new(hier),
            trans_variants: im::HashMap::new(),
            neg_watch: im::HashMap::new(),
            forall_watch: im::HashMap::new(),
            nominals: im::OrdMap::new(),
        };
        s.intern(&Concept::Top);
        s
    }

    pub fn term(&self, c: CId) -> &Term {
        &self.terms[c as usize]
    }

    pub fn neg(&self, c: CId) -> CId {
        self.neg[c as usize]
    }

    pub fn trans_variants(&self, c: CId) -> &[(RId, CId)] {
        self.trans_variants.get(&c).map(|v| &v[..]).unwrap_or(&[])
    }

    pub fn neg_watchers(&self, c: CId) -> Option<&im::Vector<CId>> {
        self.neg_watch.get(&c)
    }

    pub fn forall_watchers(&self, c: CId) -> Option<&im::Vector<CId>> {
        self.forall_watch.get(&c)
    }

    pub fn nominals(&self) -> impl Iterator<Item = (&Name, CId)> {
        self.nominals.iter().map(|(n, &c)| (n, c))
    }

    pub fn nominal(&mut self, n: &Name) -> CId {
        self.intern(&Concept::Nominal(n.clone()))
    }

    /// Interns an NNF concept, together with its negation.
    pub fn intern(&mut self, c: &Concept) -> CId {
        debug_assert!(c.is_nnf());
        if let Some(&id) = self.ids.get(c) {
            return id;
        }
        let term = match c {
            Concept::Top => Term::Top,
            Concept::Bottom => Term::Bottom,
            Concept::Atomic(_) => Term::Atom,
            Concept::Nominal(n) => Term::Nominal(n.clone()),
            Concept::Not(inner) => Term::Neg(self.intern(inner)),
            Concept::And(cs) => Term::And(cs.iter().map(|x| self.intern(x)).collect()),
            Concept::Or(cs) => Term::Or(cs.iter().map(|x| self.intern(x)).collect()),
            Concept::Exists(r, f) => {
                let f = self.intern(f);
                Term::Exists(self.roles.id(r), f)
            }
            Concept::Forall(r, f) => {
                let f = self.intern(f);
                Term::Forall(self.roles.id(r), f)
            }
        };
        if let Some(&id) = self.ids.get(c) {
            // Interning the children can reach `c` through a negation.
            return id;
        }
        let id = self.terms.len() as CId;
        self.terms.push_back(term.clone());
        self.neg.push_back(PENDING);
        self.ids.insert(c.clone(), id);
        if let Term::Nominal(n) = &term {
            self.nominals.insert(n.clone(), id);
        }
        let n = self.intern(&c.negated_nnf());
        self.neg[id as usize] = n;
        self.neg[n as usize] = id;
        match term {
            Term::Forall(s, _) => {
                let Concept::Forall(_, f) = c else { unreachable!() };
                let subs: Vec<RId> = self.roles.trans_subs(s).to_vec();
                let variants: Vec<(RId, CId)> = subs
                    .into_iter()
                    .map(|t| {
                        let role = self.roles.role(t);
                        (t, self.intern(&Concept::forall(role, (**f).clone())))
                    })
                    .collect();
                if !variants.is_empty() {
                    self.trans_variants.insert(id, variants.into());
                }
            }
            Term::Or(ds) => {
                for &d in ds.iter() {
                    match self.terms[d as usize].clone() {
                        Term::Neg(p) => self.neg_watch.entry(p).or_default().push_back(id),
                        Term::Forall(_, f) => {
                            if let Term::Neg(p) = self.terms[f as usize] {
                                self.forall_watch.entry(p).or_default().push_back(id);
                            }
                        }
                        _ => {}
                    }
                }
            }
            _ => {}
        }
        id
    }

    /// Quantifier at the top of `c` or of one of its conjuncts/disjuncts.
    pub fn generates(&self, c: CId) -> bool {
        match self.term(c) {
            Term::Exists(..) => true,
            Term::And(cs) | Term::Or(cs) => cs.iter().any(|&x| self.generates(x)),
            _ => false,
        }
    }
}
