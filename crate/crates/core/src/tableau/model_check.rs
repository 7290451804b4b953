//! Bounded model finding, used as an oracle independent of the tableau.
//!
//! For each domain size `1..=max_domain` the question "is there an
//! interpretation over exactly this domain satisfying every axiom" is encoded
//! propositionally (one variable per concept membership, role pair and
//! individual placement) and handed to a small SAT solver. Within the bound the
//! search is exhaustive.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::sat::{Lit, Solver};

use crate::dl::{ABox, Concept, Name, Role, TBox};

/// A finite interpretation. Elements are `0..domain_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub domain_size: usize,
    pub concept_extensions: BTreeMap<Name, BTreeSet<usize>>,
    pub role_extensions: BTreeMap<Name, BTreeSet<(usize, usize)>>,
    pub individual_assignment: BTreeMap<Name, usize>,
}

impl Model {
    /// Direct evaluation of `c^I`, independent of the encoding.
    pub fn extension(&self, c: &Concept) -> BTreeSet<usize> {
        let all: BTreeSet<usize> = (0..self.domain_size).collect();
        match c {
            Concept::Top => all,
            Concept::Bottom => BTreeSet::new(),
            Concept::Atomic(n) => self.concept_extensions.get(n).cloned().unwrap_or_default(),
            Concept::Nominal(n) => self.individual_assignment.get(n).copied().into_iter().collect(),
            Concept::Not(x) => all.difference(&self.extension(x)).copied().collect(),
            Concept::And(cs) => cs.iter().fold(all, |acc, x| acc.intersection(&self.extension(x)).copied().collect()),
            Concept::Or(cs) => cs.iter().fold(BTreeSet::new(), |acc, x| acc.union(&self.extension(x)).copied().collect()),
            Concept::Exists(r, f) => {
                let fx = self.extension(f);
                all.into_iter().filter(|&x| self.successors(r, x).iter().any(|y| fx.contains(y))).collect()
            }
            Concept::Forall(r, f) => {
                let fx = self.extension(f);
                all.into_iter().filter(|&x| self.successors(r, x).iter().all(|y| fx.contains(y))).collect()
            }
        }
    }

    fn successors(&self, r: &Role, x: usize) -> Vec<usize> {
        let Some(ext) = self.role_extensions.get(r.name()) else { return vec![] };
        ext.iter()
            .filter_map(|&(a, b)| match (r.is_inverse(), a == x, b == x) {
                (false, true, _) => Some(b),
                (true, _, true) => Some(a),
                _ => None,
            })
            .collect()
    }
}

struct Encoder {
    solver: Solver,
    n: usize,
    truth: Lit,
    atoms: HashMap<(Name, usize), Lit>,
    roles: HashMap<(Name, usize, usize), Lit>,
    inds: HashMap<(Name, usize), Lit>,
    memo: HashMap<(Concept, usize), Lit>,
}

impl Encoder {
    fn new(n: usize) -> Self {
        let mut solver = Solver::new();
        let truth = solver.new_lit();
        solver.add_clause(&[truth]);
        Encoder {
            solver,
            n,
            truth,
            atoms: HashMap::new(),
            roles: HashMap::new(),
            inds: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn atom(&mut self, a: &Name, x: usize) -> Lit {
        if let Some(&l) = self.atoms.get(&(a.clone(), x)) {
            return l;
        }
        let l = self.solver.new_lit();
        self.atoms.insert((a.clone(), x), l);
        l
    }

    fn role_pair(&mut self, r: &Name, x: usize, y: usize) -> Lit {
        if let Some(&l) = self.roles.get(&(r.clone(), x, y)) {
            return l;
        }
        let l = self.solver.new_lit();
        self.roles.insert((r.clone(), x, y), l);
        l
    }

    fn edge(&mut self, r: &Role, x: usize, y: usize) -> Lit {
        if r.is_inverse() {
            self.role_pair(r.name(), y, x)
        } else {
            self.role_pair(r.name(), x, y)
        }
    }

    /// Placement of an individual: exactly one element.
    fn individual(&mut self, a: &Name) -> Vec<Lit> {
        if !self.inds.contains_key(&(a.clone(), 0)) {
            let lits: Vec<Lit> = (0..self.n).map(|_| self.solver.new_lit()).collect();
            self.solver.add_clause(&lits);
            for i in 0..self.n {
                for j in i + 1..self.n {
                    self.solver.add_clause(&[!lits[i], !lits[j]]);
                }
                self.inds.insert((a.clone(), i), lits[i]);
            }
        }
        (0..self.n).map(|x| self.inds[&(a.clone(), x)]).collect()
    }

    fn fresh_equiv_and(&mut self, parts: &[Lit]) -> Lit {
        let v = self.solver.new_lit();
        for &p in parts {
            self.solver.add_clause(&[!v, p]);
        }
        let mut back: Vec<Lit> = parts.iter().map(|&p| !p).collect();
        back.push(v);
        self.solver.add_clause(&back);
        v
    }

    fn fresh_equiv_or(&mut self, parts: &[Lit]) -> Lit {
        let neg: Vec<Lit> = parts.iter().map(|&p| !p).collect();
        !self.fresh_equiv_and(&neg)
    }

    /// Literal true iff element `x` is in `c`.
    fn holds(&mut self, c: &Concept, x: usize) -> Lit {
        if let Some(&l) = self.memo.get(&(c.clone(), x)) {
            return l;
        }
        let l = match c {
            Concept::Top => self.truth,
            Concept::Bottom => !self.truth,
            Concept::Atomic(a) => self.atom(a, x),
            Concept::Nominal(a) => self.individual(a)[x],
            Concept::Not(inner) => !self.holds(inner, x),
            Concept::And(cs) => {
                let parts: Vec<Lit> = cs.iter().map(|k| self.holds(k, x)).collect();
                self.fresh_equiv_and(&parts)
            }
            Concept::Or(cs) => {
                let parts: Vec<Lit> = cs.iter().map(|k| self.holds(k, x)).collect();
                self.fresh_equiv_or(&parts)
            }
            Concept::Exists(r, f) | Concept::Forall(r, f) => {
                let universal = matches!(c, Concept::Forall(..));
                let mut witnesses = Vec::with_capacity(self.n);
                for y in 0..self.n {
                    let e = self.edge(r, x, y);
                    let fy = self.holds(f, y);
                    let w = self.fresh_equiv_and(&[e, if universal { !fy } else { fy }]);
                    witnesses.push(w);
                }
                let some = self.fresh_equiv_or(&witnesses);
                if universal {
                    !some
                } else {
                    some
                }
            }
        };
        self.memo.insert((c.clone(), x), l);
        l
    }
}

fn role_names(t: &TBox, a: Option<&ABox>, c: Option<&Concept>) -> BTreeSet<Name> {
    let mut out = t.role_names();
    if let Some(a) = a {
        out.extend(a.role_assertions.iter().map(|r| r.role.clone()));
        for ca in &a.concept_assertions {
            out.extend(ca.concept.role_names());
        }
    }
    if let Some(c) = c {
        out.extend(c.role_names());
    }
    out
}

fn concept_names(t: &TBox, a: Option<&ABox>, c: Option<&Concept>) -> BTreeSet<Name> {
    let mut out = t.concept_names();
    if let Some(a) = a {
        for ca in &a.concept_assertions {
            out.extend(ca.concept.atomic_names());
        }
    }
    if let Some(c) = c {
        out.extend(c.atomic_names());
    }
    out
}

fn individual_names(t: &TBox, a: Option<&ABox>, c: Option<&Concept>) -> BTreeSet<Name> {
    let mut out = t.nominals();
    if let Some(a) = a {
        out.extend(a.individuals.iter().cloned());
        for ca in &a.concept_assertions {
            out.extend(ca.concept.nominals());
        }
    }
    if let Some(c) = c {
        out.extend(c.nominals());
    }
    out
}

fn solve_exact(t: &TBox, a: Option<&ABox>, c: Option<&Concept>, n: usize) -> Option<Model> {
    let mut enc = Encoder::new(n);
    let concepts = concept_names(t, a, c);
    let roles = role_names(t, a, c);
    let individuals = individual_names(t, a, c);
    for i in &individuals {
        enc.individual(i);
    }
    for r in &roles {
        for x in 0..n {
            for y in 0..n {
                enc.role_pair(r, x, y);
            }
        }
    }
    for k in &concepts {
        for x in 0..n {
            enc.atom(k, x);
        }
    }
    for (sub, sup) in &t.role_inclusions {
        for x in 0..n {
            for y in 0..n {
                let a = enc.edge(sub, x, y);
                let b = enc.edge(sup, x, y);
                enc.solver.add_clause(&[!a, b]);
            }
        }
    }
    for r in &t.transitive {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let xy = enc.role_pair(r, x, y);
                    let yz = enc.role_pair(r, y, z);
                    let xz = enc.role_pair(r, x, z);
                    enc.solver.add_clause(&[!xy, !yz, xz]);
                }
            }
        }
    }
    for g in &t.gcis {
        for x in 0..n {
            let l = enc.holds(&g.lhs, x);
            let r = enc.holds(&g.rhs, x);
            enc.solver.add_clause(&[!l, r]);
        }
    }
    if let Some(a) = a {
        for ca in &a.concept_assertions {
            let place = enc.individual(&ca.individual);
            for (x, &p) in place.iter().enumerate() {
                let h = enc.holds(&ca.concept, x);
                enc.solver.add_clause(&[!p, h]);
            }
        }
        for ra in &a.role_assertions {
            let ps = enc.individual(&ra.subject);
            let po = enc.individual(&ra.object);
            for x in 0..n {
                for y in 0..n {
                    let e = enc.role_pair(&ra.role, x, y);
                    enc.solver.add_clause(&[!ps[x], !po[y], e]);
                }
            }
        }
    }
    if let Some(c) = c {
        let some: Vec<Lit> = (0..n).map(|x| enc.holds(c, x)).collect();
        enc.solver.add_clause(&some);
    }
    if !enc.solver.solve() {
        return None;
    }
    let is_true = |l: &Lit| enc.solver.value_of(*l);
    let mut model = Model {
        domain_size: n,
        concept_extensions: concepts.iter().map(|k| (k.clone(), BTreeSet::new())).collect(),
        role_extensions: roles.iter().map(|r| (r.clone(), BTreeSet::new())).collect(),
        individual_assignment: BTreeMap::new(),
    };
    for ((k, x), l) in &enc.atoms {
        if is_true(l) {
            model.concept_extensions.entry(k.clone()).or_default().insert(*x);
        }
    }
    for ((r, x, y), l) in &enc.roles {
        if is_true(l) {
            model.role_extensions.entry(r.clone()).or_default().insert((*x, *y));
        }
    }
    for ((i, x), l) in &enc.inds {
        if is_true(l) {
            model.individual_assignment.insert(i.clone(), *x);
        }
    }
    Some(model)
}

/// Searches domains of size `1..=max_domain` for a model of `t` (and `a`,
/// when given) in which `c` (when given) is non-empty.
pub fn bounded_model_check(t: &TBox, a: Option<&ABox>, c: Option<&Concept>, max_domain: usize) -> Option<Model> {
    (1..=max_domain).find_map(|n| solve_exact(t, a, c, n))
}

/// Checks `m` against every axiom by direct evaluation.
pub fn is_model(m: &Model, t: &TBox, a: Option<&ABox>) -> bool {
    let gcis_ok = t.gcis.iter().all(|g| m.extension(&g.lhs).is_subset(&m.extension(&g.rhs)));
    let pairs = |r: &Role| -> BTreeSet<(usize, usize)> {
        let base = m.role_extensions.get(r.name()).cloned().unwrap_or_default();
        if r.is_inverse() {
            base.into_iter().map(|(x, y)| (y, x)).collect()
        } else {
            base
        }
    };
    let rias_ok = t.role_inclusions.iter().all(|(s, p)| pairs(s).is_subset(&pairs(p)));
    let trans_ok = t.transitive.iter().all(|r| {
        let e = m.role_extensions.get(r).cloned().unwrap_or_default();
        e.iter().all(|&(x, y)| e.iter().all(|&(y2, z)| y2 != y || e.contains(&(x, z))))
    });
    let abox_ok = a.is_none_or(|a| {
        a.concept_assertions.iter().all(|ca| {
            m.individual_assignment
                .get(&ca.individual)
                .is_some_and(|x| m.extension(&ca.concept).contains(x))
        }) && a.role_assertions.iter().all(|ra| {
            match (m.individual_assignment.get(&ra.subject), m.individual_assignment.get(&ra.object)) {
                (Some(&x), Some(&y)) => m.role_extensions.get(&ra.role).is_some_and(|e| e.contains(&(x, y))),
                _ => false,
            }
        })
    });
    gcis_ok && rias_ok && trans_ok && abox_ok
}
