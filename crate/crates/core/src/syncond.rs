//! Static TBox analysis: which directed roles can influence classification
//! when an assertion over them is rolled up (SYN_COND), and the per-assertion
//! refinement SYN_COND*.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::RwLock;

use crate::dl::{ABox, Concept, Name, Role, RoleAssertion, RoleHierarchy, TBox};
use crate::tableau::{Budget, Reasoner, ReasonerError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connective {
    Meet,
    Join,
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connective::Meet => "and",
            Connective::Join => "or",
        })
    }
}

/// An axiom read as `∃R'.C1 ⋈ C2 ⊑ C3`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchedAxiom {
    pub r_prime: Role,
    pub c1: Concept,
    pub connective: Connective,
    pub c2: Concept,
    pub c3: Concept,
}

#[derive(Clone, Debug)]
pub struct TBoxAnalysis {
    pub closure: RoleHierarchy,
    /// `nnf(¬lhs ⊔ rhs)` per GCI.
    pub clauses: Vec<Concept>,
    pub trigger_roles: BTreeSet<Role>,
    /// Trigger role ↦ the axioms making it one.
    pub matched: BTreeMap<Role, Vec<MatchedAxiom>>,
}

/// Conjunctive normal form of an NNF concept, as a list of disjunctions.
/// `None` when it would exceed `limit` disjunctions.
fn cnf(c: &Concept, limit: usize) -> Option<Vec<Vec<Concept>>> {
    match c {
        Concept::And(cs) => {
            let mut out = Vec::new();
            for x in cs {
                out.extend(cnf(x, limit)?);
                if out.len() > limit {
                    return None;
                }
            }
            Some(out)
        }
        Concept::Or(cs) => {
            let mut acc: Vec<Vec<Concept>> = vec![vec![]];
            for x in cs {
                let part = cnf(x, limit)?;
                if acc.len() * part.len() > limit {
                    return None;
                }
                acc = acc
                    .iter()
                    .flat_map(|a| part.iter().map(move |p| a.iter().chain(p).cloned().collect()))
                    .collect();
            }
            Some(acc)
        }
        _ => Some(vec![vec![c.clone()]]),
    }
}

fn forall_roles(c: &Concept, out: &mut Vec<Role>) {
    c.visit(&mut |x| {
        if let Concept::Forall(r, _) = x {
            out.push(r.clone());
        }
    });
}

/// Patterns read off the left-hand side as written.
fn syntactic_patterns(lhs: &Concept, rhs: &Concept, out: &mut Vec<MatchedAxiom>) {
    let mut push = |r: &Role, c1: &Concept, connective, c2: Concept| {
        out.push(MatchedAxiom { r_prime: r.clone(), c1: c1.clone(), connective, c2, c3: rhs.clone() });
    };
    match lhs {
        Concept::Exists(r, c1) => push(r, c1, Connective::Meet, Concept::Top),
        Concept::And(cs) | Concept::Or(cs) => {
            let (connective, neutral) = match lhs {
                Concept::And(_) => (Connective::Meet, Concept::Top),
                _ => (Connective::Join, Concept::Bottom),
            };
            for x in cs {
                if let Concept::Exists(r, c1) = x {
                    let rest: Vec<Concept> = cs.iter().filter(|y| *y != x).cloned().collect();
                    let c2 = if rest.is_empty() {
                        neutral.clone()
                    } else if connective == Connective::Meet {
                        Concept::and(rest)
                    } else {
                        Concept::or(rest)
                    };
                    push(r, c1, connective, c2);
                }
            }
        }
        _ => {}
    }
}

/// A pattern no assertion can rule out: used for `∀` occurrences nested too
/// deep to read as `∃R'.C1 ⋈ C2 ⊑ C3`.
fn wildcard(r: &Role) -> MatchedAxiom {
    MatchedAxiom {
        r_prime: r.clone(),
        c1: Concept::Top,
        connective: Connective::Meet,
        c2: Concept::Top,
        c3: Concept::Top,
    }
}

fn clause_patterns(clause: &Concept, out: &mut Vec<MatchedAxiom>) {
    let mut nested = Vec::new();
    match cnf(clause, 256) {
        Some(disjunctions) => {
            for d in disjunctions {
                for (i, item) in d.iter().enumerate() {
                    match item {
                        Concept::Forall(s, x) => {
                            let y = Concept::or(d.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.clone()));
                            // ⊤ ⊑ ∀S.X ⊔ Y  ≡  ∃S.¬X ⊑ Y  ≡  ∃S⁻.¬Y ⊑ X
                            out.push(MatchedAxiom {
                                r_prime: s.clone(),
                                c1: x.negated_nnf(),
                                connective: Connective::Meet,
                                c2: Concept::Top,
                                c3: y.clone(),
                            });
                            out.push(MatchedAxiom {
                                r_prime: s.inv(),
                                c1: y.negated_nnf(),
                                connective: Connective::Meet,
                                c2: Concept::Top,
                                c3: (**x).clone(),
                            });
                            forall_roles(x, &mut nested);
                        }
                        other => forall_roles(other, &mut nested),
                    }
                }
            }
        }
        None => forall_roles(clause, &mut nested),
    }
    for r in nested {
        out.push(wildcard(&r));
        out.push(wildcard(&r.inv()));
    }
}

pub fn analyze(t: &TBox) -> TBoxAnalysis {
    let closure = RoleHierarchy::new(t);
    let clauses: Vec<Concept> = t.gcis.iter().map(|g| Concept::or([g.lhs.negated_nnf(), g.rhs.nnf()])).collect();
    let mut patterns = Vec::new();
    for (g, clause) in t.gcis.iter().zip(&clauses) {
        syntactic_patterns(&g.lhs, &g.rhs, &mut patterns);
        clause_patterns(clause, &mut patterns);
    }
    let mut seen = BTreeSet::new();
    patterns.retain(|p| seen.insert(p.clone()));

    let mut foralls = Vec::new();
    for c in &clauses {
        forall_roles(c, &mut foralls);
    }
    let mut trigger_roles = BTreeSet::new();
    for p in closure.roles() {
        if foralls.iter().any(|s| closure.is_sub(&p, s) || closure.is_sub(&p, &s.inv())) {
            trigger_roles.insert(p);
        }
    }
    let matched = trigger_roles
        .iter()
        .map(|p| {
            let ms: Vec<MatchedAxiom> = patterns.iter().filter(|m| closure.is_sub(p, &m.r_prime)).cloned().collect();
            (p.clone(), ms)
        })
        .collect();
    TBoxAnalysis { closure, clauses, trigger_roles, matched }
}

/// SYN_COND for the directed role an assertion is rolled along: `R` for
/// `R(x,y)` rolled toward `x`, `Inv(R)` toward `y`.
pub fn syn_cond(an: &TBoxAnalysis, r: &Role) -> bool {
    an.trigger_roles.contains(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    TowardSubject,
    TowardObject,
}

impl Direction {
    /// The rolled individual, the neighbour, and the directed role between them.
    pub fn orient<'a>(&self, ra: &'a RoleAssertion) -> (&'a Name, &'a Name, Role) {
        match self {
            Direction::TowardSubject => (&ra.subject, &ra.object, Role::named(ra.role.clone())),
            Direction::TowardObject => (&ra.object, &ra.subject, Role::inverse_of(ra.role.clone())),
        }
    }
}

/// TBox subsumption, as needed by SYN_COND*.
pub trait SubsumptionOracle: Sync {
    fn is_subsumed(&self, sub: &Concept, sup: &Concept) -> Result<bool, ReasonerError>;
}

/// Tableau-backed oracle with a shared memo. Concurrent duplicate work is
/// possible and harmless.
pub struct MemoOracle {
    reasoner: Reasoner,
    memo: RwLock<HashMap<(Concept, Concept), bool>>,
}

impl MemoOracle {
    pub fn new(t: &TBox, budget: Budget) -> Self {
        MemoOracle { reasoner: Reasoner::new(t, budget), memo: RwLock::new(HashMap::new()) }
    }

    pub fn from_reasoner(reasoner: Reasoner) -> Self {
        MemoOracle { reasoner, memo: RwLock::new(HashMap::new()) }
    }

    pub fn cached(&self) -> usize {
        self.memo.read().unwrap().len()
    }
}

impl SubsumptionOracle for MemoOracle {
    fn is_subsumed(&self, sub: &Concept, sup: &Concept) -> Result<bool, ReasonerError> {
        let key = (sub.canonicalize(), sup.canonicalize());
        if let Some(&v) = self.memo.read().unwrap().get(&key) {
            return Ok(v);
        }
        let v = self.reasoner.is_subsumed(&key.0, &key.1)?;
        self.memo.write().unwrap().insert(key, v);
        Ok(v)
    }
}

impl SubsumptionOracle for Reasoner {
    fn is_subsumed(&self, sub: &Concept, sup: &Concept) -> Result<bool, ReasonerError> {
        Reasoner::is_subsumed(self, sub, sup)
    }
}

/// Whether one matched axiom is ruled out by the explicit assertions:
/// case 1 on the neighbour, case 2 on the rolled individual.
fn pruned(
    m: &MatchedAxiom,
    own: &[&Concept],
    neighbour: &[&Concept],
    oracle: &dyn SubsumptionOracle,
) -> Result<bool, ReasonerError> {
    let not_c1 = m.c1.negated_nnf();
    for b0 in neighbour {
        if oracle.is_subsumed(b0, &not_c1)? {
            return Ok(true);
        }
    }
    let target = match m.connective {
        Connective::Meet => Concept::and([m.c3.negated_nnf(), m.c2.nnf()]),
        Connective::Join => m.c3.negated_nnf(),
    };
    for a0 in own {
        if oracle.is_subsumed(a0, &target)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// SYN_COND* given the explicit concept assertions of both ends.
pub fn syn_cond_star_for(
    an: &TBoxAnalysis,
    r: &Role,
    own: &[&Concept],
    neighbour: &[&Concept],
    oracle: &dyn SubsumptionOracle,
) -> Result<bool, ReasonerError> {
    if !syn_cond(an, r) {
        return Ok(false);
    }
    for m in an.matched.get(r).map(|v| &v[..]).unwrap_or(&[]) {
        if !pruned(m, own, neighbour, oracle)? {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn syn_cond_star(
    an: &TBoxAnalysis,
    abox: &ABox,
    assertion: &RoleAssertion,
    direction: Direction,
    oracle: &dyn SubsumptionOracle,
) -> Result<bool, ReasonerError> {
    let (x, y, r) = direction.orient(assertion);
    let own: Vec<&Concept> = abox.concepts_of(x).collect();
    let neighbour: Vec<&Concept> = abox.concepts_of(y).collect();
    syn_cond_star_for(an, &r, &own, &neighbour, oracle)
}
