//! Rolling ABox assertions up into a concept for one individual.
//!
//! A depth-first traversal over the assertion graph picks the edges to roll
//! (all of them for V1, SYN_COND edges for V2, SYN_COND* edges for V3). An
//! edge reaching an individual that is already part of the traversal closes a
//! cycle: it becomes `∃P.{w}` and `w` is marked as a joint node, whose own
//! conjunction carries `{w}`. The concept is then built bottom-up over the
//! traversal tree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::dl::{metrics, ABox, Concept, ConceptAssertion, ConceptMetrics, Name, Role, RoleAssertion};
use crate::syncond::{syn_cond, syn_cond_star_for, SubsumptionOracle, TBoxAnalysis};
use crate::syntax::serialize_concept;
use crate::tableau::ReasonerError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    V1,
    V2,
    V3,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::V1 => "v1",
            Mode::V2 => "v2",
            Mode::V3 => "v3",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Ok(Mode::V1),
            "v2" => Ok(Mode::V2),
            "v3" => Ok(Mode::V3),
            _ => Err(format!("unknown mode `{s}` (expected v1, v2 or v3)")),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RollError {
    #[error("more than {0} assertions rolled")]
    TooLarge(usize),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
}

/// Individuals and one undirected edge per role assertion. Edge ids are
/// indices into `edges`, which mirrors the ABox role assertions.
#[derive(Clone, Debug, Default)]
pub struct AssertionGraph {
    pub nodes: BTreeSet<Name>,
    pub edges: Vec<RoleAssertion>,
    adjacency: HashMap<Name, Vec<usize>>,
    /// Concept assertions per individual, as `(assertion id, concept)`.
    concepts: HashMap<Name, Vec<(usize, Concept)>>,
}

impl AssertionGraph {
    pub fn build(a: &ABox) -> Self {
        let mut g = AssertionGraph::default();
        for (i, ConceptAssertion { concept, individual }) in a.concept_assertions.iter().enumerate() {
            g.nodes.insert(individual.clone());
            g.concepts.entry(individual.clone()).or_default().push((i, concept.clone()));
        }
        for (i, ra) in a.role_assertions.iter().enumerate() {
            g.nodes.insert(ra.subject.clone());
            g.nodes.insert(ra.object.clone());
            g.adjacency.entry(ra.subject.clone()).or_default().push(i);
            if ra.object != ra.subject {
                g.adjacency.entry(ra.object.clone()).or_default().push(i);
            }
            g.edges.push(ra.clone());
        }
        for list in g.concepts.values_mut() {
            list.sort_by_cached_key(|(i, c)| (serialize_concept(c), *i));
        }
        for (x, list) in g.adjacency.iter_mut() {
            list.sort_by_cached_key(|&e| {
                let ra = &g.edges[e];
                let (y, _) = orient(ra, x);
                (ra.role.clone(), ra.subject != *x, y.clone(), e)
            });
        }
        g
    }

    pub fn edge_ids(&self, x: &Name) -> &[usize] {
        self.adjacency.get(x).map(|v| &v[..]).unwrap_or(&[])
    }

    pub fn concepts_of(&self, x: &Name) -> impl Iterator<Item = &Concept> {
        self.concepts.get(x).into_iter().flatten().map(|(_, c)| c)
    }

    /// Directed roles along some path from `from` to `to` (fewest edges,
    /// then canonical edge order).
    pub fn role_path(&self, from: &Name, to: &Name) -> Option<Vec<Role>> {
        let mut prev: HashMap<Name, (Name, Role)> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([from.clone()]);
        let mut seen = BTreeSet::from([from.clone()]);
        while let Some(x) = queue.pop_front() {
            if &x == to {
                let mut path = Vec::new();
                let mut cur = x;
                while let Some((p, r)) = prev.get(&cur) {
                    path.push(r.clone());
                    cur = p.clone();
                }
                path.reverse();
                return Some(path);
            }
            for &e in self.edge_ids(&x) {
                let (y, r) = orient(&self.edges[e], &x);
                if seen.insert(y.clone()) {
                    prev.insert(y.clone(), (x.clone(), r));
                    queue.push_back(y.clone());
                }
            }
        }
        None
    }
}

pub fn build_graph(a: &ABox) -> AssertionGraph {
    AssertionGraph::build(a)
}

/// The far end of an edge seen from `x`, and the directed role from `x` to it.
fn orient<'a>(ra: &'a RoleAssertion, x: &Name) -> (&'a Name, Role) {
    if &ra.subject == x {
        (&ra.object, Role::named(ra.role.clone()))
    } else {
        (&ra.subject, Role::inverse_of(ra.role.clone()))
    }
}

/// One assertion `γ` as seen from the individual being rolled.
#[derive(Clone, Copy, Debug)]
pub enum Gamma<'a> {
    Concept(&'a Concept),
    Role(&'a RoleAssertion),
}

/// `C_γ` for individual `x`. `filler` is the concept already rolled up for
/// the neighbour; `head` adds `{x}` (x is a joint node); at a cycle tail the
/// result is just `{x}`.
pub fn transform_assertion(g: Gamma<'_>, x: &Name, filler: Option<&Concept>, head: bool, tail: bool) -> Concept {
    if tail {
        return Concept::nominal(x.clone());
    }
    let c = match g {
        Gamma::Concept(c) => c.clone(),
        Gamma::Role(ra) => {
            let (_, r) = orient(ra, x);
            Concept::exists(r, filler.cloned().unwrap_or(Concept::Top))
        }
    };
    if head {
        Concept::and([Concept::nominal(x.clone()), c])
    } else {
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RollResult {
    #[serde(serialize_with = "as_text")]
    pub concept: Concept,
    /// Ids of the rolled role assertions.
    pub rolled_assertions: BTreeSet<usize>,
    pub metrics: ConceptMetrics,
    pub joint_nodes: BTreeSet<Name>,
    /// Edge traversals made; never more than the number of role assertions.
    pub traversals: usize,
}

fn as_text<S: serde::Serializer>(c: &Concept, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&serialize_concept(c))
}

enum Step {
    Tree(usize, Name),
    Closing(usize, Name),
}

/// Per-invocation traversal state.
struct RollContext {
    visited_edges: BTreeSet<usize>,
    visited_nodes: BTreeSet<Name>,
    joint_marks: BTreeSet<Name>,
    children: HashMap<Name, Vec<Step>>,
    traversals: usize,
}

/// Rolls assertions up for individuals of one ABox under one analysis.
pub struct Roller<'a> {
    graph: &'a AssertionGraph,
    analysis: Option<&'a TBoxAnalysis>,
    oracle: Option<&'a dyn SubsumptionOracle>,
    max_rolled: Option<usize>,
}

impl<'a> Roller<'a> {
    pub fn new(graph: &'a AssertionGraph) -> Self {
        Roller { graph, analysis: None, oracle: None, max_rolled: None }
    }

    pub fn with_analysis(mut self, an: &'a TBoxAnalysis) -> Self {
        self.analysis = Some(an);
        self
    }

    pub fn with_oracle(mut self, oracle: &'a dyn SubsumptionOracle) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn with_max_rolled(mut self, limit: Option<usize>) -> Self {
        self.max_rolled = limit;
        self
    }

    fn allowed(&self, mode: Mode, x: &Name, y: &Name, r: &Role) -> Result<bool, RollError> {
        match mode {
            Mode::V1 => Ok(true),
            Mode::V2 => Ok(syn_cond(self.analysis.expect("V2 needs a TBox analysis"), r)),
            Mode::V3 => {
                let an = self.analysis.expect("V3 needs a TBox analysis");
                if !syn_cond(an, r) {
                    return Ok(false);
                }
                let oracle = self.oracle.expect("V3 needs a subsumption oracle");
                let own: Vec<&Concept> = self.graph.concepts_of(x).collect();
                let nb: Vec<&Concept> = self.graph.concepts_of(y).collect();
                Ok(syn_cond_star_for(an, r, &own, &nb, oracle)?)
            }
        }
    }

    pub fn roll_up(&self, x: &Name, mode: Mode) -> Result<RollResult, RollError> {
        let mut ctx = RollContext {
            visited_edges: BTreeSet::new(),
            visited_nodes: BTreeSet::from([x.clone()]),
            joint_marks: BTreeSet::new(),
            children: HashMap::new(),
            traversals: 0,
        };
        // Explicit stack of (individual, next adjacency index).
        let mut stack: Vec<(Name, usize)> = vec![(x.clone(), 0)];
        while let Some((v, i)) = stack.last().cloned() {
            let edges = self.graph.edge_ids(&v);
            if i >= edges.len() {
                stack.pop();
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let e = edges[i];
            if ctx.visited_edges.contains(&e) {
                continue;
            }
            let (y, r) = orient(&self.graph.edges[e], &v);
            if !self.allowed(mode, &v, y, &r)? {
                continue;
            }
            ctx.visited_edges.insert(e);
            ctx.traversals += 1;
            if let Some(limit) = self.max_rolled {
                if ctx.visited_edges.len() > limit {
                    return Err(RollError::TooLarge(limit));
                }
            }
            if ctx.visited_nodes.contains(y) {
                ctx.joint_marks.insert(y.clone());
                ctx.children.entry(v.clone()).or_default().push(Step::Closing(e, y.clone()));
            } else {
                ctx.visited_nodes.insert(y.clone());
                ctx.children.entry(v.clone()).or_default().push(Step::Tree(e, y.clone()));
                stack.push((y.clone(), 0));
            }
        }
        let concept = self.build(x, &ctx);
        Ok(RollResult {
            metrics: metrics(&concept),
            concept,
            rolled_assertions: ctx.visited_edges,
            joint_nodes: ctx.joint_marks,
            traversals: ctx.traversals,
        })
    }

    /// Post-order construction over the traversal tree.
    fn build(&self, root: &Name, ctx: &RollContext) -> Concept {
        let mut done: HashMap<Name, Concept> = HashMap::new();
        let mut stack: Vec<(Name, bool)> = vec![(root.clone(), false)];
        while let Some((v, expanded)) = stack.pop() {
            let steps = ctx.children.get(&v).map(|s| &s[..]).unwrap_or(&[]);
            if !expanded {
                stack.push((v.clone(), true));
                for s in steps.iter().rev() {
                    if let Step::Tree(_, y) = s {
                        stack.push((y.clone(), false));
                    }
                }
                continue;
            }
            let head = ctx.joint_marks.contains(&v);
            let mut parts: Vec<Concept> = self
                .graph
                .concepts_of(&v)
                .map(|c| transform_assertion(Gamma::Concept(c), &v, None, false, false))
                .collect();
            for s in steps {
                let (e, filler) = match s {
                    Step::Tree(e, y) => (*e, done.remove(y).expect("child built first")),
                    Step::Closing(e, y) => (*e, transform_assertion(Gamma::Concept(&Concept::Top), y, None, false, true)),
                };
                parts.push(transform_assertion(Gamma::Role(&self.graph.edges[e]), &v, Some(&filler), false, false));
            }
            let c = if parts.is_empty() && !head {
                Concept::Top
            } else {
                if head {
                    parts.push(Concept::nominal(v.clone()));
                }
                Concept::and(parts)
            };
            done.insert(v, c);
        }
        done.remove(root).unwrap_or(Concept::Top)
    }
}

/// Convenience entry point building the graph on the fly.
pub fn roll_up(
    a: &ABox,
    an: Option<&TBoxAnalysis>,
    oracle: Option<&dyn SubsumptionOracle>,
    x: &Name,
    mode: Mode,
) -> Result<RollResult, RollError> {
    let g = AssertionGraph::build(a);
    let mut r = Roller::new(&g);
    if let Some(an) = an {
        r = r.with_analysis(an);
    }
    if let Some(o) = oracle {
        r = r.with_oracle(o);
    }
    r.roll_up(x, mode)
}

/// Per-individual roll-up results keyed by name, for reports.
pub type RollTable = BTreeMap<Name, RollResult>;
