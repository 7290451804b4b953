//! Instance checking and retrieval: name the query, roll up each individual,
//! decide `T' ⊨ MSC_T(a) ⊑ A_Q`. The baseline method asks the tableau
//! directly and is the oracle the rolled-up answers are compared against.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dl::{nnf, to_simple_form, ABox, Concept, ConceptAssertion, ConceptMetrics, Name, Ontology, TBox, SIMPLE_FORM_PREFIX};
use crate::rollup::{AssertionGraph, Mode, Roller};
use crate::syncond::{analyze, MemoOracle, TBoxAnalysis};
use crate::tableau::{AboxSession, Budget, Reasoner, ReasonerError};

pub const QUERY_PREFIX: &str = "_:q";
pub const REP_PREFIX: &str = "_:rep:";
pub const ASSERTION_PREFIX: &str = "_:ca";

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown name `{0}` in query")]
    UnknownName(Name),
    #[error("nominal `{0}` occurs under a negation; only positive nominals are supported in queries")]
    NegatedNominal(Name),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(Name),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error("{0}")]
    Limit(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Baseline,
    V2,
    V3,
}

impl Method {
    pub fn mode(self) -> Option<Mode> {
        match self {
            Method::Baseline => None,
            Method::V2 => Some(Mode::V2),
            Method::V3 => Some(Mode::V3),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Baseline => "baseline",
            Method::V2 => "v2",
            Method::V3 => "v3",
        })
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(Method::Baseline),
            "v2" => Ok(Method::V2),
            "v3" => Ok(Method::V3),
            _ => Err(format!("unknown mode `{s}` (expected baseline, v2 or v3)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PreparedQuery {
    pub query: Concept,
    pub query_name: Name,
    pub augmented_tbox: TBox,
    pub rep_assertions: Vec<ConceptAssertion>,
    /// Simple-form names introduced while preparing.
    pub aux_names: Vec<Name>,
    pub analysis: TBoxAnalysis,
}

fn fresh_query_name(t: &TBox) -> Name {
    let used = t.concept_names();
    (0..).map(|i| Name::from(format!("{QUERY_PREFIX}{i}"))).find(|n| !used.contains(n)).unwrap()
}

/// Adds `X ⊑ C` with a fresh `X` for every concept assertion `C(a)` whose
/// concept is not a literal, so the trigger analysis sees the roles it uses.
/// `X` occurs nowhere else, so entailments over the old names are unchanged.
pub fn name_complex_assertions(t: &mut TBox, a: &ABox) {
    let used = t.concept_names();
    let mut fresh = (0..).map(|i| Name::from(format!("{ASSERTION_PREFIX}{i}"))).filter(|n| !used.contains(n));
    let complex: BTreeSet<&Concept> = a.concept_assertions.iter().map(|ca| &ca.concept).filter(|c| !is_literal(c)).collect();
    for c in complex {
        t.add_gci(Concept::atomic(fresh.next().unwrap()), c.clone());
    }
}

// The representative rewrite is exact only for positive occurrences: a
// countermodel stays one after setting `_:rep:b` to `{b}`.
fn negated_nominal(c: &Concept) -> Option<Name> {
    match c {
        Concept::Not(x) => match &**x {
            Concept::Nominal(b) => Some(b.clone()),
            _ => None,
        },
        Concept::And(xs) | Concept::Or(xs) => xs.iter().find_map(negated_nominal),
        Concept::Exists(_, x) | Concept::Forall(_, x) => negated_nominal(x),
        _ => None,
    }
}

fn is_literal(c: &Concept) -> bool {
    match c {
        Concept::Top | Concept::Bottom | Concept::Atomic(_) => true,
        Concept::Not(x) => matches!(**x, Concept::Atomic(_)),
        _ => false,
    }
}

/// Names `q` by a fresh `_:q<n> ≡ q`, replacing each nominal `{b}` by a
/// representative concept `_:rep:b` asserted for `b`.
pub fn prepare_query(k: &Ontology, q: &Concept) -> Result<PreparedQuery, QueryError> {
    if let Some(n) = k.signature.unknown_name(q) {
        return Err(QueryError::UnknownName(n));
    }
    if let Some(b) = negated_nominal(&nnf(q)) {
        return Err(QueryError::NegatedNominal(b));
    }
    let query_name = fresh_query_name(&k.tbox);
    let mut reps = BTreeSet::new();
    let rewritten = q.replace_nominals(&|b: &Name| {
        Some(Concept::atomic(Name::from(format!("{REP_PREFIX}{b}"))))
    });
    for b in q.nominals() {
        reps.insert(b);
    }
    let rep_assertions = reps
        .into_iter()
        .map(|b| ConceptAssertion { concept: Concept::atomic(Name::from(format!("{REP_PREFIX}{b}"))), individual: b })
        .collect();
    let mut t = k.tbox.clone();
    name_complex_assertions(&mut t, &k.abox);
    t.add_equivalence(Concept::atomic(query_name.clone()), rewritten);
    let before = k.tbox.concept_names();
    let augmented_tbox = to_simple_form(&t);
    let aux_names = augmented_tbox
        .concept_names()
        .into_iter()
        .filter(|n| n.as_str().starts_with(SIMPLE_FORM_PREFIX) && !before.contains(n))
        .collect();
    let analysis = analyze(&augmented_tbox);
    Ok(PreparedQuery { query: q.clone(), query_name, augmented_tbox, rep_assertions, aux_names, analysis })
}

/// Limits applied to every reasoning call and roll-up.
#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    pub budget: Budget,
    pub max_rolled: Option<usize>,
}

/// Everything needed to answer one query over one ontology, built once and
/// shared by all workers.
pub struct QueryEngine<'k> {
    k: &'k Ontology,
    pub prepared: PreparedQuery,
    limits: Limits,
    graph: AssertionGraph,
    /// Completion graph of the original ontology, reused by the baseline.
    session: AboxSession,
    msc_reasoner: Reasoner,
    oracle: MemoOracle,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IndividualStats {
    pub metrics: Option<ConceptMetrics>,
    pub rolled: usize,
    pub roll_ms: f64,
    pub subsume_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnswerSet {
    pub mode: Method,
    pub inconsistent: bool,
    pub members: BTreeSet<Name>,
    /// Individuals whose check hit a limit, with the reason.
    pub unknown: BTreeMap<Name, String>,
    pub per_individual: BTreeMap<Name, IndividualStats>,
    pub total_ms: f64,
}

impl AnswerSet {
    pub fn total_rolled(&self) -> usize {
        self.per_individual.values().map(|s| s.rolled).sum()
    }

    /// The trailing summary object printed by the command-line tool.
    pub fn summary(&self, pq: &PreparedQuery) -> serde_json::Value {
        let n = self.per_individual.len().max(1) as f64;
        let avg = |f: fn(&IndividualStats) -> f64| self.per_individual.values().map(f).sum::<f64>() / n;
        serde_json::json!({
            "mode": self.mode,
            "query_name": pq.query_name,
            "aux_names": pq.aux_names,
            "inconsistent": self.inconsistent,
            "members": self.members.len(),
            "errors": self.unknown.len(),
            "individuals": self.per_individual.len(),
            "rolled": self.total_rolled(),
            "total_ms": round3(self.total_ms),
            "avg_roll_ms": round3(avg(|s| s.roll_ms)),
            "avg_subsume_ms": round3(avg(|s| s.subsume_ms)),
        })
    }
}

/// A pool of `workers` threads with stacks deep enough for long roll-up chains.
pub fn worker_pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .stack_size(64 << 20)
        .build()
        .expect("thread pool")
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

/// Outcome of one instance check.
#[derive(Clone, Debug)]
pub struct Check {
    pub answer: Result<bool, String>,
    pub stats: IndividualStats,
}

impl<'k> QueryEngine<'k> {
    /// Prepares the query and runs the consistency gate.
    pub fn new(k: &'k Ontology, q: &Concept, limits: Limits) -> Result<Self, QueryError> {
        let prepared = prepare_query(k, q)?;
        let mut abox: ABox = k.abox.clone();
        for ca in &prepared.rep_assertions {
            abox.assert_concept(ca.concept.clone(), ca.individual.clone());
        }
        let graph = AssertionGraph::build(&abox);
        let session = Reasoner::new(&k.tbox, limits.budget).abox_session(&k.abox)?;
        let msc_reasoner = Reasoner::new(&prepared.augmented_tbox, limits.budget);
        let oracle = MemoOracle::from_reasoner(msc_reasoner.clone());
        Ok(QueryEngine { k, prepared, limits, graph, session, msc_reasoner, oracle })
    }

    pub fn is_consistent(&self) -> bool {
        self.session.is_consistent()
    }

    pub fn individuals(&self) -> Vec<Name> {
        self.k.abox.individuals.iter().cloned().collect()
    }

    pub fn analysis(&self) -> &TBoxAnalysis {
        &self.prepared.analysis
    }

    pub fn roller(&self) -> Roller<'_> {
        Roller::new(&self.graph)
            .with_analysis(&self.prepared.analysis)
            .with_oracle(&self.oracle)
            .with_max_rolled(self.limits.max_rolled)
    }

    /// `K ⊨ Q(a)` by the given method. An inconsistent ontology entails everything.
    pub fn check(&self, a: &Name, method: Method) -> Check {
        let mut stats = IndividualStats::default();
        if !self.is_consistent() {
            return Check { answer: Ok(true), stats };
        }
        let answer = match method.mode() {
            None => {
                let t = Instant::now();
                let r = self.session.is_instance(&self.prepared.query, a);
                stats.subsume_ms = ms(t);
                r.map_err(|e| e.to_string())
            }
            Some(mode) => {
                let t = Instant::now();
                let rolled = self.roller().roll_up(a, mode);
                stats.roll_ms = ms(t);
                match rolled {
                    Err(e) => Err(e.to_string()),
                    Ok(r) => {
                        stats.metrics = Some(r.metrics);
                        stats.rolled = r.rolled_assertions.len();
                        let t = Instant::now();
                        let q = Concept::atomic(self.prepared.query_name.clone());
                        let ans = self.msc_reasoner.is_subsumed(&r.concept, &q);
                        stats.subsume_ms = ms(t);
                        ans.map_err(|e| e.to_string())
                    }
                }
            }
        };
        Check { answer, stats }
    }

    /// Checks every ABox individual on a pool of `workers` threads.
    pub fn retrieve(&self, method: Method, workers: usize) -> AnswerSet {
        let start = Instant::now();
        let individuals = self.individuals();
        let results: Vec<(Name, Check)> =
            worker_pool(workers).install(|| individuals.par_iter().map(|a| (a.clone(), self.check(a, method))).collect());
        let mut out = AnswerSet {
            mode: method,
            inconsistent: !self.is_consistent(),
            members: BTreeSet::new(),
            unknown: BTreeMap::new(),
            per_individual: BTreeMap::new(),
            total_ms: 0.0,
        };
        for (a, c) in results {
            match c.answer {
                Ok(true) => {
                    out.members.insert(a.clone());
                }
                Ok(false) => {}
                Err(e) => {
                    out.unknown.insert(a.clone(), e);
                }
            }
            out.per_individual.insert(a, c.stats);
        }
        out.total_ms = ms(start);
        out
    }
}

/// One-shot instance check through the rolled-up concept.
pub fn check_instance_msc(k: &Ontology, q: &Concept, a: &Name, mode: Mode) -> Result<bool, QueryError> {
    if !k.abox.individuals.contains(a) {
        return Err(QueryError::UnknownIndividual(a.clone()));
    }
    let method = match mode {
        Mode::V1 | Mode::V2 => Method::V2,
        Mode::V3 => Method::V3,
    };
    let e = QueryEngine::new(k, q, Limits::default())?;
    e.check(a, method).answer.map_err(QueryError::Limit)
}

pub fn retrieve_instances(k: &Ontology, q: &Concept, method: Method, workers: usize) -> Result<AnswerSet, QueryError> {
    Ok(QueryEngine::new(k, q, Limits::default())?.retrieve(method, workers))
}
