//! Size statistics of rolled-up concepts and retrieval timing tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::dl::{to_simple_form, Concept, ConceptMetrics, Name, Ontology};
use crate::query::{name_complex_assertions, worker_pool, Limits, Method, QueryEngine, QueryError};
use crate::rollup::{build_graph, Mode, RollError, RollResult, Roller};
use crate::syncond::{analyze, MemoOracle};

use super::gen::GenConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bin {
    pub label: String,
    pub count: usize,
}

/// Bin index for an existential count: 0, 1–2, 3–4, 5–8, 9–16, ...
pub fn bin_of(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        ((usize::BITS - (n - 1).leading_zeros()) as usize).max(1)
    }
}

pub fn bin_label(k: usize) -> String {
    match k {
        0 => "0".into(),
        1 => "1-2".into(),
        _ => format!("{}-{}", (1usize << (k - 1)) + 1, 1usize << k),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StatsReport {
    pub mode: Mode,
    pub individuals: usize,
    pub errors: usize,
    pub max_depth: usize,
    pub avg_depth: f64,
    pub max_conjuncts: usize,
    pub avg_conjuncts: f64,
    pub avg_rolled: f64,
    pub existential_histogram: Vec<Bin>,
    pub total_ms: f64,
    pub avg_roll_ms: f64,
    #[serde(skip)]
    pub per_individual: BTreeMap<Name, ConceptMetrics>,
}

impl StatsReport {
    fn from_results(mode: Mode, results: Vec<(Name, Result<RollResult, RollError>, f64)>, total_ms: f64) -> Self {
        let mut per_individual = BTreeMap::new();
        let mut errors = 0;
        let mut rolled = 0usize;
        let mut roll_ms = 0.0;
        let mut bins: Vec<usize> = Vec::new();
        for (x, r, t) in results {
            roll_ms += t;
            match r {
                Ok(r) => {
                    rolled += r.rolled_assertions.len();
                    let b = bin_of(r.metrics.existential_count);
                    if bins.len() <= b {
                        bins.resize(b + 1, 0);
                    }
                    bins[b] += 1;
                    per_individual.insert(x, r.metrics);
                }
                Err(_) => errors += 1,
            }
        }
        let n = per_individual.len();
        let avg = |f: fn(&ConceptMetrics) -> usize| {
            if n == 0 {
                0.0
            } else {
                per_individual.values().map(f).sum::<usize>() as f64 / n as f64
            }
        };
        StatsReport {
            mode,
            individuals: n,
            errors,
            max_depth: per_individual.values().map(|m| m.quantification_depth).max().unwrap_or(0),
            avg_depth: avg(|m| m.quantification_depth),
            max_conjuncts: per_individual.values().map(|m| m.conjunct_count).max().unwrap_or(0),
            avg_conjuncts: avg(|m| m.conjunct_count),
            avg_rolled: if n == 0 { 0.0 } else { rolled as f64 / n as f64 },
            existential_histogram: bins.into_iter().enumerate().map(|(k, count)| Bin { label: bin_label(k), count }).collect(),
            total_ms,
            avg_roll_ms: if n + errors == 0 { 0.0 } else { roll_ms / (n + errors) as f64 },
            per_individual,
        }
    }

    /// Header line and one row, tab separated.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("mode\tindividuals\terrors\tmax_depth\tavg_depth\tmax_conjuncts\tavg_conjuncts\tavg_rolled\texistentials\n");
        let hist: Vec<String> = self.existential_histogram.iter().map(|b| format!("{}:{}", b.label, b.count)).collect();
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{:.3}\t{}\t{:.3}\t{:.3}\t{}",
            self.mode,
            self.individuals,
            self.errors,
            self.max_depth,
            self.avg_depth,
            self.max_conjuncts,
            self.avg_conjuncts,
            self.avg_rolled,
            hist.join(",")
        );
        s
    }
}

/// Rolls every ABox individual under `mode`. With a query the analysis covers
/// the query axioms too; without one it covers the TBox alone.
pub fn stats(k: &Ontology, query: Option<&Concept>, mode: Mode, workers: usize, limits: Limits) -> Result<StatsReport, QueryError> {
    let individuals: Vec<Name> = k.abox.individuals.iter().cloned().collect();
    let run = |roller: &Roller<'_>| {
        let start = Instant::now();
        let results: Vec<(Name, Result<RollResult, RollError>, f64)> = worker_pool(workers).install(|| {
            individuals
                .par_iter()
                .map(|x| {
                    let t = Instant::now();
                    let r = roller.roll_up(x, mode);
                    (x.clone(), r, t.elapsed().as_secs_f64() * 1000.0)
                })
                .collect()
        });
        StatsReport::from_results(mode, results, start.elapsed().as_secs_f64() * 1000.0)
    };
    match query {
        Some(q) => {
            let e = QueryEngine::new(k, q, limits)?;
            Ok(run(&e.roller()))
        }
        None => {
            let mut t = k.tbox.clone();
            name_complex_assertions(&mut t, &k.abox);
            let t = to_simple_form(&t);
            let an = analyze(&t);
            let oracle = MemoOracle::new(&t, limits.budget);
            let graph = build_graph(&k.abox);
            let roller = Roller::new(&graph).with_analysis(&an).with_oracle(&oracle).with_max_rolled(limits.max_rolled);
            Ok(run(&roller))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub ontology: String,
    pub query: String,
    pub mode: Method,
    pub workers: usize,
    pub individuals: usize,
    pub avg_check_ms: f64,
    pub total_ms: f64,
    pub members: usize,
    pub errors: usize,
}

pub const BENCH_HEADER: &str = "ontology\tquery\tmode\tworkers\tindividuals\tavg_check_ms\ttotal_ms\tmembers\terrors";

impl BenchRow {
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{}\t{}",
            self.ontology,
            self.query,
            self.mode,
            self.workers,
            self.individuals,
            self.avg_check_ms,
            self.total_ms,
            self.members,
            self.errors
        )
    }
}

pub fn ontology_label(cfg: &GenConfig) -> String {
    format!("gen-seed{}-scale{}", cfg.seed, cfg.scale)
}

/// Times retrieval of each query in each mode. Preparing the query and the
/// consistency test count as initialization and are not timed.
pub fn bench(
    k: &Ontology,
    label: &str,
    queries: &[(String, Concept)],
    modes: &[Method],
    workers: usize,
    limits: Limits,
) -> Result<Vec<BenchRow>, QueryError> {
    let mut rows = Vec::new();
    for (qlabel, q) in queries {
        let e = QueryEngine::new(k, q, limits)?;
        for &m in modes {
            let ans = e.retrieve(m, workers);
            let n = ans.per_individual.len();
            let check_ms: f64 = ans.per_individual.values().map(|s| s.roll_ms + s.subsume_ms).sum();
            rows.push(BenchRow {
                ontology: label.to_string(),
                query: qlabel.clone(),
                mode: m,
                workers,
                individuals: n,
                avg_check_ms: if n == 0 { 0.0 } else { check_ms / n as f64 },
                total_ms: ans.total_ms,
                members: ans.members.len(),
                errors: ans.unknown.len(),
            });
        }
    }
    Ok(rows)
}
