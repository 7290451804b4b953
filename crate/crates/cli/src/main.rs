use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use msct_core::bench::{self, GenConfig, BENCH_HEADER};
use msct_core::dl::{to_simple_form, Concept, Name, Ontology};
use msct_core::query::{name_complex_assertions, prepare_query, Limits, Method, QueryEngine, QueryError};
use msct_core::rollup::Mode;
use msct_core::syncond::analyze;
use msct_core::syntax::{parse_concept, parse_individual, parse_ontology, serialize_concept, serialize_ontology, serialize_role};
use msct_core::tableau::{Budget, Reasoner, ReasonerError};

const EXIT_USAGE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;

#[derive(Parser)]
#[command(name = "msct", version, about = "Instance checking over SHI ontologies by rolling up ABox assertions")]
struct Cli {
    /// Wall-clock limit per reasoning call.
    #[arg(long, global = true)]
    timeout_ms: Option<u64>,
    /// Completion-graph node limit per reasoning call.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_nodes: usize,
    /// Threads for retrieve, stats and bench.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// v1, v2, v3 or baseline, where the command takes a mode.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Give up rolling an individual after this many assertions.
    #[arg(long, global = true)]
    max_rolled: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Is the concept satisfiable w.r.t. the TBox?
    Sat {
        file: PathBuf,
        #[arg(long)]
        concept: String,
    },
    /// Is `sub` subsumed by `sup` w.r.t. the TBox?
    Subsume {
        file: PathBuf,
        #[arg(long)]
        sub: String,
        #[arg(long)]
        sup: String,
    },
    /// Is the ontology consistent?
    Consistent { file: PathBuf },
    /// Tableau instance check.
    Instance {
        file: PathBuf,
        #[arg(long)]
        concept: String,
        #[arg(long)]
        individual: String,
    },
    /// Trigger roles and matched axioms of the TBox, optionally with a query named.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        query: Option<String>,
    },
    /// Rolled-up concept of one individual.
    Msc {
        file: PathBuf,
        #[arg(long)]
        individual: String,
        #[arg(long)]
        query: Option<String>,
    },
    /// Instance check through the rolled-up concept (or the baseline).
    Check {
        file: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long)]
        individual: String,
    },
    /// All instances of the query.
    Retrieve {
        file: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Write a generated ontology.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Size statistics of the rolled-up concepts of every individual.
    Stats {
        file: PathBuf,
        #[arg(long)]
        query: Option<String>,
    },
    /// Retrieval timings per query and mode, as TSV.
    Bench {
        /// Ontology to use instead of a generated one.
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        gen: GenArgs,
        /// Query to time; repeatable. Defaults to the generator suite.
        #[arg(long)]
        query: Vec<String>,
        /// Comma-separated modes.
        #[arg(long, default_value = "baseline,v2,v3")]
        modes: String,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    scale: usize,
    #[arg(long, default_value_t = GenConfig::default().fanout)]
    fanout: usize,
    #[arg(long, default_value_t = GenConfig::default().cycle_rate)]
    cycle_rate: f64,
    #[arg(long, default_value_t = GenConfig::default().trigger_fraction)]
    trigger_fraction: f64,
}

impl GenArgs {
    fn config(&self) -> Result<GenConfig, Failure> {
        if self.scale == 0 {
            return Err(Failure::usage("--scale must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.cycle_rate) || !(0.0..=1.0).contains(&self.trigger_fraction) {
            return Err(Failure::usage("--cycle-rate and --trigger-fraction must lie in [0, 1]"));
        }
        Ok(GenConfig {
            seed: self.seed,
            scale: self.scale,
            fanout: self.fanout,
            cycle_rate: self.cycle_rate,
            trigger_fraction: self.trigger_fraction,
        })
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(m: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: m.into() }
    }

    fn inconsistent() -> Self {
        Failure { code: EXIT_INCONSISTENT, message: "ontology is inconsistent".into() }
    }
}

impl From<ReasonerError> for Failure {
    fn from(e: ReasonerError) -> Self {
        Failure { code: EXIT_BUDGET, message: e.to_string() }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Reasoner(r) => r.into(),
            QueryError::Limit(m) => Failure { code: EXIT_BUDGET, message: m },
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type Out<'a> = &'a mut dyn Write;

fn read_source(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }
}

fn load(path: &PathBuf) -> Result<Ontology, Failure> {
    let text = read_source(path)?;
    parse_ontology(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn concept(s: &str) -> Result<Concept, Failure> {
    parse_concept(s).map_err(|e| Failure::usage(format!("concept `{s}`: {e}")))
}

fn individual(s: &str) -> Result<Name, Failure> {
    parse_individual(s).map_err(|e| Failure::usage(format!("individual `{s}`: {e}")))
}

fn known_individual(k: &Ontology, a: &Name) -> Result<(), Failure> {
    if k.abox.individuals.contains(a) {
        Ok(())
    } else {
        Err(Failure::usage(format!("unknown individual `{a}`")))
    }
}

impl Cli {
    fn limits(&self) -> Limits {
        Limits {
            budget: Budget { max_nodes: self.max_nodes, timeout: self.timeout_ms.map(Duration::from_millis) },
            max_rolled: self.max_rolled,
        }
    }

    fn roll_mode(&self) -> Result<Mode, Failure> {
        self.mode.as_deref().unwrap_or("v3").parse().map_err(Failure::usage)
    }

    fn method(&self) -> Result<Method, Failure> {
        self.mode.as_deref().unwrap_or("v3").parse().map_err(Failure::usage)
    }

    fn reasoner(&self, k: &Ontology) -> Reasoner {
        Reasoner::new(&k.tbox, self.limits().budget)
    }

    fn run(&self, out: Out<'_>) -> Result<(), Failure> {
        match &self.cmd {
            Cmd::Sat { file, concept: c } => {
                let k = load(file)?;
                let c = concept(c)?;
                writeln!(out, "{}", self.reasoner(&k).is_satisfiable(&c)?)?;
            }
            Cmd::Subsume { file, sub, sup } => {
                let k = load(file)?;
                let (c, d) = (concept(sub)?, concept(sup)?);
                writeln!(out, "{}", self.reasoner(&k).is_subsumed(&c, &d)?)?;
            }
            Cmd::Consistent { file } => {
                let k = load(file)?;
                writeln!(out, "{}", self.reasoner(&k).is_consistent(&k.abox)?)?;
            }
            Cmd::Instance { file, concept: c, individual: a } => {
                let k = load(file)?;
                let c = concept(c)?;
                let a = individual(a)?;
                known_individual(&k, &a)?;
                let s = self.reasoner(&k).abox_session(&k.abox)?;
                if !s.is_consistent() {
                    return Err(Failure::inconsistent());
                }
                writeln!(out, "{}", s.is_instance(&c, &a)?)?;
            }
            Cmd::Analyze { file, query } => {
                let k = load(file)?;
                let an = match query {
                    Some(q) => prepare_query(&k, &concept(q)?)?.analysis,
                    None => {
                        let mut t = k.tbox.clone();
                        name_complex_assertions(&mut t, &k.abox);
                        analyze(&to_simple_form(&t))
                    }
                };
                for r in &an.trigger_roles {
                    writeln!(out, "trigger\t{}", serialize_role(r))?;
                }
                for (r, axioms) in &an.matched {
                    for m in axioms {
                        writeln!(
                            out,
                            "matched\t{}\t{}\t{}\t{}\t{}\t{}",
                            serialize_role(r),
                            serialize_role(&m.r_prime),
                            serialize_concept(&m.c1),
                            m.connective,
                            serialize_concept(&m.c2),
                            serialize_concept(&m.c3)
                        )?;
                    }
                }
            }
            Cmd::Msc { file, individual: a, query } => {
                let k = load(file)?;
                let a = individual(a)?;
                known_individual(&k, &a)?;
                let mode = self.roll_mode()?;
                // Without a query only the TBox decides which assertions matter.
                let q = match query {
                    Some(q) => concept(q)?,
                    None => Concept::Top,
                };
                let e = QueryEngine::new(&k, &q, self.limits())?;
                if !e.is_consistent() {
                    return Err(Failure::inconsistent());
                }
                let r = e.roller().roll_up(&a, mode).map_err(|e| Failure { code: EXIT_BUDGET, message: e.to_string() })?;
                writeln!(out, "{}", serialize_concept(&r.concept))?;
                let m = r.metrics;
                writeln!(
                    out,
                    "depth={} conjuncts={} existentials={} rolled={}",
                    m.quantification_depth,
                    m.conjunct_count,
                    m.existential_count,
                    r.rolled_assertions.len()
                )?;
            }
            Cmd::Check { file, query, individual: a } => {
                let k = load(file)?;
                let q = concept(query)?;
                let a = individual(a)?;
                known_individual(&k, &a)?;
                let method = self.method()?;
                let e = QueryEngine::new(&k, &q, self.limits())?;
                let c = e.check(&a, method);
                let answer = c.answer.map_err(|m| Failure { code: EXIT_BUDGET, message: m })?;
                writeln!(out, "{answer}")?;
                let summary = serde_json::json!({
                    "mode": method,
                    "individual": a,
                    "inconsistent": !e.is_consistent(),
                    "metrics": c.stats.metrics,
                    "rolled": c.stats.rolled,
                    "roll_ms": c.stats.roll_ms,
                    "subsume_ms": c.stats.subsume_ms,
                });
                writeln!(out, "{summary}")?;
            }
            Cmd::Retrieve { file, query } => {
                let k = load(file)?;
                let q = concept(query)?;
                let method = self.method()?;
                let e = QueryEngine::new(&k, &q, self.limits())?;
                let ans = e.retrieve(method, self.workers);
                for m in &ans.members {
                    writeln!(out, "{m}")?;
                }
                writeln!(out, "{}", ans.summary(&e.prepared))?;
                for (a, why) in &ans.unknown {
                    eprintln!("unknown: {a}: {why}");
                }
                if !ans.unknown.is_empty() {
                    return Err(Failure { code: EXIT_BUDGET, message: format!("{} individuals undecided", ans.unknown.len()) });
                }
            }
            Cmd::Gen { gen, out: path } => {
                let k = bench::generate(&gen.config()?);
                let text = serialize_ontology(&k);
                match path {
                    Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
                    None => out.write_all(text.as_bytes())?,
                }
            }
            Cmd::Stats { file, query } => {
                let k = load(file)?;
                let mode = self.roll_mode()?;
                let q = query.as_deref().map(concept).transpose()?;
                if !self.reasoner(&k).is_consistent(&k.abox)? {
                    return Err(Failure::inconsistent());
                }
                let report = bench::stats(&k, q.as_ref(), mode, self.workers, self.limits())?;
                write!(out, "{}", report.to_tsv())?;
            }
            Cmd::Bench { file, gen, query, modes } => {
                let (k, label) = match file {
                    Some(f) => (load(f)?, f.display().to_string()),
                    None => {
                        let cfg = gen.config()?;
                        (bench::generate(&cfg), bench::ontology_label(&cfg))
                    }
                };
                let texts = if query.is_empty() { bench::suite_queries() } else { query.clone() };
                let queries = texts.iter().map(|t| Ok((t.clone(), concept(t)?))).collect::<Result<Vec<_>, Failure>>()?;
                let modes = modes
                    .split(',')
                    .map(|m| m.trim().parse::<Method>().map_err(Failure::usage))
                    .collect::<Result<Vec<_>, _>>()?;
                let rows = bench::bench(&k, &label, &queries, &modes, self.workers, self.limits())?;
                writeln!(out, "{BENCH_HEADER}")?;
                for r in rows {
                    writeln!(out, "{}", r.to_tsv())?;
                }
            }
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = cli.run(&mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("msct: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
