//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use msct_core::bench::{generate, stats, suite_queries, unit_name, GenConfig};
use msct_core::dl::{to_simple_form, Concept, Name, Ontology, TBox};
use msct_core::query::{name_complex_assertions, Limits, Method, QueryEngine};
use msct_core::rollup::{build_graph, roll_up, Mode, Roller};
use msct_core::syncond::{analyze, MemoOracle};
use msct_core::syntax::{parse_concept, parse_ontology, serialize_concept, serialize_ontology};
use msct_core::tableau::{bounded_model_check, is_subsumed, Budget, Reasoner};

type Outcome = Result<String, String>;

const SEEDS: [u64; 3] = [1, 2, 3];

fn c(s: &str) -> Concept {
    parse_concept(s).unwrap()
}

fn onto(s: &str) -> Ontology {
    parse_ontology(s).unwrap()
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn golden(k: &Ontology, x: &str, mode: Mode, want: &str) -> Result<(), String> {
    let an = analyze(&k.tbox);
    let oracle = MemoOracle::new(&k.tbox, Budget::default());
    let r = roll_up(&k.abox, Some(&an), Some(&oracle), &Name::new(x), mode).map_err(|e| e.to_string())?;
    let got = serialize_concept(&r.concept);
    check(got == want, format!("{x} {mode}: got {got}, want {want}"))
}

fn worked_examples() -> Outcome {
    let start = Instant::now();
    let family = "ClassAssertion(Male Tom)\nObjectPropertyAssertion(hasParent Tom Mary)\nClassAssertion(Lawyer Mary)";
    golden(
        &onto(&format!("{family}\nObjectPropertyAssertion(hasSister Mary Ana)\nClassAssertion(Professor Ana)")),
        "Tom",
        Mode::V1,
        "ObjectIntersectionOf(Male ObjectSomeValuesFrom(hasParent ObjectIntersectionOf(Lawyer ObjectSomeValuesFrom(hasSister Professor))))",
    )?;
    golden(&onto(family), "Mary", Mode::V1, "ObjectIntersectionOf(Lawyer ObjectSomeValuesFrom(ObjectInverseOf(hasParent) Male))")?;

    let cycle_msc =
        "ObjectIntersectionOf(ObjectOneOf(x) ObjectSomeValuesFrom(R1 ObjectSomeValuesFrom(ObjectInverseOf(R2) ObjectOneOf(x))))";
    golden(&onto("ObjectPropertyAssertion(R1 x y)\nObjectPropertyAssertion(R2 x y)"), "x", Mode::V1, cycle_msc)?;
    let t = TBox::new();
    let loop_back = c("ObjectSomeValuesFrom(R1 ObjectSomeValuesFrom(ObjectInverseOf(R2) ObjectSomeValuesFrom(R1 Top)))");
    check(is_subsumed(&t, &c(cycle_msc), &loop_back).unwrap(), "cycle concept not subsumed by the loop-back query")?;
    let tree = c("ObjectIntersectionOf(ObjectSomeValuesFrom(R1 Top) ObjectSomeValuesFrom(R2 Top))");
    check(!is_subsumed(&t, &tree, &loop_back).unwrap(), "tree concept wrongly subsumed")?;

    golden(
        &onto("SubClassOf(ObjectSomeValuesFrom(R1 A) B)\nObjectPropertyAssertion(R1 x y1)\nObjectPropertyAssertion(R2 x y2)\nObjectPropertyAssertion(R3 x y3)\nClassAssertion(C1 y1)\nClassAssertion(C2 y2)\nClassAssertion(C3 y3)"),
        "x",
        Mode::V2,
        "ObjectSomeValuesFrom(R1 C1)",
    )?;
    golden(
        &onto("SubClassOf(ObjectSomeValuesFrom(R0 A) B)\nSubClassOf(ObjectSomeValuesFrom(R1 A) B)\nSubClassOf(ObjectSomeValuesFrom(R3 A) B)\nObjectPropertyAssertion(R0 x0 x1)\nObjectPropertyAssertion(R1 x1 x2)\nObjectPropertyAssertion(R2 x2 x3)\nObjectPropertyAssertion(R3 x3 x4)\nClassAssertion(C x2)\nClassAssertion(E x3)\nClassAssertion(F x4)"),
        "x0",
        Mode::V2,
        "ObjectSomeValuesFrom(R0 ObjectSomeValuesFrom(R1 C))",
    )?;
    golden(
        &onto("SubClassOf(ObjectSomeValuesFrom(R C) D)\nClassAssertion(ObjectComplementOf(D) a)\nObjectPropertyAssertion(R a b)\nClassAssertion(ObjectComplementOf(C) b)"),
        "a",
        Mode::V3,
        "ObjectComplementOf(D)",
    )?;
    let took = start.elapsed();
    check(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!("7 golden roll-ups and 2 subsumptions in {} ms", took.as_millis()))
}

fn cfg(seed: u64, scale: usize) -> GenConfig {
    GenConfig { seed, scale, ..GenConfig::default() }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut checks = 0;
    for seed in SEEDS {
        for scale in 1..=3 {
            let k = generate(&cfg(seed, scale));
            for q in suite_queries() {
                let e = QueryEngine::new(&k, &c(&q), Limits::default()).map_err(|e| e.to_string())?;
                let answers: Vec<_> = [Method::Baseline, Method::V2, Method::V3].iter().map(|&m| e.retrieve(m, 1)).collect();
                for a in &answers {
                    check(a.unknown.is_empty(), format!("seed {seed} scale {scale} {q}: {} undecided in {}", a.unknown.len(), a.mode))?;
                    check(
                        a.members == answers[0].members,
                        format!("seed {seed} scale {scale} {q}: {} differs from baseline", a.mode),
                    )?;
                }
                checks += k.abox.individuals.len();
            }
        }
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(600), format!("took {took:?}"))?;
    Ok(format!("45 retrievals x 3 methods, {checks} individual answers each, {} s", took.as_secs()))
}

fn specificity_chain() -> Outcome {
    let mut verified = 0;
    let mut sets = 0;
    for seed in SEEDS {
        for scale in 1..=3 {
            let k = generate(&cfg(seed, scale));
            let mut t = k.tbox.clone();
            name_complex_assertions(&mut t, &k.abox);
            let t = to_simple_form(&t);
            let an = analyze(&t);
            let oracle = MemoOracle::new(&t, Budget::default());
            let g = build_graph(&k.abox);
            let roller = Roller::new(&g).with_analysis(&an).with_oracle(&oracle);
            let reasoner = Reasoner::new(&t, Budget::default());
            for x in &k.abox.individuals {
                let r: Vec<_> = [Mode::V1, Mode::V2, Mode::V3]
                    .iter()
                    .map(|&m| roller.roll_up(x, m).map_err(|e| format!("{x}: {e}")))
                    .collect::<Result<_, _>>()?;
                check(r[2].rolled_assertions.is_subset(&r[1].rolled_assertions), format!("{x}: V3 ⊄ V2 rolled"))?;
                check(r[1].rolled_assertions.is_subset(&r[0].rolled_assertions), format!("{x}: V2 ⊄ V1 rolled"))?;
                sets += 1;
                if scale == 1 {
                    for (i, j) in [(0, 1), (1, 2)] {
                        let ok = reasoner.is_subsumed(&r[i].concept, &r[j].concept).map_err(|e| format!("{x}: {e}"))?;
                        check(ok, format!("seed {seed} {x}: V{} ⋢ V{}", i + 1, j + 1))?;
                    }
                    verified += 1;
                }
            }
        }
    }
    Ok(format!("{verified} individuals tableau-verified at scale 1, {sets} rolled-set inclusions at scales 1-3"))
}

fn size_contrast() -> Outcome {
    let mut rows = Vec::new();
    let mut prev_v1 = f64::NEG_INFINITY;
    let mut v3_first = None;
    for scale in 1..=5 {
        let k = generate(&cfg(1, scale));
        let d: Vec<f64> = [Mode::V1, Mode::V2, Mode::V3]
            .iter()
            .map(|&m| stats(&k, None, m, 1, Limits::default()).map(|s| s.avg_depth).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        check(d[2] <= d[1] && d[1] <= d[0], format!("scale {scale}: averages not ordered {d:?}"))?;
        check(d[0] > prev_v1, format!("scale {scale}: V1 avg depth {} not above {prev_v1}", d[0]))?;
        prev_v1 = d[0];
        let v3 = *v3_first.get_or_insert(d[2]);
        check(d[2] == v3, format!("scale {scale}: V3 avg depth {} differs from {v3}", d[2]))?;
        rows.push(format!("{:.1}/{:.2}/{:.2}", d[0], d[1], d[2]));
    }
    Ok(format!("avg depth V1/V2/V3 by scale: {}", rows.join(", ")))
}

const CURATED: &[(&str, &str, &str, bool)] = &[
    // (tbox, sub, sup, expected): sup = "" means a satisfiability test of sub.
    ("", "A", "", true),
    ("", "Bottom", "", false),
    ("", "ObjectIntersectionOf(A ObjectComplementOf(A))", "", false),
    ("", "ObjectSomeValuesFrom(R ObjectIntersectionOf(A ObjectComplementOf(A)))", "", false),
    ("", "ObjectIntersectionOf(ObjectSomeValuesFrom(R A) ObjectAllValuesFrom(R ObjectComplementOf(A)))", "", false),
    ("SubClassOf(A Bottom)", "A", "", false),
    ("SubClassOf(Top ObjectSomeValuesFrom(R A))", "A", "", true),
    ("", "Bottom", "A", true),
    ("", "A", "Top", true),
    ("", "A", "Bottom", false),
    ("", "ObjectIntersectionOf(A B)", "A", true),
    ("", "A", "ObjectUnionOf(A B)", true),
    ("SubClassOf(A B)\nSubClassOf(B C)", "A", "C", true),
    ("SubClassOf(A B)", "B", "A", false),
    ("SubClassOf(ObjectSomeValuesFrom(R C) D)", "ObjectSomeValuesFrom(R C)", "D", true),
    ("SubClassOf(C ObjectAllValuesFrom(ObjectInverseOf(R) D))", "ObjectSomeValuesFrom(R C)", "D", true),
    ("", "ObjectSomeValuesFrom(R ObjectAllValuesFrom(ObjectInverseOf(R) A))", "A", true),
    ("SubObjectPropertyOf(R S)", "ObjectSomeValuesFrom(R A)", "ObjectSomeValuesFrom(S A)", true),
    ("SubObjectPropertyOf(R S)", "ObjectSomeValuesFrom(S A)", "ObjectSomeValuesFrom(R A)", false),
    ("TransitiveObjectProperty(R)", "ObjectSomeValuesFrom(R ObjectSomeValuesFrom(R A))", "ObjectSomeValuesFrom(R A)", true),
    ("", "ObjectSomeValuesFrom(R ObjectSomeValuesFrom(R A))", "ObjectSomeValuesFrom(R A)", false),
    ("TransitiveObjectProperty(R)", "ObjectAllValuesFrom(R A)", "ObjectAllValuesFrom(R ObjectAllValuesFrom(R A))", true),
    (
        "",
        "ObjectIntersectionOf(ObjectOneOf(x) ObjectSomeValuesFrom(R1 ObjectSomeValuesFrom(ObjectInverseOf(R2) ObjectOneOf(x))))",
        "ObjectSomeValuesFrom(R1 ObjectSomeValuesFrom(ObjectInverseOf(R2) ObjectSomeValuesFrom(R1 Top)))",
        true,
    ),
    (
        "",
        "ObjectIntersectionOf(ObjectSomeValuesFrom(R ObjectIntersectionOf(ObjectOneOf(o) A)) ObjectSomeValuesFrom(S ObjectOneOf(o)))",
        "ObjectSomeValuesFrom(S A)",
        true,
    ),
    ("SubClassOf(Top ObjectSomeValuesFrom(R Top))", "A", "ObjectSomeValuesFrom(R Top)", true),
];

const RANDOM_INSTANCES: usize = 500;
const BOUND: usize = 3;

fn tableau_validation() -> Outcome {
    for (i, (t, sub, sup, want)) in CURATED.iter().enumerate() {
        let tbox = onto(t).tbox;
        let r = Reasoner::new(&tbox, Budget::default());
        let got = if sup.is_empty() { r.is_satisfiable(&c(sub)) } else { r.is_subsumed(&c(sub), &c(sup)) }
            .map_err(|e| format!("fact {i}: {e}"))?;
        check(got == *want, format!("fact {i}: {sub} / {sup} gave {got}"))?;
    }
    let mut rng = common::rng(2024);
    let mut decided = 0;
    for i in 0..RANDOM_INSTANCES {
        let t = common::random_tbox(&mut rng);
        let q = common::random_query(&mut rng);
        let report = Reasoner::new(&t, Budget::default()).check_satisfiable(&q).map_err(|e| format!("#{i}: {e}"))?;
        let model = bounded_model_check(&t, None, Some(&q), BOUND);
        // A bounded model proves satisfiability; no model within the bound
        // contradicts the tableau only when its own model fits the bound.
        match (&model, report.satisfiable) {
            (Some(_), false) => return Err(format!("#{i}: model found but tableau says unsatisfiable")),
            (None, true) if report.nodes <= BOUND => return Err(format!("#{i}: tableau model of {} nodes missed", report.nodes)),
            (None, true) => {}
            _ => decided += 1,
        }
    }
    Ok(format!("{} curated facts; {RANDOM_INSTANCES} random instances, {decided} decided within bound {BOUND}, 0 disagreements", CURATED.len()))
}

fn inconsistency_gate() -> Outcome {
    let mut k = generate(&cfg(1, 1));
    k.abox.assert_concept(Concept::atomic("Person"), unit_name("Course0", 0));
    k.refresh_signature();
    for q in suite_queries() {
        let e = QueryEngine::new(&k, &c(&q), Limits::default()).map_err(|e| e.to_string())?;
        check(!e.is_consistent(), "gate did not fire")?;
        for m in [Method::Baseline, Method::V2, Method::V3] {
            let a = e.retrieve(m, 1);
            check(a.inconsistent, format!("{m}: flag not set"))?;
            check(a.members == k.abox.individuals, format!("{m} {q}: {} of {} members", a.members.len(), k.abox.individuals.len()))?;
        }
    }
    Ok(format!("Person(Course0_0) added: 5 queries x 3 methods return all {} individuals", k.abox.individuals.len()))
}

fn msct(args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_msct")).args(args).output().map_err(|e| e.to_string())?;
    check(o.status.success(), format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)))?;
    Ok(o.stdout)
}

/// Output with the wall-time fields dropped: `*_ms` keys of JSON lines and
/// the `*_ms` columns of TSV tables.
/// Timing fields and the echoed worker count are not part of the answer.
fn not_an_answer(key: &str) -> bool {
    key.ends_with("_ms") || key == "workers"
}

fn answers_only(out: &[u8]) -> String {
    let text = String::from_utf8_lossy(out);
    let mut drop_cols: BTreeSet<usize> = BTreeSet::new();
    let mut lines = Vec::new();
    for line in text.lines() {
        if let Ok(serde_json::Value::Object(mut m)) = serde_json::from_str::<serde_json::Value>(line) {
            m.retain(|k, _| !not_an_answer(k));
            lines.push(serde_json::Value::Object(m).to_string());
        } else if line.contains('\t') {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.iter().any(|c| c.ends_with("_ms")) {
                drop_cols = cols.iter().enumerate().filter(|(_, c)| not_an_answer(c)).map(|(i, _)| i).collect();
            }
            lines.push(cols.iter().enumerate().filter(|(i, _)| !drop_cols.contains(i)).map(|(_, c)| *c).collect::<Vec<_>>().join("\t"));
        } else {
            lines.push(line.to_string());
        }
    }
    lines.join("\n")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("seed1.dlo");
    let p = path.to_str().unwrap();
    let gen = ["gen", "--seed", "1", "--scale", "1"];
    let text = msct(&gen)?;
    check(msct(&gen)? == text, "gen output differs between runs")?;
    std::fs::write(&path, &text).map_err(|e| e.to_string())?;
    check(serialize_ontology(&parse_ontology(&String::from_utf8_lossy(&text)).unwrap()).as_bytes() == text, "gen output not canonical")?;

    let mut commands: Vec<Vec<String>> = Vec::new();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    for q in suite_queries() {
        for mode in ["baseline", "v2", "v3"] {
            commands.push(s(&["retrieve", p, "--query", &q, "--mode", mode]));
        }
    }
    for mode in ["v1", "v2", "v3"] {
        commands.push(s(&["stats", p, "--mode", mode]));
    }
    let who = unit_name("GradStudent0", 0).to_string();
    commands.push(s(&["msc", p, "--individual", &who, "--mode", "v1"]));
    commands.push(s(&["check", p, "--query", &suite_queries()[3], "--individual", &who]));
    commands.push(s(&["analyze", p]));
    commands.push(s(&["consistent", p]));
    commands.push(s(&["bench", "--file", p, "--query", "Student", "--query", &suite_queries()[2]]));

    for cmd in &commands {
        let mut first: Option<String> = None;
        for w in ["1", "4", "8"] {
            let mut args: Vec<&str> = cmd.iter().map(|x| x.as_str()).collect();
            args.extend(["--workers", w]);
            let out = answers_only(&msct(&args)?);
            match &first {
                None => first = Some(out),
                Some(f) => check(f == &out, format!("{} differs with --workers {w}", cmd[..2].join(" ")))?,
            }
        }
    }
    Ok(format!("gen reproducible; {} commands identical across --workers 1/4/8", commands.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 worked examples", worked_examples),
        ("2 oracle equivalence", oracle_equivalence),
        ("3 specificity chain", specificity_chain),
        ("4 size contrast", size_contrast),
        ("5 tableau validation", tableau_validation),
        ("6 inconsistency gate", inconsistency_gate),
        ("7 determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {name}: {detail} [{:.1} s]", start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
