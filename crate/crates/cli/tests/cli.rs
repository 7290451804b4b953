use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn msct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msct")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// Member lines plus the summary with its timing fields removed.
fn answer_stream(o: &Output) -> String {
    let text = stdout(o);
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    if let Some(last) = lines.pop() {
        let mut v: serde_json::Value = serde_json::from_str(&last).unwrap();
        v.as_object_mut().unwrap().retain(|k, _| !k.ends_with("_ms"));
        lines.push(v.to_string());
    }
    lines.join("\n")
}

#[test]
fn retrieve_family() {
    let o = msct(&["retrieve", &data("family.dlo"), "--query", "ObjectSomeValuesFrom(hasParent Lawyer)", "--mode", "v3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("Tom"));
    let summary: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(summary["mode"], "v3");
    assert_eq!(summary["members"], 1);
    assert_eq!(summary["errors"], 0);
    for key in ["total_ms", "avg_roll_ms", "avg_subsume_ms"] {
        assert!(summary[key].is_number(), "{key}");
    }
    assert_eq!(lines.next(), None);
}

#[test]
fn subsume_bottom() {
    let o = msct(&["subsume", &data("empty.dlo"), "--sub", "Bottom", "--sup", "A"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "true\n");
    let o = msct(&["subsume", &data("empty.dlo"), "--sub", "A", "--sup", "Bottom"]);
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn msc_of_a_cycle() {
    let o = msct(&["msc", &data("cycle.dlo"), "--individual", "x", "--mode", "v1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o).lines().next(),
        Some("ObjectIntersectionOf(ObjectOneOf(x) ObjectSomeValuesFrom(R1 ObjectSomeValuesFrom(ObjectInverseOf(R2) ObjectOneOf(x))))")
    );
}

#[test]
fn tableau_commands() {
    let f = data("family.dlo");
    assert_eq!(stdout(&msct(&["sat", &f, "--concept", "ObjectIntersectionOf(A ObjectComplementOf(A))"])), "false\n");
    assert_eq!(stdout(&msct(&["consistent", &f])), "true\n");
    assert_eq!(stdout(&msct(&["instance", &f, "--concept", "ObjectSomeValuesFrom(hasParent Lawyer)", "--individual", "Tom"])), "true\n");
    let o = msct(&["check", &f, "--query", "ObjectSomeValuesFrom(hasParent Lawyer)", "--individual", "Mary", "--mode", "baseline"]);
    assert_eq!(stdout(&o).lines().next(), Some("false"));
}

#[test]
fn usage_errors_exit_one() {
    let f = data("family.dlo");
    for args in [
        vec!["frobnicate"],
        vec!["sat", &f],
        vec!["retrieve", &f, "--query", "ObjectSomeValuesFrom(hasParent"],
        vec!["retrieve", &f, "--query", "Doctor"],
        vec!["retrieve", &f, "--query", "Male", "--mode", "v9"],
        vec!["retrieve", &f, "--query", "Male", "--mode", "v1"],
        vec!["check", &f, "--query", "Male", "--individual", "Bob"],
        vec!["consistent", "/nonexistent/file.dlo"],
    ] {
        let o = msct(&args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(code(&msct(&["--help"])), 0);
}

#[test]
fn inconsistent_ontology() {
    let f = data("inconsistent.dlo");
    assert_eq!(stdout(&msct(&["consistent", &f])), "false\n");
    assert_eq!(code(&msct(&["instance", &f, "--concept", "B", "--individual", "a"])), 3);
    assert_eq!(code(&msct(&["msc", &f, "--individual", "a"])), 3);
    assert_eq!(code(&msct(&["stats", &f])), 3);
    let o = msct(&["retrieve", &f, "--query", "B"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(&lines[..2], ["a", "b"]);
    let summary: serde_json::Value = serde_json::from_str(lines[2]).unwrap();
    assert_eq!(summary["inconsistent"], true);
}

#[test]
fn budget_exits_two() {
    let o = msct(&[
        "retrieve",
        &data("family.dlo"),
        "--query",
        "ObjectSomeValuesFrom(hasParent Lawyer)",
        "--mode",
        "v2",
        "--max-rolled",
        "0",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown: Tom"));
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_msct"))
        .args(["retrieve", "-", "--query", "Lawyer"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(std::fs::read(data("family.dlo")).unwrap().as_slice()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("Mary"));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dlo");
    let args = ["gen", "--seed", "3", "--fanout", "24", "--scale", "2"];
    let a = msct(&args);
    assert_eq!(code(&a), 0);
    let o = msct(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    let b = msct(&["gen", "--seed", "4", "--fanout", "24", "--scale", "2"]);
    assert_ne!(a.stdout, b.stdout);
    assert_eq!(code(&msct(&["gen", "--scale", "0"])), 1);
}

#[test]
fn analyze_lists_triggers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.dlo");
    std::fs::write(&path, "SubClassOf(ObjectSomeValuesFrom(R C) D)\nObjectPropertyAssertion(R a b)\n").unwrap();
    let o = msct(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "trigger\tR"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("matched\tR\tR\tC\t")), "{text}");
    let o = msct(&["analyze", path.to_str().unwrap(), "--query", "ObjectSomeValuesFrom(S C)"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn stats_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dlo");
    let p = path.to_str().unwrap();
    assert_eq!(code(&msct(&["gen", "--seed", "1", "--fanout", "24", "--out", p])), 0);
    let one = msct(&["stats", p, "--mode", "v1"]);
    let four = msct(&["stats", p, "--mode", "v1", "--workers", "4"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert!(stdout(&one).contains("avg_depth"));

    let o = msct(&["bench", "--file", p, "--query", "Student", "--modes", "baseline,v3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0], "ontology");
    let members = rows[0].iter().position(|c| *c == "members").unwrap();
    assert_eq!(rows[1][members], rows[2][members]);
}

#[test]
fn workers_do_not_change_answers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dlo");
    let p = path.to_str().unwrap();
    assert_eq!(code(&msct(&["gen", "--seed", "2", "--fanout", "40", "--scale", "2", "--out", p])), 0);
    let q = "ObjectSomeValuesFrom(takesCourse ObjectSomeValuesFrom(ObjectInverseOf(teacherOf) Professor))";
    for mode in ["baseline", "v2", "v3"] {
        let runs: Vec<String> = ["1", "4", "8"]
            .iter()
            .map(|w| {
                let o = msct(&["retrieve", p, "--query", q, "--mode", mode, "--workers", w]);
                assert_eq!(code(&o), 0);
                answer_stream(&o)
            })
            .collect();
        assert!(runs.iter().all(|r| r == &runs[0]), "{mode}");
        assert!(runs[0].lines().count() > 1, "{mode}");
    }
}
