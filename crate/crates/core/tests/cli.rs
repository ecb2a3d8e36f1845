mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flowcob::field_graph::SkeletonMap;
use flowcob::io::{FieldGraphFile, SkeletonFile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn flowcob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowcob")).args(args).env("FLOWCOB_COLOR", "0").output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Two sources, a saddle and a sink on the sphere.
fn good_field() -> Value {
    json!({
        "n_darts": 12, "isolated_vertices": 0,
        "alpha": [1, 0, 3, 2, 5, 4, 7, 6, 9, 8, 11, 10],
        "sigma": [5, 11, 9, 7, 6, 2, 4, 1, 10, 0, 8, 3],
        "kinds": ["saddle", "sink", "source", "source"],
        "tail": [0, 2, 4, 6, 8, 10]
    })
}

fn loop_sphere() -> Value {
    json!({"n_darts": 2, "isolated_vertices": 0, "alpha": [1, 0], "sigma": [1, 0], "role": "sink_skeleton"})
}

#[test]
fn validate_good_field() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "good_field.json", &good_field());
    let o = flowcob(&["validate", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["valid"], json!(true));
    assert_eq!((v["U"].as_u64(), v["I"].as_u64(), v["A"].as_u64(), v["genus"].as_u64()), (Some(2), Some(1), Some(1), Some(0)));
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = good_field();
    bad["kinds"] = json!(["saddle", "source", "source", "source"]);
    let f = write(dir.path(), "bad.json", &bad);
    let o = flowcob(&["validate", s(&f)]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["valid"], json!(false));
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn reduce_writes_one_line_trace() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "loop_sphere.json", &loop_sphere());
    let t = dir.path().join("t.jsonl");
    let o = flowcob(&["reduce", s(&f), "--trace", s(&t)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&t).unwrap();
    assert_eq!(text.lines().count(), 1);
    let step: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(step["move"]["kind"], json!("source_merge"));
    assert_eq!(step["pre"].as_str().unwrap().len(), 64);
    assert_eq!(stdout_json(&o)["steps"], json!(1));
}

#[test]
fn reduce_interleaved_and_marked() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "theta.json", &json!({"n_darts": 6, "alpha": [1,0,3,2,5,4], "sigma": [2,5,4,1,0,3]}));
    let o = flowcob(&["reduce", s(&f), "--strategy", "interleaved"]);
    assert_eq!(stdout_json(&o)["steps"], json!(3));
    let mut marked = loop_sphere();
    marked["marked_faces"] = json!([0]);
    let f = write(dir.path(), "marked.json", &marked);
    assert_eq!(flowcob(&["reduce", s(&f)]).status.code(), Some(1));
}

#[test]
fn torus_word_example() {
    let o = flowcob(&["torus-word", "--target", "0,1;-1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["product"], json!([[0, 1], [-1, 0]]));
    assert_eq!(v["verified"], json!(true));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "[1, 2").unwrap();
    assert_eq!(flowcob(&["validate", s(&junk)]).status.code(), Some(2));
    assert_eq!(flowcob(&["census", "--genus", "0", "--max-edges", "9"]).status.code(), Some(2));
    assert_eq!(flowcob(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(flowcob(&["torus-word", "--target", "2,0;0,1"]).status.code(), Some(1));
}

#[test]
fn failed_command_leaves_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "field.json", &good_field());
    let out = dir.path().join("never.json");
    // a field graph is not a skeleton
    assert_eq!(flowcob(&["reconstruct", s(&f), "--out", s(&out)]).status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn derive_reconstruct_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "field.json", &good_field());
    let sk = dir.path().join("sk.json");
    assert_eq!(flowcob(&["derive", s(&f), "--out", s(&sk)]).status.code(), Some(0));
    let inv = stdout_json(&flowcob(&["invariants", s(&sk)]));
    assert_eq!((inv["V"].as_u64(), inv["E"].as_u64(), inv["F"].as_u64()), (Some(1), Some(1), Some(2)));
    let fg = dir.path().join("fg.json");
    assert_eq!(flowcob(&["reconstruct", s(&sk), "--out", s(&fg)]).status.code(), Some(0));
    // field graphs are not skeletons; compare their derived skeletons instead
    assert_eq!(flowcob(&["iso", s(&f), s(&fg)]).status.code(), Some(2));
    let sk2 = dir.path().join("sk2.json");
    flowcob(&["derive", s(&fg), "--out", s(&sk2)]);
    assert_eq!(stdout_json(&flowcob(&["iso", s(&sk), s(&sk2)]))["isomorphic"], json!(true));
    let src = stdout_json(&flowcob(&["derive", s(&f), "--role", "source"]));
    assert_eq!(src["role"], json!("source_skeleton"));
    let d = dir.path().join("dual.json");
    flowcob(&["dual", s(&sk), "--out", s(&d)]);
    let srcf = write(dir.path(), "src.json", &src);
    assert_eq!(stdout_json(&flowcob(&["iso", s(&d), s(&srcf)]))["isomorphic"], json!(true));
}

#[test]
fn census_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = flowcob(&[
        "census", "--genus", "0", "--max-edges", "3", "--jobs", "2", "--out", s(&out),
        "--counterexample-dir", s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["total_instances"], json!(1 + 2 + 4 + 14));
    assert_eq!(v["cobordism_classes"], json!(1));
    let again = dir.path().join("again.json");
    flowcob(&["census", "--genus", "0", "--max-edges", "3", "--out", s(&again)]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn reduce_periodic_command() {
    let dir = tempfile::tempdir().unwrap();
    let point = json!({"n_darts": 0, "isolated_vertices": 1, "alpha": [], "sigma": [], "marked_vertices": [0]});
    let p = json!({
        "surface_genus": 0,
        "orbits": [{"id": 0, "polarity": "attracting"}],
        "regions": [
            {"id": 0, "genus": 0, "closed_field": point, "orbit_marks": {"0": "vertex 0"}},
            {"id": 1, "genus": 0, "closed_field": point, "orbit_marks": {"0": "vertex 0"}}
        ]
    });
    let f = write(dir.path(), "p.json", &p);
    let t = dir.path().join("p.jsonl");
    let o = flowcob(&["reduce-periodic", s(&f), "--trace", s(&t)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["swallows"], json!(1));
    assert!(std::fs::read_to_string(&t).unwrap().contains("\"swallow\""));
    let mut broken = p.clone();
    broken["regions"][1]["orbit_marks"] = json!({"0": "face 0"});
    let f = write(dir.path(), "broken.json", &broken);
    let o = flowcob(&["reduce-periodic", s(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["valid"], json!(false));
}

// ---- DOT output ----

/// Grammar check for the DOT subset we emit:
/// `digraph ID { (node_stmt | edge_stmt) ; ... }` with `ID [a=v, ...]`
/// attribute lists, IDs alphanumeric or double-quoted.
fn validate_dot(text: &str) -> Result<(), String> {
    let t = text.trim();
    let body = t
        .strip_prefix("digraph")
        .ok_or("missing digraph")?
        .trim_start();
    let (name, rest) = body.split_once('{').ok_or("missing {")?;
    if !is_id(name.trim()) {
        return Err(format!("bad graph id {name:?}"));
    }
    let inner = rest.strip_suffix('}').ok_or("missing }")?;
    for stmt in split_statements(inner)? {
        let stmt = stmt.trim();
        if stmt.is_empty() {
            continue;
        }
        let (head, attrs) = match stmt.find('[') {
            Some(i) => {
                let a = stmt[i..].strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or("bad attr list")?;
                (&stmt[..i], Some(a))
            }
            None => (stmt, None),
        };
        let ids: Vec<&str> = head.split("->").map(str::trim).collect();
        if ids.is_empty() || ids.len() > 2 || !ids.iter().all(|i| is_id(i)) {
            return Err(format!("bad statement {stmt:?}"));
        }
        if let Some(a) = attrs {
            for pair in split_top(a, ',') {
                let (k, v) = pair.split_once('=').ok_or(format!("bad attr {pair:?}"))?;
                if !is_id(k.trim()) || !is_id(v.trim()) {
                    return Err(format!("bad attr {pair:?}"));
                }
            }
        }
    }
    Ok(())
}

fn is_id(s: &str) -> bool {
    if let Some(q) = s.strip_prefix('"').and_then(|x| x.strip_suffix('"')) {
        return !q.contains('"');
    }
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut quoted, mut start) = (false, 0);
    for (i, c) in s.char_indices() {
        if c == '"' {
            quoted = !quoted;
        } else if c == sep && !quoted {
            out.push(&s[start..i]);
            start = i + 1;
        }
    }
    out.push(&s[start..]);
    out
}

fn split_statements(s: &str) -> Result<Vec<&str>, String> {
    if s.matches('"').count() % 2 == 1 {
        return Err("unbalanced quotes".into());
    }
    Ok(split_top(s, ';'))
}

#[test]
fn dot_validator_rejects_garbage() {
    assert!(validate_dot("digraph g { a -> b [label=\"x\"]; }").is_ok());
    assert!(validate_dot("graph g { a -- b; }").is_err());
    assert!(validate_dot("digraph g { a -> ; }").is_err());
    assert!(validate_dot("digraph g { a [shape=]; }").is_err());
    assert!(validate_dot("digraph g { a [label=\"x]; }").is_err());
}

#[test]
fn dot_outputs_are_valid() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "field.json", &good_field());
    let dot = String::from_utf8(flowcob(&["dot", s(&f)]).stdout).unwrap();
    validate_dot(&dot).unwrap();
    assert!(dot.contains("shape=invtriangle") && dot.contains("shape=diamond") && dot.contains("shape=triangle"));
    let mut marked = loop_sphere();
    marked["marked_vertices"] = json!([0]);
    let f = write(dir.path(), "sk.json", &marked);
    let dot = String::from_utf8(flowcob(&["dot", s(&f)]).stdout).unwrap();
    validate_dot(&dot).unwrap();
    assert!(dot.contains("peripheries=2"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Files the CLI emits parse back to equal values, and DOT stays valid.
    #[test]
    fn emitted_files_round_trip(seed in any::<u64>(), edges in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sk = SkeletonMap::sink(common::random_map(&mut rng, edges));
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "sk.json", &serde_json::to_value(SkeletonFile::from(&sk)).unwrap());

        let fg_out = dir.path().join("fg.json");
        prop_assert_eq!(flowcob(&["reconstruct", s(&f), "--out", s(&fg_out)]).status.code(), Some(0));
        let text = std::fs::read_to_string(&fg_out).unwrap();
        let file: FieldGraphFile = serde_json::from_str(&text).unwrap();
        let fg = file.to_field_graph().unwrap();
        prop_assert_eq!(&FieldGraphFile::from(&fg), &file);

        let sk_out = dir.path().join("sk2.json");
        prop_assert_eq!(flowcob(&["derive", s(&fg_out), "--out", s(&sk_out)]).status.code(), Some(0));
        let file: SkeletonFile = serde_json::from_str(&std::fs::read_to_string(&sk_out).unwrap()).unwrap();
        let back = file.to_skeleton().unwrap();
        prop_assert_eq!(&SkeletonFile::from(&back), &file);

        let dot = String::from_utf8(flowcob(&["dot", s(&fg_out)]).stdout).unwrap();
        prop_assert!(validate_dot(&dot).is_ok(), "{}", dot);
        let dot = String::from_utf8(flowcob(&["dot", s(&sk_out)]).stdout).unwrap();
        prop_assert!(validate_dot(&dot).is_ok(), "{}", dot);
    }
}
