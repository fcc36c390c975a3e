use std::process::Command;

use serde_json::Value;

fn provar(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_provar")).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = if stdout.trim().is_empty() { Value::Null } else { serde_json::from_str(&stdout).expect("one JSON object") };
    (out.status.code().unwrap_or(-1), value, String::from_utf8(out.stderr).unwrap())
}

#[test]
fn a4_is_not_in_u() {
    let (code, v, _) = provar(&["is-in-u", "--group", r#"{"degree":4,"generators":[[2,1,4,3],[2,3,1,4]]}"#]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], false);
    assert_eq!(v["supersolvable"], false);
}

#[test]
fn closure_of_a4_in_c6() {
    let (code, v, _) = provar(&["closure", "--p", "3", "--d", "2", "--rank", "1", "--gens", "aaaa"]);
    assert_eq!(code, 0);
    assert_eq!(v["index"], 2);
    assert_eq!(v["basis"], serde_json::json!(["aa"]));
    // the emitted automaton re-imports to the same canonical form
    let (code, again, _) = provar(&["stallings", "--automaton", &v["automaton"].to_string()]);
    assert_eq!(code, 0);
    assert_eq!(again["automaton"], v["automaton"]);
}

#[test]
fn commutator_witness() {
    let (code, v, _) = provar(&["metab-witness", "--word", "abAB"]);
    assert_eq!(code, 0);
    assert_eq!((v["p"].clone(), v["q"].clone(), v["image"].clone()), (3.into(), 2.into(), "x^2".into()));
    assert_eq!(v["verified"], true);
}

#[test]
fn bs_commands() {
    let (_, v, _) = provar(&["bs-eval", "--word", "Bab", "--q", "2"]);
    assert_eq!((v["m"].clone(), v["s"].clone(), v["j"].clone()), ("1".into(), 1.into(), 0.into()));
    let (code, v, _) = provar(&["bs-witness", "--word", "abA", "--q", "2"]);
    assert_eq!(code, 0);
    assert_eq!((v["p"].clone(), v["image"].clone()), (3.into(), "x^2 y".into()));
    let (code, _, err) = provar(&["bs-witness", "--word", "baBAA", "--q", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("identity"));
}

#[test]
fn exit_codes() {
    assert_eq!(provar(&["no-such-command"]).0, 2);
    assert_eq!(provar(&["gpd", "--p", "7", "--d", "4"]).0, 2);
    assert_eq!(provar(&["stallings", "--gens", "a?"]).0, 2);
    assert_eq!(provar(&["free-object", "--n", "2", "--p", "5", "--d", "4", "--cap", "10", "--dot", "/dev/null"]).0, 3);
    assert_eq!(provar(&["find-pr-prime", "--q", "2", "--lower", "8", "--cap", "2"]).0, 3);
}

#[test]
fn dot_output() {
    let dir = std::env::temp_dir().join(format!("provar-dot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("h.dot");
    let (code, _, _) = provar(&["intersect", "--gens", "aa", "--other", "aaa", "--dot", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph") && dot.contains("doublecircle"));
    assert_eq!(dot.matches("->").count(), 6);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn u_closedness_of_cayley_graphs() {
    // right regular representation of S3 on 6 points
    let s3 = r#"{"degree":6,"generators":[[2,1,5,6,3,4],[3,4,1,2,6,5]]}"#;
    let (_, v, _) = provar(&["supersolvable", "--group", s3]);
    assert_eq!(v["order"], 6);
    let (code, v, _) = provar(&["is-u-closed", "--action", s3]);
    assert_eq!(code, 0);
    assert_eq!((v["index"].clone(), v["u_closed"].clone()), (6.into(), true.into()));
    let (_, v, _) = provar(&["cl-u", "--action", s3]);
    assert_eq!(v["strictly_contains_input"], false);
}

#[test]
fn number_theory_commands() {
    let (_, v, _) = provar(&["q-sets", "--p", "5", "--d", "4"]);
    assert_eq!(v["q_prime"], serde_json::json!([2, 3]));
    let (_, v, _) = provar(&["find-pr-prime", "--q", "3", "--lower", "3"]);
    assert_eq!(v["p"], 5);
    let (_, v, _) = provar(&["gpd-iso", "--p", "5", "--d", "4", "--q", "2", "--r", "3"]);
    assert_eq!((v["m"].clone(), v["k"].clone()), (3.into(), 3.into()));
}

#[test]
fn decomposition_and_presentation() {
    let (_, v, _) = provar(&["decompose", "--p", "3", "--d", "2", "--orders", "2", "--q", "[[2],[2]]"]);
    assert_eq!(v["group_order"], 18);
    assert_eq!(v["injective"], true);
    let (code, v, _) =
        provar(&["action-to-presentation", "--p", "3", "--d", "2", "--matrix", "[[2,0],[0,2]]", "--orders", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["q"], serde_json::json!([[2], [2]]));
}
