use std::io::Write;
use std::process::{Command, Output};

use biint_core::emit::validate_derivation_json;
use biint_core::semantics::KripkeModel;

fn biint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn prove_valid_exits_zero() {
    let o = biint(&["prove", "p -> (q | (r -> ((p -< q) & r)))"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("VALID"));
}

#[test]
fn prove_invalid_emits_two_world_model() {
    let o = biint(&["prove", "p | (p -> false)", "--emit", "json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "invalid");
    let model = KripkeModel::from_json(&v["model"].to_string()).unwrap();
    assert_eq!(model.len(), 2);
    validate_derivation_json(&v["derivation"].to_string()).unwrap();
}

#[test]
fn parse_error_exits_two() {
    let o = biint(&["prove", "p ->"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:5"));
    assert_eq!(code(&biint(&["prove", "p -> q -< r"])), 2);
    assert_eq!(code(&biint(&["prove", "p", "--sequent"])), 2);
    assert_eq!(code(&biint(&["prove"])), 2);
}

#[test]
fn budget_exhaustion_exits_three() {
    let o = biint(&["prove", "p -> (q | (r -> ((p -< q) & r)))", "--budget", "2"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn check_model_round_trip() {
    let o = biint(&["prove", "p | (p -> false)", "--emit", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let point = v["point"].to_string();
    let file = temp_file(&v["model"].to_string());
    let path = file.path().to_str().unwrap();
    let ok = biint(&["check-model", path, "p | (p->false)", "--point", &point]);
    assert_eq!(code(&ok), 0);
    let no = biint(&["check-model", path, "p |- p", "--point", &point]);
    assert_eq!(code(&no), 1);
}

#[test]
fn check_model_rejects_bad_input() {
    let bad =
        temp_file(r#"{"worlds":[{"id":0,"atoms":["p"]},{"id":1,"atoms":[]}],"edges":[[0,1]]}"#);
    let o = biint(&[
        "check-model",
        bad.path().to_str().unwrap(),
        "p",
        "--point",
        "0",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("successor"));
    let junk = temp_file("{\"worlds\": 3}");
    assert_eq!(
        code(&biint(&[
            "check-model",
            junk.path().to_str().unwrap(),
            "p",
            "--point",
            "0"
        ])),
        2
    );
    let model = temp_file(r#"{"worlds":[{"id":0,"atoms":[]}],"edges":[]}"#);
    assert_eq!(
        code(&biint(&[
            "check-model",
            model.path().to_str().unwrap(),
            "p",
            "--point",
            "7"
        ])),
        2
    );
}

#[test]
fn emit_formats() {
    let dot = stdout(&biint(&["prove", "p | !p", "--emit", "dot"]));
    assert!(dot.starts_with("digraph model"));
    let tex = stdout(&biint(&["prove", "|- p -> q, q", "--emit", "latex"]));
    assert!(tex.contains("\\begin{tikzpicture}"));
    let tex = stdout(&biint(&["prove", "p -> p", "--emit", "latex"]));
    assert!(tex.contains("\\begin{prooftree}"));
    let dot = stdout(&biint(&["prove", "p -> p", "--emit", "dot"]));
    assert!(dot.starts_with("digraph derivation"));
}

#[test]
fn trace_shows_alternatives_and_vars() {
    let o = biint(&[
        "prove",
        "|- p, (((true -< p) & (true -< q)) -> false) -> false",
        "--trace",
    ]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("BigAndR"));
    assert!(out.contains("P={{"));
    assert!(out.contains("model graph:"));
}

#[test]
fn replay_mutation_flag() {
    let o = biint(&[
        "prove",
        "p -> (q | (r -> ((p -< q) & r)))",
        "--trace",
        "--mutation",
        "and-r-drops-principal",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("P={{p -< q}}"));
}

#[test]
fn fuzz_small_and_mutated() {
    let o = biint(&["fuzz", "--atoms", "1", "--size", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 failures"));
    let o = biint(&[
        "fuzz",
        "--atoms",
        "1",
        "--size",
        "3",
        "--mutation",
        "or-l-drops-second-premise",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn bench_corpora() {
    let sanity = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/data/sanity.txt");
    let o = biint(&["bench", sanity, "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("0 mismatches"));

    let empty = temp_file("");
    let o = biint(&["bench", empty.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 items"));

    let wrong = temp_file("VALID: p | !p\n");
    let o = biint(&["bench", wrong.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("MISMATCH"));
}
