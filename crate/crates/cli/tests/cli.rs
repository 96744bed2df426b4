use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn bcidx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcidx")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn normalize_redex() {
    let o = bcidx(&["normalize", path(&fixture("redex.term"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "n.a");
}

#[test]
fn check_fixture_proofs() {
    for f in ["proof_base.bcp", "proof_example.bcp", "nsl.bcp", "cca_trans.bcp"] {
        let o = bcidx(&["check", path(&fixture(f))]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stdout(&o));
        assert_eq!(stdout(&o).trim(), "accept");
    }
}

#[test]
fn search_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.bcp");
    let o = bcidx(&["search", path(&fixture("goal_csintro.goal")), "--max-depth", "6", "--emit", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = bcidx(&["check", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn search_with_hints_file() {
    let dir = tempfile::tempdir().unwrap();
    let hints = dir.path().join("hints.term");
    let hint_src: String = bcidx_core::fixtures::proof_example_hints().iter().map(|t| format!("{t}\n")).collect();
    std::fs::write(&hints, hint_src).unwrap();
    let out = dir.path().join("out.bcp");
    let o = bcidx(&[
        "search",
        path(&fixture("goal_proof_example.goal")),
        "--max-depth",
        "14",
        "--hints",
        hints.to_str().unwrap(),
        "--emit",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(bcidx(&["check", out.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn text_and_json_verdicts_agree() {
    let mut files: Vec<_> = std::fs::read_dir(fixture("mutations")).unwrap().map(|e| e.unwrap().path()).collect();
    files.push(fixture("proof_example.bcp"));
    for f in &files {
        let text = bcidx(&["check", path(f)]);
        let json = bcidx(&["check", path(f), "--format", "json"]);
        assert_eq!(text.status.code(), json.status.code());
        let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
        let verdict = v["verdict"].as_str().unwrap();
        assert!(stdout(&text).starts_with(verdict), "{}", f.display());
        if verdict == "reject" {
            assert_eq!(text.status.code(), Some(1));
            let src = std::fs::read_to_string(f).unwrap();
            assert_eq!(v["failure"].as_str(), bcidx_core::fixtures::expected_category(&src));
            assert!(v["path"].is_array() && v["rule"].is_string() && v["message"].is_string());
        }
    }
}

#[test]
fn not_found_exits_one() {
    let o = bcidx(&["search", path(&fixture("goal_proof_example.goal")), "--max-depth", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"], "not-found");
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.term");
    std::fs::write(&bad, "(fst (pair n.a").unwrap();
    for cmd in ["normalize", "check", "length"] {
        assert_eq!(bcidx(&[cmd, bad.to_str().unwrap()]).status.code(), Some(2), "{cmd}");
    }
    assert_eq!(bcidx(&["check", "/nonexistent.bcp"]).status.code(), Some(2));
}

#[test]
fn restr_elim_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let mut g = bcidx_core::gen::Gen::new(11);
    let d = g.proof_with_restr(6);
    let decls = bcidx_core::format::Decls { sig: g.signature(), lengths: g.lengths() };
    let input = dir.path().join("in.bcp");
    std::fs::write(&input, bcidx_core::format::render_proof_file(&decls, &d)).unwrap();
    assert_eq!(bcidx(&["check", input.to_str().unwrap()]).status.code(), Some(0));
    let out = dir.path().join("out.bcp");
    let o = bcidx(&["restr-elim", input.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let src = std::fs::read_to_string(&out).unwrap();
    assert!(!src.contains("(restr"));
    assert_eq!(bcidx(&["check", out.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn lengths_and_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("l.term");
    std::fs::write(&f, "(decl-adv g 0)\nn.a\n(pair n.a n.b)\n(ite (adv g) n.a (pair n.a n.b))\n").unwrap();
    let o = bcidx(&["length", f.to_str().unwrap()]);
    assert_eq!(stdout(&o), "(+ (* 1 l_eta))\n(+ (* 2 l_eta) (* 1 l_pair))\nundefined\n");
    let o = bcidx(&["candidates", path(&fixture("goal_proof_example.goal"))]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    for h in bcidx_core::fixtures::proof_example_hints() {
        assert!(lines.contains(&h.to_string()), "{h}");
    }
}

#[test]
fn deterministic_output() {
    let goal = fixture("goal_csintro.goal");
    let args = ["search", path(&goal), "--max-depth", "6"];
    assert_eq!(stdout(&bcidx(&args)), stdout(&bcidx(&args)));
}
