use std::fs;
use std::path::PathBuf;

use bcidx_core::fixtures::{expected_category, files};
use bcidx_core::format::{parse_goal_file, parse_proof_file};
use bcidx_core::proof::{check_proof, ProofVerdict};
use bcidx_core::term::order::CanonicalOrder;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn files_match_builders() {
    let bless = std::env::var_os("BCIDX_BLESS").is_some();
    for (rel, content) in files() {
        let path = dir().join(&rel);
        if bless {
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(&path, &content).unwrap();
            continue;
        }
        let on_disk = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{rel}: {e} (run with BCIDX_BLESS=1)"));
        assert_eq!(on_disk, content, "{rel} is stale (run with BCIDX_BLESS=1)");
    }
}

#[test]
fn proofs_on_disk_check() {
    let order = CanonicalOrder::default();
    for name in ["proof_base", "proof_example", "nsl", "cca_trans"] {
        let src = fs::read_to_string(dir().join(format!("{name}.bcp"))).unwrap();
        let (d, der) = parse_proof_file(&src).unwrap();
        let v = check_proof(&der, &order, &d.lengths);
        assert!(v.is_accept(), "{name}: {v:?}");
    }
    for name in ["goal_csintro", "goal_proof_example", "goal_nsl"] {
        parse_goal_file(&fs::read_to_string(dir().join(format!("{name}.goal"))).unwrap()).unwrap();
    }
}

#[test]
fn mutations_on_disk_rejected() {
    let order = CanonicalOrder::default();
    let mut seen = 0;
    for e in fs::read_dir(dir().join("mutations")).unwrap() {
        let path = e.unwrap().path();
        let src = fs::read_to_string(&path).unwrap();
        let want = expected_category(&src).expect("expect line");
        let (d, der) = parse_proof_file(&src).unwrap();
        match check_proof(&der, &order, &d.lengths) {
            ProofVerdict::Reject { error, .. } => assert_eq!(error.kind.name(), want, "{}", path.display()),
            ProofVerdict::Accept => panic!("{} accepted", path.display()),
        }
        seen += 1;
    }
    assert_eq!(seen, 10);
}
