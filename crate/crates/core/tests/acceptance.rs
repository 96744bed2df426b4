//! Acceptance criteria, one line each. Exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use bcidx_core::cca::{complete_instance, verify_cca_instance};
use bcidx_core::fixtures::{expected_category, proof_example_hints};
use bcidx_core::format::{parse_goal_file, parse_proof_file, Decls};
use bcidx_core::gen::Gen;
use bcidx_core::length::{eql, length_of, LengthExpr};
use bcidx_core::proof::{check_proof, eliminate_restr, ProofVerdict};
use bcidx_core::rewrite::{approx_conds, approx_leaves, decompose, normalize, reduce_with, rewrite_step, Strategy};
use bcidx_core::search::{candidates_of, search, search_with_hints, SearchBudget};
use bcidx_core::term::order::CanonicalOrder;
use bcidx_core::term::{Kind, Symbol, Term};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn read(rel: &str) -> String {
    fs::read_to_string(fixtures_dir().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

/// Random terms of size at most `max`, from consecutive seeds.
fn terms(count: usize, max: usize, salt: u64) -> Vec<Term> {
    let mut out = Vec::new();
    let mut seed = salt;
    while out.len() < count {
        let t = Gen::new(seed).any_term(max);
        seed += 1;
        if t.size() <= max {
            out.push(t);
        }
    }
    out
}

fn c1_fixtures() -> Outcome {
    let start = Instant::now();
    let o = CanonicalOrder::default();
    let mut bad = Vec::new();
    for name in ["proof_base", "nsl", "proof_example"] {
        let (d, der) = parse_proof_file(&read(&format!("{name}.bcp"))).unwrap();
        if !check_proof(&der, &o, &d.lengths).is_accept() {
            bad.push(format!("{name} rejected"));
        }
    }
    let mut rejected = 0;
    let mut entries: Vec<_> = fs::read_dir(fixtures_dir().join("mutations")).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for p in &entries {
        let src = fs::read_to_string(p).unwrap();
        let want = expected_category(&src).unwrap_or("?").to_string();
        let (d, der) = parse_proof_file(&src).unwrap();
        match check_proof(&der, &o, &d.lengths) {
            ProofVerdict::Reject { error, .. } if error.kind.name() == want => rejected += 1,
            v => bad.push(format!("{}: wanted {want}, got {v:?}", p.display())),
        }
    }
    let t = start.elapsed();
    let pass = bad.is_empty() && entries.len() == 10 && t < Duration::from_secs(5);
    outcome(pass, format!("3 proofs checked, {rejected}/{} mutations rejected as expected, {:.2}s {}", entries.len(), t.as_secs_f64(), bad.join("; ")))
}

fn c2_confluence() -> Outcome {
    let start = Instant::now();
    let o = CanonicalOrder::default();
    let ts = terms(500, 40, 1_000);
    let (mut agree, mut max_steps) = (0, 0);
    for t in &ts {
        let a = reduce_with(t, Strategy::LeftmostInnermost, &o, 1_000_000);
        let b = reduce_with(t, Strategy::RightmostOutermost, &o, 1_000_000);
        if let (Ok((a, sa)), Ok((b, sb))) = (a, b) {
            max_steps = max_steps.max(sa).max(sb);
            agree += usize::from(a == b);
        }
    }
    let t = start.elapsed();
    outcome(agree == ts.len() && t < Duration::from_secs(60), format!("{agree}/{} agree, max {max_steps} steps, {:.2}s", ts.len(), t.as_secs_f64()))
}

fn c3_order_robust() -> Outcome {
    let (a, b) = (CanonicalOrder::default(), CanonicalOrder::reversed());
    let ts = terms(200, 30, 2_000);
    let same = ts
        .iter()
        .filter(|t| {
            let x = decompose(&normalize(t, &a).unwrap()).unwrap();
            let y = decompose(&normalize(t, &b).unwrap()).unwrap();
            x.conds == y.conds && x.leaves == y.leaves
        })
        .count();
    outcome(same == ts.len(), format!("{same}/{} identical conds and leaves", ts.len()))
}

fn c4_approx() -> Outcome {
    let o = CanonicalOrder::default();
    let ts = terms(200, 20, 3_000);
    let (mut ok, mut steps) = (0, 0);
    for t in &ts {
        let (l, c) = (approx_leaves(t, &o).unwrap(), approx_conds(t, &o).unwrap());
        let mut good = true;
        for (_, _, s) in rewrite_step(t, &o) {
            steps += 1;
            good &= approx_leaves(&s, &o).unwrap().is_subset(&l) && approx_conds(&s, &o).unwrap().is_subset(&c);
        }
        let nf = normalize(t, &o).unwrap();
        let d = decompose(&nf).unwrap();
        good &= approx_leaves(&nf, &o).unwrap() == d.leaves && approx_conds(&nf, &o).unwrap() == d.conds;
        ok += usize::from(good);
    }
    outcome(ok == ts.len(), format!("{ok}/{} terms ({steps} single steps)", ts.len()))
}

fn c5_restr() -> Outcome {
    let o = CanonicalOrder::default();
    let mut ok = 0;
    for i in 0..100u64 {
        let mut g = Gen::new(5_000 + i);
        let d = g.proof_with_restr(1 + (i as usize % 10));
        let good = match eliminate_restr(&d) {
            Ok(e) => {
                e.count_rule("restr") == 0
                    && e.height() <= d.height()
                    && e.conclusion == d.conclusion
                    && check_proof(&e, &o, &g.lengths()).is_accept()
            }
            Err(_) => false,
        };
        ok += usize::from(good);
    }
    outcome(ok == 100, format!("{ok}/100 proofs"))
}

fn c6_completion() -> Outcome {
    let mut ok = 0;
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let mut g = Gen::new(6_000 + i);
        let (weak, st) = g.weakened_instance();
        if let Ok((full, st2)) = complete_instance(&weak, &st) {
            let added = full.size() - weak.size();
            let bound = weak.size() * weak.size();
            worst = worst.max(added as f64 / bound as f64);
            ok += usize::from(verify_cca_instance(&full, &st2, &g.lengths()).is_accept() && added <= bound);
        }
    }
    outcome(ok == 50, format!("{ok}/50 instances, largest added/bound ratio {worst:.3}"))
}

fn c7_candidates() -> Outcome {
    let o = CanonicalOrder::default();
    let (mut ok, mut seen, mut seed) = (0, 0, 7_000);
    let mut largest = 0;
    while seen < 100 {
        let t = Gen::new(seed).term(12);
        seed += 1;
        let n = normalize(&t, &o).unwrap().size();
        if !(2..=16).contains(&n) {
            continue;
        }
        seen += 1;
        let b = candidates_of(&t, &o, 1 << 20).unwrap();
        largest = largest.max(b.len());
        ok += usize::from(b.len() <= n * n * (1 << n) && b.max_member_size() <= 2 * n);
    }
    outcome(ok == seen, format!("{ok}/{seen} goals, largest |B| = {largest}"))
}

fn c8_search() -> Outcome {
    let o = CanonicalOrder::default();
    let mut notes = Vec::new();
    let (d, goal) = parse_goal_file(&read("goal_csintro.goal")).unwrap();
    let start = Instant::now();
    let b = SearchBudget { max_depth: 6, ..Default::default() };
    let base_ok = match search(&goal, &b, &o, &d.lengths) {
        Ok(r) => {
            let t = start.elapsed();
            notes.push(format!("base height {} in {:.2}s", r.proof.height(), t.as_secs_f64()));
            check_proof(&r.proof, &o, &d.lengths).is_accept() && t < Duration::from_secs(1)
        }
        Err(e) => {
            notes.push(format!("base: {e}"));
            false
        }
    };
    let (d, goal): (Decls, _) = parse_goal_file(&read("goal_proof_example.goal")).unwrap();
    let start = Instant::now();
    let b = SearchBudget { max_depth: 14, timeout: Duration::from_secs(120), ..Default::default() };
    let ex_ok = match search_with_hints(&goal, &b, &o, &d.lengths, &proof_example_hints()) {
        Ok(r) => {
            let t = start.elapsed();
            notes.push(format!("example height {} in {:.2}s", r.proof.height(), t.as_secs_f64()));
            check_proof(&r.proof, &o, &d.lengths).is_accept() && t < Duration::from_secs(120)
        }
        Err(e) => {
            notes.push(format!("example: {e}"));
            false
        }
    };
    outcome(base_ok && ex_ok, notes.join(", "))
}

/// Lengths by the block-cipher rules, written independently of the
/// library: coefficient maps over the length constants.
fn oracle_length(t: &Term, blocks: &[&str], fixed: &BTreeMap<&str, BTreeMap<String, u64>>) -> Option<BTreeMap<String, u64>> {
    let one = |c: &str, k: u64| BTreeMap::from([(c.to_string(), k)]);
    let add = |mut a: BTreeMap<String, u64>, b: &BTreeMap<String, u64>| {
        for (k, v) in b {
            *a.entry(k.clone()).or_insert(0) += v;
        }
        a
    };
    match t.kind() {
        Kind::Name(n) if blocks.contains(&&**n) => Some(one("l_block", 1)),
        Kind::Name(_) => Some(one("l_eta", 1)),
        Kind::App(s, a) => match s {
            Symbol::Pair => Some(add(add(oracle_length(&a[0], blocks, fixed)?, &oracle_length(&a[1], blocks, fixed)?), &one("l_pair", 1))),
            Symbol::Enc => {
                let b = oracle_length(&a[0], blocks, fixed)?;
                let k = *b.get("l_block")?;
                (b.len() == 1).then(|| add(one("l_eblock", k), &one("l_enc", 1)))
            }
            Symbol::Dec => {
                let c = oracle_length(&a[0], blocks, fixed)?;
                let k = *c.get("l_eblock")?;
                (c.len() == 2 && c.get("l_enc") == Some(&1)).then(|| one("l_block", k))
            }
            Symbol::Ite => {
                let (x, y) = (oracle_length(&a[1], blocks, fixed)?, oracle_length(&a[2], blocks, fixed)?);
                (x == y).then_some(x)
            }
            Symbol::Zero => oracle_length(&a[0], blocks, fixed),
            Symbol::Adv(g) => fixed.get(g.name()).cloned(),
            _ => None,
        },
    }
}

/// A term that usually has a defined length.
fn sized(g: &mut Gen) -> Term {
    use rand::Rng;
    let c = Term::adv(g.symbols()[3], vec![]);
    let name = |g: &mut Gen| Term::name(["a", "b", "m"][g.rng().gen_range(0..3)]);
    match g.rng().gen_range(0..5) {
        0 => name(g),
        1 => c,
        2 => Term::pair(name(g), name(g)),
        3 => Term::enc(name(g), Term::pk(Term::name("k")), Term::name("r")),
        _ => g.term(4),
    }
}

fn c9_length() -> Outcome {
    let d = Decls::parse(
        "(decl-adv g 0) (decl-len-zero c1 (+ (* 1 l_block))) (decl-len-zero c3 (+ (* 3 l_block))) (decl-len-pad pad (+ (* 1 l_block)))",
    )
    .unwrap();
    let len = |s: &str| length_of(&d.term(s).unwrap(), &d.lengths);
    let e = |pairs: &[(&str, u64)]| pairs.iter().fold(LengthExpr::default(), |acc, (c, k)| acc.plus(&LengthExpr::scaled(c, *k)));
    let cases: Vec<(&str, Option<LengthExpr>)> = vec![
        ("n.a", Some(e(&[("l_eta", 1)]))),
        ("(pair n.a n.b)", Some(e(&[("l_eta", 2), ("l_pair", 1)]))),
        ("(adv pad (pair n.a n.b))", Some(e(&[("l_block", 1)]))),
        ("(enc (adv c1) (pk n.k) n.r)", Some(e(&[("l_eblock", 1), ("l_enc", 1)]))),
        ("(enc (adv c3) (pk n.k) n.r)", Some(e(&[("l_eblock", 3), ("l_enc", 1)]))),
        ("(dec (enc (adv c3) (pk n.k) n.r) (sk n.k))", Some(e(&[("l_block", 3)]))),
        ("(enc n.a (pk n.k) n.r)", None),
        ("(ite (adv g) n.a n.b)", Some(e(&[("l_eta", 1)]))),
        ("(ite (adv g) n.a (pair n.a n.b))", None),
    ];
    let exact = cases.iter().filter(|(s, want)| &len(s) == want).count();
    // Branch invariance on random conditionals, checked against the oracle.
    let fixed = BTreeMap::from([("c", BTreeMap::from([("l_block".to_string(), 1u64)]))]);
    let blocks = ["a", "b", "c", "d", "e", "m"];
    let mut lengths = Gen::new(0).lengths();
    lengths.set_constant_length("c", LengthExpr::constant("l_block"));
    let (mut inv, mut defined) = (0, 0);
    for i in 0..200u64 {
        let mut g = Gen::new(9_000 + i);
        let b = g.condition(3);
        let (u, v, t) = (sized(&mut g), sized(&mut g), sized(&mut g));
        let ite = Term::ite(b, u.clone(), v.clone());
        let lib = eql(&ite, &t, &lengths);
        let oracle = matches!((oracle_length(&ite, &blocks, &fixed), oracle_length(&t, &blocks, &fixed)), (Some(a), Some(b)) if a == b);
        defined += usize::from(lib);
        let implies = !lib || (eql(&u, &t, &lengths) && eql(&v, &t, &lengths));
        inv += usize::from(implies && lib == oracle && length_of(&ite, &lengths).is_some() == oracle_length(&ite, &blocks, &fixed).is_some());
    }
    outcome(exact == cases.len() && inv == 200, format!("{exact}/{} examples exact, {inv}/200 random instances ({defined} length-equal)", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("fixture proofs and mutations", c1_fixtures),
        ("TRS confluence and termination", c2_confluence),
        ("order robustness", c3_order_robust),
        ("over-approximation", c4_approx),
        ("Restr elimination", c5_restr),
        ("CCA completion bound", c6_completion),
        ("candidate bound", c7_candidates),
        ("search soundness and smoke", c8_search),
        ("length suite", c9_length),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += usize::from(!o.pass);
        println!("{} {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail.trim_end());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
