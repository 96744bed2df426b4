use super::*;
use crate::fixtures;
use crate::term::{AdvSymbol, Sort};

fn n(x: &str) -> Term {
    Term::name(x)
}

fn order() -> CanonicalOrder {
    CanonicalOrder::default()
}

fn budget(d: usize) -> SearchBudget {
    SearchBudget { max_depth: d, timeout: Duration::from_secs(30), ..Default::default() }
}

#[test]
fn identical_sides_close_by_refl() {
    let s = Sequent::new(vec![n("n")], vec![n("n")]);
    let r = search(&s, &budget(3), &order(), &LengthDecls::new()).unwrap();
    assert_eq!(r.proof.rule.name(), "refl");
    assert_eq!(r.proof.height(), 1);
}

#[test]
fn distinguishable_goal_not_found() {
    let s = Sequent::new(vec![n("n0")], vec![Term::pair(n("n0"), n("n0"))]);
    assert!(matches!(search(&s, &budget(4), &order(), &LengthDecls::new()), Err(SearchError::NotFound(_))));
}

#[test]
fn equal_names_needs_distinct_sides() {
    let s = Sequent::new(vec![n("a"), n("a")], vec![n("b"), n("c")]);
    assert!(search(&s, &budget(4), &order(), &LengthDecls::new()).is_err());
}

#[test]
fn proof_base_found() {
    let (d, goal) = fixtures::proof_base_goal();
    let r = search(&goal, &budget(6), &order(), &d.lengths).unwrap();
    assert!(check_proof(&r.proof, &order(), &d.lengths).is_accept());
    assert_eq!(r.proof.count_rule("cs"), 1);
}

#[test]
fn proof_example_found() {
    let (d, goal) = fixtures::proof_example_goal();
    let r = search(&goal, &budget(14), &order(), &d.lengths).unwrap();
    assert!(check_proof(&r.proof, &order(), &d.lengths).is_accept());
    assert_eq!(r.proof.count_rule("cca"), 2);
}

#[test]
fn cca_leaf_matches_two_keys() {
    let (p, q) = (Term::pk(n("n")), Term::pk(n("m")));
    let s = Sequent::new(
        vec![Term::enc(n("a"), p.clone(), n("r0")), Term::enc(n("b"), q.clone(), n("r1")), n("c"), n("d")],
        vec![Term::enc(n("c"), p, n("s0")), Term::enc(n("d"), q, n("s1")), n("c"), n("d")],
    );
    let st = cca_leaf_match(&s, &order(), &LengthDecls::new()).unwrap();
    assert_eq!(st.keys.len(), 2);
    assert_eq!(st.calls.len(), 2);
}

#[test]
fn refl_match_finds_renaming() {
    let g = AdvSymbol::new("g", 1, Sort::Message);
    let s = Sequent::new(vec![Term::adv(&g, vec![n("a")])], vec![Term::adv(&g, vec![n("b")])]);
    assert!(refl_match(&s).is_some());
}

#[test]
fn parallel_search_agrees() {
    let (d, goal) = fixtures::proof_base_goal();
    let b = SearchBudget { jobs: 2, ..budget(6) };
    let r = search(&goal, &b, &order(), &d.lengths).unwrap();
    assert!(check_proof(&r.proof, &order(), &d.lengths).is_accept());
}
