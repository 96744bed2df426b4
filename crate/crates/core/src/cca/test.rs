use super::*;
use crate::term::{Signature, Sort};

fn n(x: &str) -> Term {
    Term::name(x)
}

fn pk() -> Term {
    Term::pk(n("k"))
}

fn sk() -> Term {
    Term::sk(n("k"))
}

fn g1() -> crate::term::AdvSymbol {
    let mut s = Signature::new();
    s.declare("g", 1, Sort::Bool).unwrap()
}

fn g(t: Term) -> Term {
    Term::adv(&g1(), vec![t])
}

/// Encryptions a0, a1 and a2 = enc(a1, pk, r2).
fn nested() -> (Term, Term, Term, CcaStructure) {
    let a0 = Term::enc(n("m0"), pk(), n("r0"));
    let a1 = Term::enc(n("m1"), pk(), n("r1"));
    let a2 = Term::enc(a1.clone(), pk(), n("r2"));
    let st = CcaStructure::new(["k"])
        .enc_call("x0", a0.clone(), a0.clone())
        .enc_call("x1", a1.clone(), a1.clone())
        .enc_call("x2", a2.clone(), a2.clone());
    (a0, a1, a2, st)
}

#[test]
fn guards_only_for_directly_appearing() {
    let (_, _, a2, st) = nested();
    let u = g(a2.clone());
    assert_eq!(required_guards(&u, &st, &pk()).unwrap(), vec![Term::eq(u.clone(), a2)]);
    let none = g(n("m"));
    assert!(required_guards(&none, &st, &pk()).unwrap().is_empty());
    assert!(matches!(required_guards(&u, &st, &Term::pk(n("other"))), Err(CcaError::UnknownKey(_))));
    assert!(matches!(required_guards(&u, &st, &n("k")), Err(CcaError::NotPublicKey(_))));
}

#[test]
fn guards_sorted_and_deterministic() {
    let (a0, a1, _, st) = nested();
    let u = Term::pair(a1.clone(), a0.clone());
    let gs = required_guards(&u, &st, &pk()).unwrap();
    let mut sorted = vec![a0.clone(), a1.clone()];
    sorted.sort();
    assert_eq!(gs, sorted.into_iter().map(|a| Term::eq(u.clone(), a)).collect::<Vec<_>>());
    assert_eq!(gs, required_guards(&u, &st, &pk()).unwrap());
    let rev = required_guards_with(&u, &st, &pk(), &CanonicalOrder::reversed()).unwrap();
    assert_eq!(gs, rev);
}

#[test]
fn guards_see_through_projections() {
    // fst(pair(a0, m)) normalizes to a0, so a0 directly appears.
    let (a0, _, _, st) = nested();
    let u = g(Term::fst(Term::pair(a0.clone(), n("m"))));
    assert_eq!(required_guards(&u, &st, &pk()).unwrap(), vec![Term::eq(u.clone(), a0)]);
    // snd(pair(a0, m)) drops it.
    let u = g(Term::snd(Term::pair(Term::enc(n("m0"), pk(), n("r0")), n("m"))));
    assert!(required_guards(&u, &st, &pk()).unwrap().is_empty());
}

#[test]
fn elses_roundtrip() {
    let d = Term::dec(n("c"), sk());
    let gs = vec![Term::eq(n("c"), n("a")), Term::eq(n("c"), n("b"))];
    let t = elses(&gs, &d);
    assert_eq!(
        t,
        Term::ite(gs[0].clone(), Term::zero(d.clone()), Term::ite(gs[1].clone(), Term::zero(d.clone()), d.clone()))
    );
    assert_eq!(split_elses(&t), Some((gs, d.clone())));
    assert_eq!(elses(&[], &d), d);
    assert!(split_elses(&n("c")).is_none());
}

/// `α, β ∼ α', β'` under pk(n): four names as plaintexts.
fn cca_trans() -> (Sequent, CcaStructure) {
    let pk = Term::pk(n("n"));
    let alpha = Term::enc(n("a"), pk.clone(), n("n0"));
    let beta = Term::enc(n("b"), pk.clone(), n("n1"));
    let alpha2 = Term::enc(n("c"), pk.clone(), n("n0"));
    let beta2 = Term::enc(n("d"), pk.clone(), n("n1"));
    let st = CcaStructure::new(["n"]).enc_call("x", alpha.clone(), alpha2.clone()).enc_call("y", beta.clone(), beta2.clone());
    let seq = Sequent::new(vec![pk.clone(), alpha, beta], vec![pk, alpha2, beta2]);
    (seq, st)
}

#[test]
fn two_encryptions_accept() {
    let (seq, st) = cca_trans();
    let d = LengthDecls::new();
    assert_eq!(verify_cca_instance(&seq, &st, &d), CcaVerdict::Accept);
}

#[test]
fn randomness_listed_as_base_is_not_fresh() {
    let (mut seq, st) = cca_trans();
    seq.left.push(n("n0"));
    seq.right.push(n("n0"));
    let v = verify_cca_instance(&seq, &st, &LengthDecls::new());
    assert_eq!(v.diagnostic().unwrap().kind, CcaFailure::Freshness);
}

#[test]
fn duplicate_randomness_is_structural() {
    let pk = Term::pk(n("n"));
    let a = Term::enc(n("a"), pk.clone(), n("n0"));
    let b = Term::enc(n("b"), pk.clone(), n("n0"));
    let st = CcaStructure::new(["n"]).enc_call("x", a.clone(), a.clone()).enc_call("y", b.clone(), b.clone());
    let seq = Sequent::new(vec![a.clone(), b.clone()], vec![a, b]);
    let d = verify_cca_instance(&seq, &st, &LengthDecls::new()).diagnostic().unwrap().clone();
    assert_eq!(d.kind, CcaFailure::Malformed);
    assert!(d.kind.is_structural());
}

#[test]
fn dangling_component_is_shape_error() {
    let (mut seq, st) = cca_trans();
    seq.left.push(n("p"));
    seq.right.push(n("q"));
    let d = verify_cca_instance(&seq, &st, &LengthDecls::new()).diagnostic().unwrap().clone();
    assert_eq!((d.kind, d.component), (CcaFailure::Shape, Some(3)));
}

#[test]
fn secret_key_in_base_rejected() {
    let (mut seq, st) = cca_trans();
    seq.left.push(Term::sk(n("n")));
    seq.right.push(Term::sk(n("n")));
    let d = verify_cca_instance(&seq, &st, &LengthDecls::new()).diagnostic().unwrap().clone();
    assert_eq!(d.kind, CcaFailure::KeyUsage);
}

#[test]
fn unequal_lengths_rejected() {
    let pk = Term::pk(n("n"));
    let a = Term::enc(n("a"), pk.clone(), n("n0"));
    let b = Term::enc(Term::pair(n("a"), n("b")), pk.clone(), n("n0"));
    let st = CcaStructure::new(["n"]).enc_call("x", a.clone(), b.clone());
    let seq = Sequent::new(vec![a], vec![b]);
    assert_eq!(verify_cca_instance(&seq, &st, &LengthDecls::new()).diagnostic().unwrap().kind, CcaFailure::Length);
}

/// Challenge encryption, then a guarded decryption of g(challenge).
fn with_decryption(guarded: bool) -> (Sequent, CcaStructure) {
    let l = Term::enc(n("a"), pk(), n("r"));
    let r = Term::enc(n("b"), pk(), n("r"));
    let ul = g(l.clone());
    let ur = g(r.clone());
    let (dl, dr) = if guarded {
        (elses(&[Term::eq(ul.clone(), l.clone())], &Term::dec(ul.clone(), sk())), elses(&[Term::eq(ur.clone(), r.clone())], &Term::dec(ur.clone(), sk())))
    } else {
        (Term::dec(ul, sk()), Term::dec(ur, sk()))
    };
    let st = CcaStructure::new(["k"]).enc_call("x", l.clone(), r.clone()).dec_call("z", dl.clone(), dr.clone());
    (Sequent::new(vec![pk(), l, dl], vec![pk(), r, dr]), st)
}

#[test]
fn guarded_decryption_accept() {
    let (seq, st) = with_decryption(true);
    assert_eq!(verify_cca_instance(&seq, &st, &LengthDecls::new()), CcaVerdict::Accept);
    let perm = seq.permuted(&[2, 0, 1]);
    assert_eq!(verify_cca_instance(&perm, &st, &LengthDecls::new()), CcaVerdict::Accept);
}

#[test]
fn missing_guard_rejected() {
    let (seq, st) = with_decryption(false);
    let d = verify_cca_instance(&seq, &st, &LengthDecls::new()).diagnostic().unwrap().clone();
    assert_eq!((d.kind, d.handle.as_deref()), (CcaFailure::Guard, Some("z")));
}

#[test]
fn right_renaming() {
    let (seq, st) = with_decryption(true);
    let mu = Renaming::from_pairs([("a", "q"), ("q", "a"), ("r", "s"), ("s", "r")]);
    let renamed = Sequent::new(seq.left.clone(), seq.right.iter().map(|t| t.rename(&mu)).collect());
    let st2 = st.clone().with_renaming(mu);
    assert_eq!(verify_cca_instance(&renamed, &st2, &LengthDecls::new()), CcaVerdict::Accept);
    assert!(!verify_cca_instance(&renamed, &st, &LengthDecls::new()).is_accept());
}

#[test]
fn side_conditions() {
    let (seq, st) = with_decryption(true);
    assert!(check_side_conditions(&st, &seq.left).is_empty());
    let leak = Term::pair(n("r"), n("a"));
    let ds = check_side_conditions(&st, &[leak]);
    assert_eq!(ds.len(), 1);
    assert_eq!(ds[0].kind, CcaFailure::Freshness);
    let ds = check_side_conditions(&st, &[Term::dec(n("c"), sk())]);
    assert!(ds.iter().any(|d| d.kind == CcaFailure::KeyUsage));
    let ds = check_side_conditions(&st, &[Term::enc(n("m"), pk(), n("r"))]);
    assert!(ds.iter().any(|d| d.kind == CcaFailure::HiddenRandomness));
}

#[test]
fn completion_of_decryption_only() {
    let (seq, st) = with_decryption(true);
    let sub = seq.restricted(&[2]);
    // The decryption alone is still an instance: the encryption is replayed.
    assert!(verify_cca_instance(&sub, &st, &LengthDecls::new()).is_accept());
    let (full, st2) = complete_instance(&sub, &st).unwrap();
    assert_eq!(full.left[0], sub.left[0]);
    assert_eq!(full.len(), 2);
    assert!(is_full_instance(&full, &st2));
    assert_eq!(verify_cca_instance(&full, &st2, &LengthDecls::new()), CcaVerdict::Accept);
}
