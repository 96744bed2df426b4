//! Worked derivations and their rejected mutations.
//!
//! The derivations are built programmatically. FA/Dup chains down to
//! CCA leaves come from [`plan_leaf`], so a builder only spells out the
//! rewriting and case-study steps. Each mutation edits one rule
//! application (together with the sequents it determines), so the first
//! failing node is the edited one.

use std::collections::BTreeSet;

use crate::cca::{elses, CcaFailure};
use crate::format::{render_goal, render_proof_file, Decls};
use crate::proof::{premises_of, Derivation, RuleApp, StepFailure};
use crate::search::plan_leaf;
use crate::sequent::{Sequent, Side};
use crate::term::order::CanonicalOrder;
use crate::term::{AdvSymbol, Renaming, Sort, Term};

fn n(x: &str) -> Term {
    Term::name(x)
}

fn keys(ks: &[&str]) -> BTreeSet<String> {
    ks.iter().map(|s| s.to_string()).collect()
}

fn order() -> CanonicalOrder {
    CanonicalOrder::default()
}

fn leaf_chain(seq: &Sequent, ks: &[&str]) -> Derivation {
    plan_leaf(seq, &keys(ks), usize::MAX, &order()).expect("fixture sequent decomposes")
}

fn rw(c: &Sequent, side: Side, index: usize, t: Term) -> (RuleApp, Sequent) {
    let mut p = c.clone();
    match side {
        Side::Left => p.left[index] = t.clone(),
        Side::Right => p.right[index] = t.clone(),
    }
    (RuleApp::Rw { side, index, replacement: t }, p)
}

fn cs(c: &Sequent, targets: Vec<usize>, prove: impl Fn(usize, &Sequent) -> Derivation) -> Derivation {
    let rule = RuleApp::Cs { targets };
    let ps = premises_of(&rule, c, &order()).unwrap_or_else(|_| fallback_premises(c));
    let premises = ps.iter().enumerate().map(|(i, p)| prove(i, p)).collect();
    Derivation::new(c.clone(), rule, premises)
}

/// Premises for a case study the kernel refuses: the two branches, with
/// the conditionals kept as they are.
fn fallback_premises(c: &Sequent) -> Vec<Sequent> {
    let split = |ts: &[Term], k: usize| -> Vec<Term> {
        ts.iter().flat_map(|t| t.as_ite().map(|(b, x, y)| vec![b.clone(), [x, y][k].clone()]).unwrap_or_else(|| vec![t.clone()])).collect()
    };
    (0..2).map(|k| Sequent::new(split(&c.left, k), split(&c.right, k))).collect()
}

/// A named derivation with the declarations it needs.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub decls: Decls,
    pub proof: Derivation,
}

/// A mutated derivation and the failure the checker must report.
#[derive(Clone, Debug)]
pub struct Mutation {
    pub name: &'static str,
    pub description: &'static str,
    pub decls: Decls,
    pub proof: Derivation,
    pub expected: StepFailure,
}

// ite(g(), n0, n1) ~ n

fn base_decls() -> (Decls, AdvSymbol) {
    let mut d = Decls::new();
    let g = d.sig.declare("g", 0, Sort::Bool).unwrap();
    (d, g)
}

pub fn proof_base_goal() -> (Decls, Sequent) {
    let (d, g) = base_decls();
    let g = Term::adv(&g, vec![]);
    (d, Sequent::new(vec![Term::ite(g, n("n0"), n("n1"))], vec![n("n")]))
}

fn proof_base_with(cond: impl Fn(Term) -> Term, intro: Term) -> (Decls, Derivation) {
    let (d, goal) = proof_base_goal();
    let g = goal.left[0].as_ite().unwrap().0.clone();
    let b = cond(g);
    let mut steps = Vec::new();
    let mut cur = goal.clone();
    let left = Term::ite(b.clone(), n("n0"), n("n1"));
    if left != cur.left[0] {
        let (r, p) = rw(&cur, Side::Left, 0, left);
        steps.push((cur.clone(), r));
        cur = p;
    }
    let (r, p) = rw(&cur, Side::Right, 0, intro);
    steps.push((cur.clone(), r));
    cur = p;
    let dcs = cs(&cur, vec![0], |i, p| {
        let from = ["n0", "n1"][i];
        Derivation::leaf(p.clone(), RuleApp::Refl { renaming: Renaming::from_pairs([(from, "n")]) })
    });
    let proof = steps.into_iter().rev().fold(dcs, |acc, (c, r)| Derivation::new(c, r, vec![acc]));
    (d, proof)
}

pub fn proof_base() -> Fixture {
    let g = proof_base_goal().1.left[0].as_ite().unwrap().0.clone();
    let (decls, proof) = proof_base_with(|b| b, Term::ite(g, n("n"), n("n")));
    Fixture { name: "proof_base", decls, proof }
}

// The two-key example with a conditional introduced on one side.

struct Pe {
    decls: Decls,
    g: AdvSymbol,
    c: [Term; 2],
}

impl Pe {
    fn new() -> Self {
        let mut decls = Decls::parse("(decl-adv g 1) (decl-len-zero c0 (+ (* 1 l_block))) (decl-len-zero c1 (+ (* 1 l_block)))").unwrap();
        let g = decls.sig.get("g").unwrap().clone();
        let c = ["c0", "c1"].map(|s| Term::adv(decls.sig.get(s).unwrap(), vec![]));
        decls.sig.absorb(&c[0]);
        Pe { decls, g, c }
    }

    fn alpha(&self, m: usize) -> Term {
        Term::enc(Term::enc(self.c[m].clone(), Term::pk(n("kA")), n("rA")), Term::pk(n("kB")), n("rB"))
    }

    fn t(&self, m: usize) -> Term {
        Term::adv(&self.g, vec![self.alpha(m)])
    }

    fn guard(&self, m: usize) -> Term {
        Term::eq(self.t(m), self.alpha(m))
    }

    fn dec(&self, m: usize) -> Term {
        Term::dec(self.t(m), Term::sk(n("kB")))
    }

    fn s(&self, m: usize, guarded: bool) -> Term {
        if guarded {
            elses(&[self.guard(m)], &self.dec(m))
        } else {
            self.dec(m)
        }
    }

    fn goal(&self) -> Sequent {
        Sequent::new(
            vec![Term::pair(self.dec(0), n("r"))],
            vec![Term::ite(self.guard(1), Term::pair(self.dec(1), n("r")), Term::pair(self.dec(1), n("rA")))],
        )
    }
}

#[derive(Clone, Copy, Default)]
struct PeEdit {
    unguarded: bool,
    ite_condition: bool,
    leak_else: bool,
}

fn proof_example_with(e: PeEdit) -> (Decls, Derivation) {
    let pe = Pe::new();
    let goal = pe.goal();
    let wrap = |b: Term| if e.ite_condition { Term::ite(b, Term::tt(), Term::ff()) } else { b };
    let else_rand = if e.leak_else { "rA" } else { "r" };
    let left = Term::ite(wrap(pe.guard(0)), Term::pair(pe.dec(0), n("r")), Term::pair(pe.s(0, !e.unguarded), n(else_rand)));
    let right = Term::ite(wrap(pe.guard(1)), Term::pair(pe.dec(1), n("r")), Term::pair(pe.s(1, !e.unguarded), n("rA")));
    let (r1, c1) = rw(&goal, Side::Left, 0, left);
    let (r2, c2) = rw(&c1, Side::Right, 0, right);
    let dcs = cs(&c2, vec![0], |i, p| leaf_chain(p, [&["kA"][..], &["kB"][..]][i]));
    let proof = Derivation::new(goal, r1, vec![Derivation::new(c1, r2, vec![dcs])]);
    (pe.decls, proof)
}

pub fn proof_example_goal() -> (Decls, Sequent) {
    let pe = Pe::new();
    let g = pe.goal();
    (pe.decls, g)
}

/// The two guards of the example: the conditional introduced on the left
/// and its counterpart on the right.
pub fn proof_example_hints() -> Vec<Term> {
    let pe = Pe::new();
    vec![pe.guard(0), pe.guard(1)]
}

pub fn proof_example() -> Fixture {
    let (decls, proof) = proof_example_with(PeEdit::default());
    Fixture { name: "proof_example", decls, proof }
}

// One round of NSL: honest first message, forged second message.

struct Nsl {
    decls: Decls,
    g: AdvSymbol,
    pad: AdvSymbol,
    a: Term,
    b: Term,
    zc: Term,
}

impl Nsl {
    fn new() -> Self {
        let decls = Decls::parse(
            "(decl-adv g 4)
             (decl-len-zero A (+ (* 1 l_eta)))
             (decl-len-zero B (+ (* 1 l_eta)))
             (decl-len-zero zc (+ (* 1 l_eta)))
             (decl-len-pad pad (+ (* 1 l_eta)))",
        )
        .unwrap();
        let c = |s: &str| Term::adv(decls.sig.get(s).unwrap(), vec![]);
        let (a, b, zc) = (c("A"), c("B"), c("zc"));
        let g = decls.sig.get("g").unwrap().clone();
        let pad = decls.sig.get("pad").unwrap().clone();
        Nsl { decls, g, pad, a, b, zc }
    }

    fn pk(&self, x: &str) -> Term {
        Term::pk(n(x))
    }

    fn x0(&self) -> Term {
        Term::enc(Term::pair(n("nA"), self.a.clone()), self.pk("kB"), n("n0"))
    }

    fn phi0(&self) -> Vec<Term> {
        vec![self.pk("kA"), self.pk("kB"), self.x0()]
    }

    /// B's answer after the honest first message, with `nb` as its nonce.
    fn t_b(&self, nb: &Term) -> Term {
        Term::enc(Term::pair(n("nA"), Term::pair(nb.clone(), self.b.clone())), self.pk("kA"), n("n1"))
    }

    fn forged(&self, nb: &Term) -> Term {
        let mut args = self.phi0();
        args.push(self.t_b(nb));
        Term::adv(&self.g, args)
    }

    fn test(&self, nb: &Term) -> Term {
        Term::eq(self.forged(nb), self.t_b(nb))
    }

    fn dec(&self, nb: &Term) -> Term {
        Term::dec(self.forged(nb), Term::sk(n("kA")))
    }

    /// A's answer to a message decrypting to `x`.
    fn t_a(&self, x: &Term, rand: &str) -> Term {
        let body = Term::adv(&self.pad, vec![Term::fst(Term::snd(x.clone()))]);
        Term::ite(
            Term::eq(Term::fst(x.clone()), n("nA")),
            Term::ite(Term::eq(Term::snd(Term::snd(x.clone())), self.b.clone()), Term::enc(body, self.pk("kB"), n(rand)), self.zc.clone()),
            self.zc.clone(),
        )
    }

    fn s(&self, nb: &Term, guarded: bool, rand: &str) -> Term {
        let x = if guarded { elses(&[self.test(nb)], &self.dec(nb)) } else { self.dec(nb) };
        Term::ite(self.test(nb), self.zc.clone(), self.t_a(&x, rand))
    }

    fn side(&self, nb: &Term) -> Vec<Term> {
        let mut v = self.phi0();
        v.push(self.t_b(nb));
        v.push(self.s(nb, false, "n2"));
        v
    }

    fn goal(&self) -> Sequent {
        Sequent::new(self.side(&n("nB")), self.side(&self.zc))
    }
}

fn nsl_with(guarded: bool, rand: &str) -> (Decls, Derivation) {
    let nsl = Nsl::new();
    let goal = nsl.goal();
    let (r1, c1) = rw(&goal, Side::Left, 4, nsl.s(&n("nB"), guarded, rand));
    let (r2, c2) = rw(&c1, Side::Right, 4, nsl.s(&nsl.zc, guarded, rand));
    let chain = leaf_chain(&c2, &["kA", "kB"]);
    let proof = Derivation::new(goal, r1, vec![Derivation::new(c1, r2, vec![chain])]);
    (nsl.decls, proof)
}

pub fn nsl_goal() -> (Decls, Sequent) {
    let nsl = Nsl::new();
    let g = nsl.goal();
    (nsl.decls, g)
}

pub fn nsl() -> Fixture {
    let (decls, proof) = nsl_with(true, "n2");
    Fixture { name: "nsl", decls, proof }
}

// α, β ~ γ, δ on two keys at once.

fn cca_trans_with(beta_rand: &str, extra: Option<Term>) -> (Decls, Derivation) {
    let (p, q) = (Term::pk(n("n")), Term::pk(n("m")));
    let mut left = vec![Term::enc(n("a"), p.clone(), n("n0")), Term::enc(n("b"), q.clone(), n(beta_rand))];
    let mut right = vec![Term::enc(n("c"), p, n("n0")), Term::enc(n("d"), q, n(beta_rand))];
    if let Some(x) = extra {
        left.push(x.clone());
        right.push(x);
    }
    (Decls::new(), leaf_chain(&Sequent::new(left, right), &["m", "n"]))
}

pub fn cca_trans() -> Fixture {
    let (decls, proof) = cca_trans_with("n1", None);
    Fixture { name: "cca_trans", decls, proof }
}

pub fn fixtures() -> Vec<Fixture> {
    vec![proof_base(), proof_example(), nsl(), cca_trans()]
}

/// The first FA node in pre-order, relabelled as FA on zero.
fn fa_on_zero(mut d: Derivation) -> Derivation {
    fn go(d: &mut Derivation) -> bool {
        if let RuleApp::Fa { symbol, .. } = &mut d.rule {
            *symbol = "zero".into();
            return true;
        }
        d.premises.iter_mut().any(go)
    }
    assert!(go(&mut d));
    d
}

pub fn mutations() -> Vec<Mutation> {
    let mut out = Vec::new();
    let mut push = |name, description, (decls, proof): (Decls, Derivation), expected| {
        out.push(Mutation { name, description, decls, proof, expected })
    };
    push(
        "m01_proof_example_unguarded",
        "the decryption in the else branch loses its guard",
        proof_example_with(PeEdit { unguarded: true, ..Default::default() }),
        StepFailure::Cca(CcaFailure::Guard),
    );
    push("m02_nsl_unguarded", "A decrypts the forged message without a guard", nsl_with(false, "n2"), StepFailure::Cca(CcaFailure::Guard));
    push(
        "m03_cca_trans_shared_randomness",
        "both challenge encryptions use the same randomness",
        cca_trans_with("n0", None),
        StepFailure::Cca(CcaFailure::Malformed),
    );
    push(
        "m04_cca_trans_revealed_randomness",
        "the randomness of a challenge encryption is also revealed",
        cca_trans_with("n1", Some(n("n0"))),
        StepFailure::Cca(CcaFailure::Freshness),
    );
    let g = proof_base_goal().1.left[0].as_ite().unwrap().0.clone();
    let gite = Term::ite(g.clone(), Term::tt(), Term::ff());
    push(
        "m05_proof_base_ite_condition",
        "the case study splits on a conditional containing ite",
        proof_base_with(|b| Term::ite(b, Term::tt(), Term::ff()), Term::ite(gite, n("n"), n("n"))),
        StepFailure::CsConditional,
    );
    push(
        "m06_proof_example_ite_condition",
        "the introduced guard is wrapped in a conditional before the case study",
        proof_example_with(PeEdit { ite_condition: true, ..Default::default() }),
        StepFailure::CsConditional,
    );
    let (d, p) = proof_example_with(PeEdit::default());
    push("m07_proof_example_fa_zero", "an FA step is relabelled as FA on zero", (d, fa_on_zero(p)), StepFailure::FaOnZero);
    let (d, p) = nsl_with(true, "n2");
    push("m08_nsl_fa_zero", "an FA step is relabelled as FA on zero", (d, fa_on_zero(p)), StepFailure::FaOnZero);
    push(
        "m09_proof_base_bad_rewrite",
        "the introduced conditional has different branches",
        proof_base_with(|b| b, Term::ite(g, n("n"), n("n0"))),
        StepFailure::RwNotEqual,
    );
    push(
        "m10_proof_example_bad_rewrite",
        "the rewritten else branch reveals the wrong name",
        proof_example_with(PeEdit { leak_else: true, ..Default::default() }),
        StepFailure::RwNotEqual,
    );
    out
}

const BLURBS: [(&str, &str); 4] = [
    ("proof_base", "ite(g(), n0, n1) ~ n by case study on g()"),
    ("proof_example", "dec(t0) ~ ite(guard1, dec(t1), ...) by CS on introduced guards and two CCA leaves"),
    ("nsl", "one round of NSL: honest first message, forged second message"),
    ("cca_trans", "two challenge keys in one CCA leaf"),
];

/// Every file under `fixtures/`, as (relative path, contents).
pub fn files() -> Vec<(String, String)> {
    let mut out = vec![("redex.term".to_string(), "; fst(pair(a, b)) reduces to a\n(fst (pair n.a n.b))\n".to_string())];
    let (d, g) = proof_base_goal();
    out.push(("goal_csintro.goal".into(), format!("; needs a conditional g() on the right\n{}", render_goal(&d, &g))));
    let (d, g) = proof_example_goal();
    out.push(("goal_proof_example.goal".into(), format!("; the two-key example\n{}", render_goal(&d, &g))));
    let (d, g) = nsl_goal();
    out.push(("goal_nsl.goal".into(), format!("; one round of NSL\n{}", render_goal(&d, &g))));
    for f in fixtures() {
        let blurb = BLURBS.iter().find(|(n, _)| *n == f.name).map_or("", |(_, b)| b);
        out.push((format!("{}.bcp", f.name), format!("; {blurb}\n{}", render_proof_file(&f.decls, &f.proof))));
    }
    for m in mutations() {
        out.push((
            format!("mutations/{}.bcp", m.name),
            format!("; expect: {}\n; {}\n{}", m.expected.name(), m.description, render_proof_file(&m.decls, &m.proof)),
        ));
    }
    out
}

/// The category named on the `; expect:` line of a mutation file.
pub fn expected_category(src: &str) -> Option<&str> {
    src.lines().find_map(|l| l.strip_prefix("; expect:")).map(str::trim)
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::proof::{check_proof, ProofVerdict};

    #[test]
    fn fixtures_check() {
        for f in fixtures() {
            let v = check_proof(&f.proof, &order(), &f.decls.lengths);
            assert!(v.is_accept(), "{}: {v:?}", f.name);
        }
    }

    #[test]
    fn mutations_rejected_as_documented() {
        for m in mutations() {
            match check_proof(&m.proof, &order(), &m.decls.lengths) {
                ProofVerdict::Reject { error, .. } => assert_eq!(error.kind, m.expected, "{}: {}", m.name, error),
                ProofVerdict::Accept => panic!("{} accepted", m.name),
            }
        }
    }

    #[test]
    fn proof_base_shape() {
        let f = proof_base();
        assert_eq!((f.proof.height(), f.proof.node_count()), (3, 4));
    }

    #[test]
    fn proof_example_leaves() {
        let f = proof_example();
        assert_eq!(f.proof.count_rule("cca"), 2);
        // The case-study premise ending in CCA on kB keeps the guarded
        // decryption as an oracle call.
        let mut ks = Vec::new();
        f.proof.visit(&mut |_, d| {
            if let RuleApp::Cca(st) = &d.rule {
                ks.push(st.keys.iter().cloned().collect::<Vec<_>>());
            }
        });
        assert_eq!(ks, vec![vec!["kA".to_string()], vec!["kB".to_string()]]);
    }
}
