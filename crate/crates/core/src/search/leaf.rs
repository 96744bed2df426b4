//! Leaf closure. Both sides are walked in parallel: challenge encryptions
//! and guarded decryptions under the chosen keys become oracle calls,
//! subterms equal up to a name bijection become base terms, and anything
//! else with a common head symbol is taken apart by FA.

use std::collections::{BTreeMap, BTreeSet};

use crate::cca::{split_elses, verify_cca_instance_with, CallKind, CcaStructure};
use crate::length::LengthDecls;
use crate::proof::{check_step, Derivation, RuleApp};
use crate::sequent::Sequent;
use crate::term::order::CanonicalOrder;
use crate::term::{Kind, Renaming, Symbol, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Call,
    Base,
    Fa,
}

#[derive(Clone, Default)]
struct Matcher<'a> {
    keys: Option<&'a BTreeSet<String>>,
    /// Right name to left name.
    nu: BTreeMap<String, String>,
    /// Left name to right name.
    inv: BTreeMap<String, String>,
    calls: Vec<(CallKind, Term, Term)>,
}

impl<'a> Matcher<'a> {
    fn new(keys: &'a BTreeSet<String>) -> Self {
        Matcher { keys: Some(keys), ..Default::default() }
    }

    fn in_k(&self, seed: &str) -> bool {
        self.keys.is_some_and(|k| k.contains(seed))
    }

    fn bind(&mut self, l: &str, r: &str) -> bool {
        match (self.nu.get(r), self.inv.get(l)) {
            (Some(x), _) if x != l => false,
            (_, Some(y)) if y != r => false,
            (Some(_), Some(_)) => true,
            _ => {
                self.nu.insert(r.to_string(), l.to_string());
                self.inv.insert(l.to_string(), r.to_string());
                true
            }
        }
    }

    fn unify_in_place(&mut self, l: &Term, r: &Term) -> bool {
        match (l.kind(), r.kind()) {
            (Kind::Name(a), Kind::Name(b)) => self.bind(a, b),
            (Kind::App(f, xs), Kind::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify_in_place(x, y))
            }
            _ => false,
        }
    }

    /// Equality up to the name bijection, extending it on success.
    fn unify(&mut self, l: &Term, r: &Term) -> bool {
        let saved = (self.nu.clone(), self.inv.clone());
        if self.unify_in_place(l, r) {
            true
        } else {
            (self.nu, self.inv) = saved;
            false
        }
    }

    fn key_of_enc(&self, t: &Term) -> Option<String> {
        (t.is_app_of(&Symbol::Enc)).then(|| t.args()[1].pk_seed()).flatten().filter(|s| self.in_k(s)).map(str::to_string)
    }

    fn key_of_dec(&self, t: &Term) -> Option<(String, Term)> {
        let (_, d) = if t.is_app_of(&Symbol::Dec) { (vec![], t.clone()) } else { split_elses(t)? };
        let seed = d.args()[1].sk_seed()?;
        self.in_k(seed).then(|| (seed.to_string(), d.args()[0].clone()))
    }

    /// Whether `t` encrypts or decrypts under one of the chosen keys; such
    /// terms are never base terms.
    fn uses_keys(&self, t: &Term) -> bool {
        t.subterms().iter().any(|s| self.key_of_enc(s).is_some() || (s.is_app_of(&Symbol::Dec) && self.key_of_dec(s).is_some()))
    }

    fn call_kind(&mut self, l: &Term, r: &Term) -> Option<CallKind> {
        if let (Some(a), Some(b)) = (self.key_of_enc(l), self.key_of_enc(r)) {
            return self.bind(&a, &b).then_some(CallKind::Enc);
        }
        if let (Some((a, _)), Some((b, _))) = (self.key_of_dec(l), self.key_of_dec(r)) {
            return self.bind(&a, &b).then_some(CallKind::Dec);
        }
        None
    }

    fn record(&mut self, kind: CallKind, l: &Term, r: &Term) {
        if self.calls.iter().any(|(_, a, b)| a == l && b == r) {
            return;
        }
        self.calls.push((kind, l.clone(), r.clone()));
        match kind {
            CallKind::Enc => self.nested(&l.args()[0], &r.args()[0]),
            CallKind::Dec => {
                let (gl, dl) = split_elses(l).unwrap_or((vec![], l.clone()));
                let (gr, dr) = split_elses(r).unwrap_or((vec![], r.clone()));
                self.nested(&dl.args()[0], &dr.args()[0]);
                for (a, b) in gl.iter().zip(&gr) {
                    self.nested(&a.args()[1], &b.args()[1]);
                }
            }
        }
    }

    /// Records the calls occurring inside a call term, as far as the two
    /// sides have the same shape.
    fn nested(&mut self, l: &Term, r: &Term) {
        if let Some(k) = self.call_kind(l, r) {
            self.record(k, l, r);
            return;
        }
        if let (Some(f), Some(g)) = (l.head(), r.head()) {
            if f == g && l.args().len() == r.args().len() {
                for (x, y) in l.args().iter().zip(r.args()) {
                    self.nested(x, y);
                }
            }
        }
    }

    fn classify(&mut self, l: &Term, r: &Term) -> Option<Class> {
        if let Some(k) = self.call_kind(l, r) {
            self.record(k, l, r);
            return Some(Class::Call);
        }
        if !self.uses_keys(l) && !self.uses_keys(r) && self.unify(l, r) {
            return Some(Class::Base);
        }
        match (l.head(), r.head()) {
            (Some(f), Some(g)) if f == g && *f != Symbol::Zero && !l.args().is_empty() && l.args().len() == r.args().len() => {
                Some(Class::Fa)
            }
            _ => None,
        }
    }

    /// Closes the partial bijection into a permutation `μ` (left to right).
    fn renaming(&self) -> Renaming {
        let mut mu: BTreeMap<String, String> = self.inv.clone();
        let dom: BTreeSet<&String> = self.inv.keys().collect();
        let ran: BTreeSet<&String> = self.inv.values().collect();
        let mut extra = Vec::new();
        for s in dom.difference(&ran) {
            let mut e = *s;
            while let Some(next) = self.inv.get(e) {
                e = next;
            }
            extra.push((e.clone(), (*s).clone()));
        }
        for (e, s) in extra {
            mu.insert(e, s);
        }
        Renaming::from_pairs(mu)
    }
}

/// A derivation chain ending in a leaf.
struct Chain {
    steps: Vec<(Sequent, RuleApp)>,
    cost: usize,
}

impl Chain {
    fn push(&mut self, c: &Sequent, r: RuleApp) {
        if !matches!(r, RuleApp::Perm { .. }) {
            self.cost += 1;
        }
        self.steps.push((c.clone(), r));
    }

    fn finish(self, leaf: Derivation) -> Derivation {
        self.steps.into_iter().rev().fold(leaf, |d, (c, r)| Derivation::new(c, r, vec![d]))
    }
}

/// Moves a duplicate pair to the end and removes it.
pub(crate) fn dedupe_once(c: &Sequent) -> Option<(Vec<(Sequent, RuleApp)>, Sequent)> {
    let n = c.len();
    for j in 1..n {
        for i in 0..j {
            if c.left[i] == c.left[j] && c.right[i] == c.right[j] {
                let mut steps = Vec::new();
                let mut cur = c.clone();
                let perm: Vec<usize> = (0..n).filter(|&k| k != i && k != j).chain([i, j]).collect();
                if perm.iter().enumerate().any(|(a, &b)| a != b) {
                    steps.push((cur.clone(), RuleApp::Perm { perm: perm.clone() }));
                    cur = cur.permuted(&perm);
                }
                steps.push((cur.clone(), RuleApp::Dup));
                let next = cur.restricted(&(0..n - 1).collect::<Vec<_>>());
                return Some((steps, next));
            }
        }
    }
    None
}

fn classify_all<'a>(keys: &'a BTreeSet<String>, c: &Sequent) -> Option<(Matcher<'a>, Vec<Class>)> {
    let mut m = Matcher::new(keys);
    let mut classes = Vec::with_capacity(c.len());
    for (l, r) in c.pairs() {
        classes.push(m.classify(l, r)?);
    }
    Some((m, classes))
}

fn structure_of(m: &Matcher, mu: &Renaming) -> Option<CcaStructure> {
    let inv = mu.inverse().or_else(|| mu.is_identity().then(Renaming::identity))?;
    let mut calls = m.calls.clone();
    calls.sort_by(|a, b| a.1.size().cmp(&b.1.size()).then_with(|| a.1.cmp(&b.1)));
    let mut st = CcaStructure::new(m.keys.into_iter().flatten().cloned()).with_renaming(mu.clone());
    let (mut ne, mut nd) = (0, 0);
    for (kind, l, r) in calls {
        let pre = r.rename(&inv);
        st = match kind {
            CallKind::Enc => {
                ne += 1;
                st.enc_call(&format!("x{ne}"), l, pre)
            }
            CallKind::Dec => {
                nd += 1;
                st.dec_call(&format!("d{nd}"), l, pre)
            }
        };
    }
    Some(st)
}

/// Decomposes `seq` by FA and Dup down to calls and base terms on `keys`
/// and ends in the leaf this suggests: Refl when no call was found, CCA
/// otherwise. The leaf itself is not checked. `max_cost` bounds the
/// non-Perm nodes on the path.
pub fn plan_leaf(seq: &Sequent, keys: &BTreeSet<String>, max_cost: usize, order: &CanonicalOrder) -> Option<Derivation> {
    let mut chain = Chain { steps: Vec::new(), cost: 0 };
    let mut cur = seq.clone();
    loop {
        if chain.cost + 1 > max_cost {
            return None;
        }
        if let Some((steps, next)) = dedupe_once(&cur) {
            for (c, r) in steps {
                chain.push(&c, r);
            }
            cur = next;
            continue;
        }
        let (m, classes) = classify_all(keys, &cur)?;
        let target = (0..cur.len())
            .filter(|&i| classes[i] == Class::Fa)
            .max_by(|&a, &b| cur.left[a].size().cmp(&cur.left[b].size()).then(b.cmp(&a)));
        match target {
            Some(i) => {
                let h = cur.left[i].head().unwrap();
                let rule = RuleApp::Fa { symbol: h.name().to_string(), arity: h.arity(), index: i };
                let p = crate::proof::premises_of(&rule, &cur, order).ok()?.pop()?;
                chain.push(&cur, rule);
                cur = p;
            }
            None => {
                let mu = m.renaming();
                let leaf = if m.calls.is_empty() {
                    RuleApp::Refl { renaming: mu }
                } else if keys.is_empty() {
                    return None;
                } else {
                    RuleApp::Cca(structure_of(&m, &mu)?)
                };
                return Some(chain.finish(Derivation::leaf(cur, leaf)));
            }
        }
    }
}

/// [`plan_leaf`], keeping the result only if its leaf checks.
pub fn close_leaf(
    seq: &Sequent,
    keys: &BTreeSet<String>,
    max_cost: usize,
    order: &CanonicalOrder,
    decls: &LengthDecls,
) -> Option<Derivation> {
    let d = plan_leaf(seq, keys, max_cost, order)?;
    let mut leaf = &d;
    while let Some(p) = leaf.premises.first() {
        leaf = p;
    }
    if let RuleApp::Cca(st) = &leaf.rule {
        if !verify_cca_instance_with(&leaf.conclusion, st, decls, order).is_accept() {
            return None;
        }
    }
    check_step(&leaf.rule, &leaf.conclusion, &[], order, decls).ok()?;
    Some(d)
}

/// Seeds of the keys an instance could be over: public keys used for
/// encryption and secret keys used for decryption.
pub fn key_seeds(seq: &Sequent) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for t in seq.left.iter().chain(&seq.right) {
        for s in t.subterms() {
            if s.is_app_of(&Symbol::Enc) {
                if let Some(k) = s.args()[1].pk_seed() {
                    out.insert(k.to_string());
                }
            }
            if s.is_app_of(&Symbol::Dec) {
                if let Some(k) = s.args()[1].sk_seed() {
                    out.insert(k.to_string());
                }
            }
        }
    }
    out
}

/// Key sets to try, smallest first; the empty set stands for Refl.
pub fn key_sets(seq: &Sequent, limit: usize) -> Vec<BTreeSet<String>> {
    let ks: Vec<String> = key_seeds(seq).into_iter().collect();
    let ks = &ks[..ks.len().min(limit)];
    let mut out: Vec<BTreeSet<String>> =
        (0u64..1 << ks.len()).map(|m| ks.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, k)| k.clone()).collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// The cheapest leaf closure of `seq` over all key sets.
pub fn close_any(seq: &Sequent, max_cost: usize, order: &CanonicalOrder, decls: &LengthDecls) -> Option<Derivation> {
    key_sets(seq, 8).iter().find_map(|k| close_leaf(seq, k, max_cost, order, decls))
}

/// Reconstructs a CCA structure for `seq` as it stands (no FA or Dup).
pub fn cca_leaf_match(seq: &Sequent, order: &CanonicalOrder, decls: &LengthDecls) -> Option<CcaStructure> {
    key_sets(seq, 8).into_iter().filter(|k| !k.is_empty()).find_map(|k| match close_leaf(seq, &k, 1, order, decls)?.rule {
        RuleApp::Cca(st) => Some(st),
        _ => None,
    })
}

/// A renaming `μ` with `right = μ(left)`, if one exists.
pub fn refl_match(seq: &Sequent) -> Option<Renaming> {
    let keys = BTreeSet::new();
    let mut m = Matcher::new(&keys);
    for (l, r) in seq.pairs() {
        if !m.unify(l, r) {
            return None;
        }
    }
    Some(m.renaming())
}
