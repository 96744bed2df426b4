//! Random terms, CCA instances and valid derivations, for property tests.
//!
//! Valid derivations are built forward: leaves are generated CCA instances
//! and renamings, and every further node applies a rule to already proven
//! sequents, so the result checks by construction.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cca::{elses, required_guards, CcaStructure};
use crate::length::{LengthDecls, LengthExpr, L_BLOCK};
use crate::proof::{Derivation, RuleApp};
use crate::sequent::{Sequent, Side};
use crate::term::{AdvSymbol, Renaming, Signature, Sort, Term};

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "m"];
const KEYS: [&str; 2] = ["k", "k2"];

pub struct Gen {
    rng: ChaCha8Rng,
    f: AdvSymbol,
    f2: AdvSymbol,
    h: AdvSymbol,
    c: AdvSymbol,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            f: AdvSymbol::new("f", 1, Sort::Message),
            f2: AdvSymbol::new("f2", 2, Sort::Message),
            h: AdvSymbol::new("h", 1, Sort::Bool),
            c: AdvSymbol::new("c", 0, Sort::Message),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Length declarations for generated terms: every plaintext name is
    /// one block long.
    pub fn lengths(&self) -> LengthDecls {
        let mut d = LengthDecls::new();
        for n in NAMES {
            d.set_name_length(n, LengthExpr::constant(L_BLOCK));
        }
        d
    }

    /// The adversarial symbols generated terms use.
    pub fn symbols(&self) -> [&AdvSymbol; 4] {
        [&self.f, &self.f2, &self.h, &self.c]
    }

    /// A signature declaring [`Gen::symbols`].
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for a in self.symbols() {
            sig.declare(a.name(), a.arity(), a.sort()).expect("fresh signature");
        }
        sig
    }

    fn name(&mut self) -> Term {
        Term::name(NAMES.choose(&mut self.rng).unwrap())
    }

    fn key(&mut self) -> Term {
        Term::name(KEYS.choose(&mut self.rng).unwrap())
    }

    fn split(&mut self, s: usize) -> (usize, usize) {
        let a = self.rng.gen_range(1..s.max(2));
        (a, s.saturating_sub(a).max(1))
    }

    /// A message-sorted term of roughly `size` nodes, biased towards
    /// redexes.
    pub fn term(&mut self, size: usize) -> Term {
        if size <= 1 {
            return if self.rng.gen_bool(0.85) { self.name() } else { Term::adv(&self.c, vec![]) };
        }
        let s = size - 1;
        match self.rng.gen_range(0..13) {
            0 | 1 => {
                let (a, b) = self.split(s);
                Term::pair(self.term(a), self.term(b))
            }
            2 => {
                let (a, b) = self.split(s.saturating_sub(1));
                let p = Term::pair(self.term(a), self.term(b));
                if self.rng.gen() {
                    Term::fst(p)
                } else {
                    Term::snd(p)
                }
            }
            3 => {
                let t = self.term(s);
                if self.rng.gen() {
                    Term::fst(t)
                } else {
                    Term::snd(t)
                }
            }
            4 => {
                let k = self.key();
                Term::enc(self.term(s.saturating_sub(3)), Term::pk(k), self.name())
            }
            5 => {
                let k = self.key();
                let e = Term::enc(self.term(s.saturating_sub(6)), Term::pk(k.clone()), self.name());
                Term::dec(e, Term::sk(k))
            }
            6 => {
                let k = self.key();
                Term::dec(self.term(s.saturating_sub(2)), Term::sk(k))
            }
            7 | 8 => {
                let (a, rest) = self.split(s);
                let (b, c) = self.split(rest);
                Term::ite(self.bool_term(a), self.term(b), self.term(c))
            }
            9 => Term::zero(self.term(s)),
            10 => {
                let t = self.term(s);
                Term::adv(&self.f, vec![t])
            }
            11 => {
                let (a, b) = self.split(s);
                let args = vec![self.term(a), self.term(b)];
                Term::adv(&self.f2, args)
            }
            _ => Term::pk(self.key()),
        }
    }

    /// A Bool-sorted term of roughly `size` nodes.
    pub fn bool_term(&mut self, size: usize) -> Term {
        if size <= 1 {
            return if self.rng.gen() { Term::tt() } else { Term::ff() };
        }
        let s = size - 1;
        match self.rng.gen_range(0..6) {
            0 | 1 => {
                let (a, b) = self.split(s);
                Term::eq(self.term(a), self.term(b))
            }
            2 => {
                let t = self.term(s.saturating_sub(1) / 2 + 1);
                Term::eq(t.clone(), t)
            }
            3 => {
                let (a, rest) = self.split(s);
                let (b, c) = self.split(rest);
                Term::ite(self.bool_term(a), self.bool_term(b), self.bool_term(c))
            }
            _ => {
                let t = self.term(s);
                Term::adv(&self.h, vec![t])
            }
        }
    }

    /// An if-free Bool term.
    pub fn condition(&mut self, size: usize) -> Term {
        loop {
            let b = self.bool_term(size);
            if b.is_if_free() {
                return b;
            }
        }
    }

    /// A term of either sort.
    pub fn any_term(&mut self, size: usize) -> Term {
        if self.rng.gen_bool(0.2) {
            self.bool_term(size)
        } else {
            self.term(size)
        }
    }

    fn plaintext(&mut self) -> Term {
        let a = self.name();
        if self.rng.gen_bool(0.3) {
            let b = self.name();
            Term::pair(a, b)
        } else {
            a
        }
    }

    /// A full CCA instance over one or two keys: encryption and
    /// decryption calls plus a few base terms.
    pub fn cca_instance(&mut self) -> (Sequent, CcaStructure) {
        let nkeys = self.rng.gen_range(1..=2);
        let keys: Vec<&str> = KEYS[..nkeys].to_vec();
        let mut st = CcaStructure::new(keys.iter().copied());
        let mut seq = Sequent::new(vec![], vec![]);
        let mut encs: Vec<(Term, Term)> = Vec::new();
        let ncalls = self.rng.gen_range(1..=4);
        let mut rand_id = 0;
        for i in 0..ncalls {
            let k = *keys.choose(&mut self.rng).unwrap();
            let pk = Term::pk(Term::name(k));
            let dec_ok = !encs.is_empty() && self.rng.gen_bool(0.35);
            if dec_ok {
                let (l, r) = encs.choose(&mut self.rng).unwrap().clone();
                let (ul, ur) = (Term::adv(&self.f, vec![l]), Term::adv(&self.f, vec![r]));
                let gl = required_guards(&ul, &st, &pk).unwrap_or_default();
                let gr: Vec<Term> = gl
                    .iter()
                    .map(|g| {
                        let a = &g.args()[1];
                        let b = encs.iter().find(|(x, _)| x == a).map_or(a.clone(), |(_, y)| y.clone());
                        Term::eq(ur.clone(), b)
                    })
                    .collect();
                let skk = Term::sk(Term::name(k));
                let (dl, dr) = (elses(&gl, &Term::dec(ul, skk.clone())), elses(&gr, &Term::dec(ur, skk)));
                st = st.dec_call(&format!("d{i}"), dl.clone(), dr.clone());
                seq.left.push(dl);
                seq.right.push(dr);
            } else {
                // Only block-sized plaintexts give a defined ciphertext length.
                let nestable: Vec<(Term, Term)> = encs.iter().filter(|(l, _)| l.args()[0].is_name()).cloned().collect();
                let (ml, mr) = if !nestable.is_empty() && self.rng.gen_bool(0.3) {
                    let (l, r) = nestable.choose(&mut self.rng).unwrap().clone();
                    let n = self.name();
                    (Term::pair(n.clone(), l), Term::pair(n, r))
                } else {
                    let shape = self.plaintext();
                    let other = if shape.is_name() { self.name() } else { Term::pair(self.name(), self.name()) };
                    (shape, other)
                };
                let rnd = Term::name(&format!("r{rand_id}"));
                rand_id += 1;
                let (l, r) = (Term::enc(ml, pk.clone(), rnd.clone()), Term::enc(mr, pk, rnd));
                st = st.enc_call(&format!("x{i}"), l.clone(), r.clone());
                encs.push((l.clone(), r.clone()));
                seq.left.push(l);
                seq.right.push(r);
            }
        }
        for _ in 0..self.rng.gen_range(0..=3) {
            let (l, r) = match self.rng.gen_range(0..4) {
                0 => {
                    let k = *keys.choose(&mut self.rng).unwrap();
                    (Term::pk(Term::name(k)), Term::pk(Term::name(k)))
                }
                1 => {
                    let n = Term::name(&format!("p{}", self.rng.gen_range(0..3)));
                    (n.clone(), n)
                }
                _ => {
                    let k = *keys.choose(&mut self.rng).unwrap();
                    let t = Term::adv(&self.f2, vec![Term::name("p0"), Term::pk(Term::name(k))]);
                    (t.clone(), t)
                }
            };
            seq.left.push(l);
            seq.right.push(r);
        }
        let mut idx: Vec<usize> = (0..seq.len()).collect();
        idx.shuffle(&mut self.rng);
        (seq.restricted(&idx), st)
    }

    /// A random sequent closed by Refl with a random name permutation.
    pub fn refl_leaf(&mut self) -> Derivation {
        let n = self.rng.gen_range(1..=3);
        let left: Vec<Term> = (0..n).map(|_| { let s = self.rng.gen_range(1..6); self.any_term(s) }).collect();
        let mut names: Vec<String> = {
            let mut set = BTreeSet::new();
            for t in &left {
                t.collect_names(&mut set);
            }
            set.iter().map(|s| s.to_string()).collect()
        };
        let from = names.clone();
        names.shuffle(&mut self.rng);
        let mu = Renaming::from_pairs(from.iter().map(String::as_str).zip(names.iter().map(String::as_str)));
        let right = left.iter().map(|t| t.rename(&mu)).collect();
        Derivation::leaf(Sequent::new(left, right), RuleApp::Refl { renaming: mu })
    }

    pub fn leaf(&mut self) -> Derivation {
        if self.rng.gen_bool(0.6) {
            let (seq, st) = self.cca_instance();
            Derivation::leaf(seq, RuleApp::Cca(st))
        } else {
            self.refl_leaf()
        }
    }

    fn perm(&mut self, d: Derivation, perm: Vec<usize>) -> Derivation {
        // Premise j is conclusion perm[j].
        let p = &d.conclusion;
        let mut left = p.left.clone();
        let mut right = p.right.clone();
        for (j, &k) in perm.iter().enumerate() {
            left[k] = p.left[j].clone();
            right[k] = p.right[j].clone();
        }
        Derivation::new(Sequent::new(left, right), RuleApp::Perm { perm }, vec![d])
    }

    /// Moves component `i` to the end.
    fn to_end(&mut self, d: Derivation, i: usize) -> Derivation {
        let n = d.conclusion.len();
        if i == n - 1 {
            return d;
        }
        // Conclusion order: others, then i.
        let order: Vec<usize> = (0..n).filter(|&k| k != i).chain([i]).collect();
        let mut perm = vec![0; n];
        for (pos, &k) in order.iter().enumerate() {
            perm[k] = pos;
        }
        self.perm(d, perm)
    }

    fn dup_last(&mut self, d: Derivation) -> Derivation {
        let mut c = d.conclusion.clone();
        let (l, r) = (c.left.last().unwrap().clone(), c.right.last().unwrap().clone());
        c.left.push(l);
        c.right.push(r);
        Derivation::new(c, RuleApp::Dup, vec![d])
    }

    fn fa(&mut self, d: Derivation, i: usize, k: usize) -> Derivation {
        let p = d.conclusion.clone();
        let sym = match k {
            1 => {
                if self.rng.gen() {
                    self.f.clone()
                } else {
                    self.h.clone()
                }
            }
            _ => self.f2.clone(),
        };
        let wrap = |ts: &[Term]| -> Vec<Term> {
            let mut v = ts.to_vec();
            let args: Vec<Term> = v.drain(i..i + k).collect();
            v.insert(i, Term::adv(&sym, args));
            v
        };
        let (use_pair, use_eq) = (k == 2 && self.rng.gen_bool(0.3), k == 2 && self.rng.gen_bool(0.2));
        let (left, right, name) = if use_pair || use_eq {
            let build = |ts: &[Term]| -> Vec<Term> {
                let mut v = ts.to_vec();
                let mut args: Vec<Term> = v.drain(i..i + 2).collect();
                let (b, a) = (args.pop().unwrap(), args.pop().unwrap());
                v.insert(i, if use_pair { Term::pair(a, b) } else { Term::eq(a, b) });
                v
            };
            (build(&p.left), build(&p.right), if use_pair { "pair" } else { "eq" })
        } else {
            (wrap(&p.left), wrap(&p.right), sym.name())
        };
        let rule = RuleApp::Fa { symbol: name.to_string(), arity: k, index: i };
        Derivation::new(Sequent::new(left, right), rule, vec![d])
    }

    /// An R-equal variant of `t`.
    fn expand(&mut self, t: &Term) -> Term {
        match self.rng.gen_range(0..4) {
            0 => Term::fst(Term::pair(t.clone(), self.name())),
            1 => Term::snd(Term::pair(self.term(2), t.clone())),
            2 => {
                let b = self.condition(3);
                Term::ite(b, t.clone(), t.clone())
            }
            _ => {
                let k = self.key();
                Term::dec(Term::enc(t.clone(), Term::pk(k.clone()), self.name()), Term::sk(k))
            }
        }
    }

    fn rw(&mut self, d: Derivation, side: Side, i: usize) -> Derivation {
        let mut c = d.conclusion.clone();
        let orig = c.side(side)[i].clone();
        let t = self.expand(&orig);
        match side {
            Side::Left => c.left[i] = t,
            Side::Right => c.right[i] = t,
        }
        Derivation::new(c, RuleApp::Rw { side, index: i, replacement: orig }, vec![d])
    }

    fn restr(&mut self, d: Derivation) -> Derivation {
        let n = d.conclusion.len();
        let mut kept: Vec<usize> = (0..n).filter(|_| self.rng.gen_bool(0.7)).collect();
        if kept.is_empty() {
            kept.push(self.rng.gen_range(0..n));
        }
        if self.rng.gen_bool(0.3) {
            kept.shuffle(&mut self.rng);
        }
        crate::proof::restr_node(d, kept)
    }

    /// A case study whose conditional is built from an if-free component;
    /// both branches are proven by the same derivation, the else branch
    /// possibly behind a rewrite.
    fn cs(&mut self, d: Derivation) -> Option<Derivation> {
        let n = d.conclusion.len();
        let src = (0..n).filter(|&i| d.conclusion.left[i].is_if_free() && d.conclusion.right[i].is_if_free()).collect::<Vec<_>>();
        let &i = src.choose(&mut self.rng)?;
        if n < 2 {
            return None;
        }
        // [.., x] then [.., x, x] then [.., x, h(x)].
        let d = self.to_end(d, i);
        let d = self.dup_last(d);
        let last = d.conclusion.len() - 1;
        let mut c = d.conclusion.clone();
        c.left[last] = Term::adv(&self.h, vec![c.left[last].clone()]);
        c.right[last] = Term::adv(&self.h, vec![c.right[last].clone()]);
        let d = Derivation::new(c, RuleApp::Fa { symbol: "h".into(), arity: 1, index: last }, vec![d]);
        // Sequent is now [w.., b]; pick branch components t among w.
        let m = d.conclusion.len() - 1;
        let nt = self.rng.gen_range(1..=m.min(2));
        let mut ts: Vec<usize> = (0..m).collect();
        ts.shuffle(&mut self.rng);
        ts.truncate(nt);
        let rest: Vec<usize> = (0..m).filter(|k| !ts.contains(k)).collect();
        // Premise layout: rest, b, branches.
        let layout: Vec<usize> = rest.iter().copied().chain([m]).chain(ts.iter().copied()).collect();
        let mut perm = vec![0; layout.len()];
        for (pos, &k) in layout.iter().enumerate() {
            perm[k] = pos;
        }
        let then = self.perm(d, perm);
        let mut els = then.clone();
        if self.rng.gen() {
            let j = then.conclusion.len() - 1;
            let side = if self.rng.gen() { Side::Left } else { Side::Right };
            els = self.rw(els, side, j);
        }
        let (pt, pe) = (&then.conclusion, &els.conclusion);
        let r = rest.len();
        let m2 = r + 1 + nt;
        // Conclusion: rest in order with the targets inserted at random spots.
        let mut slots: Vec<Option<usize>> = (0..r).map(Some).collect();
        let mut targets = Vec::new();
        for k in 0..nt {
            let pos = self.rng.gen_range(0..=slots.len());
            slots.insert(pos, None);
            let _ = k;
        }
        let mut left = Vec::with_capacity(m2 - 1);
        let mut right = Vec::with_capacity(m2 - 1);
        let mut k = 0;
        for (pos, s) in slots.iter().enumerate() {
            match s {
                Some(j) => {
                    left.push(pt.left[*j].clone());
                    right.push(pt.right[*j].clone());
                }
                None => {
                    targets.push(pos);
                    left.push(Term::ite(pt.left[r].clone(), pt.left[r + 1 + k].clone(), pe.left[r + 1 + k].clone()));
                    right.push(Term::ite(pt.right[r].clone(), pt.right[r + 1 + k].clone(), pe.right[r + 1 + k].clone()));
                    k += 1;
                }
            }
        }
        Some(Derivation::new(Sequent::new(left, right), RuleApp::Cs { targets }, vec![then, els]))
    }

    /// A valid derivation built from `steps` forward rule applications.
    /// Restr nodes appear only when `restr` is set.
    pub fn proof(&mut self, steps: usize, restr: bool) -> Derivation {
        let mut d = self.leaf();
        for _ in 0..steps {
            let n = d.conclusion.len();
            d = match self.rng.gen_range(0..8) {
                0 if n >= 2 => {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(&mut self.rng);
                    self.perm(d, p)
                }
                1 => {
                    let i = self.rng.gen_range(0..n);
                    let d = self.to_end(d, i);
                    self.dup_last(d)
                }
                2 | 3 => {
                    let k = self.rng.gen_range(1..=n.min(2));
                    let i = self.rng.gen_range(0..=n - k);
                    self.fa(d, i, k)
                }
                4 => {
                    let side = if self.rng.gen() { Side::Left } else { Side::Right };
                    let i = self.rng.gen_range(0..n);
                    self.rw(d, side, i)
                }
                5 => Derivation::new(d.conclusion.swapped(), RuleApp::Sym, vec![d]),
                6 if restr && n >= 2 => self.restr(d),
                _ => match self.cs(d.clone()) {
                    Some(c) if c.conclusion.size() < 400 => c,
                    _ => d,
                },
            };
        }
        d
    }

    /// A derivation guaranteed to contain at least one Restr node.
    pub fn proof_with_restr(&mut self, steps: usize) -> Derivation {
        loop {
            let d = self.proof(steps, true);
            if d.count_rule("restr") > 0 {
                return d;
            }
        }
    }

    /// A CCA instance with some components dropped, together with the
    /// structure of the full instance.
    pub fn weakened_instance(&mut self) -> (Sequent, CcaStructure) {
        let (seq, st) = self.cca_instance();
        let n = seq.len();
        let mut kept: Vec<usize> = (0..n).filter(|_| self.rng.gen_bool(0.5)).collect();
        if kept.is_empty() {
            kept.push(self.rng.gen_range(0..n));
        }
        (seq.restricted(&kept), st)
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::cca::verify_cca_instance;
    use crate::proof::check_proof;
    use crate::term::order::CanonicalOrder;

    #[test]
    fn instances_verify() {
        let mut g = Gen::new(1);
        for _ in 0..200 {
            let (seq, st) = g.cca_instance();
            let v = verify_cca_instance(&seq, &st, &g.lengths());
            assert!(v.is_accept(), "{seq:?}\n{st:?}\n{v:?}");
        }
    }

    #[test]
    fn proofs_check() {
        let mut g = Gen::new(2);
        let o = CanonicalOrder::default();
        let mut rules = BTreeSet::new();
        for i in 0..150 {
            let d = g.proof(i % 12, true);
            d.visit(&mut |_, n| {
                rules.insert(n.rule.name());
            });
            let v = check_proof(&d, &o, &g.lengths());
            assert!(v.is_accept(), "{v:?}");
        }
        for r in ["cca", "refl", "fa", "dup", "cs", "rw", "perm", "sym", "restr"] {
            assert!(rules.contains(r), "{r} never generated");
        }
    }
}
