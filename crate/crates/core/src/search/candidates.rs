//! The candidate-term pool `B(t, t')` bounding the terms a search may
//! introduce.

use std::collections::{BTreeMap, BTreeSet};

use crate::rewrite::{decompose, normalize, RewriteError};
use crate::sequent::Sequent;
use crate::term::order::CanonicalOrder;
use crate::term::{Symbol, Term};

/// `B(t, t')` together with the per-key-set pools it is the union of.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateSet {
    pub terms: BTreeSet<Term>,
    /// The pool for each key set `K` (seeds of `sk(n)`).
    pub per_keys: BTreeMap<BTreeSet<String>, BTreeSet<Term>>,
    /// Sizes of the normal forms the pool was built from.
    pub normal_sizes: Vec<usize>,
    /// Whether some enumeration was cut short by the cap.
    pub truncated: bool,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_member_size(&self) -> usize {
        self.terms.iter().map(Term::size).max().unwrap_or(0)
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.terms.contains(t)
    }

    /// Bool-sorted if-free members: the possible introduced conditionals.
    pub fn conditionals(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| t.is_if_free() && t.sort() == crate::term::Sort::Bool && !t.is_name())
    }

    /// Members of the form `eq(s, α)`.
    pub fn guards(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| t.is_app_of(&Symbol::Eq))
    }

    fn absorb(&mut self, other: CandidateSet) {
        self.terms.extend(other.terms);
        for (k, v) in other.per_keys {
            self.per_keys.entry(k).or_default().extend(v);
        }
        self.normal_sizes.extend(other.normal_sizes);
        self.truncated |= other.truncated;
    }
}

struct Zeta<'a> {
    keys: &'a BTreeSet<String>,
    cap: usize,
    truncated: bool,
}

impl Zeta<'_> {
    fn run(&mut self, u: &Term) -> Vec<Term> {
        let args = u.args();
        if u.is_app_of(&Symbol::Zero) && args[0].is_app_of(&Symbol::Dec) {
            let d = &args[0];
            if d.args()[1].sk_seed().is_some_and(|s| self.keys.contains(s)) {
                return self.run(&d.args()[0]).into_iter().map(|v| Term::dec(v, d.args()[1].clone())).collect();
            }
        }
        if u.is_app_of(&Symbol::Enc) && args[1].pk_seed().is_some_and(|s| self.keys.contains(s)) {
            let mut out = vec![u.clone()];
            for v in self.run(&args[0]) {
                if v != args[0] {
                    out.push(Term::enc(v, args[1].clone(), args[2].clone()));
                }
            }
            return out;
        }
        if args.is_empty() {
            return vec![u.clone()];
        }
        let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
        for a in args {
            let opts = self.run(a);
            let mut next = Vec::with_capacity(acc.len() * opts.len());
            'outer: for prefix in &acc {
                for o in &opts {
                    if next.len() >= self.cap {
                        self.truncated = true;
                        break 'outer;
                    }
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    next.push(p);
                }
            }
            acc = next;
        }
        acc.into_iter().map(|a| u.with_args(a)).collect()
    }
}

/// `ζ_K(u)` for an if-free `u`, listing at most `cap` terms per position.
pub fn zeta(u: &Term, keys: &BTreeSet<String>, cap: usize) -> BTreeSet<Term> {
    Zeta { keys, cap, truncated: false }.run(u).into_iter().collect()
}

/// `guards_K(S)`: `eq(s, α)` for every `dec(s, sk(n)) ∈ S` with `n ∈ K`
/// and every encryption `α` under `pk(n)` occurring in `s`.
pub fn guards(set: &BTreeSet<Term>, keys: &BTreeSet<String>) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for d in set {
        if !d.is_app_of(&Symbol::Dec) {
            continue;
        }
        let Some(seed) = d.args()[1].sk_seed().filter(|s| keys.contains(*s)) else {
            continue;
        };
        let s = &d.args()[0];
        for a in s.subterms() {
            if a.is_app_of(&Symbol::Enc) && a.args()[1].pk_seed() == Some(seed) {
                out.insert(Term::eq(s.clone(), a));
            }
        }
    }
    out
}

/// Seeds `n` of the secret keys `sk(n)` occurring in `t`.
pub fn secret_keys(t: &Term) -> BTreeSet<String> {
    t.subterms().iter().filter_map(|s| s.sk_seed().map(str::to_string)).collect()
}

fn subsets(keys: &BTreeSet<String>) -> Vec<BTreeSet<String>> {
    let ks: Vec<&String> = keys.iter().collect();
    let mut out: Vec<BTreeSet<String>> = (0u64..1 << ks.len())
        .map(|m| ks.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, k)| (*k).clone()).collect())
        .collect();
    out.sort_by_key(|s| s.len());
    out
}

/// Key subsets tried when there are too many keys to enumerate.
const MAX_KEYS: usize = 10;

/// `B(t)`: the union over `K ⊆ S_key(t)` and `u` in the subterms of the
/// leaves and conditionals of `t↓` of `ζ_K(u) ∪ guards_K(ζ_K(u))`.
pub fn candidates_of(t: &Term, order: &CanonicalOrder, cap: usize) -> Result<CandidateSet, RewriteError> {
    let nf = normalize(t, order)?;
    let dec = decompose(&nf)?;
    let mut base = BTreeSet::new();
    for u in dec.leaves.iter().chain(dec.conds.iter()) {
        u.collect_subterms(&mut base);
    }
    let mut keys = secret_keys(&nf);
    let mut out = CandidateSet { normal_sizes: vec![nf.size()], ..Default::default() };
    if keys.len() > MAX_KEYS {
        keys = keys.into_iter().take(MAX_KEYS).collect();
        out.truncated = true;
    }
    for k in subsets(&keys) {
        let mut z = Zeta { keys: &k, cap, truncated: false };
        let mut pool = BTreeSet::new();
        for u in &base {
            let zs: BTreeSet<Term> = z.run(u).into_iter().collect();
            pool.extend(guards(&zs, &k));
            pool.extend(zs);
        }
        out.truncated |= z.truncated;
        out.terms.extend(pool.iter().cloned());
        out.per_keys.insert(k, pool);
    }
    Ok(out)
}

/// `B(t, t') = B(t) ∪ B(t')`.
pub fn candidate_terms(t: &Term, t2: &Term, order: &CanonicalOrder, cap: usize) -> Result<CandidateSet, RewriteError> {
    let mut a = candidates_of(t, order, cap)?;
    a.absorb(candidates_of(t2, order, cap)?);
    Ok(a)
}

/// The pool for a whole sequent: the union over all components.
pub fn candidate_pool(seq: &Sequent, order: &CanonicalOrder, cap: usize) -> Result<CandidateSet, RewriteError> {
    let mut out = CandidateSet::default();
    for t in seq.left.iter().chain(seq.right.iter()) {
        out.absorb(candidates_of(t, order, cap)?);
    }
    Ok(out)
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::term::{AdvSymbol, Sort};

    fn n(x: &str) -> Term {
        Term::name(x)
    }

    #[test]
    fn zeta_unzeroes_decryptions() {
        let sk = Term::sk(n("k"));
        let w = Term::zero(Term::dec(n("c"), sk.clone()));
        let u = Term::zero(Term::dec(Term::pair(w.clone(), n("a")), sk.clone()));
        let k: BTreeSet<String> = ["k".to_string()].into();
        let z = zeta(&u, &k, 1000);
        assert!(z.contains(&Term::dec(Term::pair(Term::dec(n("c"), sk.clone()), n("a")), sk.clone())));
        assert!(z.iter().all(|t| !t.is_app_of(&Symbol::Zero)));
        assert_eq!(zeta(&u, &BTreeSet::new(), 1000), [u].into());
    }

    #[test]
    fn zeta_may_stop_at_encryptions() {
        let pk = Term::pk(n("k"));
        let sk = Term::sk(n("k"));
        let inner = Term::zero(Term::dec(n("c"), sk.clone()));
        let e = Term::enc(inner.clone(), pk.clone(), n("r"));
        let k: BTreeSet<String> = ["k".to_string()].into();
        let z = zeta(&e, &k, 1000);
        assert_eq!(z, [e.clone(), Term::enc(Term::dec(n("c"), sk), pk, n("r"))].into());
    }

    #[test]
    fn no_keys_gives_subterms() {
        let g = AdvSymbol::new("g", 1, Sort::Bool);
        let t = Term::ite(Term::adv(&g, vec![n("a")]), Term::pair(n("a"), n("b")), n("c"));
        let b = candidates_of(&t, &CanonicalOrder::default(), 4096).unwrap();
        let mut expect = BTreeSet::new();
        for s in [Term::adv(&g, vec![n("a")]), Term::pair(n("a"), n("b")), n("c")] {
            s.collect_subterms(&mut expect);
        }
        assert_eq!(b.terms, expect);
    }

    #[test]
    fn guards_for_decryptions() {
        let pk = Term::pk(n("k"));
        let sk = Term::sk(n("k"));
        let g = AdvSymbol::new("g", 1, Sort::Message);
        let a = Term::enc(n("m"), pk, n("r"));
        let s = Term::adv(&g, vec![a.clone()]);
        let t = Term::pair(Term::dec(s.clone(), sk), n("x"));
        let b = candidates_of(&t, &CanonicalOrder::default(), 4096).unwrap();
        assert!(b.contains(&Term::eq(s, a)));
        assert_eq!(b.guards().count(), 1);
    }
}
