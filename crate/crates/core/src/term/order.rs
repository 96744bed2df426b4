//! Orders on terms: the canonical total order, the lexicographic path order
//! induced by the symbol precedence, and the user order on conditionals.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use super::{Kind, Signature, Symbol, Term, TermError};

/// Precedence key of a head symbol. Names are treated as nullary symbols
/// ranked above every function symbol.
fn head_key(t: &Term) -> (u8, &str) {
    match t.kind() {
        Kind::Name(n) => (13, n),
        Kind::App(s, _) => symbol_key(s),
    }
}

fn symbol_key(s: &Symbol) -> (u8, &str) {
    let rank = match s {
        Symbol::Ite => 0,
        Symbol::True => 1,
        Symbol::False => 2,
        Symbol::Zero => 3,
        Symbol::Eq => 4,
        Symbol::Fst => 5,
        Symbol::Snd => 6,
        Symbol::Pair => 7,
        Symbol::Dec => 8,
        Symbol::Enc => 9,
        Symbol::Pk => 10,
        Symbol::Sk => 11,
        Symbol::Adv(a) => return (12, a.name()),
    };
    (rank, "")
}

/// Total order on terms: head precedence, then arity, then arguments
/// lexicographically. Equal only on identical terms.
pub fn canonical_compare(s: &Term, t: &Term) -> Ordering {
    if s.ptr_eq(t) {
        return Ordering::Equal;
    }
    head_key(s)
        .cmp(&head_key(t))
        .then_with(|| s.args().len().cmp(&t.args().len()))
        .then_with(|| {
            for (a, b) in s.args().iter().zip(t.args()) {
                match canonical_compare(a, b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
}

/// The lexicographic path order `s ≻ t`.
pub fn lpo_greater(s: &Term, t: &Term) -> bool {
    if s == t {
        return false;
    }
    if s.args().iter().any(|si| si == t || lpo_greater(si, t)) {
        return true;
    }
    let dominates = || t.args().iter().all(|tj| lpo_greater(s, tj));
    match head_key(s).cmp(&head_key(t)) {
        Ordering::Greater => dominates(),
        Ordering::Equal if s.args().len() == t.args().len() => {
            let first_diff = s.args().iter().zip(t.args()).find(|(a, b)| a != b);
            match first_diff {
                Some((a, b)) => lpo_greater(a, b) && dominates(),
                None => false,
            }
        }
        _ => false,
    }
}

/// The order on if-free normal conditionals used by the swap rules.
#[derive(Clone, Debug, Default)]
pub enum CondOrder {
    /// `canonical_compare`.
    #[default]
    Canonical,
    /// The reverse of `canonical_compare`.
    Reversed,
    /// Explicit ranks; earlier entries are smaller and unlisted
    /// conditionals sit above all listed ones, ordered canonically.
    Listed(Arc<HashMap<Term, usize>>),
}

/// Bundles the symbol precedence (fixed) with the conditional order.
#[derive(Clone, Debug, Default)]
pub struct CanonicalOrder {
    pub cond: CondOrder,
}

impl CanonicalOrder {
    pub fn reversed() -> Self {
        CanonicalOrder { cond: CondOrder::Reversed }
    }

    pub fn listed(terms: Vec<Term>) -> Self {
        let mut ranks = HashMap::new();
        for t in terms {
            let next = ranks.len();
            ranks.entry(t).or_insert(next);
        }
        CanonicalOrder { cond: CondOrder::Listed(Arc::new(ranks)) }
    }

    /// Reads an order file: one conditional per line, smallest first.
    /// Blank lines and `;` comments are ignored.
    pub fn from_order_file(src: &str, sig: &Signature) -> Result<Self, TermError> {
        let mut terms = Vec::new();
        for s in super::sexp::parse_all(src)? {
            terms.push(super::term_from_sexp(&s, sig)?);
        }
        Ok(Self::listed(terms))
    }

    /// Compares two conditionals under the user order.
    pub fn cond_compare(&self, a: &Term, b: &Term) -> Ordering {
        match &self.cond {
            CondOrder::Canonical => canonical_compare(a, b),
            CondOrder::Reversed => canonical_compare(b, a),
            CondOrder::Listed(ranks) => match (ranks.get(a), ranks.get(b)) {
                (Some(x), Some(y)) => x.cmp(y),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => canonical_compare(a, b),
            },
        }
    }

    pub fn cond_greater(&self, b: &Term, a: &Term) -> bool {
        self.cond_compare(b, a) == Ordering::Greater
    }
}

#[cfg(test)]
mod test {
    use super::*;

    fn n(x: &str) -> Term {
        Term::name(x)
    }

    #[test]
    fn canonical_basics() {
        let a = n("a");
        let b = n("b");
        assert_eq!(canonical_compare(&a, &b), Ordering::Less);
        assert_eq!(canonical_compare(&Term::tt(), &a), Ordering::Less);
        assert_eq!(canonical_compare(&Term::ite(Term::tt(), a.clone(), b.clone()), &Term::tt()), Ordering::Less);
        assert_eq!(canonical_compare(&Term::pair(a.clone(), b.clone()), &Term::pair(a.clone(), b.clone())), Ordering::Equal);
    }

    #[test]
    fn lpo_subterm_and_precedence() {
        let a = n("a");
        let p = Term::pair(a.clone(), n("b"));
        assert!(lpo_greater(&p, &a));
        assert!(!lpo_greater(&a, &p));
        // enc above pair in the precedence.
        let e = Term::enc(a.clone(), n("k"), n("r"));
        assert!(lpo_greater(&e, &Term::pair(a.clone(), n("k"))));
        assert!(!lpo_greater(&Term::pair(a.clone(), n("k")), &e));
        // ite is minimal.
        let c = Term::eq(n("x"), n("y"));
        assert!(!lpo_greater(&Term::fst(n("a")), &Term::ite(c.clone(), n("a"), n("a"))));
        assert!(lpo_greater(&Term::fst(Term::ite(c.clone(), n("z"), n("z"))), &Term::ite(c, Term::fst(n("z")), Term::fst(n("z")))));
    }

    #[test]
    fn listed_order() {
        let a = Term::eq(n("a"), n("a2"));
        let b = Term::eq(n("b"), n("b2"));
        let c = Term::eq(n("c"), n("c2"));
        let o = CanonicalOrder::listed(vec![b.clone(), a.clone()]);
        assert!(o.cond_greater(&a, &b));
        assert!(o.cond_greater(&c, &a));
        assert!(!CanonicalOrder::default().cond_greater(&a, &b));
        assert!(CanonicalOrder::reversed().cond_greater(&a, &b));
    }
}
