//! Terms over the cryptographic signature.
//!
//! Terms are immutable and reference counted. Every node caches its size,
//! sort, hash and whether it is if-free, so these queries are O(1).

mod parse;
pub mod order;
pub mod sexp;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

pub use parse::{parse_term, term_from_sexp, Signature};

/// Reserved nullary adversarial symbol used as the body of dummy encryptions.
pub const DUMMY: &str = "__dummy";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Message,
    Bool,
}

impl Sort {
    /// Whether a term of sort `actual` may fill a slot expecting `self`.
    pub fn accepts(self, actual: Sort) -> bool {
        self == Sort::Message || actual == Sort::Bool
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Message => f.write_str("message"),
            Sort::Bool => f.write_str("bool"),
        }
    }
}

/// An adversarial function symbol. Identity is the name alone.
#[derive(Clone, Debug)]
pub struct AdvSymbol {
    name: Arc<str>,
    arity: usize,
    sort: Sort,
}

impl AdvSymbol {
    pub fn new(name: &str, arity: usize, sort: Sort) -> Self {
        AdvSymbol { name: name.into(), arity, sort }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn dummy() -> Self {
        AdvSymbol::new(DUMMY, 0, Sort::Message)
    }
}

impl PartialEq for AdvSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for AdvSymbol {}

impl Hash for AdvSymbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Pair,
    Fst,
    Snd,
    Pk,
    Sk,
    Enc,
    Dec,
    Ite,
    True,
    False,
    Zero,
    Eq,
    Adv(AdvSymbol),
}

impl Symbol {
    pub const BUILTINS: [Symbol; 12] = [
        Symbol::Pair,
        Symbol::Fst,
        Symbol::Snd,
        Symbol::Pk,
        Symbol::Sk,
        Symbol::Enc,
        Symbol::Dec,
        Symbol::Ite,
        Symbol::True,
        Symbol::False,
        Symbol::Zero,
        Symbol::Eq,
    ];

    pub fn arity(&self) -> usize {
        match self {
            Symbol::True | Symbol::False => 0,
            Symbol::Fst | Symbol::Snd | Symbol::Pk | Symbol::Sk | Symbol::Zero => 1,
            Symbol::Pair | Symbol::Dec | Symbol::Eq => 2,
            Symbol::Enc | Symbol::Ite => 3,
            Symbol::Adv(a) => a.arity,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::Pair => "pair",
            Symbol::Fst => "fst",
            Symbol::Snd => "snd",
            Symbol::Pk => "pk",
            Symbol::Sk => "sk",
            Symbol::Enc => "enc",
            Symbol::Dec => "dec",
            Symbol::Ite => "ite",
            Symbol::True => "true",
            Symbol::False => "false",
            Symbol::Zero => "zero",
            Symbol::Eq => "eq",
            Symbol::Adv(a) => &a.name,
        }
    }

    pub fn builtin(name: &str) -> Option<Symbol> {
        Symbol::BUILTINS.iter().find(|s| s.name() == name).cloned()
    }

    pub fn is_adv(&self) -> bool {
        matches!(self, Symbol::Adv(_))
    }

    /// Sort demanded of argument `i`.
    pub fn arg_sort(&self, i: usize) -> Sort {
        match (self, i) {
            (Symbol::Ite, 0) => Sort::Bool,
            _ => Sort::Message,
        }
    }

    fn result_sort(&self, args: &[Term]) -> Sort {
        match self {
            Symbol::Eq | Symbol::True | Symbol::False => Sort::Bool,
            Symbol::Ite if args[1].sort() == Sort::Bool && args[2].sort() == Sort::Bool => {
                Sort::Bool
            }
            Symbol::Adv(a) => a.sort,
            _ => Sort::Message,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} arguments, got {got}")]
    Arity { symbol: String, expected: usize, got: usize },
    #[error("sort violation: argument {index} of `{symbol}` must be {expected}")]
    Sort { symbol: String, index: usize, expected: Sort },
    #[error("invalid position {0}")]
    InvalidPosition(Position),
    #[error("renaming is not injective on `{0}`")]
    NotInjective(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Name(Arc<str>),
    App(Symbol, Vec<Term>),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    size: usize,
    sort: Sort,
    if_free: bool,
    hash: u64,
}

#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    pub fn name(id: &str) -> Term {
        let mut h = DefaultHasher::new();
        0u8.hash(&mut h);
        id.hash(&mut h);
        Term(Arc::new(Node {
            kind: Kind::Name(id.into()),
            size: 1,
            sort: Sort::Message,
            if_free: true,
            hash: h.finish(),
        }))
    }

    /// Builds an application, checking arity and sorts.
    pub fn app(sym: Symbol, args: Vec<Term>) -> Result<Term, TermError> {
        if args.len() != sym.arity() {
            return Err(TermError::Arity {
                symbol: sym.name().to_string(),
                expected: sym.arity(),
                got: args.len(),
            });
        }
        for (i, a) in args.iter().enumerate() {
            let want = sym.arg_sort(i);
            if !want.accepts(a.sort()) {
                return Err(TermError::Sort {
                    symbol: sym.name().to_string(),
                    index: i,
                    expected: want,
                });
            }
        }
        Ok(Term::mk(sym, args))
    }

    /// Builds an application whose arity and sorts are known to be correct.
    pub(crate) fn mk(sym: Symbol, args: Vec<Term>) -> Term {
        debug_assert_eq!(args.len(), sym.arity());
        debug_assert!(args.iter().enumerate().all(|(i, a)| sym.arg_sort(i).accepts(a.sort())));
        let mut h = DefaultHasher::new();
        1u8.hash(&mut h);
        sym.hash(&mut h);
        let mut size = 1;
        let mut if_free = sym != Symbol::Ite;
        for a in &args {
            a.0.hash.hash(&mut h);
            size += a.0.size;
            if_free &= a.0.if_free;
        }
        let sort = sym.result_sort(&args);
        Term(Arc::new(Node { kind: Kind::App(sym, args), size, sort, if_free, hash: h.finish() }))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::mk(Symbol::Pair, vec![a, b])
    }

    pub fn fst(a: Term) -> Term {
        Term::mk(Symbol::Fst, vec![a])
    }

    pub fn snd(a: Term) -> Term {
        Term::mk(Symbol::Snd, vec![a])
    }

    pub fn pk(a: Term) -> Term {
        Term::mk(Symbol::Pk, vec![a])
    }

    pub fn sk(a: Term) -> Term {
        Term::mk(Symbol::Sk, vec![a])
    }

    pub fn enc(m: Term, key: Term, r: Term) -> Term {
        Term::mk(Symbol::Enc, vec![m, key, r])
    }

    pub fn dec(c: Term, key: Term) -> Term {
        Term::mk(Symbol::Dec, vec![c, key])
    }

    /// Panics (in debug builds) if `b` is not Bool-sorted.
    pub fn ite(b: Term, x: Term, y: Term) -> Term {
        Term::mk(Symbol::Ite, vec![b, x, y])
    }

    pub fn tt() -> Term {
        Term::mk(Symbol::True, vec![])
    }

    pub fn ff() -> Term {
        Term::mk(Symbol::False, vec![])
    }

    pub fn zero(a: Term) -> Term {
        Term::mk(Symbol::Zero, vec![a])
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::mk(Symbol::Eq, vec![a, b])
    }

    pub fn adv(sym: &AdvSymbol, args: Vec<Term>) -> Term {
        Term::mk(Symbol::Adv(sym.clone()), args)
    }

    pub fn dummy() -> Term {
        Term::adv(&AdvSymbol::dummy(), vec![])
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn sort(&self) -> Sort {
        self.0.sort
    }

    pub fn is_if_free(&self) -> bool {
        self.0.if_free
    }

    pub fn as_name(&self) -> Option<&str> {
        match &self.0.kind {
            Kind::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_name(&self) -> bool {
        self.as_name().is_some()
    }

    pub fn head(&self) -> Option<&Symbol> {
        match &self.0.kind {
            Kind::App(s, _) => Some(s),
            Kind::Name(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match &self.0.kind {
            Kind::App(_, a) => a,
            Kind::Name(_) => &[],
        }
    }

    pub fn is_app_of(&self, sym: &Symbol) -> bool {
        self.head() == Some(sym)
    }

    pub fn is_ite(&self) -> bool {
        self.is_app_of(&Symbol::Ite)
    }

    pub fn is_dummy(&self) -> bool {
        matches!(self.head(), Some(Symbol::Adv(a)) if a.name() == DUMMY)
    }

    /// The components of `ite(b, x, y)`.
    pub fn as_ite(&self) -> Option<(&Term, &Term, &Term)> {
        match &self.0.kind {
            Kind::App(Symbol::Ite, a) => Some((&a[0], &a[1], &a[2])),
            _ => None,
        }
    }

    /// The seed `n` of `pk(n)` when `n` is a name.
    pub fn pk_seed(&self) -> Option<&str> {
        match &self.0.kind {
            Kind::App(Symbol::Pk, a) => a[0].as_name(),
            _ => None,
        }
    }

    /// The seed `n` of `sk(n)` when `n` is a name.
    pub fn sk_seed(&self) -> Option<&str> {
        match &self.0.kind {
            Kind::App(Symbol::Sk, a) => a[0].as_name(),
            _ => None,
        }
    }

    pub fn with_args(&self, args: Vec<Term>) -> Term {
        match &self.0.kind {
            Kind::App(s, _) => Term::mk(s.clone(), args),
            Kind::Name(_) => self.clone(),
        }
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn subterm_at(&self, p: &Position) -> Result<&Term, TermError> {
        let mut t = self;
        for &i in &p.0 {
            t = t.args().get(i).ok_or_else(|| TermError::InvalidPosition(p.clone()))?;
        }
        Ok(t)
    }

    /// Replaces the subterm at `p`, re-checking sorts along the path.
    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, TermError> {
        fn go(t: &Term, path: &[usize], s: Term, p: &Position) -> Result<Term, TermError> {
            let Some((&i, rest)) = path.split_first() else {
                return Ok(s);
            };
            let args = t.args();
            if i >= args.len() {
                return Err(TermError::InvalidPosition(p.clone()));
            }
            let mut new_args = args.to_vec();
            new_args[i] = go(&args[i], rest, s, p)?;
            Term::app(t.head().unwrap().clone(), new_args)
        }
        go(self, &p.0, s, p)
    }

    /// Replaces every occurrence of `from` by `to`, outermost first.
    pub fn replace_all(&self, from: &Term, to: &Term) -> Term {
        self.map_top_down(&mut |t| if t == from { Some(to.clone()) } else { None })
    }

    /// Rebuilds the term, replacing the outermost subterms for which `f`
    /// returns `Some`. Sort correctness is the caller's responsibility.
    pub fn map_top_down(&self, f: &mut impl FnMut(&Term) -> Option<Term>) -> Term {
        if let Some(r) = f(self) {
            return r;
        }
        match &self.0.kind {
            Kind::Name(_) => self.clone(),
            Kind::App(s, args) => {
                let new: Vec<Term> = args.iter().map(|a| a.map_top_down(f)).collect();
                if new.iter().zip(args).all(|(a, b)| a.ptr_eq(b)) {
                    self.clone()
                } else {
                    Term::mk(s.clone(), new)
                }
            }
        }
    }

    /// Pre-order traversal with positions.
    pub fn visit(&self, f: &mut impl FnMut(&Position, &Term)) {
        fn go(t: &Term, p: &mut Vec<usize>, f: &mut impl FnMut(&Position, &Term)) {
            let pos = Position(p.clone());
            f(&pos, t);
            for (i, a) in t.args().iter().enumerate() {
                p.push(i);
                go(a, p, f);
                p.pop();
            }
        }
        go(self, &mut Vec::new(), f)
    }

    /// Set of all subterms, including the term itself.
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    pub fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        if out.insert(self.clone()) {
            for a in self.args() {
                a.collect_subterms(out);
            }
        }
    }

    pub fn names(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    pub fn collect_names(&self, out: &mut BTreeSet<Arc<str>>) {
        match &self.0.kind {
            Kind::Name(n) => {
                out.insert(n.clone());
            }
            Kind::App(_, args) => args.iter().for_each(|a| a.collect_names(out)),
        }
    }

    pub fn contains_name(&self, n: &str) -> bool {
        match &self.0.kind {
            Kind::Name(m) => &**m == n,
            Kind::App(_, args) => args.iter().any(|a| a.contains_name(n)),
        }
    }

    pub fn contains(&self, sub: &Term) -> bool {
        self == sub || self.args().iter().any(|a| a.contains(sub))
    }

    pub fn contains_symbol(&self, sym: &Symbol) -> bool {
        self.head() == Some(sym) || self.args().iter().any(|a| a.contains_symbol(sym))
    }

    /// Adversarial symbols occurring in the term.
    pub fn adv_symbols(&self, out: &mut BTreeMap<String, AdvSymbol>) {
        if let Some(Symbol::Adv(a)) = self.head() {
            out.entry(a.name().to_string()).or_insert_with(|| a.clone());
        }
        self.args().iter().for_each(|a| a.adv_symbols(out));
    }

    pub fn rename(&self, mu: &Renaming) -> Term {
        if mu.is_identity() {
            return self.clone();
        }
        self.map_top_down(&mut |t| t.as_name().map(|n| Term::name(mu.apply(n))))
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.kind == other.0.kind)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        order::canonical_compare(self, other)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Name(n) => write!(f, "n.{n}"),
            Kind::App(Symbol::Adv(a), args) => {
                write!(f, "(adv {}", a.name())?;
                for x in args {
                    write!(f, " {x}")?;
                }
                f.write_str(")")
            }
            Kind::App(s, args) if args.is_empty() => f.write_str(s.name()),
            Kind::App(s, args) => {
                write!(f, "({}", s.name())?;
                for x in args {
                    write!(f, " {x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A path of argument indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("]")
    }
}

/// A finite name renaming, extended by the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Renaming(BTreeMap<Arc<str>, Arc<str>>);

impl Renaming {
    pub fn identity() -> Self {
        Renaming::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut m = BTreeMap::new();
        for (a, b) in pairs {
            if a.as_ref() != b.as_ref() {
                m.insert(Arc::from(a.as_ref()), Arc::from(b.as_ref()));
            }
        }
        Renaming(m)
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply<'a>(&'a self, n: &'a str) -> &'a str {
        self.0.get(n).map(|s| &**s).unwrap_or(n)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, b)| (&**a, &**b))
    }

    /// Checks that the renaming is injective on `names`.
    pub fn check_injective<'a>(
        &self,
        names: impl IntoIterator<Item = &'a Arc<str>>,
    ) -> Result<(), TermError> {
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        for n in names {
            let img = self.apply(n);
            if let Some(prev) = seen.insert(img, n) {
                if prev != &**n {
                    return Err(TermError::NotInjective(img.to_string()));
                }
            }
        }
        Ok(())
    }

    /// The inverse mapping, if the renaming is a bijection on its support.
    pub fn inverse(&self) -> Option<Renaming> {
        let inv = Renaming::from_pairs(self.0.iter().map(|(a, b)| (b.clone(), a.clone())));
        (inv.0.len() == self.0.len() && self.is_permutation()).then_some(inv)
    }

    /// Whether the support is mapped onto itself.
    pub fn is_permutation(&self) -> bool {
        let dom: BTreeSet<_> = self.0.keys().collect();
        let img: BTreeSet<_> = self.0.values().collect();
        dom == img
    }
}

/// Applies `mu` to every term, checking injectivity on their names.
pub fn alpha_rename(terms: &[Term], mu: &Renaming) -> Result<Vec<Term>, TermError> {
    let mut names = BTreeSet::new();
    for t in terms {
        t.collect_names(&mut names);
    }
    mu.check_injective(&names)?;
    Ok(terms.iter().map(|t| t.rename(mu)).collect())
}
