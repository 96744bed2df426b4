use std::collections::BTreeMap;

use super::sexp::{self, Sexp};
use super::{AdvSymbol, Sort, Symbol, Term, TermError, DUMMY};

/// The declared adversarial symbols. Builtins are fixed and not stored.
#[derive(Clone, Debug)]
pub struct Signature {
    adv: BTreeMap<String, AdvSymbol>,
}

impl Default for Signature {
    fn default() -> Self {
        let mut adv = BTreeMap::new();
        adv.insert(DUMMY.to_string(), AdvSymbol::dummy());
        Signature { adv }
    }
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares an adversarial symbol. Application results may fill
    /// conditional slots unless `sort` is `Message`.
    pub fn declare(&mut self, name: &str, arity: usize, sort: Sort) -> Result<AdvSymbol, TermError> {
        if Symbol::builtin(name).is_some() || name.starts_with("n.") || name.is_empty() {
            return Err(TermError::UnknownSymbol(format!("`{name}` cannot name an adversarial symbol")));
        }
        if let Some(prev) = self.adv.get(name) {
            if prev.arity != arity || prev.sort != sort {
                return Err(TermError::Arity {
                    symbol: name.to_string(),
                    expected: prev.arity,
                    got: arity,
                });
            }
            return Ok(prev.clone());
        }
        let sym = AdvSymbol::new(name, arity, sort);
        self.adv.insert(name.to_string(), sym.clone());
        Ok(sym)
    }

    pub fn get(&self, name: &str) -> Option<&AdvSymbol> {
        self.adv.get(name)
    }

    pub fn adv_symbols(&self) -> impl Iterator<Item = &AdvSymbol> {
        self.adv.values()
    }

    /// Adds every adversarial symbol occurring in `t`.
    pub fn absorb(&mut self, t: &Term) {
        let mut found = BTreeMap::new();
        t.adv_symbols(&mut found);
        for (k, v) in found {
            self.adv.entry(k).or_insert(v);
        }
    }

    /// Handles a `(decl-adv IDENT ARITY [bool|message])` line.
    pub fn declare_sexp(&mut self, s: &Sexp) -> Result<AdvSymbol, TermError> {
        let items = s.tagged("decl-adv").ok_or_else(|| s.error("expected decl-adv"))?;
        let (name, arity, sort) = match items {
            [n, a] => (n, a, Sort::Bool),
            [n, a, srt] => {
                let sort = match srt.atom() {
                    Some("bool") => Sort::Bool,
                    Some("message") => Sort::Message,
                    _ => return Err(srt.error("expected `bool` or `message`")),
                };
                (n, a, sort)
            }
            _ => return Err(s.error("decl-adv takes an identifier and an arity")),
        };
        let name = name.atom().ok_or_else(|| name.error("expected identifier"))?;
        let arity: usize = arity
            .atom()
            .and_then(|a| a.parse().ok())
            .ok_or_else(|| arity.error("expected arity"))?;
        self.declare(name, arity, sort).map_err(|e| s.error(e.to_string()))
    }
}

pub fn parse_term(src: &str, sig: &Signature) -> Result<Term, TermError> {
    term_from_sexp(&sexp::parse_one(src)?, sig)
}

pub fn term_from_sexp(s: &Sexp, sig: &Signature) -> Result<Term, TermError> {
    match s {
        Sexp::Atom { text, .. } => {
            if let Some(id) = text.strip_prefix("n.") {
                if id.is_empty() {
                    return Err(s.error("empty name"));
                }
                return Ok(Term::name(id));
            }
            match text.as_str() {
                "true" => Ok(Term::tt()),
                "false" => Ok(Term::ff()),
                _ => Err(TermError::UnknownSymbol(text.clone())),
            }
        }
        Sexp::List { items, .. } => {
            let Some(head) = items.first().and_then(|h| h.atom()) else {
                return Err(s.error("expected a symbol"));
            };
            let (sym, rest) = if head == "adv" {
                let Some(id) = items.get(1).and_then(|i| i.atom()) else {
                    return Err(s.error("adv needs an identifier"));
                };
                let sym = sig.get(id).ok_or_else(|| TermError::UnknownSymbol(id.to_string()))?;
                (Symbol::Adv(sym.clone()), &items[2..])
            } else {
                let sym = Symbol::builtin(head)
                    .ok_or_else(|| TermError::UnknownSymbol(head.to_string()))?;
                (sym, &items[1..])
            };
            let args = rest.iter().map(|a| term_from_sexp(a, sig)).collect::<Result<Vec<_>, _>>()?;
            Term::app(sym, args)
        }
    }
}

#[cfg(test)]
mod test {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare("g", 0, Sort::Bool).unwrap();
        s.declare("h", 2, Sort::Bool).unwrap();
        s
    }

    #[test]
    fn roundtrip() {
        for src in [
            "(ite (eq n.a n.b) true false)",
            "(ite (adv g) n.n0 n.n1)",
            "(enc (pair n.a (adv h n.b n.c)) (pk n.k) n.r)",
            "(dec (fst n.x) (sk n.k))",
            "(zero (snd n.x))",
        ] {
            let t = parse_term(src, &sig()).unwrap();
            assert_eq!(t.to_string(), src);
        }
    }

    #[test]
    fn rejects() {
        let s = sig();
        assert!(matches!(parse_term("(eq true)", &s), Err(TermError::Arity { .. })));
        assert!(matches!(parse_term("(adv zz)", &s), Err(TermError::UnknownSymbol(_))));
        assert!(matches!(parse_term("(ite n.a n.b n.c)", &s), Err(TermError::Sort { .. })));
        assert!(matches!(parse_term("(pair n.a", &s), Err(TermError::Parse { .. })));
        assert!(matches!(parse_term("a", &s), Err(TermError::UnknownSymbol(_))));
    }

    #[test]
    fn message_sorted_adv() {
        let mut s = Signature::new();
        s.declare_sexp(&sexp::parse_one("(decl-adv m 0 message)").unwrap()).unwrap();
        assert!(parse_term("(ite (adv m) n.a n.b)", &s).is_err());
        assert!(s.declare("pair", 2, Sort::Bool).is_err());
    }
}
