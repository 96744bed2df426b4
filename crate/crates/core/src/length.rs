//! Symbolic message lengths in the block-cipher model.
//!
//! Lengths are linear combinations of declared constants with positive
//! integer coefficients. A length is computed structurally on the term as
//! given; conditionals are only defined when both branches agree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::term::sexp::Sexp;
use crate::term::{Kind, Signature, Sort, Symbol, Term, TermError};

pub const L_ETA: &str = "l_eta";
pub const L_PAIR: &str = "l_pair";
pub const L_ENC: &str = "l_enc";
pub const L_BLOCK: &str = "l_block";
pub const L_EBLOCK: &str = "l_eblock";

pub const BUILTIN_CONSTANTS: [&str; 5] = [L_ETA, L_PAIR, L_ENC, L_BLOCK, L_EBLOCK];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LengthExpr(BTreeMap<String, u64>);

impl LengthExpr {
    pub fn constant(name: &str) -> Self {
        Self::scaled(name, 1)
    }

    pub fn scaled(name: &str, k: u64) -> Self {
        let mut m = BTreeMap::new();
        if k > 0 {
            m.insert(name.to_string(), k);
        }
        LengthExpr(m)
    }

    pub fn coefficient(&self, name: &str) -> u64 {
        self.0.get(name).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn plus(mut self, other: &LengthExpr) -> Self {
        for (k, v) in &other.0 {
            *self.0.entry(k.clone()).or_insert(0) += v;
        }
        self
    }

    /// `k` when the expression is exactly `k·name` with `k ≥ 1`.
    fn multiple_of(&self, name: &str) -> Option<u64> {
        (self.0.len() == 1).then(|| self.0.get(name).copied()).flatten()
    }
}

impl fmt::Display for LengthExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(+")?;
        for (k, v) in &self.0 {
            write!(f, " (* {v} {k})")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, Default)]
pub struct LengthDecls {
    constants: BTreeSet<String>,
    name_eqs: HashMap<String, LengthExpr>,
    fixed: HashMap<String, LengthExpr>,
    pads: HashMap<String, LengthExpr>,
}

impl LengthDecls {
    pub fn new() -> Self {
        LengthDecls {
            constants: BUILTIN_CONSTANTS.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn declare_constant(&mut self, c: &str) {
        self.constants.insert(c.to_string());
    }

    pub fn is_constant(&self, c: &str) -> bool {
        self.constants.contains(c)
    }

    /// `Length(n) = e` for the name `n`.
    pub fn set_name_length(&mut self, name: &str, e: LengthExpr) {
        self.name_eqs.insert(name.to_string(), e);
    }

    /// A nullary adversarial constant of fixed length (for instance `0_l`).
    pub fn set_constant_length(&mut self, sym: &str, e: LengthExpr) {
        self.fixed.insert(sym.to_string(), e);
    }

    /// A unary adversarial padding symbol whose output has fixed length.
    pub fn set_pad_length(&mut self, sym: &str, e: LengthExpr) {
        self.pads.insert(sym.to_string(), e);
    }

    fn parse_expr(&self, s: &Sexp) -> Result<LengthExpr, TermError> {
        let items = s.tagged("+").ok_or_else(|| s.error("expected (+ (* K IDENT)...)"))?;
        let mut e = LengthExpr::default();
        for it in items {
            let parts = it.tagged("*").ok_or_else(|| it.error("expected (* K IDENT)"))?;
            let [k, c] = parts else {
                return Err(it.error("expected (* K IDENT)"));
            };
            let k: u64 = k.atom().and_then(|k| k.parse().ok()).ok_or_else(|| k.error("expected coefficient"))?;
            let c = c.atom().ok_or_else(|| c.error("expected length constant"))?;
            if !self.is_constant(c) {
                return Err(it.error(format!("undeclared length constant `{c}`")));
            }
            e = e.plus(&LengthExpr::scaled(c, k));
        }
        Ok(e)
    }

    /// Handles one length declaration. Returns `Ok(false)` when `s` is not
    /// a length declaration. Padding and fixed-length constants are also
    /// declared in `sig`.
    pub fn declare_sexp(&mut self, s: &Sexp, sig: &mut Signature) -> Result<bool, TermError> {
        let Some(head) = s.head() else { return Ok(false) };
        let items = &s.list().unwrap()[1..];
        let ident = |i: usize| -> Result<&str, TermError> {
            items.get(i).and_then(|x| x.atom()).ok_or_else(|| s.error("expected identifier"))
        };
        match head {
            "decl-len-const" => {
                if items.len() != 1 {
                    return Err(s.error("decl-len-const takes one identifier"));
                }
                self.declare_constant(ident(0)?);
            }
            "decl-len-eq" => {
                let n = ident(0)?;
                let n = n.strip_prefix("n.").ok_or_else(|| s.error("decl-len-eq expects a name n.IDENT"))?;
                let e = self.parse_expr(items.get(1).ok_or_else(|| s.error("missing expression"))?)?;
                self.set_name_length(n, e);
            }
            "decl-len-zero" | "decl-len-pad" => {
                let g = ident(0)?;
                let e = self.parse_expr(items.get(1).ok_or_else(|| s.error("missing expression"))?)?;
                if head == "decl-len-zero" {
                    sig.declare(g, 0, Sort::Message).map_err(|e| s.error(e.to_string()))?;
                    self.set_constant_length(g, e);
                } else {
                    sig.declare(g, 1, Sort::Message).map_err(|e| s.error(e.to_string()))?;
                    self.set_pad_length(g, e);
                }
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Declaration lines reproducing these declarations.
    pub fn render(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.constants {
            if !BUILTIN_CONSTANTS.contains(&c.as_str()) {
                out.push(format!("(decl-len-const {c})"));
            }
        }
        let mut sorted: Vec<_> = self.fixed.iter().collect();
        sorted.sort();
        for (g, e) in sorted {
            out.push(format!("(decl-len-zero {g} {e})"));
        }
        let mut sorted: Vec<_> = self.pads.iter().collect();
        sorted.sort();
        for (g, e) in sorted {
            out.push(format!("(decl-len-pad {g} {e})"));
        }
        let mut sorted: Vec<_> = self.name_eqs.iter().collect();
        sorted.sort();
        for (n, e) in sorted {
            out.push(format!("(decl-len-eq n.{n} {e})"));
        }
        out
    }
}

/// The length of `t`, or `None` when it is undefined.
pub fn length_of(t: &Term, decls: &LengthDecls) -> Option<LengthExpr> {
    match t.kind() {
        Kind::Name(n) => Some(decls.name_eqs.get(&**n).cloned().unwrap_or_else(|| LengthExpr::constant(L_ETA))),
        Kind::App(sym, args) => match sym {
            Symbol::Pair => {
                let a = length_of(&args[0], decls)?;
                let b = length_of(&args[1], decls)?;
                Some(a.plus(&b).plus(&LengthExpr::constant(L_PAIR)))
            }
            Symbol::Enc => {
                let k = length_of(&args[0], decls)?.multiple_of(L_BLOCK)?;
                Some(LengthExpr::scaled(L_EBLOCK, k).plus(&LengthExpr::constant(L_ENC)))
            }
            Symbol::Dec => {
                let l = length_of(&args[0], decls)?;
                let k = l.coefficient(L_EBLOCK);
                let expected = LengthExpr::scaled(L_EBLOCK, k).plus(&LengthExpr::constant(L_ENC));
                (k >= 1 && l == expected).then(|| LengthExpr::scaled(L_BLOCK, k))
            }
            Symbol::Ite => {
                let a = length_of(&args[1], decls)?;
                let b = length_of(&args[2], decls)?;
                (a == b).then_some(a)
            }
            Symbol::Zero => length_of(&args[0], decls),
            Symbol::Adv(g) => {
                if args.is_empty() {
                    decls.fixed.get(g.name()).cloned()
                } else if args.len() == 1 {
                    decls.pads.get(g.name()).cloned()
                } else {
                    None
                }
            }
            _ => None,
        },
    }
}

/// Whether the lengths of `u` and `v` are both defined and equal.
pub fn eql(u: &Term, v: &Term, decls: &LengthDecls) -> bool {
    match (length_of(u, decls), length_of(v, decls)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::term::{parse_term, sexp};

    fn setup() -> (Signature, LengthDecls) {
        let mut sig = Signature::new();
        sig.declare("g", 0, Sort::Bool).unwrap();
        let mut d = LengthDecls::new();
        for line in [
            "(decl-len-zero c0 (+ (* 1 l_block)))",
            "(decl-len-zero c2 (+ (* 2 l_block)))",
            "(decl-len-pad pad (+ (* 1 l_eta)))",
        ] {
            assert!(d.declare_sexp(&sexp::parse_one(line).unwrap(), &mut sig).unwrap());
        }
        (sig, d)
    }

    fn len(src: &str) -> Option<String> {
        let (sig, d) = setup();
        length_of(&parse_term(src, &sig).unwrap(), &d).map(|e| e.to_string())
    }

    #[test]
    fn basic_lengths() {
        assert_eq!(len("n.a").unwrap(), "(+ (* 1 l_eta))");
        assert_eq!(len("(pair n.a n.b)").unwrap(), "(+ (* 2 l_eta) (* 1 l_pair))");
        assert_eq!(len("(enc (adv c2) (pk n.k) n.r)").unwrap(), "(+ (* 2 l_eblock) (* 1 l_enc))");
        assert_eq!(len("(dec (enc (adv c2) (pk n.k) n.r) (sk n.k))").unwrap(), "(+ (* 2 l_block))");
        assert_eq!(len("(zero (adv c0))").unwrap(), "(+ (* 1 l_block))");
        assert_eq!(len("(adv pad (fst n.x))").unwrap(), "(+ (* 1 l_eta))");
    }

    #[test]
    fn undefined_lengths() {
        assert!(len("(enc n.a (pk n.k) n.r)").is_none());
        assert!(len("(fst n.x)").is_none());
        assert!(len("(eq n.a n.b)").is_none());
        assert!(len("(ite (adv g) n.a (pair n.a n.b))").is_none());
        assert!(len("(pk n.k)").is_none());
    }

    #[test]
    fn name_equations() {
        let (mut sig, mut d) = setup();
        d.declare_sexp(&sexp::parse_one("(decl-len-eq n.m (+ (* 3 l_block)))").unwrap(), &mut sig).unwrap();
        let t = parse_term("(enc n.m (pk n.k) n.r)", &sig).unwrap();
        assert_eq!(length_of(&t, &d).unwrap(), LengthExpr::scaled(L_EBLOCK, 3).plus(&LengthExpr::constant(L_ENC)));
        assert!(d.declare_sexp(&sexp::parse_one("(decl-len-eq n.m (+ (* 3 l_nope)))").unwrap(), &mut sig).is_err());
    }

    #[test]
    fn eql_requires_definedness() {
        let (sig, d) = setup();
        let a = parse_term("n.a", &sig).unwrap();
        let b = parse_term("n.b", &sig).unwrap();
        let f = parse_term("(fst n.a)", &sig).unwrap();
        assert!(eql(&a, &b, &d));
        assert!(!eql(&f, &f, &d));
    }
}
