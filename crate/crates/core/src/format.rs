//! Reading and writing term, goal and proof files.
//!
//! Every file starts with optional declarations:
//! `(decl-adv g 2)`, `(decl-len-const l)`, `(decl-len-eq n.a EXPR)`,
//! `(decl-len-zero c EXPR)` and `(decl-len-pad p EXPR)`.

use crate::cca::{CallKind, CcaStructure, OracleCall};
use crate::length::LengthDecls;
use crate::proof::{Derivation, RuleApp};
use crate::sequent::{Sequent, Side};
use crate::term::sexp::{self, Sexp};
use crate::term::{term_from_sexp, Renaming, Signature, Sort, Term, TermError, DUMMY};

/// Signature and length declarations read from a file preamble.
#[derive(Clone, Debug)]
pub struct Decls {
    pub sig: Signature,
    pub lengths: LengthDecls,
}

impl Default for Decls {
    fn default() -> Self {
        Decls { sig: Signature::new(), lengths: LengthDecls::new() }
    }
}

impl Decls {
    pub fn new() -> Self {
        Self::default()
    }

    /// Consumes `s` if it is a declaration.
    pub fn declare(&mut self, s: &Sexp) -> Result<bool, TermError> {
        match s.head() {
            Some("decl-adv") => {
                self.sig.declare_sexp(s)?;
                Ok(true)
            }
            Some(h) if h.starts_with("decl-len-") => {
                if self.lengths.declare_sexp(s, &mut self.sig)? {
                    Ok(true)
                } else {
                    Err(s.error(format!("unknown declaration `{h}`")))
                }
            }
            _ => Ok(false),
        }
    }

    /// Reads declarations from `src`, ignoring everything else.
    pub fn parse(src: &str) -> Result<Self, TermError> {
        let mut d = Decls::new();
        for s in sexp::parse_all(src)? {
            d.declare(&s)?;
        }
        Ok(d)
    }

    pub fn term(&self, src: &str) -> Result<Term, TermError> {
        crate::term::parse_term(src, &self.sig)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let length_lines = self.lengths.render();
        for a in self.sig.adv_symbols() {
            if a.name() == DUMMY {
                continue;
            }
            let by_length = length_lines
                .iter()
                .any(|l| l.starts_with(&format!("(decl-len-zero {} ", a.name())) || l.starts_with(&format!("(decl-len-pad {} ", a.name())));
            if by_length {
                continue;
            }
            let sort = if a.sort() == Sort::Message { " message" } else { "" };
            out.push_str(&format!("(decl-adv {} {}{sort})\n", a.name(), a.arity()));
        }
        for l in length_lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }
}

fn split_preamble(src: &str) -> Result<(Decls, Vec<Sexp>), TermError> {
    let mut d = Decls::new();
    let mut rest = Vec::new();
    for s in sexp::parse_all(src)? {
        if !d.declare(&s)? {
            rest.push(s);
        }
    }
    Ok((d, rest))
}

/// A file of declarations followed by terms.
pub fn parse_terms_file(src: &str) -> Result<(Decls, Vec<Term>), TermError> {
    let (d, rest) = split_preamble(src)?;
    let terms = rest.iter().map(|s| term_from_sexp(s, &d.sig)).collect::<Result<_, _>>()?;
    Ok((d, terms))
}

fn side(s: &Sexp, tag: &str, sig: &Signature) -> Result<Vec<Term>, TermError> {
    let items = s.tagged(tag).ok_or_else(|| s.error(format!("expected ({tag} term*)")))?;
    items.iter().map(|t| term_from_sexp(t, sig)).collect()
}

fn sequent_from(items: &[Sexp], whole: &Sexp, sig: &Signature) -> Result<Sequent, TermError> {
    let [l, r] = items else {
        return Err(whole.error("expected (left term*) (right term*)"));
    };
    let left = side(l, "left", sig)?;
    let right = side(r, "right", sig)?;
    if left.len() != right.len() {
        return Err(whole.error(format!("sides have {} and {} terms", left.len(), right.len())));
    }
    Ok(Sequent::new(left, right))
}

/// `(goal (left term*) (right term*))` with optional declarations.
pub fn parse_goal_file(src: &str) -> Result<(Decls, Sequent), TermError> {
    let (d, rest) = split_preamble(src)?;
    let [g] = rest.as_slice() else {
        return Err(TermError::Parse { line: 1, col: 1, msg: "expected exactly one (goal ...) form".into() });
    };
    let items = g.tagged("goal").ok_or_else(|| g.error("expected (goal ...)"))?;
    let seq = sequent_from(items, g, &d.sig)?;
    Ok((d, seq))
}

pub fn render_goal(d: &Decls, seq: &Sequent) -> String {
    format!("{}(goal\n  {}\n  {})\n", d.render(), render_side("left", &seq.left), render_side("right", &seq.right))
}

fn render_side(tag: &str, ts: &[Term]) -> String {
    let mut s = format!("({tag}");
    for t in ts {
        s.push(' ');
        s.push_str(&t.to_string());
    }
    s.push(')');
    s
}

/// A proof file: declarations followed by one `(rule ...)` tree.
pub fn parse_proof_file(src: &str) -> Result<(Decls, Derivation), TermError> {
    let (d, rest) = split_preamble(src)?;
    let [p] = rest.as_slice() else {
        return Err(TermError::Parse { line: 1, col: 1, msg: "expected exactly one (rule ...) form".into() });
    };
    let der = derivation_from_sexp(p, &d.sig)?;
    Ok((d, der))
}

pub fn derivation_from_sexp(s: &Sexp, sig: &Signature) -> Result<Derivation, TermError> {
    let items = s.tagged("rule").ok_or_else(|| s.error("expected (rule RULE (concl ...) proof*)"))?;
    let (rule_s, rest) = items.split_first().ok_or_else(|| s.error("missing rule"))?;
    let (concl_s, premises_s) = rest.split_first().ok_or_else(|| s.error("missing (concl ...)"))?;
    let concl_items = concl_s.tagged("concl").ok_or_else(|| concl_s.error("expected (concl (left ...) (right ...))"))?;
    let conclusion = sequent_from(concl_items, concl_s, sig)?;
    let rule = rule_from_sexp(rule_s, sig)?;
    let premises = premises_s.iter().map(|p| derivation_from_sexp(p, sig)).collect::<Result<_, _>>()?;
    Ok(Derivation::new(conclusion, rule, premises))
}

fn index(s: &Sexp) -> Result<usize, TermError> {
    s.atom().and_then(|a| a.parse().ok()).ok_or_else(|| s.error("expected a non-negative integer"))
}

fn name_of(s: &Sexp) -> Result<&str, TermError> {
    s.atom().and_then(|a| a.strip_prefix("n.")).filter(|a| !a.is_empty()).ok_or_else(|| s.error("expected a name n.IDENT"))
}

fn renaming_pairs(items: &[Sexp]) -> Result<Renaming, TermError> {
    let mut pairs = Vec::new();
    for p in items {
        let Some([a, b]) = p.list() else {
            return Err(p.error("expected (n.a n.b)"));
        };
        pairs.push((name_of(a)?.to_string(), name_of(b)?.to_string()));
    }
    Ok(Renaming::from_pairs(pairs))
}

pub fn rule_from_sexp(s: &Sexp, sig: &Signature) -> Result<RuleApp, TermError> {
    if let Some(a) = s.atom() {
        return match a {
            "dup" => Ok(RuleApp::Dup),
            "sym" => Ok(RuleApp::Sym),
            _ => Err(s.error(format!("unknown rule `{a}`"))),
        };
    }
    let head = s.head().ok_or_else(|| s.error("expected a rule"))?;
    let args = &s.list().unwrap()[1..];
    match head {
        "dup" if args.is_empty() => Ok(RuleApp::Dup),
        "sym" if args.is_empty() => Ok(RuleApp::Sym),
        "refl" => {
            let renaming = match args {
                [] => Renaming::identity(),
                [r] => renaming_pairs(r.tagged("ren").ok_or_else(|| r.error("expected (ren ...)"))?)?,
                _ => return Err(s.error("expected (refl (ren ...))")),
            };
            Ok(RuleApp::Refl { renaming })
        }
        "fa" => {
            let [f, k, i] = args else {
                return Err(s.error("expected (fa IDENT COUNT IDX)"));
            };
            let symbol = f.atom().ok_or_else(|| f.error("expected symbol"))?.to_string();
            Ok(RuleApp::Fa { symbol, arity: index(k)?, index: index(i)? })
        }
        "cs" => {
            let [t] = args else {
                return Err(s.error("expected (cs (targets IDX...))"));
            };
            let targets = t.tagged("targets").ok_or_else(|| t.error("expected (targets IDX...)"))?;
            Ok(RuleApp::Cs { targets: targets.iter().map(index).collect::<Result<_, _>>()? })
        }
        "rw" => {
            let [sd, i, t] = args else {
                return Err(s.error("expected (rw SIDE IDX term)"));
            };
            let side = match sd.atom() {
                Some("left") => Side::Left,
                Some("right") => Side::Right,
                _ => return Err(sd.error("expected left or right")),
            };
            Ok(RuleApp::Rw { side, index: index(i)?, replacement: term_from_sexp(t, sig)? })
        }
        "perm" => Ok(RuleApp::Perm { perm: args.iter().map(index).collect::<Result<_, _>>()? }),
        "restr" => Ok(RuleApp::Restr { kept: args.iter().map(index).collect::<Result<_, _>>()? }),
        "cca" => Ok(RuleApp::Cca(cca_from_items(args, s, sig)?)),
        _ => Err(s.error(format!("unknown rule `{head}`"))),
    }
}

/// Parses `(cca (keys ...) (renaming ...) (calls ...))`.
pub fn cca_from_sexp(s: &Sexp, sig: &Signature) -> Result<CcaStructure, TermError> {
    let items = s.tagged("cca").ok_or_else(|| s.error("expected (cca ...)"))?;
    cca_from_items(items, s, sig)
}

fn cca_from_items(items: &[Sexp], whole: &Sexp, sig: &Signature) -> Result<CcaStructure, TermError> {
    let mut st = CcaStructure::default();
    let mut seen = [false; 3];
    for it in items {
        match it.head() {
            Some("keys") => {
                seen[0] = true;
                for k in &it.list().unwrap()[1..] {
                    st.keys.insert(name_of(k)?.to_string());
                }
            }
            Some("renaming") => {
                seen[1] = true;
                st.renaming = renaming_pairs(&it.list().unwrap()[1..])?;
            }
            Some("calls") => {
                seen[2] = true;
                for c in &it.list().unwrap()[1..] {
                    let kind = match c.head() {
                        Some("enc-call") => CallKind::Enc,
                        Some("dec-call") => CallKind::Dec,
                        _ => return Err(c.error("expected enc-call or dec-call")),
                    };
                    let Some([_, h, l, r]) = c.list() else {
                        return Err(c.error("expected (enc-call HANDLE (left TERM) (right TERM))"));
                    };
                    let handle = h.atom().ok_or_else(|| h.error("expected handle"))?.to_string();
                    let one = |x: &Sexp, tag: &str| -> Result<Term, TermError> {
                        match x.tagged(tag) {
                            Some([t]) => term_from_sexp(t, sig),
                            _ => Err(x.error(format!("expected ({tag} TERM)"))),
                        }
                    };
                    st.calls.push(OracleCall { handle, kind, left: one(l, "left")?, right: one(r, "right")? });
                }
            }
            _ => return Err(it.error("expected keys, renaming or calls")),
        }
    }
    if !seen[0] {
        return Err(whole.error("cca structure without (keys ...)"));
    }
    Ok(st)
}

fn render_renaming(r: &Renaming) -> String {
    r.pairs().map(|(a, b)| format!(" (n.{a} n.{b})")).collect()
}

pub fn render_cca(st: &CcaStructure, indent: &str) -> String {
    let keys: String = st.keys.iter().map(|k| format!(" n.{k}")).collect();
    let mut s = format!("(cca (keys{keys}) (renaming{})\n{indent}  (calls", render_renaming(&st.renaming));
    for c in &st.calls {
        let tag = match c.kind {
            CallKind::Enc => "enc-call",
            CallKind::Dec => "dec-call",
        };
        s.push_str(&format!("\n{indent}    ({tag} {} (left {}) (right {}))", c.handle, c.left, c.right));
    }
    s.push_str("))");
    s
}

pub fn render_rule(r: &RuleApp, indent: &str) -> String {
    match r {
        RuleApp::Refl { renaming } => format!("(refl (ren{}))", render_renaming(renaming)),
        RuleApp::Fa { symbol, arity, index } => format!("(fa {symbol} {arity} {index})"),
        RuleApp::Dup => "dup".into(),
        RuleApp::Sym => "sym".into(),
        RuleApp::Cs { targets } => {
            format!("(cs (targets{}))", targets.iter().map(|t| format!(" {t}")).collect::<String>())
        }
        RuleApp::Rw { side, index, replacement } => format!("(rw {} {index} {replacement})", side.name()),
        RuleApp::Perm { perm } => format!("(perm{})", perm.iter().map(|t| format!(" {t}")).collect::<String>()),
        RuleApp::Restr { kept } => format!("(restr{})", kept.iter().map(|t| format!(" {t}")).collect::<String>()),
        RuleApp::Cca(st) => render_cca(st, indent),
    }
}

pub fn render_derivation(d: &Derivation) -> String {
    fn go(d: &Derivation, depth: usize, out: &mut String) {
        let ind = "  ".repeat(depth);
        out.push_str(&format!("{ind}(rule {}\n", render_rule(&d.rule, &ind)));
        out.push_str(&format!(
            "{ind}  (concl {} {})",
            render_side("left", &d.conclusion.left),
            render_side("right", &d.conclusion.right)
        ));
        for p in &d.premises {
            out.push('\n');
            go(p, depth + 1, out);
        }
        out.push(')');
    }
    let mut out = String::new();
    go(d, 0, &mut out);
    out
}

pub fn render_proof_file(d: &Decls, der: &Derivation) -> String {
    format!("{}{}\n", d.render(), render_derivation(der))
}

#[cfg(test)]
mod test {
    use super::*;

    const PROOF: &str = "
        (decl-adv g 0)
        ; ite(g(), n0, n1) ~ n
        (rule (rw right 0 (ite (adv g) n.n n.n))
          (concl (left (ite (adv g) n.n0 n.n1)) (right n.n))
          (rule (cs (targets 0))
            (concl (left (ite (adv g) n.n0 n.n1)) (right (ite (adv g) n.n n.n)))
            (rule (refl (ren (n.n0 n.n))) (concl (left (adv g) n.n0) (right (adv g) n.n)))
            (rule (refl (ren (n.n1 n.n))) (concl (left (adv g) n.n1) (right (adv g) n.n)))))";

    #[test]
    fn proof_roundtrip() {
        let (d, der) = parse_proof_file(PROOF).unwrap();
        assert_eq!(der.node_count(), 4);
        let text = render_proof_file(&d, &der);
        let (_, again) = parse_proof_file(&text).unwrap();
        assert_eq!(again, der);
    }

    #[test]
    fn cca_roundtrip() {
        let src = "(decl-adv g 1)
          (rule (cca (keys n.k) (renaming (n.r n.s) (n.s n.r))
                  (calls (enc-call x (left (enc n.a (pk n.k) n.r)) (right (enc n.b (pk n.k) n.r)))))
            (concl (left (enc n.a (pk n.k) n.r)) (right (enc n.b (pk n.k) n.s))))";
        let (d, der) = parse_proof_file(src).unwrap();
        let RuleApp::Cca(st) = &der.rule else { panic!() };
        assert_eq!(st.calls.len(), 1);
        assert_eq!(st.renaming.apply("r"), "s");
        let (_, again) = parse_proof_file(&render_proof_file(&d, &der)).unwrap();
        assert_eq!(again, der);
    }

    #[test]
    fn goal_and_errors() {
        let (_, g) = parse_goal_file("(decl-adv g 0) (goal (left (ite (adv g) n.a n.b)) (right n.c))").unwrap();
        assert_eq!(g.len(), 1);
        assert!(parse_goal_file("(goal (left n.a) (right))").is_err());
        assert!(parse_goal_file("(goal (left (adv h)) (right n.a))").is_err());
        assert!(parse_proof_file("(rule (frob) (concl (left) (right)))").is_err());
        let d = Decls::parse("(decl-len-zero c0 (+ (* 1 l_block))) (decl-len-pad p (+ (* 1 l_eta)))").unwrap();
        let again = Decls::parse(&d.render()).unwrap();
        assert_eq!(again.render(), d.render());
    }
}
