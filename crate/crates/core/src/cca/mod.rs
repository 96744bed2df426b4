//! The IND-CCA2 axiom: oracle-call structures, guarded decryptions and the
//! instance verifier.
//!
//! A structure lists the challenge keys, a renaming applied to the right
//! side, and the oracle calls in the order they are made. The verifier
//! replays the inductive construction of the instance, checking the side
//! conditions of each call.

mod complete;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::length::{eql, LengthDecls};
use crate::rewrite::Normalizer;
use crate::sequent::{Sequent, Side};
use crate::term::order::CanonicalOrder;
use crate::term::{Position, Renaming, Symbol, Term};

pub use complete::{complete_instance, is_full_instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CallKind {
    Enc,
    Dec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCall {
    pub handle: String,
    pub kind: CallKind,
    pub left: Term,
    /// The right term before the renaming is applied.
    pub right: Term,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CcaStructure {
    /// Seeds `n` of the challenge secret keys `sk(n)`.
    pub keys: BTreeSet<String>,
    pub renaming: Renaming,
    pub calls: Vec<OracleCall>,
}

impl CcaStructure {
    pub fn new(keys: impl IntoIterator<Item = impl Into<String>>) -> Self {
        CcaStructure { keys: keys.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    pub fn with_renaming(mut self, mu: Renaming) -> Self {
        self.renaming = mu;
        self
    }

    pub fn enc_call(mut self, handle: &str, left: Term, right: Term) -> Self {
        self.calls.push(OracleCall { handle: handle.into(), kind: CallKind::Enc, left, right });
        self
    }

    pub fn dec_call(mut self, handle: &str, left: Term, right: Term) -> Self {
        self.calls.push(OracleCall { handle: handle.into(), kind: CallKind::Dec, left, right });
        self
    }

    pub fn call_term(&self, i: usize, side: Side) -> &Term {
        match side {
            Side::Left => &self.calls[i].left,
            Side::Right => &self.calls[i].right,
        }
    }
}

/// Failure categories. `Malformed` and `Shape` are structural; the rest
/// are side-condition failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CcaFailure {
    Malformed,
    Shape,
    KeyUsage,
    Freshness,
    HiddenRandomness,
    Length,
    Context,
    Guard,
}

impl CcaFailure {
    pub fn is_structural(self) -> bool {
        matches!(self, CcaFailure::Malformed | CcaFailure::Shape)
    }

    pub fn name(self) -> &'static str {
        match self {
            CcaFailure::Malformed => "malformed-structure",
            CcaFailure::Shape => "sequent-shape",
            CcaFailure::KeyUsage => "key-usage",
            CcaFailure::Freshness => "freshness",
            CcaFailure::HiddenRandomness => "hidden-randomness",
            CcaFailure::Length => "length",
            CcaFailure::Context => "context",
            CcaFailure::Guard => "guard",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcaDiagnostic {
    pub kind: CcaFailure,
    pub handle: Option<String>,
    pub component: Option<usize>,
    pub position: Option<Position>,
    pub message: String,
}

impl CcaDiagnostic {
    fn new(kind: CcaFailure, message: impl Into<String>) -> Self {
        CcaDiagnostic { kind, handle: None, component: None, position: None, message: message.into() }
    }

    fn at_handle(mut self, h: &str) -> Self {
        self.handle = Some(h.to_string());
        self
    }

    fn at_component(mut self, i: usize) -> Self {
        self.component = Some(i);
        self
    }

    fn at_position(mut self, p: Position) -> Self {
        self.position = Some(p);
        self
    }
}

impl fmt::Display for CcaDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if let Some(h) = &self.handle {
            write!(f, " at call {h}")?;
        }
        if let Some(c) = self.component {
            write!(f, " at component {c}")?;
        }
        if let Some(p) = &self.position {
            write!(f, " position {p}")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for CcaDiagnostic {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CcaVerdict {
    Accept,
    Reject(CcaDiagnostic),
}

impl CcaVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, CcaVerdict::Accept)
    }

    pub fn diagnostic(&self) -> Option<&CcaDiagnostic> {
        match self {
            CcaVerdict::Accept => None,
            CcaVerdict::Reject(d) => Some(d),
        }
    }
}

/// `elses(Γ, x)`: guarded decryption, zero on every guard.
pub fn elses(guards: &[Term], x: &Term) -> Term {
    guards.iter().rev().fold(x.clone(), |acc, g| Term::ite(g.clone(), Term::zero(x.clone()), acc))
}

/// Splits `elses(Γ, dec(u, sk))` into `Γ` and the decryption.
pub fn split_elses(t: &Term) -> Option<(Vec<Term>, Term)> {
    let mut guards = Vec::new();
    let mut zeros = Vec::new();
    let mut cur = t;
    while let Some((c, z, rest)) = cur.as_ite() {
        if !c.is_app_of(&Symbol::Eq) || !z.is_app_of(&Symbol::Zero) {
            return None;
        }
        guards.push(c.clone());
        zeros.push(&z.args()[0]);
        cur = rest;
    }
    if !cur.is_app_of(&Symbol::Dec) || zeros.iter().any(|z| *z != cur) {
        return None;
    }
    Some((guards, cur.clone()))
}

pub(crate) const HOLE_PREFIX: &str = "#";

fn hole(i: usize) -> Term {
    Term::name(&format!("{HOLE_PREFIX}{i}"))
}

fn hole_index(t: &Term) -> Option<usize> {
    t.as_name()?.strip_prefix(HOLE_PREFIX)?.parse().ok()
}

/// Handle indices occurring in an abstracted context.
pub(crate) fn holes(t: &Term) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    t.visit(&mut |_, s| {
        if let Some(i) = hole_index(s) {
            out.insert(i);
        }
    });
    out
}

/// Replaces registered call terms by holes, outermost first.
pub(crate) fn abstract_calls(t: &Term, calls: &HashMap<Term, usize>) -> Term {
    t.map_top_down(&mut |s| calls.get(s).map(|&i| hole(i)))
}

/// Instantiates holes.
pub(crate) fn fill_holes(t: &Term, f: &impl Fn(usize) -> Term) -> Term {
    t.map_top_down(&mut |s| hole_index(s).map(f))
}

/// Position of an occurrence of a key seed outside `pk(·)`.
pub fn nodec_violation(keys: &BTreeSet<String>, t: &Term) -> Option<Position> {
    let mut found = None;
    fn go(keys: &BTreeSet<String>, t: &Term, path: &mut Vec<usize>, found: &mut Option<Position>) {
        if found.is_some() || t.pk_seed().is_some() {
            return;
        }
        if let Some(n) = t.as_name() {
            if keys.contains(n) {
                *found = Some(Position(path.clone()));
            }
            return;
        }
        for (i, a) in t.args().iter().enumerate() {
            path.push(i);
            go(keys, a, path, found);
            path.pop();
        }
    }
    go(keys, t, &mut Vec::new(), &mut found);
    found
}

/// Position of an occurrence of a key seed outside `pk(·)` and outside the
/// key argument of a decryption.
pub fn decpos_violation(keys: &BTreeSet<String>, t: &Term) -> Option<Position> {
    fn go(keys: &BTreeSet<String>, t: &Term, path: &mut Vec<usize>) -> Option<Position> {
        if t.pk_seed().is_some() {
            return None;
        }
        if let Some(n) = t.as_name() {
            return keys.contains(n).then(|| Position(path.clone()));
        }
        for (i, a) in t.args().iter().enumerate() {
            if t.is_app_of(&Symbol::Dec) && i == 1 && a.sk_seed().is_some() {
                continue;
            }
            path.push(i);
            let r = go(keys, a, path);
            path.pop();
            if r.is_some() {
                return r;
            }
        }
        None
    }
    go(keys, t, &mut Vec::new())
}

/// Occurrences of the randomness names `rand` that are not the randomness
/// argument of an encryption, and encryptions using one of them whose
/// term is not `expected` (when one is registered).
fn randomness_violations(
    t: &Term,
    rand: &BTreeMap<String, Option<Term>>,
) -> (Option<Position>, Option<Position>) {
    let mut bare = None;
    let mut hidden = None;
    fn go(
        t: &Term,
        rand: &BTreeMap<String, Option<Term>>,
        path: &mut Vec<usize>,
        bare: &mut Option<Position>,
        hidden: &mut Option<Position>,
    ) {
        if let Some(n) = t.as_name() {
            if rand.contains_key(n) && bare.is_none() {
                *bare = Some(Position(path.clone()));
            }
            return;
        }
        let is_enc = t.is_app_of(&Symbol::Enc);
        for (i, a) in t.args().iter().enumerate() {
            if is_enc && i == 2 {
                if let Some(r) = a.as_name() {
                    if let Some(expected) = rand.get(r) {
                        if expected.as_ref().is_some_and(|e| e != t) && hidden.is_none() {
                            *hidden = Some(Position(path.clone()));
                        }
                        continue;
                    }
                }
            }
            path.push(i);
            go(a, rand, path, bare, hidden);
            path.pop();
        }
    }
    go(t, rand, &mut Vec::new(), &mut bare, &mut hidden);
    (bare, hidden)
}

/// An encryption `enc(m, pk(k), r)` with name seed and randomness.
fn enc_parts(t: &Term) -> Option<(&Term, &str, &str)> {
    if !t.is_app_of(&Symbol::Enc) {
        return None;
    }
    let a = t.args();
    Some((&a[0], a[1].pk_seed()?, a[2].as_name()?))
}

/// Per-side registered encryption: call index, seed, randomness, term.
#[derive(Clone, Debug)]
struct RegEnc {
    call: usize,
    seed: String,
    rand: String,
    term: Term,
}

/// Indices (into `encs`) of the encryptions under `pk(seed)` that directly
/// appear in `u`.
fn directly_appearing(u: &Term, encs: &[RegEnc], seed: &str, order: &CanonicalOrder) -> Result<Vec<usize>, CcaDiagnostic> {
    let under_pk: BTreeSet<&str> = encs.iter().filter(|e| e.seed == seed).map(|e| e.rand.as_str()).collect();
    let pk = Term::pk(Term::name(seed));
    let masked = u.map_top_down(&mut |s| match enc_parts(s) {
        Some((_, k, r)) if k == seed && under_pk.contains(r) => Some(Term::enc(Term::dummy(), pk.clone(), Term::name(r))),
        _ => None,
    });
    let nf = Normalizer::new(order)
        .normalize(&masked)
        .map_err(|e| CcaDiagnostic::new(CcaFailure::Malformed, e.to_string()))?;
    let names = nf.names();
    Ok((0..encs.len()).filter(|&i| encs[i].seed == seed && names.contains(encs[i].rand.as_str())).collect())
}

fn guards_from(u: &Term, alphas: &[&Term]) -> Vec<Term> {
    let mut sorted: Vec<&Term> = alphas.to_vec();
    sorted.sort();
    sorted.into_iter().map(|a| Term::eq(u.clone(), a.clone())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CcaError {
    #[error("`{0}` is not a public key pk(n)")]
    NotPublicKey(String),
    #[error("secret key of `{0}` is not a challenge key")]
    UnknownKey(String),
    #[error(transparent)]
    Structure(#[from] CcaDiagnostic),
}

/// The guard list for decrypting `u` with the secret key matching `pk`,
/// using the left encryption calls of `st`.
pub fn required_guards(u: &Term, st: &CcaStructure, pk: &Term) -> Result<Vec<Term>, CcaError> {
    required_guards_with(u, st, pk, &CanonicalOrder::default())
}

pub fn required_guards_with(u: &Term, st: &CcaStructure, pk: &Term, order: &CanonicalOrder) -> Result<Vec<Term>, CcaError> {
    let seed = pk.pk_seed().ok_or_else(|| CcaError::NotPublicKey(pk.to_string()))?;
    if !st.keys.contains(seed) {
        return Err(CcaError::UnknownKey(pk.to_string()));
    }
    let encs = side_encs(st, Side::Left);
    let y = directly_appearing(u, &encs, seed, order)?;
    let alphas: Vec<&Term> = y.iter().map(|&i| &encs[i].term).collect();
    Ok(guards_from(u, &alphas))
}

fn side_encs(st: &CcaStructure, side: Side) -> Vec<RegEnc> {
    st.calls
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == CallKind::Enc)
        .filter_map(|(i, _)| {
            let t = st.call_term(i, side);
            let (_, seed, rand) = enc_parts(t)?;
            Some(RegEnc { call: i, seed: seed.to_string(), rand: rand.to_string(), term: t.clone() })
        })
        .collect()
}

/// Evaluates the key-usage and randomness predicates of `st` on `terms`,
/// read as left-side terms.
pub fn check_side_conditions(st: &CcaStructure, terms: &[Term]) -> Vec<CcaDiagnostic> {
    check_side_conditions_on(st, terms, Side::Left)
}

pub fn check_side_conditions_on(st: &CcaStructure, terms: &[Term], side: Side) -> Vec<CcaDiagnostic> {
    let mut out = Vec::new();
    let encs = side_encs(st, side);
    let rand: BTreeMap<String, Option<Term>> = encs.iter().map(|e| (e.rand.clone(), Some(e.term.clone()))).collect();
    let decs: HashMap<Term, usize> = st
        .calls
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == CallKind::Dec)
        .map(|(i, _)| (st.call_term(i, side).clone(), i))
        .collect();
    for (i, t) in terms.iter().enumerate() {
        if let Some(p) = decpos_violation(&st.keys, t) {
            out.push(CcaDiagnostic::new(CcaFailure::KeyUsage, "secret key outside decryption position").at_component(i).at_position(p));
        }
        let outside = abstract_calls(t, &decs);
        outside.visit(&mut |p, s| {
            if s.is_app_of(&Symbol::Dec) && s.args()[1].sk_seed().is_some_and(|k| st.keys.contains(k)) {
                out.push(
                    CcaDiagnostic::new(CcaFailure::KeyUsage, "decryption with a challenge key outside an oracle call")
                        .at_component(i)
                        .at_position(p.clone()),
                );
            }
        });
        let (bare, hidden) = randomness_violations(t, &rand);
        if let Some(p) = bare {
            out.push(
                CcaDiagnostic::new(CcaFailure::Freshness, "oracle randomness outside encryption-randomness position").at_component(i).at_position(p),
            );
        }
        if let Some(p) = hidden {
            out.push(
                CcaDiagnostic::new(CcaFailure::HiddenRandomness, "oracle randomness reused with another plaintext").at_component(i).at_position(p),
            );
        }
    }
    out
}

/// A call after structural validation.
#[derive(Clone, Debug)]
pub(crate) enum ParsedCall {
    Enc { seed: String, body: [Term; 2], rand: [String; 2] },
    Dec { seed: String, guards: [Vec<Term>; 2], core: [Term; 2] },
}

pub(crate) fn parse_structure(st: &CcaStructure) -> Result<Vec<ParsedCall>, CcaDiagnostic> {
    let mut handles = BTreeSet::new();
    let mut rands = [BTreeSet::new(), BTreeSet::new()];
    let mut out = Vec::new();
    for c in &st.calls {
        let err = |m: String| CcaDiagnostic::new(CcaFailure::Malformed, m).at_handle(&c.handle);
        if !handles.insert(c.handle.clone()) {
            return Err(err("duplicate handle".into()));
        }
        let sides = [&c.left, &c.right];
        match c.kind {
            CallKind::Enc => {
                let mut body = Vec::new();
                let mut rand = Vec::new();
                let mut seeds = Vec::new();
                for (s, t) in sides.iter().enumerate() {
                    let (m, k, r) = enc_parts(t).ok_or_else(|| err(format!("`{t}` is not an encryption enc(m, pk(n), r)")))?;
                    if !rands[s].insert(r.to_string()) {
                        return Err(err(format!("duplicate randomness n.{r}")));
                    }
                    body.push(m.clone());
                    rand.push(r.to_string());
                    seeds.push(k.to_string());
                }
                if seeds[0] != seeds[1] {
                    return Err(err("left and right encryptions use different keys".into()));
                }
                if !st.keys.contains(&seeds[0]) {
                    return Err(err(format!("n.{} is not a challenge key", seeds[0])));
                }
                let [b0, b1]: [Term; 2] = body.try_into().unwrap();
                let [r0, r1]: [String; 2] = rand.try_into().unwrap();
                out.push(ParsedCall::Enc { seed: seeds[0].clone(), body: [b0, b1], rand: [r0, r1] });
            }
            CallKind::Dec => {
                let mut parsed = Vec::new();
                for t in sides {
                    let (g, d) = split_elses(t).ok_or_else(|| err(format!("`{t}` is not a guarded decryption")))?;
                    let k = d.args()[1].sk_seed().ok_or_else(|| err("decryption key is not sk(n)".into()))?.to_string();
                    parsed.push((g, d.args()[0].clone(), k));
                }
                let (g1, u1, k1) = parsed.pop().unwrap();
                let (g0, u0, k0) = parsed.pop().unwrap();
                if k0 != k1 {
                    return Err(err("left and right decryptions use different keys".into()));
                }
                if !st.keys.contains(&k0) {
                    return Err(err(format!("n.{k0} is not a challenge key")));
                }
                out.push(ParsedCall::Dec { seed: k0, guards: [g0, g1], core: [u0, u1] });
            }
        }
    }
    Ok(out)
}

/// How each sequent component is covered: by a call or as a shared base term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Cover {
    Call(usize),
    Base,
}

pub(crate) fn match_components(seq: &Sequent, st: &CcaStructure) -> Result<Vec<Cover>, CcaDiagnostic> {
    let mu = &st.renaming;
    let mut out = Vec::new();
    for (i, (l, r)) in seq.pairs().enumerate() {
        let call = st.calls.iter().position(|c| &c.left == l && &c.right.rename(mu) == r);
        match call {
            Some(j) => out.push(Cover::Call(j)),
            None if &l.rename(mu) == r => out.push(Cover::Base),
            None => {
                return Err(CcaDiagnostic::new(
                    CcaFailure::Shape,
                    "component matches neither an oracle call nor a shared base term",
                )
                .at_component(i))
            }
        }
    }
    Ok(out)
}

/// Replays the construction of the instance. `base` are the shared base
/// terms (identical on both sides before renaming).
pub(crate) fn replay(
    st: &CcaStructure,
    parsed: &[ParsedCall],
    base: &[Term],
    decls: &LengthDecls,
    order: &CanonicalOrder,
) -> Result<(), CcaDiagnostic> {
    let keys = &st.keys;
    for (i, b) in base.iter().enumerate() {
        if let Some(p) = nodec_violation(keys, b) {
            return Err(CcaDiagnostic::new(CcaFailure::KeyUsage, format!("key seed occurs outside pk(.) in base term {b}"))
                .at_component(i)
                .at_position(p));
        }
    }
    let mut names: [BTreeSet<std::sync::Arc<str>>; 2] = [BTreeSet::new(), BTreeSet::new()];
    for b in base {
        b.collect_names(&mut names[0]);
    }
    names[1] = names[0].clone();
    let mut registered: [HashMap<Term, usize>; 2] = [HashMap::new(), HashMap::new()];
    let mut dec_registered: [HashMap<Term, usize>; 2] = [HashMap::new(), HashMap::new()];
    let mut encs: [Vec<RegEnc>; 2] = [Vec::new(), Vec::new()];
    // Randomness of every call registered so far, with its term per side.
    let mut rand: [BTreeMap<String, Option<Term>>; 2] = [BTreeMap::new(), BTreeMap::new()];

    let hidden_check = |t: &Term, side: usize, rand: &[BTreeMap<String, Option<Term>>; 2], h: &str| -> Result<(), CcaDiagnostic> {
        let mut all = rand[side].clone();
        for k in rand[1 - side].keys() {
            all.entry(k.clone()).or_insert(None);
        }
        let (bare, hidden) = randomness_violations(t, &all);
        if let Some(p) = bare {
            return Err(CcaDiagnostic::new(CcaFailure::HiddenRandomness, "oracle randomness outside encryption-randomness position")
                .at_handle(h)
                .at_position(p));
        }
        if let Some(p) = hidden {
            return Err(CcaDiagnostic::new(CcaFailure::HiddenRandomness, "oracle randomness used with two distinct plaintexts")
                .at_handle(h)
                .at_position(p));
        }
        Ok(())
    };

    for (i, (call, pc)) in st.calls.iter().zip(parsed).enumerate() {
        let h = call.handle.as_str();
        match pc {
            ParsedCall::Enc { seed, body, rand: r } => {
                for s in 0..2 {
                    let t = abstract_calls(&body[s], &dec_registered[s]);
                    if t.contains_symbol(&Symbol::Zero) {
                        return Err(CcaDiagnostic::new(CcaFailure::Context, "zero(.) in an encryption body outside oracle calls").at_handle(h));
                    }
                    if let Some(p) = nodec_violation(keys, &t) {
                        return Err(CcaDiagnostic::new(CcaFailure::KeyUsage, "key seed occurs outside pk(.) in an encryption body")
                            .at_handle(h)
                            .at_position(p));
                    }
                }
                for s in 0..2 {
                    let rn = r[s].as_str();
                    let clash = names[0].contains(rn) || names[1].contains(rn) || body[0].contains_name(rn) || body[1].contains_name(rn);
                    if clash {
                        return Err(CcaDiagnostic::new(CcaFailure::Freshness, format!("randomness n.{rn} is not fresh")).at_handle(h));
                    }
                }
                for s in 0..2 {
                    hidden_check(&body[s], s, &rand, h)?;
                }
                if !body[0].is_dummy() && !body[1].is_dummy() && !eql(&body[0], &body[1], decls) {
                    return Err(CcaDiagnostic::new(CcaFailure::Length, "plaintexts do not have equal, defined lengths").at_handle(h));
                }
                for s in 0..2 {
                    let t = st.call_term(i, if s == 0 { Side::Left } else { Side::Right });
                    t.collect_names(&mut names[s]);
                    registered[s].insert(t.clone(), i);
                    rand[s].insert(r[s].clone(), Some(t.clone()));
                    encs[s].push(RegEnc { call: i, seed: seed.clone(), rand: r[s].clone(), term: t.clone() });
                }
            }
            ParsedCall::Dec { seed, guards, core } => {
                let ctx: Vec<Term> = (0..2).map(|s| abstract_calls(&core[s], &registered[s])).collect();
                for (s, t) in ctx.iter().enumerate() {
                    if t.contains_symbol(&Symbol::Ite) || t.contains_symbol(&Symbol::Zero) {
                        return Err(CcaDiagnostic::new(CcaFailure::Context, "decrypted term uses ite or zero outside oracle calls").at_handle(h));
                    }
                    if let Some(p) = nodec_violation(keys, t) {
                        return Err(CcaDiagnostic::new(CcaFailure::KeyUsage, "key seed occurs outside pk(.) in a decrypted term")
                            .at_handle(h)
                            .at_position(p));
                    }
                    hidden_check(t, s, &rand, h)?;
                    for g in &guards[s] {
                        hidden_check(g, s, &rand, h)?;
                    }
                }
                if ctx[0] != ctx[1] {
                    return Err(CcaDiagnostic::new(CcaFailure::Context, "left and right decrypted terms are not the same handle composition").at_handle(h));
                }
                let y0 = directly_appearing(&core[0], &encs[0], seed, order)?;
                let y1 = directly_appearing(&core[1], &encs[1], seed, order)?;
                let calls0: Vec<usize> = y0.iter().map(|&k| encs[0][k].call).collect();
                let expected0 = guards_from(&core[0], &y0.iter().map(|&k| &encs[0][k].term).collect::<Vec<_>>());
                if expected0 != guards[0] {
                    return Err(CcaDiagnostic::new(
                        CcaFailure::Guard,
                        format!(
                            "left guards [{}] differ from the required [{}]",
                            render_list(&guards[0]),
                            render_list(&expected0)
                        ),
                    )
                    .at_handle(h));
                }
                let calls1: Vec<usize> = y1.iter().map(|&k| encs[1][k].call).collect();
                if calls0 != calls1 {
                    return Err(CcaDiagnostic::new(CcaFailure::Malformed, "left and right directly-appearing encryption sets differ").at_handle(h));
                }
                let alphas1: Vec<&Term> = calls0.iter().map(|&c| &st.calls[c].right).collect();
                let expected1 = guards_from(&core[1], &alphas1);
                if expected1 != guards[1] {
                    return Err(CcaDiagnostic::new(
                        CcaFailure::Guard,
                        format!(
                            "right guards [{}] differ from the required [{}]",
                            render_list(&guards[1]),
                            render_list(&expected1)
                        ),
                    )
                    .at_handle(h));
                }
                for s in 0..2 {
                    let t = st.call_term(i, if s == 0 { Side::Left } else { Side::Right });
                    t.collect_names(&mut names[s]);
                    registered[s].insert(t.clone(), i);
                    dec_registered[s].insert(t.clone(), i);
                }
            }
        }
    }
    // Injectivity of the renaming on the right terms.
    st.renaming
        .check_injective(&names[1])
        .map_err(|e| CcaDiagnostic::new(CcaFailure::Malformed, e.to_string()))?;
    Ok(())
}

fn render_list(ts: &[Term]) -> String {
    ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

/// Checks that `seq` is an instance of the CCA axiom witnessed by `st`.
///
/// Each component must be either an oracle call of `st` or a base term
/// shared by both sides. Calls of `st` that do not occur in `seq` are still
/// replayed; the sequent is then a sub-vector of the full instance.
pub fn verify_cca_instance(seq: &Sequent, st: &CcaStructure, decls: &LengthDecls) -> CcaVerdict {
    verify_cca_instance_with(seq, st, decls, &CanonicalOrder::default())
}

pub fn verify_cca_instance_with(seq: &Sequent, st: &CcaStructure, decls: &LengthDecls, order: &CanonicalOrder) -> CcaVerdict {
    match verify_inner(seq, st, decls, order) {
        Ok(()) => CcaVerdict::Accept,
        Err(d) => CcaVerdict::Reject(d),
    }
}

fn verify_inner(seq: &Sequent, st: &CcaStructure, decls: &LengthDecls, order: &CanonicalOrder) -> Result<(), CcaDiagnostic> {
    if seq.left.len() != seq.right.len() {
        return Err(CcaDiagnostic::new(CcaFailure::Shape, "sides have different lengths"));
    }
    let parsed = parse_structure(st)?;
    let cover = match_components(seq, st)?;
    let mut base: Vec<Term> = Vec::new();
    for (i, c) in cover.iter().enumerate() {
        if *c == Cover::Base && !base.contains(&seq.left[i]) {
            base.push(seq.left[i].clone());
        }
    }
    replay(st, &parsed, &base, decls, order)
}

#[cfg(test)]
mod test;
