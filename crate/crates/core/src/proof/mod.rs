//! Derivations over sequents and the rule checker.
//!
//! Rules are read bottom-up: each rule relates a conclusion to its
//! premises. `premises_of` computes the premises a rule determines, which
//! the checker compares against the ones supplied.

pub(crate) mod restr;

use std::fmt;

use crate::cca::{verify_cca_instance_with, CcaFailure, CcaStructure, CcaVerdict};
use crate::length::LengthDecls;
use crate::rewrite::{equal_mod_r, RewriteError};
use crate::sequent::{Sequent, Side};
use crate::term::order::CanonicalOrder;
use crate::term::{Renaming, Symbol, Term};

pub use restr::{eliminate_restr, restr_node};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleApp {
    /// Right side is the renaming of the left side.
    Refl { renaming: Renaming },
    /// Function application on component `index`.
    Fa { symbol: String, arity: usize, index: usize },
    /// Drops the last component, which duplicates the one before it.
    Dup,
    /// Case study on the ite components at `targets`.
    Cs { targets: Vec<usize> },
    /// Replaces a component by an R-equal term.
    Rw { side: Side, index: usize, replacement: Term },
    /// Premise component `j` is conclusion component `perm[j]`.
    Perm { perm: Vec<usize> },
    Sym,
    /// The conclusion keeps the premise components at `kept`.
    Restr { kept: Vec<usize> },
    Cca(CcaStructure),
}

impl RuleApp {
    pub fn name(&self) -> &'static str {
        match self {
            RuleApp::Refl { .. } => "refl",
            RuleApp::Fa { .. } => "fa",
            RuleApp::Dup => "dup",
            RuleApp::Cs { .. } => "cs",
            RuleApp::Rw { .. } => "rw",
            RuleApp::Perm { .. } => "perm",
            RuleApp::Sym => "sym",
            RuleApp::Restr { .. } => "restr",
            RuleApp::Cca(_) => "cca",
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, RuleApp::Refl { .. } | RuleApp::Cca(_))
    }

    fn premise_count(&self) -> usize {
        match self {
            RuleApp::Refl { .. } | RuleApp::Cca(_) => 0,
            RuleApp::Cs { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: RuleApp,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn new(conclusion: Sequent, rule: RuleApp, premises: Vec<Derivation>) -> Self {
        Derivation { conclusion, rule, premises }
    }

    pub fn leaf(conclusion: Sequent, rule: RuleApp) -> Self {
        Derivation { conclusion, rule, premises: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(|p| p.node_count()).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(|p| p.height()).max().unwrap_or(0)
    }

    pub fn count_rule(&self, name: &str) -> usize {
        usize::from(self.rule.name() == name) + self.premises.iter().map(|p| p.count_rule(name)).sum::<usize>()
    }

    /// The node reached by following premise indices.
    pub fn at_path(&self, path: &[usize]) -> Option<&Derivation> {
        let mut d = self;
        for &i in path {
            d = d.premises.get(i)?;
        }
        Some(d)
    }

    pub fn at_path_mut(&mut self, path: &[usize]) -> Option<&mut Derivation> {
        let mut d = self;
        for &i in path {
            d = d.premises.get_mut(i)?;
        }
        Some(d)
    }

    /// Pre-order walk with paths.
    pub fn visit(&self, f: &mut impl FnMut(&[usize], &Derivation)) {
        fn go(d: &Derivation, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &Derivation)) {
            f(path, d);
            for (i, p) in d.premises.iter().enumerate() {
                path.push(i);
                go(p, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepFailure {
    PremiseCount,
    BadIndex,
    /// The premises are not the ones the rule determines.
    Mismatch,
    FaSymbol,
    FaOnZero,
    CsConditional,
    RwNotEqual,
    Dup,
    Refl,
    Rewrite,
    Cca(CcaFailure),
}

impl StepFailure {
    pub fn name(self) -> &'static str {
        match self {
            StepFailure::PremiseCount => "premise-count",
            StepFailure::BadIndex => "bad-index",
            StepFailure::Mismatch => "premise-mismatch",
            StepFailure::FaSymbol => "fa-symbol",
            StepFailure::FaOnZero => "fa-on-zero",
            StepFailure::CsConditional => "cs-conditional",
            StepFailure::RwNotEqual => "rw-not-equal",
            StepFailure::Dup => "dup-mismatch",
            StepFailure::Refl => "refl-mismatch",
            StepFailure::Rewrite => "rewrite-budget",
            StepFailure::Cca(c) => c.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepError {
    pub kind: StepFailure,
    pub message: String,
}

impl StepError {
    fn new(kind: StepFailure, message: impl Into<String>) -> Self {
        StepError { kind, message: message.into() }
    }
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.message)
    }
}

impl std::error::Error for StepError {}

impl From<RewriteError> for StepError {
    fn from(e: RewriteError) -> Self {
        StepError::new(StepFailure::Rewrite, e.to_string())
    }
}

/// The premises determined by a non-leaf rule other than Restr.
pub fn premises_of(rule: &RuleApp, c: &Sequent, order: &CanonicalOrder) -> Result<Vec<Sequent>, StepError> {
    let n = c.len();
    let check_index = |i: usize| {
        if i < n {
            Ok(())
        } else {
            Err(StepError::new(StepFailure::BadIndex, format!("component {i} out of range (sequent has {n})")))
        }
    };
    match rule {
        RuleApp::Fa { symbol, arity, index } => {
            check_index(*index)?;
            if symbol == "zero" {
                return Err(StepError::new(StepFailure::FaOnZero, "FA does not apply to zero"));
            }
            let (l, r) = c.pair(*index);
            for t in [l, r] {
                match t.head() {
                    Some(h) if h.name() == symbol && t.args().len() == *arity => {}
                    _ => {
                        return Err(StepError::new(
                            StepFailure::FaSymbol,
                            format!("component {index} is not an application of {symbol}/{arity}: {t}"),
                        ))
                    }
                }
            }
            let mut p = c.clone();
            p.left.splice(*index..*index + 1, l.args().iter().cloned());
            p.right.splice(*index..*index + 1, r.args().iter().cloned());
            Ok(vec![p])
        }
        RuleApp::Dup => {
            if n < 2 || c.left[n - 1] != c.left[n - 2] || c.right[n - 1] != c.right[n - 2] {
                return Err(StepError::new(StepFailure::Dup, "the last two components are not duplicates"));
            }
            Ok(vec![c.restricted(&(0..n - 1).collect::<Vec<_>>())])
        }
        RuleApp::Cs { targets } => {
            if targets.is_empty() {
                return Err(StepError::new(StepFailure::BadIndex, "CS needs at least one target"));
            }
            let mut seen = vec![false; n];
            for &t in targets {
                check_index(t)?;
                if std::mem::replace(&mut seen[t], true) {
                    return Err(StepError::new(StepFailure::BadIndex, format!("target {t} repeated")));
                }
            }
            let split = |side: &[Term]| -> Result<(Term, Vec<Term>, Vec<Term>), StepError> {
                let mut cond: Option<Term> = None;
                let (mut th, mut el) = (Vec::new(), Vec::new());
                for &t in targets {
                    let Some((b, x, y)) = side[t].as_ite() else {
                        return Err(StepError::new(StepFailure::Mismatch, format!("target {t} is not a conditional")));
                    };
                    match &cond {
                        None => cond = Some(b.clone()),
                        Some(c0) if c0 != b => {
                            return Err(StepError::new(StepFailure::Mismatch, "targets do not share their conditional"));
                        }
                        _ => {}
                    }
                    th.push(x.clone());
                    el.push(y.clone());
                }
                let b = cond.unwrap();
                if !b.is_if_free() {
                    return Err(StepError::new(StepFailure::CsConditional, format!("conditional {b} is not if-free")));
                }
                Ok((b, th, el))
            };
            let (bl, thl, ell) = split(&c.left)?;
            let (br, thr, elr) = split(&c.right)?;
            let rest: Vec<usize> = (0..n).filter(|i| !seen[*i]).collect();
            let build = |side: &[Term], b: &Term, br: Vec<Term>| -> Vec<Term> {
                let mut v: Vec<Term> = rest.iter().map(|&i| side[i].clone()).collect();
                v.push(b.clone());
                v.extend(br);
                v
            };
            Ok(vec![
                Sequent::new(build(&c.left, &bl, thl), build(&c.right, &br, thr)),
                Sequent::new(build(&c.left, &bl, ell), build(&c.right, &br, elr)),
            ])
        }
        RuleApp::Rw { side, index, replacement } => {
            check_index(*index)?;
            let orig = &c.side(*side)[*index];
            if !equal_mod_r(orig, replacement, order)? {
                return Err(StepError::new(StepFailure::RwNotEqual, format!("{orig} and {replacement} are not R-equal")));
            }
            let mut p = c.clone();
            match side {
                Side::Left => p.left[*index] = replacement.clone(),
                Side::Right => p.right[*index] = replacement.clone(),
            }
            Ok(vec![p])
        }
        RuleApp::Perm { perm } => {
            let mut seen = vec![false; n];
            if perm.len() != n || perm.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
                return Err(StepError::new(StepFailure::BadIndex, "not a permutation of the components"));
            }
            Ok(vec![c.permuted(perm)])
        }
        RuleApp::Sym => Ok(vec![c.swapped()]),
        RuleApp::Restr { .. } | RuleApp::Refl { .. } | RuleApp::Cca(_) => {
            Err(StepError::new(StepFailure::PremiseCount, format!("{} does not determine its premises", rule.name())))
        }
    }
}

/// Checks a single rule application.
pub fn check_step(
    rule: &RuleApp,
    conclusion: &Sequent,
    premises: &[Sequent],
    order: &CanonicalOrder,
    decls: &LengthDecls,
) -> Result<(), StepError> {
    if conclusion.left.len() != conclusion.right.len() {
        return Err(StepError::new(StepFailure::Mismatch, "sides have different lengths"));
    }
    if premises.len() != rule.premise_count() {
        return Err(StepError::new(
            StepFailure::PremiseCount,
            format!("{} expects {} premises, got {}", rule.name(), rule.premise_count(), premises.len()),
        ));
    }
    match rule {
        RuleApp::Refl { renaming } => {
            let mut names = std::collections::BTreeSet::new();
            for t in &conclusion.left {
                t.collect_names(&mut names);
            }
            renaming.check_injective(&names).map_err(|e| StepError::new(StepFailure::Refl, e.to_string()))?;
            for (i, (l, r)) in conclusion.pairs().enumerate() {
                if &l.rename(renaming) != r {
                    return Err(StepError::new(StepFailure::Refl, format!("component {i}: {r} is not a renaming of {l}")));
                }
            }
            Ok(())
        }
        RuleApp::Cca(st) => match verify_cca_instance_with(conclusion, st, decls, order) {
            CcaVerdict::Accept => Ok(()),
            CcaVerdict::Reject(d) => Err(StepError::new(StepFailure::Cca(d.kind), d.to_string())),
        },
        RuleApp::Restr { kept } => {
            let p = &premises[0];
            if p.left.len() != p.right.len() {
                return Err(StepError::new(StepFailure::Mismatch, "premise sides have different lengths"));
            }
            let mut seen = vec![false; p.len()];
            if kept.iter().any(|&i| i >= p.len() || std::mem::replace(&mut seen[i], true)) {
                return Err(StepError::new(StepFailure::BadIndex, "restriction indices must be distinct premise components"));
            }
            if &p.restricted(kept) != conclusion {
                return Err(StepError::new(StepFailure::Mismatch, "conclusion is not the restriction of the premise"));
            }
            Ok(())
        }
        _ => {
            let expected = premises_of(rule, conclusion, order)?;
            for (i, (e, p)) in expected.iter().zip(premises).enumerate() {
                if e != p {
                    return Err(StepError::new(StepFailure::Mismatch, format!("premise {i} should be {e}, found {p}")));
                }
            }
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofVerdict {
    Accept,
    Reject { path: Vec<usize>, rule: &'static str, error: StepError },
}

impl ProofVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, ProofVerdict::Accept)
    }
}

/// Checks every node, depth first with premises in order; reports the
/// first failing node.
pub fn check_proof(d: &Derivation, order: &CanonicalOrder, decls: &LengthDecls) -> ProofVerdict {
    fn go(d: &Derivation, order: &CanonicalOrder, decls: &LengthDecls, path: &mut Vec<usize>) -> ProofVerdict {
        let prem: Vec<Sequent> = d.premises.iter().map(|p| p.conclusion.clone()).collect();
        if let Err(error) = check_step(&d.rule, &d.conclusion, &prem, order, decls) {
            return ProofVerdict::Reject { path: path.clone(), rule: d.rule.name(), error };
        }
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            let v = go(p, order, decls, path);
            path.pop();
            if !v.is_accept() {
                return v;
            }
        }
        ProofVerdict::Accept
    }
    go(d, order, decls, &mut Vec::new())
}

/// Backward construction helpers: apply a rule to a conclusion and get the
/// premises it determines.
pub fn apply(rule: RuleApp, conclusion: &Sequent, order: &CanonicalOrder) -> Result<(RuleApp, Vec<Sequent>), StepError> {
    let p = premises_of(&rule, conclusion, order)?;
    Ok((rule, p))
}

/// The FA rule for the head symbol of component `index`.
pub fn fa_at(c: &Sequent, index: usize) -> Option<RuleApp> {
    let t = c.left.get(index)?;
    let h = t.head()?;
    (*h != Symbol::Zero).then(|| RuleApp::Fa { symbol: h.name().to_string(), arity: h.arity(), index })
}
