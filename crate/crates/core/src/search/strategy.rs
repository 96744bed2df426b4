//! Terms with the strategy-only annotations used while searching.
//!
//! A split box `⟦then|else⟧_b` records a conditional the search introduced:
//! `base` is the term it replaces, and each branch must agree with it on
//! its side of the conditional.
//! A frozen term is a conditional already taken apart by FA; it may not be
//! the target of a later case study. Both are erased before a proof is
//! emitted.

use crate::rewrite::{equal_mod_r, RewriteError};
use crate::term::order::CanonicalOrder;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyTerm {
    Plain(Term),
    Box { cond: Term, then: Term, els: Term, base: Term },
    Frozen(Term),
}

impl StrategyTerm {
    pub fn boxed(cond: Term, then: Term, els: Term, base: Term) -> Self {
        StrategyTerm::Box { cond, then, els, base }
    }

    /// The base-logic term this stands for.
    pub fn erase(&self) -> Term {
        match self {
            StrategyTerm::Plain(t) | StrategyTerm::Frozen(t) => t.clone(),
            StrategyTerm::Box { cond, then, els, .. } => Term::ite(cond.clone(), then.clone(), els.clone()),
        }
    }

    pub fn is_frozen(&self) -> bool {
        matches!(self, StrategyTerm::Frozen(_))
    }

    pub fn unfreeze(self) -> Self {
        match self {
            StrategyTerm::Frozen(t) => StrategyTerm::Plain(t),
            s => s,
        }
    }

    /// For a box: `ite(b, then, base)`, `ite(b, base, else)` and the erased
    /// conditional are all R-equal to the base term.
    pub fn well_formed(&self, order: &CanonicalOrder) -> Result<bool, RewriteError> {
        match self {
            StrategyTerm::Box { cond, then, els, base } => {
                let t = Term::ite(cond.clone(), then.clone(), base.clone());
                let e = Term::ite(cond.clone(), base.clone(), els.clone());
                Ok(equal_mod_r(&t, base, order)? && equal_mod_r(&e, base, order)? && equal_mod_r(&self.erase(), base, order)?)
            }
            _ => Ok(true),
        }
    }
}
