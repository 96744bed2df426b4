//! Restr elimination: pushes restrictions up to the leaves, where they are
//! absorbed by Refl and CCA (whose instances are closed under taking
//! sub-vectors).

use super::{Derivation, RuleApp, StepError, StepFailure};
use crate::sequent::Sequent;

/// An equivalent derivation of the same conclusion without Restr nodes.
pub fn eliminate_restr(d: &Derivation) -> Result<Derivation, StepError> {
    let premises = d.premises.iter().map(eliminate_restr).collect::<Result<Vec<_>, _>>()?;
    match &d.rule {
        RuleApp::Restr { kept } => {
            let p = premises.into_iter().next().ok_or_else(|| StepError::new(StepFailure::PremiseCount, "Restr without premise"))?;
            restrict(&p, kept)
        }
        r => Ok(Derivation::new(d.conclusion.clone(), r.clone(), premises)),
    }
}

/// Turns a Restr-free proof of `c` into a proof of `c.restricted(kept)`.
fn restrict(d: &Derivation, kept: &[usize]) -> Result<Derivation, StepError> {
    let n = d.conclusion.len();
    if kept.iter().any(|&i| i >= n) {
        return Err(StepError::new(StepFailure::BadIndex, "restriction index out of range"));
    }
    let mut sorted = kept.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != kept.len() {
        return Err(StepError::new(StepFailure::BadIndex, "restriction indices repeated"));
    }
    let inner = restrict_sorted(d, &sorted)?;
    if sorted == kept {
        return Ok(inner);
    }
    // inner proves c[sorted]; permute to c[kept].
    let perm: Vec<usize> = sorted.iter().map(|s| kept.iter().position(|k| k == s).unwrap()).collect();
    Ok(Derivation::new(d.conclusion.restricted(kept), RuleApp::Perm { perm }, vec![inner]))
}

fn restrict_sorted(d: &Derivation, s: &[usize]) -> Result<Derivation, StepError> {
    let c = &d.conclusion;
    let n = c.len();
    if s.len() == n {
        return Ok(d.clone());
    }
    let concl = c.restricted(s);
    let pos = |i: usize| s.iter().position(|&x| x == i);
    let node = |rule: RuleApp, premises: Vec<Derivation>| Ok(Derivation::new(concl.clone(), rule, premises));
    match &d.rule {
        RuleApp::Refl { .. } | RuleApp::Cca(_) => node(d.rule.clone(), vec![]),
        RuleApp::Sym => node(RuleApp::Sym, vec![restrict_sorted(&d.premises[0], s)?]),
        RuleApp::Perm { perm } => {
            // Premise j holds conclusion perm[j].
            let t: Vec<usize> = (0..n).filter(|&j| s.contains(&perm[j])).collect();
            let sub = restrict_sorted(&d.premises[0], &t)?;
            let new_perm: Vec<usize> = t.iter().map(|&j| pos(perm[j]).unwrap()).collect();
            node(RuleApp::Perm { perm: new_perm }, vec![sub])
        }
        RuleApp::Rw { side, index, replacement } => {
            let sub = restrict_sorted(&d.premises[0], s)?;
            match pos(*index) {
                Some(k) => node(RuleApp::Rw { side: *side, index: k, replacement: replacement.clone() }, vec![sub]),
                None => Ok(sub),
            }
        }
        RuleApp::Fa { symbol, arity, index } => {
            let i = *index;
            let k = *arity;
            let mut t = Vec::new();
            for &x in s {
                if x < i {
                    t.push(x);
                } else if x == i {
                    t.extend(i..i + k);
                } else {
                    t.push(x + k - 1);
                }
            }
            let sub = restrict_sorted(&d.premises[0], &t)?;
            match pos(i) {
                Some(p) => node(RuleApp::Fa { symbol: symbol.clone(), arity: k, index: p }, vec![sub]),
                None => Ok(sub),
            }
        }
        RuleApp::Dup => {
            let (a, b) = (n - 2, n - 1);
            let has_a = s.contains(&a);
            let has_b = s.contains(&b);
            if has_a && has_b {
                let t: Vec<usize> = s[..s.len() - 1].to_vec();
                node(RuleApp::Dup, vec![restrict_sorted(&d.premises[0], &t)?])
            } else if has_b {
                let t: Vec<usize> = s.iter().map(|&x| if x == b { a } else { x }).collect();
                restrict_sorted(&d.premises[0], &t)
            } else {
                restrict_sorted(&d.premises[0], s)
            }
        }
        RuleApp::Cs { targets } => {
            let rest: Vec<usize> = (0..n).filter(|i| !targets.contains(i)).collect();
            let m = rest.len();
            let mut t: Vec<usize> = rest.iter().enumerate().filter(|(_, r)| s.contains(r)).map(|(j, _)| j).collect();
            let kept_targets: Vec<(usize, usize)> =
                targets.iter().enumerate().filter(|(_, x)| s.contains(x)).map(|(k, x)| (k, *x)).collect();
            if kept_targets.is_empty() {
                return restrict_sorted(&d.premises[0], &t);
            }
            t.push(m);
            t.extend(kept_targets.iter().map(|(k, _)| m + 1 + k));
            let p0 = restrict_sorted(&d.premises[0], &t)?;
            let p1 = restrict_sorted(&d.premises[1], &t)?;
            let new_targets = kept_targets.iter().map(|(_, x)| pos(*x).unwrap()).collect();
            node(RuleApp::Cs { targets: new_targets }, vec![p0, p1])
        }
        RuleApp::Restr { .. } => Err(StepError::new(StepFailure::Mismatch, "unexpected Restr node")),
    }
}

/// Wraps `d` (a proof of `premise`) into a Restr node keeping `kept`.
pub fn restr_node(d: Derivation, kept: Vec<usize>) -> Derivation {
    let c: Sequent = d.conclusion.restricted(&kept);
    Derivation::new(c, RuleApp::Restr { kept }, vec![d])
}
