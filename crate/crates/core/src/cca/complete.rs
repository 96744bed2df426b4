//! Completion of a CCA sub-instance into a full instance.
//!
//! Given a sequent whose components are some of the calls of a structure
//! (plus base terms), compute the calls each kept component depends on on
//! each side. Calls needed only on the right are replaced on the left by a
//! dummy encryption, or rebuilt from their context for decryptions, and
//! symmetrically.

use std::collections::{BTreeSet, HashMap};

use super::{
    abstract_calls, directly_appearing, elses, fill_holes, guards_from, holes, match_components, parse_structure,
    CcaDiagnostic, CcaStructure, CallKind, Cover, OracleCall, ParsedCall, RegEnc,
};
use crate::sequent::{Sequent, Side};
use crate::term::order::CanonicalOrder;
use crate::term::Term;

/// Extends `seq` to a full instance of `st`, adding only the calls needed
/// by its components. Original components keep their positions; added
/// calls are appended in call order. The returned structure declares
/// exactly the calls of the returned sequent.
pub fn complete_instance(seq: &Sequent, st: &CcaStructure) -> Result<(Sequent, CcaStructure), CcaDiagnostic> {
    let order = CanonicalOrder::default();
    let parsed = parse_structure(st)?;
    let cover = match_components(seq, st)?;
    let n = st.calls.len();

    // Handles used by each call's context, per side.
    let mut registered: [HashMap<Term, usize>; 2] = [HashMap::new(), HashMap::new()];
    let mut dec_registered: [HashMap<Term, usize>; 2] = [HashMap::new(), HashMap::new()];
    let mut ctx: Vec<[Term; 2]> = Vec::with_capacity(n);
    for (i, pc) in parsed.iter().enumerate() {
        let c: [Term; 2] = match pc {
            ParsedCall::Enc { body, .. } => {
                [abstract_calls(&body[0], &dec_registered[0]), abstract_calls(&body[1], &dec_registered[1])]
            }
            ParsedCall::Dec { core, .. } => [abstract_calls(&core[0], &registered[0]), abstract_calls(&core[1], &registered[1])],
        };
        ctx.push(c);
        for s in 0..2 {
            let t = side_term(st, i, s).clone();
            registered[s].insert(t.clone(), i);
            if st.calls[i].kind == CallKind::Dec {
                dec_registered[s].insert(t, i);
            }
        }
    }

    // Dependency closures, computed in call order. A decryption also
    // depends on the encryptions its guards refer to.
    let mut closure: [Vec<BTreeSet<usize>>; 2] = [Vec::new(), Vec::new()];
    for i in 0..n {
        let mut guarded = Vec::new();
        if let ParsedCall::Dec { seed, core, .. } = &parsed[i] {
            let encs = side_encs_before(st, &parsed, i, 0);
            guarded = directly_appearing(&core[0], &encs, seed, &order)?.into_iter().map(|k| encs[k].call).collect();
        }
        for s in 0..2 {
            let mut set = BTreeSet::from([i]);
            for h in holes(&ctx[i][s]).into_iter().chain(guarded.iter().copied()) {
                set.extend(closure[s][h].iter().copied());
            }
            closure[s].push(set);
        }
    }
    let kept: BTreeSet<usize> = cover.iter().filter_map(|c| if let Cover::Call(j) = c { Some(*j) } else { None }).collect();
    let need: [BTreeSet<usize>; 2] = [0, 1].map(|s| kept.iter().flat_map(|&k| closure[s][k].iter().copied()).collect());
    let all: BTreeSet<usize> = need[0].union(&need[1]).copied().collect();

    // Tilde terms, built in call order so contexts can refer to earlier ones.
    let mut tilde: [HashMap<usize, Term>; 2] = [HashMap::new(), HashMap::new()];
    for &i in &all {
        for s in 0..2 {
            let t = if need[s].contains(&i) {
                side_term(st, i, s).clone()
            } else {
                match &parsed[i] {
                    ParsedCall::Enc { seed, rand, .. } => {
                        Term::enc(Term::dummy(), Term::pk(Term::name(seed)), Term::name(&rand[s]))
                    }
                    ParsedCall::Dec { seed, core, .. } => {
                        let map = &tilde[s];
                        let u = fill_holes(&ctx[i][s], &|h| map[&h].clone());
                        let encs = side_encs_before(st, &parsed, i, s);
                        let y = directly_appearing(&core[s], &encs, seed, &order)?;
                        let alphas: Vec<Term> = y.iter().map(|&k| map[&encs[k].call].clone()).collect();
                        let guards = guards_from(&u, &alphas.iter().collect::<Vec<_>>());
                        elses(&guards, &Term::dec(u, Term::sk(Term::name(seed))))
                    }
                }
            };
            tilde[s].insert(i, t);
        }
    }

    let mut out = seq.clone();
    let mut calls = Vec::new();
    for &i in &all {
        let c = &st.calls[i];
        let call = OracleCall { handle: c.handle.clone(), kind: c.kind, left: tilde[0][&i].clone(), right: tilde[1][&i].clone() };
        if !kept.contains(&i) {
            out.left.push(call.left.clone());
            out.right.push(call.right.rename(&st.renaming));
        }
        calls.push(call);
    }
    let new_st = CcaStructure { keys: st.keys.clone(), renaming: st.renaming.clone(), calls };
    Ok((out, new_st))
}

fn side_term(st: &CcaStructure, i: usize, s: usize) -> &Term {
    st.call_term(i, if s == 0 { Side::Left } else { Side::Right })
}

fn side_encs_before(st: &CcaStructure, parsed: &[ParsedCall], i: usize, s: usize) -> Vec<RegEnc> {
    parsed[..i]
        .iter()
        .enumerate()
        .filter_map(|(j, pc)| match pc {
            ParsedCall::Enc { seed, rand, .. } => {
                Some(RegEnc { call: j, seed: seed.clone(), rand: rand[s].clone(), term: side_term(st, j, s).clone() })
            }
            ParsedCall::Dec { .. } => None,
        })
        .collect()
}

/// Whether every call of `st` occurs as a component of `seq`.
pub fn is_full_instance(seq: &Sequent, st: &CcaStructure) -> bool {
    st.calls.iter().all(|c| {
        let r = c.right.rename(&st.renaming);
        seq.pairs().any(|(a, b)| a == &c.left && b == &r)
    })
}
