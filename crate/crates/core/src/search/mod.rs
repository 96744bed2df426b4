//! Bounded backward proof search.
//!
//! The search runs iterative deepening over derivation height (Perm nodes
//! are free). At every node it first tries to close the sequent by FA, Dup
//! and a Refl or CCA leaf, then follows the phase order of the ordered
//! strategy: rewrites and conditional introductions, case studies, FA on
//! conditionals, then plain FA. Introduced conditionals and guards come
//! from the candidate pool of the goal. Failed sub-goals are memoized.

pub mod candidates;
pub mod leaf;
pub mod strategy;

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::cca::elses;
use crate::length::LengthDecls;
use crate::proof::{check_proof, premises_of, Derivation, ProofVerdict, RuleApp};
use crate::rewrite::{is_normal, normalize, RewriteError};
use crate::sequent::{Sequent, Side};
use crate::term::order::CanonicalOrder;
use crate::term::{Symbol, Term};

pub use candidates::{candidate_pool, candidate_terms, candidates_of, guards, zeta, CandidateSet};
pub use leaf::{cca_leaf_match, close_any, close_leaf, key_sets, plan_leaf, refl_match};
pub use strategy::StrategyTerm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximal height, not counting Perm nodes.
    pub max_depth: usize,
    pub max_candidates: usize,
    pub timeout: Duration,
    /// Maximal number of case studies on a branch; `None` means `|B| + 1`.
    pub max_nested_cs: Option<usize>,
    /// Worker threads for the two premises of a case study.
    pub jobs: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_depth: 12, max_candidates: 4096, timeout: Duration::from_secs(60), max_nested_cs: None, jobs: 1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    /// The last depth bound that was fully explored or succeeded.
    pub depth: usize,
    pub candidates: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("no proof within the budget ({} nodes explored, depth {})", .0.nodes, .0.depth)]
    NotFound(SearchStats),
    #[error("search timed out after {} nodes at depth {}", .0.nodes, .0.depth)]
    Timeout(SearchStats),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("internal error: the found proof does not check: {0}")]
    Unsound(String),
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub proof: Derivation,
    pub stats: SearchStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Phase {
    Intro,
    Cs,
    FaIte,
    Fa,
}

struct Abort;

type Found = Result<Option<Derivation>, Abort>;

struct Searcher<'a> {
    order: &'a CanonicalOrder,
    decls: &'a LengthDecls,
    conds: Vec<Term>,
    guards: Vec<Term>,
    max_candidates: usize,
    jobs: usize,
    deadline: Instant,
    timed_out: AtomicBool,
    nodes: AtomicU64,
    memo: Mutex<HashMap<(Sequent, Phase, usize), usize>>,
}

fn set(seq: &Sequent, side: Side, i: usize, t: Term) -> Sequent {
    let mut s = seq.clone();
    match side {
        Side::Left => s.left[i] = t,
        Side::Right => s.right[i] = t,
    }
    s
}

fn other(s: Side) -> Side {
    match s {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    }
}

/// Decryptions `dec(w, sk(n))` occurring in `t`.
fn decryptions(t: &Term) -> Vec<Term> {
    t.subterms().into_iter().filter(|s| s.is_app_of(&Symbol::Dec) && s.args()[1].sk_seed().is_some()).collect()
}

/// `t` with the decryption `d` guarded by `g`, unless already guarded.
fn guard_in(t: &Term, d: &Term, g: &Term) -> Term {
    let guarded = elses(std::slice::from_ref(g), d);
    t.map_top_down(&mut |s| {
        if *s == guarded {
            Some(s.clone())
        } else if s == d {
            Some(guarded.clone())
        } else {
            None
        }
    })
}

impl Searcher<'_> {
    fn tick(&self) -> Result<(), Abort> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n % 64 == 0 && Instant::now() > self.deadline {
            self.timed_out.store(true, Ordering::Relaxed);
        }
        if self.timed_out.load(Ordering::Relaxed) {
            Err(Abort)
        } else {
            Ok(())
        }
    }

    fn failed_before(&self, key: &(Sequent, Phase, usize), d: usize) -> bool {
        self.memo.lock().unwrap().get(key).is_some_and(|&f| f >= d)
    }

    fn record_failure(&self, key: (Sequent, Phase, usize), d: usize) {
        let mut m = self.memo.lock().unwrap();
        let e = m.entry(key).or_insert(0);
        *e = (*e).max(d);
    }

    fn prove(&self, seq: &Sequent, d: usize, phase: Phase, cs_left: usize) -> Found {
        self.tick()?;
        if d == 0 {
            return Ok(None);
        }
        let key = (seq.clone(), phase, cs_left);
        if self.failed_before(&key, d) {
            return Ok(None);
        }
        let r = self.expand(seq, d, phase, cs_left)?;
        if r.is_none() {
            self.record_failure(key, d);
        }
        Ok(r)
    }

    fn expand(&self, seq: &Sequent, d: usize, phase: Phase, cs_left: usize) -> Found {
        if let Some(p) = close_any(seq, d, self.order, self.decls) {
            return Ok(Some(p));
        }
        if d < 2 {
            return Ok(None);
        }
        if let Some((steps, next)) = leaf::dedupe_once(seq) {
            // Removing a duplicate never loses provability.
            return Ok(self.prove(&next, d - 1, phase, cs_left)?.map(|p| wrap(steps, p)));
        }
        if phase <= Phase::Intro {
            if let Some(p) = self.normalize_step(seq, d, cs_left)? {
                return Ok(Some(p));
            }
            if cs_left > 0 {
                if let Some(p) = self.introduce(seq, d, cs_left)? {
                    return Ok(Some(p));
                }
            }
        }
        if phase <= Phase::Cs && cs_left > 0 {
            if let Some(p) = self.case_study(seq, d, cs_left)? {
                return Ok(Some(p));
            }
        }
        if phase <= Phase::FaIte {
            if let Some(p) = self.fa(seq, d, cs_left, true)? {
                return Ok(Some(p));
            }
        }
        self.fa(seq, d, cs_left, false)
    }

    /// Rewrites one non-normal component into its normal form.
    fn normalize_step(&self, seq: &Sequent, d: usize, cs_left: usize) -> Found {
        for side in [Side::Left, Side::Right] {
            for (i, t) in seq.side(side).iter().enumerate() {
                if is_normal(t, self.order) {
                    continue;
                }
                let Ok(nf) = normalize(t, self.order) else { continue };
                let rule = RuleApp::Rw { side, index: i, replacement: nf.clone() };
                let next = set(seq, side, i, nf);
                if let Some(p) = self.prove(&next, d - 1, Phase::Intro, cs_left)? {
                    return Ok(Some(Derivation::new(seq.clone(), rule, vec![p])));
                }
            }
        }
        Ok(None)
    }

    /// Conditionals to introduce opposite `ite(c', _, _)` at a term `x`:
    /// guards of the decryptions of `x` first, then plain conditionals.
    fn intro_variants(&self, x: &Term, c_other: &Term) -> Vec<StrategyTerm> {
        let mut out = Vec::new();
        let decs = decryptions(x);
        for g in &self.guards {
            for dd in &decs {
                if g.args()[0] == dd.args()[0] {
                    out.push(StrategyTerm::boxed(g.clone(), x.clone(), guard_in(x, dd, g), x.clone()));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for c in std::iter::once(c_other).chain(self.conds.iter()) {
            if c.is_if_free() && seen.insert(c.clone()) {
                out.push(StrategyTerm::boxed(c.clone(), x.clone(), x.clone(), x.clone()));
            }
        }
        out.truncate(self.max_candidates);
        out
    }

    /// Introduces a conditional on one side to match a conditional on the
    /// other, then applies CS to the pair.
    fn introduce(&self, seq: &Sequent, d: usize, cs_left: usize) -> Found {
        let cost_rw = |n: usize| n + 1;
        for i in 0..seq.len() {
            for xs in [Side::Left, Side::Right] {
                let ss = other(xs);
                let x = &seq.side(xs)[i];
                let s = &seq.side(ss)[i];
                let Some((c_s, p_s, q_s)) = s.as_ite() else { continue };
                if x.is_ite() || !c_s.is_if_free() {
                    continue;
                }
                let mut s_variants = vec![None];
                if c_s.is_app_of(&Symbol::Eq) {
                    for dd in decryptions(q_s) {
                        if dd.args()[0] == c_s.args()[0] {
                            let q2 = guard_in(q_s, &dd, c_s);
                            if q2 != *q_s {
                                let b = StrategyTerm::boxed(c_s.clone(), p_s.clone(), q2, s.clone());
                                s_variants.insert(0, Some(b));
                            }
                        }
                    }
                }
                for xb in self.intro_variants(x, c_s) {
                    if !xb.well_formed(self.order).unwrap_or(false) {
                        continue;
                    }
                    for sb in &s_variants {
                        let rws = 1 + usize::from(sb.is_some());
                        if d < cost_rw(rws) + 1 {
                            continue;
                        }
                        if let Some(sb) = sb {
                            if !sb.well_formed(self.order).unwrap_or(false) {
                                continue;
                            }
                        }
                        let x2 = xb.erase();
                        let mut steps = vec![(seq.clone(), RuleApp::Rw { side: xs, index: i, replacement: x2.clone() })];
                        let mut cur = set(seq, xs, i, x2);
                        if let Some(sb) = sb {
                            let s2 = sb.erase();
                            steps.push((cur.clone(), RuleApp::Rw { side: ss, index: i, replacement: s2.clone() }));
                            cur = set(&cur, ss, i, s2);
                        }
                        let rem = d - rws;
                        if let Some(p) = self.cs_on(&cur, vec![i], rem, cs_left)? {
                            return Ok(Some(wrap(steps, p)));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// CS on `targets`, proving both premises within `d - 1`.
    fn cs_on(&self, seq: &Sequent, targets: Vec<usize>, d: usize, cs_left: usize) -> Found {
        let rule = RuleApp::Cs { targets };
        let Ok(ps) = premises_of(&rule, seq, self.order) else { return Ok(None) };
        let (a, b) = (&ps[0], &ps[1]);
        let next = Phase::Intro;
        let (pa, pb) = if self.jobs > 1 {
            std::thread::scope(|sc| {
                let h = sc.spawn(|| self.prove(b, d - 1, next, cs_left - 1));
                let ra = self.prove(a, d - 1, next, cs_left - 1);
                (ra, h.join().unwrap_or(Err(Abort)))
            })
        } else {
            let ra = self.prove(a, d - 1, next, cs_left - 1)?;
            if ra.is_none() {
                return Ok(None);
            }
            (Ok(ra), self.prove(b, d - 1, next, cs_left - 1))
        };
        match (pa?, pb?) {
            (Some(x), Some(y)) => Ok(Some(Derivation::new(seq.clone(), rule, vec![x, y]))),
            _ => Ok(None),
        }
    }

    /// CS on pairs of conditionals already present on both sides.
    fn case_study(&self, seq: &Sequent, d: usize, cs_left: usize) -> Found {
        let mut tried = BTreeSet::new();
        for i in 0..seq.len() {
            let (Some((bl, _, _)), Some((br, _, _))) = (seq.left[i].as_ite(), seq.right[i].as_ite()) else { continue };
            if !bl.is_if_free() || !br.is_if_free() || !tried.insert((bl.clone(), br.clone())) {
                continue;
            }
            let targets: Vec<usize> = (0..seq.len())
                .filter(|&j| {
                    matches!((seq.left[j].as_ite(), seq.right[j].as_ite()),
                        (Some((a, _, _)), Some((b, _, _))) if a == bl && b == br)
                })
                .collect();
            if let Some(p) = self.cs_on(seq, targets, d, cs_left)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    fn fa(&self, seq: &Sequent, d: usize, cs_left: usize, on_ite: bool) -> Found {
        let phase = if on_ite { Phase::FaIte } else { Phase::Fa };
        for i in 0..seq.len() {
            let (l, r) = seq.pair(i);
            if l.is_ite() != on_ite || l.is_app_of(&Symbol::Zero) || l.args().is_empty() {
                continue;
            }
            let (Some(f), Some(g)) = (l.head(), r.head()) else { continue };
            if f != g || l.args().len() != r.args().len() {
                continue;
            }
            // Frozen: the conditional is taken apart here, so no later
            // case study may target it.
            let rule = RuleApp::Fa { symbol: f.name().to_string(), arity: f.arity(), index: i };
            let Ok(mut ps) = premises_of(&rule, seq, self.order) else { continue };
            if let Some(p) = self.prove(&ps.remove(0), d - 1, phase, cs_left)? {
                return Ok(Some(Derivation::new(seq.clone(), rule, vec![p])));
            }
        }
        Ok(None)
    }
}

fn wrap(steps: Vec<(Sequent, RuleApp)>, p: Derivation) -> Derivation {
    steps.into_iter().rev().fold(p, |d, (c, r)| Derivation::new(c, r, vec![d]))
}

pub fn search(goal: &Sequent, budget: &SearchBudget, order: &CanonicalOrder, decls: &LengthDecls) -> Result<SearchResult, SearchError> {
    search_with_hints(goal, budget, order, decls, &[])
}

/// Search where `hints` are tried before the candidate pool.
pub fn search_with_hints(
    goal: &Sequent,
    budget: &SearchBudget,
    order: &CanonicalOrder,
    decls: &LengthDecls,
    hints: &[Term],
) -> Result<SearchResult, SearchError> {
    let pool = candidate_pool(goal, order, budget.max_candidates)?;
    let mut conds: Vec<Term> = hints.iter().filter(|h| h.is_if_free()).cloned().collect();
    conds.extend(pool.conditionals().take(budget.max_candidates).cloned());
    let mut guards: Vec<Term> = hints.iter().filter(|h| h.is_app_of(&Symbol::Eq)).cloned().collect();
    guards.extend(pool.guards().take(budget.max_candidates).cloned());
    let cs_max = budget.max_nested_cs.unwrap_or(pool.len() + 1);
    let s = Searcher {
        order,
        decls,
        conds,
        guards,
        max_candidates: budget.max_candidates,
        jobs: budget.jobs.max(1),
        deadline: Instant::now() + budget.timeout,
        timed_out: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
        memo: Mutex::new(HashMap::new()),
    };
    let mut stats = SearchStats { candidates: pool.len(), ..Default::default() };
    for depth in 1..=budget.max_depth {
        let r = s.prove(goal, depth, Phase::Intro, cs_max);
        stats.nodes = s.nodes.load(Ordering::Relaxed);
        match r {
            Err(Abort) => return Err(SearchError::Timeout(stats)),
            Ok(Some(proof)) => {
                stats.depth = depth;
                return match check_proof(&proof, order, decls) {
                    ProofVerdict::Accept => Ok(SearchResult { proof, stats }),
                    ProofVerdict::Reject { path, error, .. } => Err(SearchError::Unsound(format!("at {path:?}: {error}"))),
                };
            }
            Ok(None) => stats.depth = depth,
        }
    }
    Err(SearchError::NotFound(stats))
}

#[cfg(test)]
mod test;
