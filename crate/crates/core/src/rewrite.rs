//! The convergent rewrite system for the equational theory, normalization
//! and the conditional/leaf decomposition of normal forms.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::term::order::{lpo_greater, CanonicalOrder};
use crate::term::{Kind, Position, Symbol, Term};

/// Default bound on rule applications during normalization.
pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    ProjPair,
    DecEnc,
    EqRefl,
    LiftF,
    LiftCond,
    CondCollapse,
    CondTrue,
    CondFalse,
    AbsorbThen,
    AbsorbElse,
    SwapThen,
    SwapElse,
}

impl RuleId {
    pub const ALL: [RuleId; 12] = [
        RuleId::ProjPair,
        RuleId::DecEnc,
        RuleId::EqRefl,
        RuleId::LiftF,
        RuleId::LiftCond,
        RuleId::CondCollapse,
        RuleId::CondTrue,
        RuleId::CondFalse,
        RuleId::AbsorbThen,
        RuleId::AbsorbElse,
        RuleId::SwapThen,
        RuleId::SwapElse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::ProjPair => "proj-pair",
            RuleId::DecEnc => "dec-enc",
            RuleId::EqRefl => "eq-refl",
            RuleId::LiftF => "lift-f",
            RuleId::LiftCond => "lift-cond",
            RuleId::CondCollapse => "cond-collapse",
            RuleId::CondTrue => "cond-true",
            RuleId::CondFalse => "cond-false",
            RuleId::AbsorbThen => "absorb-then",
            RuleId::AbsorbElse => "absorb-else",
            RuleId::SwapThen => "swap-then",
            RuleId::SwapElse => "swap-else",
        }
    }

    /// Swap rules are the only ones whose applicability depends on the order.
    pub fn is_swap(self) -> bool {
        matches!(self, RuleId::SwapThen | RuleId::SwapElse)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("rewrite step budget of {0} exhausted")]
    StepBudget(u64),
    #[error("term is not in normal form: {0}")]
    NotNormal(String),
}

/// Whether `b ≻_c a` for two conditionals.
pub fn cond_greater(b: &Term, a: &Term, order: &CanonicalOrder) -> bool {
    let simple = |t: &Term| t.is_if_free() && is_normal(t, order);
    match (simple(b), simple(a)) {
        (true, true) => order.cond_greater(b, a),
        (false, false) => lpo_greater(b, a),
        (false, true) => true,
        (true, false) => false,
    }
}

/// Every rule instance whose left-hand side matches `t` at the root.
pub fn root_redexes(t: &Term, order: &CanonicalOrder) -> Vec<(RuleId, Term)> {
    let mut out = Vec::new();
    let Kind::App(sym, args) = t.kind() else {
        return out;
    };
    match sym {
        Symbol::Ite => {
            let (b, x, y) = (&args[0], &args[1], &args[2]);
            if let Some((b1, a, c)) = b.as_ite() {
                out.push((
                    RuleId::LiftCond,
                    Term::ite(
                        b1.clone(),
                        Term::ite(a.clone(), x.clone(), y.clone()),
                        Term::ite(c.clone(), x.clone(), y.clone()),
                    ),
                ));
            }
            if x == y {
                out.push((RuleId::CondCollapse, x.clone()));
            }
            if b.is_app_of(&Symbol::True) {
                out.push((RuleId::CondTrue, x.clone()));
            }
            if b.is_app_of(&Symbol::False) {
                out.push((RuleId::CondFalse, y.clone()));
            }
            if let Some((b2, x1, y1)) = x.as_ite() {
                if b2 == b {
                    out.push((RuleId::AbsorbThen, Term::ite(b.clone(), x1.clone(), y.clone())));
                } else if cond_greater(b, b2, order) {
                    out.push((
                        RuleId::SwapThen,
                        Term::ite(
                            b2.clone(),
                            Term::ite(b.clone(), x1.clone(), y.clone()),
                            Term::ite(b.clone(), y1.clone(), y.clone()),
                        ),
                    ));
                }
            }
            if let Some((b2, y1, z1)) = y.as_ite() {
                if b2 == b {
                    out.push((RuleId::AbsorbElse, Term::ite(b.clone(), x.clone(), z1.clone())));
                } else if cond_greater(b, b2, order) {
                    out.push((
                        RuleId::SwapElse,
                        Term::ite(
                            b2.clone(),
                            Term::ite(b.clone(), x.clone(), y1.clone()),
                            Term::ite(b.clone(), x.clone(), z1.clone()),
                        ),
                    ));
                }
            }
        }
        _ => {
            match sym {
                Symbol::Fst | Symbol::Snd if args[0].is_app_of(&Symbol::Pair) => {
                    let i = if *sym == Symbol::Fst { 0 } else { 1 };
                    out.push((RuleId::ProjPair, args[0].args()[i].clone()));
                }
                Symbol::Dec => {
                    if let Some(x) = dec_enc_redex(&args[0], &args[1]) {
                        out.push((RuleId::DecEnc, x.clone()));
                    }
                }
                Symbol::Eq if args[0] == args[1] => out.push((RuleId::EqRefl, Term::tt())),
                _ => {}
            }
            for (j, a) in args.iter().enumerate() {
                if let Some((b, x, y)) = a.as_ite() {
                    out.push((RuleId::LiftF, lift(t, j, b, x, y)));
                }
            }
        }
    }
    out
}

fn dec_enc_redex<'a>(c: &'a Term, key: &Term) -> Option<&'a Term> {
    if !c.is_app_of(&Symbol::Enc) {
        return None;
    }
    let seed = key.is_app_of(&Symbol::Sk).then(|| &key.args()[0])?;
    let pk = &c.args()[1];
    (pk.is_app_of(&Symbol::Pk) && &pk.args()[0] == seed).then(|| &c.args()[0])
}

fn lift(t: &Term, j: usize, b: &Term, x: &Term, y: &Term) -> Term {
    let mut ax = t.args().to_vec();
    let mut ay = ax.clone();
    ax[j] = x.clone();
    ay[j] = y.clone();
    Term::ite(b.clone(), t.with_args(ax), t.with_args(ay))
}

/// Every single-step rewrite of `t`, at every position.
pub fn rewrite_step(t: &Term, order: &CanonicalOrder) -> Vec<(Position, RuleId, Term)> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect_steps(t, t, order, &mut path, &mut out);
    out
}

fn collect_steps(
    root: &Term,
    t: &Term,
    order: &CanonicalOrder,
    path: &mut Vec<usize>,
    out: &mut Vec<(Position, RuleId, Term)>,
) {
    let pos = Position(path.clone());
    for (rule, r) in root_redexes(t, order) {
        let whole = root.replace_at(&pos, r).expect("rewriting preserves sorts");
        out.push((pos.clone(), rule, whole));
    }
    for (i, a) in t.args().iter().enumerate() {
        path.push(i);
        collect_steps(root, a, order, path, out);
        path.pop();
    }
}

/// Whether no rule applies anywhere in `t`.
pub fn is_normal(t: &Term, order: &CanonicalOrder) -> bool {
    t.args().iter().all(|a| is_normal(a, order)) && root_redexes(t, order).is_empty()
}

/// Innermost normalizer with a step budget and a memo table.
pub struct Normalizer<'a> {
    order: &'a CanonicalOrder,
    budget: u64,
    steps: u64,
    memo: HashMap<Term, Term>,
}

impl<'a> Normalizer<'a> {
    pub fn new(order: &'a CanonicalOrder) -> Self {
        Self::with_budget(order, DEFAULT_STEP_BUDGET)
    }

    pub fn with_budget(order: &'a CanonicalOrder, budget: u64) -> Self {
        Normalizer { order, budget, steps: 0, memo: HashMap::new() }
    }

    /// Rule applications performed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn normalize(&mut self, t: &Term) -> Result<Term, RewriteError> {
        if let Some(r) = self.memo.get(t) {
            return Ok(r.clone());
        }
        let r = match t.kind() {
            Kind::Name(_) => t.clone(),
            Kind::App(sym, args) => {
                let nargs = args.iter().map(|a| self.normalize(a)).collect::<Result<Vec<_>, _>>()?;
                self.root(sym.clone(), nargs)?
            }
        };
        self.memo.insert(t.clone(), r.clone());
        Ok(r)
    }

    fn tick(&mut self) -> Result<(), RewriteError> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(RewriteError::StepBudget(self.budget))
        } else {
            Ok(())
        }
    }

    fn ite(&mut self, b: Term, x: Term, y: Term) -> Result<Term, RewriteError> {
        self.root(Symbol::Ite, vec![b, x, y])
    }

    /// Normalizes `sym(args)` where every argument is already normal.
    fn root(&mut self, sym: Symbol, args: Vec<Term>) -> Result<Term, RewriteError> {
        if sym == Symbol::Ite {
            return self.root_ite(args);
        }
        match &sym {
            Symbol::Fst | Symbol::Snd if args[0].is_app_of(&Symbol::Pair) => {
                self.tick()?;
                let i = if sym == Symbol::Fst { 0 } else { 1 };
                return Ok(args[0].args()[i].clone());
            }
            Symbol::Dec => {
                if let Some(x) = dec_enc_redex(&args[0], &args[1]) {
                    self.tick()?;
                    return Ok(x.clone());
                }
            }
            Symbol::Eq if args[0] == args[1] => {
                self.tick()?;
                return Ok(Term::tt());
            }
            _ => {}
        }
        if let Some(j) = args.iter().position(|a| a.is_ite()) {
            self.tick()?;
            let (b, x, y) = {
                let (b, x, y) = args[j].as_ite().unwrap();
                (b.clone(), x.clone(), y.clone())
            };
            let mut ax = args.clone();
            let mut ay = args;
            ax[j] = x;
            ay[j] = y;
            let tx = self.root(sym.clone(), ax)?;
            let ty = self.root(sym, ay)?;
            return self.ite(b, tx, ty);
        }
        Ok(Term::mk(sym, args))
    }

    fn root_ite(&mut self, args: Vec<Term>) -> Result<Term, RewriteError> {
        let [b, x, y]: [Term; 3] = args.try_into().expect("ite is ternary");
        if let Some((b1, a, c)) = b.as_ite() {
            self.tick()?;
            let (b1, a, c) = (b1.clone(), a.clone(), c.clone());
            let l = self.ite(a, x.clone(), y.clone())?;
            let r = self.ite(c, x, y)?;
            return self.ite(b1, l, r);
        }
        if b.is_app_of(&Symbol::True) {
            self.tick()?;
            return Ok(x);
        }
        if b.is_app_of(&Symbol::False) {
            self.tick()?;
            return Ok(y);
        }
        if x == y {
            self.tick()?;
            return Ok(x);
        }
        if let Some((b2, x1, _)) = x.as_ite() {
            if *b2 == b {
                self.tick()?;
                let x1 = x1.clone();
                return self.ite(b, x1, y);
            }
        }
        if let Some((b2, _, z)) = y.as_ite() {
            if *b2 == b {
                self.tick()?;
                let z = z.clone();
                return self.ite(b, x, z);
            }
        }
        if let Some((a, x1, y1)) = x.as_ite() {
            if cond_greater(&b, a, self.order) {
                self.tick()?;
                let (a, x1, y1) = (a.clone(), x1.clone(), y1.clone());
                let l = self.ite(b.clone(), x1, y.clone())?;
                let r = self.ite(b, y1, y)?;
                return self.ite(a, l, r);
            }
        }
        if let Some((a, y1, z1)) = y.as_ite() {
            if cond_greater(&b, a, self.order) {
                self.tick()?;
                let (a, y1, z1) = (a.clone(), y1.clone(), z1.clone());
                let l = self.ite(b.clone(), x.clone(), y1)?;
                let r = self.ite(b, x, z1)?;
                return self.ite(a, l, r);
            }
        }
        Ok(Term::ite(b, x, y))
    }
}

pub fn normalize(t: &Term, order: &CanonicalOrder) -> Result<Term, RewriteError> {
    Normalizer::new(order).normalize(t)
}

/// `s =_R t`, decided by comparing normal forms.
pub fn equal_mod_r(s: &Term, t: &Term, order: &CanonicalOrder) -> Result<bool, RewriteError> {
    let mut n = Normalizer::new(order);
    Ok(n.normalize(s)? == n.normalize(t)?)
}

/// Redex selection for single-step reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostInnermost,
    RightmostOutermost,
}

/// Picks one redex according to `strategy`, returning its position and contractum.
pub fn select_redex(t: &Term, strategy: Strategy, order: &CanonicalOrder) -> Option<(Position, RuleId, Term)> {
    fn innermost(t: &Term, order: &CanonicalOrder, path: &mut Vec<usize>) -> Option<(Position, RuleId, Term)> {
        for (i, a) in t.args().iter().enumerate() {
            path.push(i);
            let r = innermost(a, order, path);
            path.pop();
            if r.is_some() {
                return r;
            }
        }
        root_redexes(t, order).into_iter().next().map(|(id, r)| (Position(path.clone()), id, r))
    }
    fn outermost(t: &Term, order: &CanonicalOrder, path: &mut Vec<usize>) -> Option<(Position, RuleId, Term)> {
        if let Some((id, r)) = root_redexes(t, order).into_iter().next() {
            return Some((Position(path.clone()), id, r));
        }
        for (i, a) in t.args().iter().enumerate().rev() {
            path.push(i);
            let r = outermost(a, order, path);
            path.pop();
            if r.is_some() {
                return r;
            }
        }
        None
    }
    let mut path = Vec::new();
    match strategy {
        Strategy::LeftmostInnermost => innermost(t, order, &mut path),
        Strategy::RightmostOutermost => outermost(t, order, &mut path),
    }
}

/// Reduces `t` one step at a time under `strategy`. Returns the normal form
/// and the number of steps taken.
pub fn reduce_with(
    t: &Term,
    strategy: Strategy,
    order: &CanonicalOrder,
    budget: u64,
) -> Result<(Term, u64), RewriteError> {
    let mut cur = t.clone();
    let mut steps = 0;
    while let Some((p, _, r)) = select_redex(&cur, strategy, order) {
        steps += 1;
        if steps > budget {
            return Err(RewriteError::StepBudget(budget));
        }
        cur = cur.replace_at(&p, r).expect("rewriting preserves sorts");
    }
    Ok((cur, steps))
}

/// The if-context tree of a normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IfContext {
    Leaf(Term),
    Cond { cond: Term, then: Box<IfContext>, els: Box<IfContext> },
}

impl IfContext {
    pub fn recompose(&self) -> Term {
        match self {
            IfContext::Leaf(t) => t.clone(),
            IfContext::Cond { cond, then, els } => Term::ite(cond.clone(), then.recompose(), els.recompose()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub context: IfContext,
    pub conds: BTreeSet<Term>,
    pub leaves: BTreeSet<Term>,
}

/// Splits a normal form into its if-context, conditionals and leaves.
///
/// The check is order independent: the term must have the normal-form
/// shape (an ite tree over if-free conditionals and if-free leaves) and no
/// redex for any rule other than the two swap rules.
pub fn decompose(t: &Term) -> Result<Decomposition, RewriteError> {
    fn go(t: &Term, conds: &mut BTreeSet<Term>, leaves: &mut BTreeSet<Term>) -> Result<IfContext, RewriteError> {
        match t.as_ite() {
            Some((b, x, y)) => {
                if !b.is_if_free() {
                    return Err(RewriteError::NotNormal(t.to_string()));
                }
                conds.insert(b.clone());
                Ok(IfContext::Cond {
                    cond: b.clone(),
                    then: Box::new(go(x, conds, leaves)?),
                    els: Box::new(go(y, conds, leaves)?),
                })
            }
            None => {
                if !t.is_if_free() {
                    return Err(RewriteError::NotNormal(t.to_string()));
                }
                leaves.insert(t.clone());
                Ok(IfContext::Leaf(t.clone()))
            }
        }
    }
    if has_non_swap_redex(t) {
        return Err(RewriteError::NotNormal(t.to_string()));
    }
    let mut conds = BTreeSet::new();
    let mut leaves = BTreeSet::new();
    let context = go(t, &mut conds, &mut leaves)?;
    Ok(Decomposition { context, conds, leaves })
}

fn has_non_swap_redex(t: &Term) -> bool {
    // The order only matters for swap rules, so any order will do here.
    let order = CanonicalOrder::default();
    root_redexes(t, &order).iter().any(|(id, _)| !id.is_swap()) || t.args().iter().any(has_non_swap_redex)
}

/// Conditionals of the normal form of `t`.
pub fn conds(t: &Term, order: &CanonicalOrder) -> Result<BTreeSet<Term>, RewriteError> {
    Ok(decompose(&normalize(t, order)?)?.conds)
}

/// Leaves of the normal form of `t`.
pub fn leaves(t: &Term, order: &CanonicalOrder) -> Result<BTreeSet<Term>, RewriteError> {
    Ok(decompose(&normalize(t, order)?)?.leaves)
}

/// Syntactic over-approximations of leaves and conditionals.
pub struct Approx<'a> {
    norm: Normalizer<'a>,
    leaves: HashMap<Term, BTreeSet<Term>>,
    conds: HashMap<Term, BTreeSet<Term>>,
}

impl<'a> Approx<'a> {
    pub fn new(order: &'a CanonicalOrder) -> Self {
        Approx { norm: Normalizer::new(order), leaves: HashMap::new(), conds: HashMap::new() }
    }

    pub fn leaves(&mut self, t: &Term) -> Result<BTreeSet<Term>, RewriteError> {
        if let Some(r) = self.leaves.get(t) {
            return Ok(r.clone());
        }
        let out = match t.kind() {
            Kind::Name(_) => BTreeSet::from([t.clone()]),
            Kind::App(Symbol::Ite, args) => {
                let mut s = self.leaves(&args[1])?;
                s.extend(self.leaves(&args[2])?);
                s
            }
            Kind::App(sym, args) => {
                let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
                for a in args {
                    let la = self.leaves(a)?;
                    let mut next = Vec::with_capacity(combos.len() * la.len());
                    for c in &combos {
                        for l in &la {
                            let mut c2 = c.clone();
                            c2.push(l.clone());
                            next.push(c2);
                        }
                    }
                    combos = next;
                }
                let mut s = BTreeSet::new();
                for c in combos {
                    s.insert(self.norm.normalize(&Term::mk(sym.clone(), c))?);
                }
                s
            }
        };
        self.leaves.insert(t.clone(), out.clone());
        Ok(out)
    }

    pub fn conds(&mut self, t: &Term) -> Result<BTreeSet<Term>, RewriteError> {
        if let Some(r) = self.conds.get(t) {
            return Ok(r.clone());
        }
        let mut out = BTreeSet::new();
        match t.kind() {
            Kind::Name(_) => {}
            Kind::App(Symbol::Ite, args) => {
                out.extend(self.conds(&args[0])?);
                out.extend(self.leaves(&args[0])?);
                out.extend(self.conds(&args[1])?);
                out.extend(self.conds(&args[2])?);
            }
            Kind::App(_, args) => {
                for a in args {
                    out.extend(self.conds(a)?);
                }
            }
        }
        self.conds.insert(t.clone(), out.clone());
        Ok(out)
    }
}

pub fn approx_leaves(t: &Term, order: &CanonicalOrder) -> Result<BTreeSet<Term>, RewriteError> {
    Approx::new(order).leaves(t)
}

pub fn approx_conds(t: &Term, order: &CanonicalOrder) -> Result<BTreeSet<Term>, RewriteError> {
    Approx::new(order).conds(t)
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::term::{parse_term, Signature, Sort};

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare("g", 0, Sort::Bool).unwrap();
        s.declare("h", 1, Sort::Bool).unwrap();
        s
    }

    fn p(src: &str) -> Term {
        parse_term(src, &sig()).unwrap()
    }

    fn nf(src: &str) -> Term {
        normalize(&p(src), &CanonicalOrder::default()).unwrap()
    }

    #[test]
    fn r1_rules() {
        assert_eq!(nf("(fst (pair n.a n.b))"), p("n.a"));
        assert_eq!(nf("(snd (pair n.a n.b))"), p("n.b"));
        assert_eq!(nf("(dec (enc n.m (pk n.k) n.r) (sk n.k))"), p("n.m"));
        assert_eq!(nf("(dec (enc n.m (pk n.k) n.r) (sk n.j))"), p("(dec (enc n.m (pk n.k) n.r) (sk n.j))"));
        assert_eq!(nf("(eq (pair n.a n.b) (pair n.a n.b))"), p("true"));
    }

    #[test]
    fn r3_rules() {
        assert_eq!(nf("(ite true n.x n.y)"), p("n.x"));
        assert_eq!(nf("(ite false n.x n.y)"), p("n.y"));
        assert_eq!(nf("(ite (adv g) n.x n.x)"), p("n.x"));
        assert_eq!(nf("(ite (adv g) (ite (adv g) n.x n.y) n.z)"), p("(ite (adv g) n.x n.z)"));
        assert_eq!(nf("(ite (adv g) n.x (ite (adv g) n.y n.z))"), p("(ite (adv g) n.x n.z)"));
    }

    #[test]
    fn lifting() {
        assert_eq!(
            nf("(pair (ite (adv g) n.a n.b) n.c)"),
            p("(ite (adv g) (pair n.a n.c) (pair n.b n.c))")
        );
        assert_eq!(
            nf("(adv h (ite (adv g) n.a n.b))"),
            p("(ite (adv g) (adv h n.a) (adv h n.b))")
        );
        // lift-cond: ite(ite(b,a,c),x,y) -> ite(b, ite(a,x,y), ite(c,x,y)).
        let t = nf("(ite (ite (adv g) (adv h n.a) (adv h n.b)) n.x n.y)");
        assert_eq!(t, p("(ite (adv g) (ite (adv h n.a) n.x n.y) (ite (adv h n.b) n.x n.y))"));
    }

    #[test]
    fn swap_follows_order() {
        let a = "(eq n.a n.a2)";
        let b = "(eq n.b n.b2)";
        let t = p(&format!("(ite {b} (ite {a} n.x n.y) n.z)"));
        let canon = normalize(&t, &CanonicalOrder::default()).unwrap();
        assert_eq!(canon, p(&format!("(ite {a} (ite {b} n.x n.z) (ite {b} n.y n.z))")));
        // Reversed order leaves it untouched.
        assert_eq!(normalize(&t, &CanonicalOrder::reversed()).unwrap(), t);
    }

    #[test]
    fn rewrite_step_contains() {
        let o = CanonicalOrder::default();
        let steps = rewrite_step(&p("(eq n.x n.x)"), &o);
        assert!(steps.contains(&(Position::root(), RuleId::EqRefl, Term::tt())));
        let steps = rewrite_step(&p("(pair (fst (pair n.a n.b)) n.c)"), &o);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0, Position(vec![0]));
    }

    #[test]
    fn equal_mod_r_examples() {
        let o = CanonicalOrder::default();
        assert!(equal_mod_r(&p("(ite (adv g) n.n n.n)"), &p("n.n"), &o).unwrap());
        assert!(equal_mod_r(&p("(fst (pair n.a n.b))"), &p("n.a"), &o).unwrap());
        assert!(!equal_mod_r(&p("n.a"), &p("n.b"), &o).unwrap());
    }

    #[test]
    fn strategies_agree() {
        let o = CanonicalOrder::default();
        let t = p("(pair (ite (adv g) (fst (pair n.a n.b)) n.c) (ite (eq n.a n.a) n.d n.e))");
        let (a, _) = reduce_with(&t, Strategy::LeftmostInnermost, &o, 1000).unwrap();
        let (b, _) = reduce_with(&t, Strategy::RightmostOutermost, &o, 1000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, normalize(&t, &o).unwrap());
    }

    #[test]
    fn decomposition() {
        let t = nf("(ite (adv g) n.a (ite (eq n.a n.b) n.c n.a))");
        let d = decompose(&t).unwrap();
        assert_eq!(d.conds, BTreeSet::from([p("(adv g)"), p("(eq n.a n.b)")]));
        assert_eq!(d.leaves, BTreeSet::from([p("n.a"), p("n.c")]));
        assert_eq!(d.context.recompose(), t);
        assert!(decompose(&p("(fst (pair n.a n.b))")).is_err());
        assert!(decompose(&p("(pair (ite (adv g) n.a n.b) n.c)")).is_err());
    }

    #[test]
    fn approximations_cover() {
        let o = CanonicalOrder::default();
        let t = p("(pair (ite (adv g) n.a n.b) (ite (adv h (ite (adv g) n.c n.d)) n.e n.f))");
        let nt = normalize(&t, &o).unwrap();
        let d = decompose(&nt).unwrap();
        let al = approx_leaves(&t, &o).unwrap();
        let ac = approx_conds(&t, &o).unwrap();
        assert!(d.leaves.is_subset(&al));
        assert!(d.conds.is_subset(&ac));
    }

    #[test]
    fn budget() {
        let o = CanonicalOrder::default();
        let t = p("(pair (ite (adv g) n.a n.b) (ite (adv g) n.c n.d))");
        assert!(matches!(Normalizer::with_budget(&o, 1).normalize(&t), Err(RewriteError::StepBudget(1))));
    }
}
