//! Goal-directed backward search for membership of a pair in the closure of a
//! candidate relation under a set of up-to techniques. A goal is a member if
//! it matches a pair of the relation modulo fresh renaming, or is concluded by
//! one allowed technique rule whose premises are recursively members, up to
//! the depth bound. Failure is not disproof.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::engine::relation::{match_modulo_fresh, FreshName, Renaming, SchemPair};
use crate::engine::technique::Technique;
use crate::machine::{context_splits, reduction_chain, Ctx};
use crate::shift_reset::is_pure_term;
use crate::syntax::{
    alpha_eq, app, ctx_app, reset, var, CalculusId, CtxVarName, FreshGen, Term, VarName,
};

/// Evidence for closure membership; replaying the rule instances reconstructs
/// the goal pair.
#[derive(Debug, Clone)]
pub enum Proof {
    Refl,
    Base {
        pair: usize,
        renaming: Renaming,
    },
    Tech {
        tech: Technique,
        note: String,
        premises: Vec<Proof>,
    },
}

impl Proof {
    /// All technique nodes in the derivation, for the passive-discipline audit.
    pub fn techniques_used(&self, acc: &mut BTreeSet<Technique>) {
        match self {
            Proof::Refl => {
                acc.insert(Technique::Refl);
            }
            Proof::Base { .. } => {}
            Proof::Tech { tech, premises, .. } => {
                acc.insert(*tech);
                for p in premises {
                    p.techniques_used(acc);
                }
            }
        }
    }
}

fn allowed_bits(allowed: &BTreeSet<Technique>) -> u64 {
    let mut bits = 0u64;
    for t in allowed {
        bits |= 1 << (*t as u64);
    }
    bits
}

// Canonical key for memoization: generated names renamed in first-occurrence
// order so alpha-variants of the same goal share entries.
fn canon_key(lhs: &Term, rhs: &Term) -> String {
    let mut vars: BTreeMap<String, usize> = BTreeMap::new();
    let mut ctxs: BTreeMap<String, usize> = BTreeMap::new();
    let mut out = String::new();
    canon(lhs, &mut vars, &mut ctxs, &mut out);
    out.push('|');
    canon(rhs, &mut vars, &mut ctxs, &mut out);
    out
}

fn canon(
    t: &Term,
    vars: &mut BTreeMap<String, usize>,
    ctxs: &mut BTreeMap<String, usize>,
    out: &mut String,
) {
    match t {
        Term::Bound(i) => out.push_str(&format!("b{i};")),
        Term::Var(v) => {
            if v.is_generated() {
                let n = vars.len();
                let id = *vars.entry(v.as_str().to_string()).or_insert(n);
                out.push_str(&format!("g{id};"));
            } else {
                out.push_str(&format!("v{};", v.as_str()));
            }
        }
        Term::Lam(_, b) => {
            out.push_str("L(");
            canon(b, vars, ctxs, out);
            out.push(')');
        }
        Term::App(f, a) => {
            out.push_str("A(");
            canon(f, vars, ctxs, out);
            canon(a, vars, ctxs, out);
            out.push(')');
        }
        Term::Shift => out.push('S'),
        Term::CallCC => out.push('K'),
        Term::Reset(b) => {
            out.push_str("R(");
            canon(b, vars, ctxs, out);
            out.push(')');
        }
        Term::Abort(b) => {
            out.push_str("X(");
            canon(b, vars, ctxs, out);
            out.push(')');
        }
        Term::CtxApp(k, b) => {
            if k.is_generated() {
                let n = ctxs.len();
                let id = *ctxs.entry(k.as_str().to_string()).or_insert(n);
                out.push_str(&format!("C{id}("));
            } else {
                out.push_str(&format!("c{}(", k.as_str()));
            }
            canon(b, vars, ctxs, out);
            out.push(')');
        }
    }
}

pub struct Searcher<'a> {
    pub calc: CalculusId,
    pub pairs: &'a [SchemPair],
    pub fuel: usize,
    // canon key + allowed bits + red flag -> depth at which the search failed
    memo_fail: HashMap<(String, u64, bool), usize>,
}

const RED_GRID_LIMIT: usize = 1024;

impl<'a> Searcher<'a> {
    pub fn new(calc: CalculusId, pairs: &'a [SchemPair], fuel: usize) -> Searcher<'a> {
        Searcher {
            calc,
            pairs,
            fuel,
            memo_fail: HashMap::new(),
        }
    }

    /// Top-level entry: search with reduction enabled.
    pub fn member(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        gen: &mut FreshGen,
    ) -> Option<Proof> {
        self.search(lhs, rhs, allowed, depth, true, gen)
    }

    fn search(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        red_ok: bool,
        gen: &mut FreshGen,
    ) -> Option<Proof> {
        if allowed.contains(&Technique::Refl) && alpha_eq(lhs, rhs) {
            return Some(Proof::Refl);
        }
        for sp in self.pairs {
            if let Some(renaming) = match_modulo_fresh(lhs, rhs, &sp.pair) {
                return Some(Proof::Base {
                    pair: sp.id,
                    renaming,
                });
            }
        }
        if depth == 0 {
            return None;
        }
        let key = (canon_key(lhs, rhs), allowed_bits(allowed), red_ok);
        if let Some(failed_at) = self.memo_fail.get(&key) {
            if *failed_at >= depth {
                return None;
            }
        }
        let proof = self.try_techniques(lhs, rhs, allowed, depth, red_ok, gen);
        if proof.is_none() {
            let entry = self.memo_fail.entry(key).or_insert(0);
            if *entry < depth {
                *entry = depth;
            }
        }
        proof
    }

    fn try_techniques(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        red_ok: bool,
        gen: &mut FreshGen,
    ) -> Option<Proof> {
        use Technique::*;
        let order = [
            Red, Result, AbortCtx, Lam, Subst, SubstV, SubstC, Pctx, PctxRst, EctxPure, Ectx,
        ];
        for tech in order {
            if !allowed.contains(&tech) {
                continue;
            }
            if tech == Red && !red_ok {
                continue;
            }
            let found = match tech {
                Result => self.try_result(lhs, rhs),
                AbortCtx => self.try_abort(lhs, rhs, allowed, depth, gen),
                Lam => self.try_lam(lhs, rhs, allowed, depth, gen),
                Subst | SubstV => self.try_subst(lhs, rhs, allowed, depth, gen, tech),
                SubstC => self.try_subst_c(lhs, rhs, allowed, depth, gen),
                Pctx => self.try_ctx_factor(lhs, rhs, allowed, depth, gen, Pctx),
                EctxPure => self.try_ctx_factor(lhs, rhs, allowed, depth, gen, EctxPure),
                Ectx => self.try_ctx_factor(lhs, rhs, allowed, depth, gen, Ectx),
                PctxRst => self.try_pctx_rst(lhs, rhs, allowed, depth, gen),
                Red => self.try_red(lhs, rhs, allowed, depth, gen),
                Refl => None,
            };
            if found.is_some() {
                return found;
            }
        }
        None
    }

    // Any two values as bare programs are related (the surrounding context
    // was aborted).
    fn try_result(&self, lhs: &Rc<Term>, rhs: &Rc<Term>) -> Option<Proof> {
        if self.calc == CalculusId::CallccAbort
            && lhs.is_value(self.calc)
            && rhs.is_value(self.calc)
        {
            Some(Proof::Tech {
                tech: Technique::Result,
                note: String::new(),
                premises: vec![],
            })
        } else {
            None
        }
    }

    // k[A p] ~ k[A q] if p ~ q
    fn try_abort(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        gen: &mut FreshGen,
    ) -> Option<Proof> {
        let (Term::CtxApp(k1, b1), Term::CtxApp(k2, b2)) = (&**lhs, &**rhs) else {
            return None;
        };
        if k1 != k2 {
            return None;
        }
        let (Term::Abort(p), Term::Abort(q)) = (&**b1, &**b2) else {
            return None;
        };
        let premise = self.search(p, q, allowed, depth - 1, true, gen)?;
        Some(Proof::Tech {
            tech: Technique::AbortCtx,
            note: String::new(),
            premises: vec![premise],
        })
    }

    // lambda/shift-reset: \x.t ~ \x.s if t ~ s (bodies opened with a common
    // fresh variable). callcc: k[\x.t] ~ k[\x.s] if the opened bodies are
    // related in a fresh abstract context.
    fn try_lam(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        gen: &mut FreshGen,
    ) -> Option<Proof> {
        if self.calc == CalculusId::CallccAbort {
            let (Term::CtxApp(k1, v1), Term::CtxApp(k2, v2)) = (&**lhs, &**rhs) else {
                return None;
            };
            if k1 != k2 {
                return None;
            }
            let (Term::Lam(_, b1), Term::Lam(_, b2)) = (&**v1, &**v2) else {
                return None;
            };
            let x = var(gen.next_var());
            let w = gen.next_ctx_var();
            let p1 = ctx_app(w.clone(), crate::syntax::open(b1, &x));
            let p2 = ctx_app(w, crate::syntax::open(b2, &x));
            let premise = self.search(&p1, &p2, allowed, depth - 1, true, gen)?;
            return Some(Proof::Tech {
                tech: Technique::Lam,
                note: String::new(),
                premises: vec![premise],
            });
        }
        let (Term::Lam(_, b1), Term::Lam(_, b2)) = (&**lhs, &**rhs) else {
            return None;
        };
        let x = var(gen.next_var());
        let t1 = crate::syntax::open(b1, &x);
        let t2 = crate::syntax::open(b2, &x);
        let premise = self.search(&t1, &t2, allowed, depth - 1, true, gen)?;
        Some(Proof::Tech {
            tech: Technique::Lam,
            note: String::new(),
            premises: vec![premise],
        })
    }

    // goal = (t{v/x}, s{w/x}) for a base pair (t, s) and a declared fresh x,
    // with v, w solved by matching; premise is the value test for (v, w).
    fn try_subst(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        gen: &mut FreshGen,
        tech: Technique,
    ) -> Option<Proof> {
        for sp in self.pairs {
            let subjects: Vec<&VarName> = sp
                .pair
                .fresh
                .iter()
                .filter_map(|f| match f {
                    FreshName::Var(v) => Some(v),
                    _ => None,
                })
                .collect();
            for subject in subjects {
                let Some((v, w)) = solve_subst(&sp.pair, subject, lhs, rhs) else {
                    continue;
                };
                if !v.is_value(self.calc) || !w.is_value(self.calc) {
                    continue;
                }
                // substituting a name for a name is base matching's job
                if alpha_eq(&v, &w) && matches!(&*v, Term::Var(_)) {
                    continue;
                }
                let z = var(gen.next_var());
                let (p1, p2) = if self.calc == CalculusId::CallccAbort {
                    let kw = gen.next_ctx_var();
                    (
                        ctx_app(kw.clone(), app(v.clone(), z.clone())),
                        ctx_app(kw, app(w.clone(), z)),
                    )
                } else {
                    (app(v.clone(), z.clone()), app(w.clone(), z))
                };
                if let Some(premise) = self.search(&p1, &p2, allowed, depth - 1, true, gen) {
                    return Some(Proof::Tech {
                        tech,
                        note: format!("pair {} / {}", sp.id, subject),
                        premises: vec![premise],
                    });
                }
            }
        }
        None
    }

    // Context substitution: either factor the goal directly as F1[X] vs F2[Y],
    // or match a base pair with a fresh context parameter solved to a context
    // per side.
    fn try_subst_c(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        gen: &mut FreshGen,
    ) -> Option<Proof> {
        // goal-directed factorization; identical plugged subterms first, so
        // the natural factoring is found before degenerate ones
        let splits_l = context_splits(lhs, self.calc, false);
        let splits_r = context_splits(rhs, self.calc, false);
        let mut combos: Vec<(&(Ctx, Rc<Term>), &(Ctx, Rc<Term>))> = Vec::new();
        for sl in &splits_l {
            for sr in &splits_r {
                if sl.0.frames.is_empty() && sr.0.frames.is_empty() {
                    continue;
                }
                combos.push((sl, sr));
            }
        }
        combos.sort_by_key(|(sl, sr)| {
            (
                !alpha_eq(&sl.1, &sr.1),
                sl.0.frames.len() + sr.0.frames.len(),
            )
        });
        for ((f1, x), (f2, y)) in combos {
            let kw = gen.next_ctx_var();
            let p1 = ctx_app(kw.clone(), x.clone());
            let p2 = ctx_app(kw, y.clone());
            let Some(inner) = self.search(&p1, &p2, allowed, depth - 1, true, gen) else {
                continue;
            };
            let z = var(gen.next_var());
            let c1 = f1.plug(z.clone());
            let c2 = f2.plug(z);
            if let Some(ctx_premise) = self.search(&c1, &c2, allowed, depth - 1, true, gen) {
                return Some(Proof::Tech {
                    tech: Technique::SubstC,
                    note: "factored".to_string(),
                    premises: vec![inner, ctx_premise],
                });
            }
        }
        // base-pair guided: solve a fresh context parameter to a context
        for sp in self.pairs {
            let subjects: Vec<&CtxVarName> = sp
                .pair
                .fresh
                .iter()
                .filter_map(|f| match f {
                    FreshName::Ctx(k) => Some(k),
                    _ => None,
                })
                .collect();
            for subject in subjects {
                let Some((f1, f2)) = solve_subst_c(self.calc, &sp.pair, subject, lhs, rhs) else {
                    continue;
                };
                let z = var(gen.next_var());
                let c1 = f1.plug(z.clone());
                let c2 = f2.plug(z);
                if let Some(ctx_premise) = self.search(&c1, &c2, allowed, depth - 1, true, gen) {
                    return Some(Proof::Tech {
                        tech: Technique::SubstC,
                        note: format!("pair {} / {}", sp.id, subject),
                        premises: vec![ctx_premise],
                    });
                }
            }
        }
        None
    }

    // Ectx (lambda), Pctx (shift/reset, pure contexts), EctxPure (shift/reset,
    // pure plugged terms): factor contexts around related subterms.
    fn try_ctx_factor(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        gen: &mut FreshGen,
        tech: Technique,
    ) -> Option<Proof> {
        let pure_ctx = tech == Technique::Pctx;
        let splits_l = context_splits(lhs, self.calc, pure_ctx);
        let splits_r = context_splits(rhs, self.calc, pure_ctx);
        for (e1, x) in &splits_l {
            for (e2, y) in &splits_r {
                if e1.frames.is_empty() && e2.frames.is_empty() {
                    continue;
                }
                if tech == Technique::EctxPure
                    && !(is_pure_term(x, self.calc) && is_pure_term(y, self.calc))
                {
                    continue;
                }
                let Some(inner) = self.search(x, y, allowed, depth - 1, true, gen) else {
                    continue;
                };
                let z = var(gen.next_var());
                let c1 = e1.plug(z.clone());
                let c2 = e2.plug(z);
                if let Some(ctx_premise) = self.search(&c1, &c2, allowed, depth - 1, true, gen) {
                    return Some(Proof::Tech {
                        tech,
                        note: String::new(),
                        premises: vec![inner, ctx_premise],
                    });
                }
            }
        }
        None
    }

    // <E[t]> ~ <E'[s]> if t ~ s and <E[z]> ~ <E'[z]> with E, E' pure.
    fn try_pctx_rst(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        gen: &mut FreshGen,
    ) -> Option<Proof> {
        let (Term::Reset(a), Term::Reset(b)) = (&**lhs, &**rhs) else {
            return None;
        };
        let splits_l = context_splits(a, self.calc, true);
        let splits_r = context_splits(b, self.calc, true);
        for (e1, x) in &splits_l {
            for (e2, y) in &splits_r {
                let Some(inner) = self.search(x, y, allowed, depth - 1, true, gen) else {
                    continue;
                };
                let z = var(gen.next_var());
                let c1 = reset(e1.plug(z.clone()));
                let c2 = reset(e2.plug(z));
                if let Some(ctx_premise) = self.search(&c1, &c2, allowed, depth - 1, true, gen) {
                    return Some(Proof::Tech {
                        tech: Technique::PctxRst,
                        note: String::new(),
                        premises: vec![inner, ctx_premise],
                    });
                }
            }
        }
        None
    }

    // Evaluate both sides by any prefix and relate the reducts.
    fn try_red(
        &mut self,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        allowed: &BTreeSet<Technique>,
        depth: usize,
        gen: &mut FreshGen,
    ) -> Option<Proof> {
        let (chain_l, _) = reduction_chain(lhs, self.calc, self.fuel);
        let (chain_r, _) = reduction_chain(rhs, self.calc, self.fuel);
        let n = chain_l.len();
        let m = chain_r.len();
        if n == 1 && m == 1 {
            return None;
        }
        let mut combos: Vec<(usize, usize)> = Vec::new();
        if n * m <= RED_GRID_LIMIT {
            for i in 0..n {
                for j in 0..m {
                    if i + j > 0 {
                        combos.push((i, j));
                    }
                }
            }
        } else {
            for j in 0..m {
                combos.push((n - 1, j));
            }
            for i in 0..n.saturating_sub(1) {
                combos.push((i, m - 1));
            }
        }
        // most-reduced first
        combos.sort_by_key(|(i, j)| std::cmp::Reverse(i + j));
        for (i, j) in combos {
            if let Some(premise) =
                self.search(&chain_l[i], &chain_r[j], allowed, depth - 1, false, gen)
            {
                return Some(Proof::Tech {
                    tech: Technique::Red,
                    note: format!("{i},{j}"),
                    premises: vec![premise],
                });
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// matching helpers for Subst / SubstC

#[derive(Clone, Default)]
struct NameBinds {
    vars: Vec<(VarName, VarName)>,
    ctx_vars: Vec<(CtxVarName, CtxVarName)>,
}

impl NameBinds {
    fn bind_var(&mut self, p: &VarName, g: &VarName) -> bool {
        if let Some((_, b)) = self.vars.iter().find(|(q, _)| q == p) {
            return b == g;
        }
        self.vars.push((p.clone(), g.clone()));
        true
    }

    fn bind_ctx(&mut self, p: &CtxVarName, g: &CtxVarName) -> bool {
        if let Some((_, b)) = self.ctx_vars.iter().find(|(q, _)| q == p) {
            return b == g;
        }
        self.ctx_vars.push((p.clone(), g.clone()));
        true
    }

    fn injective(&self) -> bool {
        let vt: BTreeSet<&VarName> = self.vars.iter().map(|(_, t)| t).collect();
        let kt: BTreeSet<&CtxVarName> = self.ctx_vars.iter().map(|(_, t)| t).collect();
        vt.len() == self.vars.len() && kt.len() == self.ctx_vars.len()
    }
}

struct SubstMatcher<'a> {
    var_params: BTreeSet<&'a VarName>,
    ctx_params: BTreeSet<&'a CtxVarName>,
    subject: &'a VarName,
    names: NameBinds,
    solved: Option<Rc<Term>>,
}

impl<'a> SubstMatcher<'a> {
    fn matches(&mut self, pat: &Term, goal: &Rc<Term>) -> bool {
        match (pat, &**goal) {
            (Term::Var(p), _) if p == self.subject => match &self.solved {
                Some(prev) => alpha_eq(prev, goal),
                None => {
                    self.solved = Some(goal.clone());
                    true
                }
            },
            (Term::Var(p), Term::Var(g)) => {
                if self.var_params.contains(p) {
                    self.names.bind_var(p, g)
                } else {
                    p == g
                }
            }
            (Term::Bound(i), Term::Bound(j)) => i == j,
            (Term::Lam(_, a), Term::Lam(_, b)) => self.matches(a, b),
            (Term::App(f1, a1), Term::App(f2, a2)) => self.matches(f1, f2) && self.matches(a1, a2),
            (Term::Shift, Term::Shift) | (Term::CallCC, Term::CallCC) => true,
            (Term::Reset(a), Term::Reset(b)) | (Term::Abort(a), Term::Abort(b)) => {
                self.matches(a, b)
            }
            (Term::CtxApp(p, a), Term::CtxApp(g, b)) => {
                let head_ok = if self.ctx_params.contains(p) {
                    self.names.bind_ctx(p, g)
                } else {
                    p == g
                };
                head_ok && self.matches(a, b)
            }
            _ => false,
        }
    }
}

/// Solve goal = (pair.lhs{v/subject}, pair.rhs{w/subject}) for v and w, with
/// the pair's other fresh parameters renamed consistently across both sides.
fn solve_subst(
    pair: &crate::engine::relation::RelPair,
    subject: &VarName,
    goal_l: &Rc<Term>,
    goal_r: &Rc<Term>,
) -> Option<(Rc<Term>, Rc<Term>)> {
    let var_params: BTreeSet<&VarName> = pair
        .fresh
        .iter()
        .filter_map(|f| match f {
            FreshName::Var(v) if v != subject => Some(v),
            _ => None,
        })
        .collect();
    let ctx_params: BTreeSet<&CtxVarName> = pair
        .fresh
        .iter()
        .filter_map(|f| match f {
            FreshName::Ctx(k) => Some(k),
            _ => None,
        })
        .collect();
    let mut m = SubstMatcher {
        var_params: var_params.clone(),
        ctx_params: ctx_params.clone(),
        subject,
        names: NameBinds::default(),
        solved: None,
    };
    if !m.matches(&pair.lhs, goal_l) {
        return None;
    }
    let v = m.solved.take();
    let names = m.names.clone();
    let mut m2 = SubstMatcher {
        var_params,
        ctx_params,
        subject,
        names,
        solved: None,
    };
    if !m2.matches(&pair.rhs, goal_r) {
        return None;
    }
    let w = m2.solved.take();
    if !m2.names.injective() {
        return None;
    }
    match (v, w) {
        (Some(v), Some(w)) => Some((v, w)),
        (Some(v), None) => Some((v.clone(), v)),
        (None, Some(w)) => Some((w.clone(), w)),
        (None, None) => None,
    }
}

// Context-parameter matching with backtracking: a pattern occurrence k[u]
// matches any factorization F[g'] of the goal subterm with u matching g' and
// F consistent across occurrences of k on that side.
struct CtxMatcher<'a> {
    calc: CalculusId,
    var_params: BTreeSet<&'a VarName>,
    subject: &'a CtxVarName,
}

#[derive(Clone, Default)]
struct CtxState {
    names: NameBinds,
    solved: Option<Ctx>,
}

impl<'a> CtxMatcher<'a> {
    fn matches(&self, pat: &Term, goal: &Rc<Term>, st: &CtxState) -> Option<CtxState> {
        match (pat, &**goal) {
            (Term::CtxApp(p, u), _) if p == self.subject => {
                for (f, g2) in context_splits(goal, self.calc, false) {
                    match &st.solved {
                        Some(prev) if *prev != f => continue,
                        _ => {}
                    }
                    let mut st2 = st.clone();
                    st2.solved = Some(f);
                    if let Some(st3) = self.matches(u, &g2, &st2) {
                        return Some(st3);
                    }
                }
                None
            }
            (Term::Var(p), Term::Var(g)) => {
                let mut st2 = st.clone();
                let ok = if self.var_params.contains(p) {
                    st2.names.bind_var(p, g)
                } else {
                    p == g
                };
                ok.then_some(st2)
            }
            (Term::Bound(i), Term::Bound(j)) => (i == j).then(|| st.clone()),
            (Term::Lam(_, a), Term::Lam(_, b)) => self.matches(a, b, st),
            (Term::App(f1, a1), Term::App(f2, a2)) => {
                let st2 = self.matches(f1, f2, st)?;
                self.matches(a1, a2, &st2)
            }
            (Term::Shift, Term::Shift) | (Term::CallCC, Term::CallCC) => Some(st.clone()),
            (Term::Reset(a), Term::Reset(b)) | (Term::Abort(a), Term::Abort(b)) => {
                self.matches(a, b, st)
            }
            (Term::CtxApp(p, a), Term::CtxApp(g, b)) => {
                if p != g {
                    return None;
                }
                self.matches(a, b, st)
            }
            _ => None,
        }
    }
}

/// Solve goal = (pair.lhs{F1/subject}, pair.rhs{F2/subject}) for the contexts
/// F1 and F2.
fn solve_subst_c(
    calc: CalculusId,
    pair: &crate::engine::relation::RelPair,
    subject: &CtxVarName,
    goal_l: &Rc<Term>,
    goal_r: &Rc<Term>,
) -> Option<(Ctx, Ctx)> {
    let var_params: BTreeSet<&VarName> = pair
        .fresh
        .iter()
        .filter_map(|f| match f {
            FreshName::Var(v) => Some(v),
            _ => None,
        })
        .collect();
    let m = CtxMatcher {
        calc,
        var_params,
        subject,
    };
    let st = m.matches(&pair.lhs, goal_l, &CtxState::default())?;
    let f1 = st.solved.clone()?;
    let st2 = CtxState {
        names: st.names,
        solved: None,
    };
    let st3 = m.matches(&pair.rhs, goal_r, &st2)?;
    let f2 = st3.solved?;
    if !st3.names.injective() {
        return None;
    }
    Some((f1, f2))
}
