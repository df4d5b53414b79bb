//! Randomized property checks shared by the unit and acceptance suites. The
//! decomposition oracle here re-derives evaluation-context splits from the
//! grammar independently of the machine module.

use std::rc::Rc;

use crate::callcc::ctx_subst;
use crate::engine::{verify_bisimulation_up_to, RelPair, Relation, TechniqueSet, Verdict};
use crate::gen::{ctx_var_pool, gen_program, gen_pure_term, gen_term, Rng};
use crate::machine::{decompose, eval, step, Ctx, Decomposition, EvalOutcome, Frame, NormalForm};
use crate::parse::parse_term;
use crate::print::print_term;
use crate::syntax::{alpha_eq, app, subst_value, var, CalculusId, Term, VarName};

// Oracle: every factorization t = E[u] with E built from the evaluation
// context grammar (program head stripped for callcc).
fn oracle_splits(t: &Rc<Term>, calc: CalculusId) -> Vec<Rc<Term>> {
    fn walk(t: &Rc<Term>, calc: CalculusId, out: &mut Vec<Rc<Term>>) {
        out.push(t.clone());
        match &**t {
            Term::App(f, a) => {
                walk(f, calc, out);
                if f.is_value(calc) {
                    walk(a, calc, out);
                }
            }
            Term::Reset(b) if calc == CalculusId::ShiftReset => walk(b, calc, out),
            _ => {}
        }
    }
    let mut root = t.clone();
    if calc == CalculusId::CallccAbort {
        if let Term::CtxApp(_, body) = &*root {
            root = body.clone();
        }
    }
    let mut out = Vec::new();
    walk(&root, calc, &mut out);
    out
}

// Oracle: is this subterm a redex of the calculus when it sits in evaluation
// position?
fn oracle_is_redex(u: &Rc<Term>, calc: CalculusId) -> bool {
    match &**u {
        Term::App(f, a) => {
            if !f.is_value(calc) || !a.is_value(calc) {
                return false;
            }
            match &**f {
                Term::Lam(_, _) => true,
                Term::CallCC => calc == CalculusId::CallccAbort,
                _ => false,
            }
        }
        Term::Reset(b) => {
            if calc != CalculusId::ShiftReset {
                return false;
            }
            if b.is_value(calc) {
                return true;
            }
            // <E[S v]> with E pure: scan the pure spine for an applied shift
            fn pure_scan(t: &Rc<Term>, calc: CalculusId) -> bool {
                match &**t {
                    Term::App(f, a) => {
                        if f.is_value(calc) && a.is_value(calc) {
                            matches!(&**f, Term::Shift)
                        } else if !f.is_value(calc) {
                            pure_scan(f, calc)
                        } else {
                            pure_scan(a, calc)
                        }
                    }
                    _ => false,
                }
            }
            pure_scan(b, calc)
        }
        Term::Abort(_) => calc == CalculusId::CallccAbort,
        _ => false,
    }
}

/// Unique decomposition and reduction determinism against the brute-force
/// split oracle.
pub fn prop_unique_decomposition(
    calc: CalculusId,
    cases: usize,
    max_size: usize,
    seed: u64,
) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for i in 0..cases {
        let size = 2 + rng.below(max_size.max(3) - 1);
        let t = if calc == CalculusId::CallccAbort {
            gen_program(&mut rng, size)
        } else {
            gen_term(&mut rng, calc, size)
        };
        let redexes: Vec<Rc<Term>> = oracle_splits(&t, calc)
            .into_iter()
            .filter(|u| oracle_is_redex(u, calc))
            .collect();
        if redexes.len() > 1 {
            return Err(format!(
                "case {i}: {} has {} redex splits",
                print_term(&t),
                redexes.len()
            ));
        }
        match decompose(&t, calc) {
            Decomposition::Redex { ctx, redex, .. } => {
                if redexes.len() != 1 {
                    return Err(format!(
                        "case {i}: decompose found a redex in {} but the oracle found {}",
                        print_term(&t),
                        redexes.len()
                    ));
                }
                if !alpha_eq(&redex, &redexes[0]) {
                    return Err(format!(
                        "case {i}: redex disagreement in {}: {} vs {}",
                        print_term(&t),
                        print_term(&redex),
                        print_term(&redexes[0])
                    ));
                }
                let replugged = ctx.plug(redex);
                if !alpha_eq(&replugged, &t) {
                    return Err(format!(
                        "case {i}: plugging the decomposition does not recover {}",
                        print_term(&t)
                    ));
                }
            }
            Decomposition::Normal(nf) => {
                if !redexes.is_empty() {
                    return Err(format!(
                        "case {i}: decompose classified {} normal but the oracle found a redex {}",
                        print_term(&t),
                        print_term(&redexes[0])
                    ));
                }
                if !alpha_eq(&nf.as_term(), &t) {
                    return Err(format!(
                        "case {i}: normal form of {} does not rebuild",
                        print_term(&t)
                    ));
                }
                if step(&t, calc).is_some() {
                    return Err(format!(
                        "case {i}: step fired on a normal form {}",
                        print_term(&t)
                    ));
                }
            }
        }
        if let Some((next, _)) = step(&t, calc) {
            if !next.free_vars().is_subset(&t.free_vars()) {
                return Err(format!(
                    "case {i}: reduction invented free variables in {}",
                    print_term(&next)
                ));
            }
        }
    }
    Ok(())
}

/// Capture-avoiding substitution laws and alpha-equivalence sanity.
pub fn prop_substitution_laws(cases: usize, max_size: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let calc = CalculusId::Lambda;
    let pool = crate::gen::free_var_pool();
    for i in 0..cases {
        let size = 2 + rng.below(max_size.max(3) - 1);
        let t = gen_term(&mut rng, calc, size);
        let x = pool[rng.below(pool.len())].clone();
        let v = {
            let vsize = 1 + rng.below(5);
            let candidate = gen_term(&mut rng, calc, vsize);
            if candidate.is_value(calc) {
                candidate
            } else {
                crate::syntax::lam("q", candidate)
            }
        };
        let r = subst_value(&t, &x, &v, calc).map_err(|e| format!("case {i}: {e}"))?;
        let mut allowed = t.free_vars();
        allowed.remove(&x);
        allowed.extend(v.free_vars());
        if !r.free_vars().is_subset(&allowed) {
            return Err(format!(
                "case {i}: free variables escape substitution in {}",
                print_term(&r)
            ));
        }
        let same = subst_value(&t, &x, &var(x.clone()), calc).unwrap();
        if !alpha_eq(&same, &t) {
            return Err(format!(
                "case {i}: substituting a variable for itself changed {}",
                print_term(&t)
            ));
        }
        // alpha-equivalence is an equivalence on printed copies
        let copy = parse_term(&print_term(&t), calc).map_err(|e| format!("case {i}: {e}"))?;
        if !alpha_eq(&t, &copy) || !alpha_eq(&copy, &t) {
            return Err(format!(
                "case {i}: alpha not symmetric on {}",
                print_term(&t)
            ));
        }
    }
    Ok(())
}

/// parse . print is the identity up to alpha.
pub fn prop_parse_print_round_trip(
    calc: CalculusId,
    cases: usize,
    max_size: usize,
    seed: u64,
) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for i in 0..cases {
        let size = 2 + rng.below(max_size.max(3) - 1);
        let t = if calc == CalculusId::CallccAbort {
            gen_program(&mut rng, size)
        } else {
            gen_term(&mut rng, calc, size)
        };
        let text = print_term(&t);
        let back = parse_term(&text, calc).map_err(|e| format!("case {i}: `{text}`: {e}"))?;
        if !alpha_eq(&back, &t) {
            return Err(format!(
                "case {i}: round trip changed `{text}` into `{}`",
                print_term(&back)
            ));
        }
    }
    Ok(())
}

/// Context substitution commutes with reduction (programs of the callcc
/// calculus).
pub fn prop_ctx_subst_commutes(cases: usize, max_size: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let pool = ctx_var_pool();
    let mut checked = 0;
    let mut attempts = 0;
    while checked < cases && attempts < cases * 20 {
        attempts += 1;
        let size = 2 + rng.below(max_size.max(3) - 1);
        let p = gen_program(&mut rng, size);
        let k = pool[rng.below(pool.len())].clone();
        if !p.free_ctx_vars().contains(&k) {
            continue;
        }
        let f = Ctx {
            head: if rng.chance(50) {
                Some(pool[rng.below(pool.len())].clone())
            } else {
                None
            },
            frames: if rng.chance(60) {
                vec![if rng.chance(50) {
                    Frame::AppL(gen_term(&mut rng, CalculusId::CallccAbort, 3))
                } else {
                    Frame::AppR(crate::syntax::lam(
                        "q",
                        gen_term(&mut rng, CalculusId::CallccAbort, 2),
                    ))
                }]
            } else {
                vec![]
            },
        };
        let Some((q, _)) = step(&p, CalculusId::CallccAbort) else {
            continue;
        };
        checked += 1;
        let substituted = ctx_subst(&p, &k, &f);
        let Some((q2, _)) = step(&substituted, CalculusId::CallccAbort) else {
            return Err(format!(
                "{} reduces but its context substitution {} does not",
                print_term(&p),
                print_term(&substituted)
            ));
        };
        let expected = ctx_subst(&q, &k, &f);
        if !alpha_eq(&q2, &expected) {
            return Err(format!(
                "context substitution does not commute on {}: {} vs {}",
                print_term(&p),
                print_term(&q2),
                print_term(&expected)
            ));
        }
    }
    if checked < cases / 4 {
        return Err(format!(
            "generator produced too few reducible programs ({checked}/{cases})"
        ));
    }
    Ok(())
}

/// Pure terms never evaluate to control-stuck terms, and every capture step
/// captures a reset-free context.
pub fn prop_purity(cases: usize, max_size: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let calc = CalculusId::ShiftReset;
    for i in 0..cases {
        let size = 2 + rng.below(max_size.max(3) - 1);
        let t = gen_pure_term(&mut rng, size);
        if let EvalOutcome::Evaluated { nf, .. } = eval(&t, calc, 200) {
            if matches!(nf, NormalForm::ControlStuck { .. }) {
                return Err(format!(
                    "case {i}: pure term {} evaluated to a control-stuck term",
                    print_term(&t)
                ));
            }
        }
        // inspect each capture redex along an arbitrary term's reduction
        let size2 = 2 + rng.below(max_size.max(3) - 1);
        let mut cur = gen_term(&mut rng, calc, size2);
        for _ in 0..50 {
            if let Decomposition::Redex { redex, rule, .. } = decompose(&cur, calc) {
                if rule == crate::machine::StepRule::Capture {
                    let Term::Reset(body) = &*redex else {
                        return Err(format!("case {i}: capture redex is not a reset"));
                    };
                    // the captured part is the spine from the reset to the shift
                    let mut spine = body.clone();
                    loop {
                        match &*spine.clone() {
                            Term::Reset(_) => {
                                return Err(format!(
                                    "case {i}: capture crossed a reset in {}",
                                    print_term(&redex)
                                ))
                            }
                            Term::App(f, a) => {
                                if !f.is_value(calc) {
                                    spine = f.clone();
                                } else if !a.is_value(calc) {
                                    spine = a.clone();
                                } else {
                                    break;
                                }
                            }
                            _ => break,
                        }
                    }
                }
            }
            match step(&cur, calc) {
                Some((next, _)) => cur = next,
                None => break,
            }
        }
    }
    Ok(())
}

fn verdict_kind(v: &Verdict) -> &'static str {
    match v {
        Verdict::Verified { .. } => "verified",
        Verdict::Failed { .. } => "failed",
        Verdict::NotBisimilar { .. } => "not-bisimilar",
        Verdict::Inconclusive { .. } => "inconclusive",
    }
}

/// Verdicts are invariant under permutation of the pairs and alpha-renaming
/// of each pair (fresh parameters renamed, binder hints scrambled through a
/// print/parse round trip).
pub fn prop_verdict_invariance(
    rel: &Relation,
    ts: &TechniqueSet,
    fuel: usize,
    depth: usize,
) -> Result<(), String> {
    let base = verify_bisimulation_up_to(rel, ts.clone(), fuel, depth, false, false);
    let base_kind = verdict_kind(&base.verdict);
    // permutation
    let mut permuted = rel.clone();
    permuted.pairs.reverse();
    let p = verify_bisimulation_up_to(&permuted, ts.clone(), fuel, depth, false, false);
    if verdict_kind(&p.verdict) != base_kind {
        return Err(format!(
            "verdict changed under permutation: {} vs {}",
            base_kind,
            verdict_kind(&p.verdict)
        ));
    }
    // alpha-renaming: round-trip the terms through the printer and rename the
    // fresh parameters injectively
    let mut renamed = rel.clone();
    for pair in &mut renamed.pairs {
        let mut lhs = parse_term(&print_term(&pair.lhs), rel.calculus).unwrap();
        let mut rhs = parse_term(&print_term(&pair.rhs), rel.calculus).unwrap();
        let mut fresh = Vec::new();
        let mut used_vars = lhs.free_vars();
        used_vars.extend(rhs.free_vars());
        let mut used_ctx = lhs.free_ctx_vars();
        used_ctx.extend(rhs.free_ctx_vars());
        for f in &pair.fresh {
            match f {
                crate::engine::FreshName::Var(v) => {
                    let next = (0..)
                        .map(|i| VarName::new(&format!("r{i}")).unwrap())
                        .find(|n| !used_vars.contains(n))
                        .unwrap();
                    used_vars.insert(next.clone());
                    lhs = crate::syntax::rename_var(&lhs, v, &next);
                    rhs = crate::syntax::rename_var(&rhs, v, &next);
                    fresh.push(crate::engine::FreshName::Var(next));
                }
                crate::engine::FreshName::Ctx(k) => {
                    let next = (0..)
                        .map(|i| crate::syntax::CtxVarName::new(&format!("r{i}")).unwrap())
                        .find(|n| !used_ctx.contains(n))
                        .unwrap();
                    used_ctx.insert(next.clone());
                    lhs = crate::syntax::rename_ctx_var(&lhs, k, &next);
                    rhs = crate::syntax::rename_ctx_var(&rhs, k, &next);
                    fresh.push(crate::engine::FreshName::Ctx(next));
                }
            }
        }
        *pair = RelPair { lhs, rhs, fresh };
    }
    let r = verify_bisimulation_up_to(&renamed, ts.clone(), fuel, depth, false, false);
    if verdict_kind(&r.verdict) != base_kind {
        return Err(format!(
            "verdict changed under alpha-renaming: {} vs {}",
            base_kind,
            verdict_kind(&r.verdict)
        ));
    }
    Ok(())
}

/// The capture/abort round trip of the callcc calculus as a property over
/// random inner evaluation frames: k[K v] with v reifying and aborting
/// restores the abstract context.
pub fn prop_capture_abort_round_trip(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for i in 0..cases {
        // the continuation is applied under one to three evaluation frames
        let n = 1 + rng.below(3);
        let arg = {
            let candidate = gen_term(&mut rng, CalculusId::CallccAbort, 3);
            if candidate.is_value(CalculusId::CallccAbort) {
                candidate
            } else {
                crate::syntax::lam("q", crate::syntax::bound(0))
            }
        };
        let mut inner = app(crate::syntax::bound(0), arg);
        for _ in 0..n {
            inner = app(crate::syntax::lam("u", crate::syntax::bound(0)), inner);
        }
        // p = k[K (\x. F2[x v])]
        let p = crate::syntax::ctx_app(
            crate::syntax::CtxVarName::new("k").unwrap(),
            app(crate::syntax::callcc(), crate::syntax::lam("x", inner)),
        );
        match eval(&p, CalculusId::CallccAbort, 200) {
            EvalOutcome::Evaluated { nf, .. } => match nf {
                NormalForm::ContextStuck { cv, .. } => {
                    if cv.as_str() != "k" {
                        return Err(format!("case {i}: restored context is {cv}"));
                    }
                }
                other => {
                    return Err(format!(
                        "case {i}: expected a context-stuck result, got {} for {}",
                        other.kind(),
                        print_term(&p)
                    ))
                }
            },
            EvalOutcome::FuelExhausted { .. } => {
                return Err(format!("case {i}: fuel exhausted on {}", print_term(&p)))
            }
        }
    }
    Ok(())
}
