//! The plain call-by-value lambda calculus: unique decomposition, reduction,
//! and normal-form test obligations.

use std::rc::Rc;

use crate::machine::{decompose, eval, step, Decomposition, EvalOutcome, NormalForm, StepRule};
use crate::obligations::{obligations, Mismatch, Obligation};
use crate::syntax::{CalculusId, FreshGen, Term};

pub fn decompose_l(t: &Rc<Term>) -> Decomposition {
    decompose(t, CalculusId::Lambda)
}

pub fn step_l(t: &Rc<Term>) -> Option<(Rc<Term>, StepRule)> {
    step(t, CalculusId::Lambda)
}

pub fn eval_l(t: &Rc<Term>, fuel: usize) -> EvalOutcome {
    eval(t, CalculusId::Lambda, fuel)
}

pub fn obligations_l(
    a: &NormalForm,
    b: &NormalForm,
    gen: &mut FreshGen,
) -> Result<Vec<Obligation>, Mismatch> {
    obligations(CalculusId::Lambda, a, b, gen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::Frame;
    use crate::parse::parse_term;
    use crate::print::print_term;
    use crate::syntax::alpha_eq;

    fn p(s: &str) -> Rc<Term> {
        parse_term(s, CalculusId::Lambda).unwrap()
    }

    /// Wadsworth's infinite eta-expansion combinator: fix (\f x y. x (f y))
    /// with theta theta as the fixpoint core.
    pub fn wadsworth() -> Rc<Term> {
        let theta = "(\\z x. x (\\y. z z x y))";
        p(&format!("\\x. {theta} {theta} (\\f x y. x (f y)) x"))
    }

    #[test]
    fn hole_redex() {
        match decompose_l(&p("(\\x. x) y")) {
            Decomposition::Redex { ctx, rule, .. } => {
                assert!(ctx.is_trivial());
                assert_eq!(rule, StepRule::Beta);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_examples() {
        let (t, _) = step_l(&p("(\\x. x) z")).unwrap();
        assert!(alpha_eq(&t, &p("z")));
        assert!(step_l(&p("y z")).is_none());
    }

    #[test]
    fn step_none_iff_decompose_normal() {
        for s in ["y z", "\\x. (\\y. y) x", "(\\x. x) ((\\y. y) z)", "x"] {
            let t = p(s);
            let is_normal = matches!(decompose_l(&t), Decomposition::Normal(_));
            assert_eq!(step_l(&t).is_none(), is_normal, "{s}");
        }
    }

    #[test]
    fn wadsworth_unrolls_one_expansion() {
        // J y ->* \x. y (J x)
        let j = wadsworth();
        let t = crate::syntax::app(j.clone(), p("y"));
        match eval_l(&t, 1000) {
            EvalOutcome::Evaluated { nf, .. } => match nf {
                NormalForm::Value(v) => {
                    let expected = crate::syntax::lam(
                        "x",
                        crate::syntax::app(p("y"), crate::syntax::app(j, crate::syntax::bound(0))),
                    );
                    assert!(alpha_eq(&v, &expected), "got {}", print_term(&v));
                }
                other => panic!("expected value, got {other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eval_simple_value() {
        match eval_l(&p("(\\x. x) (\\y. y)"), 10) {
            EvalOutcome::Evaluated { nf, steps } => {
                assert_eq!(steps.len(), 1);
                assert!(matches!(nf, NormalForm::Value(_)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eval_open_stuck_head_shape() {
        // (\x. y (J x)) z ->* y (\x. z (J x)): open stuck at y in the hole
        let j = wadsworth();
        let t = crate::syntax::app(
            crate::syntax::lam(
                "x",
                crate::syntax::app(
                    p("y"),
                    crate::syntax::app(j.clone(), crate::syntax::bound(0)),
                ),
            ),
            p("z"),
        );
        match eval_l(&t, 1000) {
            EvalOutcome::Evaluated { nf, .. } => match nf {
                NormalForm::OpenStuck { ctx, head, arg } => {
                    assert!(ctx.is_trivial());
                    assert_eq!(head.as_str(), "y");
                    let expected = crate::syntax::lam(
                        "x",
                        crate::syntax::app(p("z"), crate::syntax::app(j, crate::syntax::bound(0))),
                    );
                    assert!(alpha_eq(&arg, &expected), "got {}", print_term(&arg));
                }
                other => panic!("expected open stuck, got {other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_vars_never_grow_under_reduction() {
        let t = p("(\\x. x x) (\\y. y z)");
        let (t2, _) = step_l(&t).unwrap();
        assert!(t2.free_vars().is_subset(&t.free_vars()));
    }

    #[test]
    fn obligations_value_vs_wadsworth() {
        let mut gen = FreshGen::new();
        let a = NormalForm::Value(p("\\x. x"));
        let b = NormalForm::Value(wadsworth());
        let obs = obligations_l(&a, &b, &mut gen).unwrap();
        assert_eq!(obs.len(), 1);
        assert!(alpha_eq(&obs[0].lhs, &p("(\\x. x) #v0")));
    }

    #[test]
    fn obligations_empty_context_open_stuck() {
        let mut gen = FreshGen::new();
        let v = p("\\q. q");
        let w = p("\\q. q q");
        let a = NormalForm::OpenStuck {
            ctx: crate::machine::Ctx::empty(),
            head: crate::syntax::VarName::new("y").unwrap(),
            arg: v,
        };
        let b = NormalForm::OpenStuck {
            ctx: crate::machine::Ctx::empty(),
            head: crate::syntax::VarName::new("y").unwrap(),
            arg: w,
        };
        let obs = obligations_l(&a, &b, &mut gen).unwrap();
        assert_eq!(obs.len(), 2);
        assert!(alpha_eq(&obs[0].lhs, &p("#v0")));
        assert!(alpha_eq(&obs[0].rhs, &p("#v0")));
        assert!(alpha_eq(&obs[1].lhs, &p("(\\q. q) #v1")));
    }

    #[test]
    fn decompose_redex_under_value_context() {
        let t = p("y ((\\x. x) z)");
        match decompose_l(&t) {
            Decomposition::Redex { ctx, redex, .. } => {
                assert_eq!(ctx.frames, vec![Frame::AppR(p("y"))]);
                assert!(alpha_eq(&redex, &p("(\\x. x) z")));
            }
            other => panic!("{other:?}"),
        }
    }
}
