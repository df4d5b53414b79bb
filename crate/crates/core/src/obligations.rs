//! Decomposing a pair of normal forms into the test obligations of the
//! bisimulation game. Only the value test is passive; context, open-stuck and
//! control/context-stuck tests are active. A mismatch of shapes is evidence of
//! non-bisimilarity.

use std::fmt;
use std::rc::Rc;

use crate::machine::{plug_frames, split_at_reset, NormalForm, ResetSplit};
use crate::syntax::{app, ctx_app, reset, var, CalculusId, FreshGen, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObKind {
    Passive,
    Active,
}

impl ObKind {
    pub fn name(self) -> &'static str {
        match self {
            ObKind::Passive => "passive",
            ObKind::Active => "active",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Obligation {
    pub kind: ObKind,
    /// Which test rule produced this obligation.
    pub rule: &'static str,
    pub lhs: Rc<Term>,
    pub rhs: Rc<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    Kind(&'static str, &'static str),
    HeadVar(String, String),
    CtxVar(String, String),
    /// One open-stuck context is pure, the other contains a reset.
    ResetSplit,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Kind(a, b) => write!(f, "normal-form kinds differ: {a} vs {b}"),
            Mismatch::HeadVar(a, b) => write!(f, "open-stuck head variables differ: {a} vs {b}"),
            Mismatch::CtxVar(a, b) => write!(f, "context variables differ: {a} vs {b}"),
            Mismatch::ResetSplit => {
                write!(
                    f,
                    "one evaluation context is pure, the other contains a reset"
                )
            }
        }
    }
}

/// Obligations for a pair of normal forms of the given calculus.
pub fn obligations(
    calc: CalculusId,
    a: &NormalForm,
    b: &NormalForm,
    gen: &mut FreshGen,
) -> Result<Vec<Obligation>, Mismatch> {
    match calc {
        CalculusId::Lambda => obligations_lambda(a, b, gen),
        CalculusId::ShiftReset => obligations_shift_reset(a, b, gen),
        CalculusId::CallccAbort => obligations_callcc(a, b, gen),
    }
}

fn testval(v: &Rc<Term>, w: &Rc<Term>, gen: &mut FreshGen) -> Obligation {
    let x = var(gen.next_var());
    Obligation {
        kind: ObKind::Passive,
        rule: "testval",
        lhs: app(v.clone(), x.clone()),
        rhs: app(w.clone(), x),
    }
}

fn obligations_lambda(
    a: &NormalForm,
    b: &NormalForm,
    gen: &mut FreshGen,
) -> Result<Vec<Obligation>, Mismatch> {
    match (a, b) {
        (NormalForm::Value(v), NormalForm::Value(w)) => Ok(vec![testval(v, w, gen)]),
        (
            NormalForm::OpenStuck { ctx, head, arg },
            NormalForm::OpenStuck {
                ctx: ctx2,
                head: head2,
                arg: arg2,
            },
        ) => {
            if head != head2 {
                return Err(Mismatch::HeadVar(
                    head.as_str().to_string(),
                    head2.as_str().to_string(),
                ));
            }
            let x = var(gen.next_var());
            Ok(vec![
                Obligation {
                    kind: ObKind::Active,
                    rule: "testevctx",
                    lhs: ctx.plug(x.clone()),
                    rhs: ctx2.plug(x),
                },
                testval(arg, arg2, gen),
            ])
        }
        _ => Err(Mismatch::Kind(a.kind(), b.kind())),
    }
}

fn obligations_shift_reset(
    a: &NormalForm,
    b: &NormalForm,
    gen: &mut FreshGen,
) -> Result<Vec<Obligation>, Mismatch> {
    match (a, b) {
        (NormalForm::Value(v), NormalForm::Value(w)) => Ok(vec![testval(v, w, gen)]),
        (
            NormalForm::OpenStuck { ctx, head, arg },
            NormalForm::OpenStuck {
                ctx: ctx2,
                head: head2,
                arg: arg2,
            },
        ) => {
            if head != head2 {
                return Err(Mismatch::HeadVar(
                    head.as_str().to_string(),
                    head2.as_str().to_string(),
                ));
            }
            let mut obs = Vec::new();
            let x = var(gen.next_var());
            match (split_at_reset(&ctx.frames), split_at_reset(&ctx2.frames)) {
                (ResetSplit::Pure(e1), ResetSplit::Pure(e2)) => obs.push(Obligation {
                    kind: ObKind::Active,
                    rule: "testevctx",
                    lhs: plug_frames(&e1, x.clone()),
                    rhs: plug_frames(&e2, x),
                }),
                (ResetSplit::Split(f1, e1), ResetSplit::Split(f2, e2)) => {
                    obs.push(Obligation {
                        kind: ObKind::Active,
                        rule: "testevctx-delimited",
                        lhs: reset(plug_frames(&e1, x.clone())),
                        rhs: reset(plug_frames(&e2, x.clone())),
                    });
                    obs.push(Obligation {
                        kind: ObKind::Active,
                        rule: "testevctx-outer",
                        lhs: plug_frames(&f1, x.clone()),
                        rhs: plug_frames(&f2, x),
                    });
                }
                _ => return Err(Mismatch::ResetSplit),
            }
            obs.push(testval(arg, arg2, gen));
            Ok(obs)
        }
        (
            NormalForm::ControlStuck { ctx, arg },
            NormalForm::ControlStuck {
                ctx: ctx2,
                arg: arg2,
            },
        ) => {
            let x = var(gen.next_var());
            let z = var(gen.next_var());
            Ok(vec![
                Obligation {
                    kind: ObKind::Active,
                    rule: "testevctx",
                    lhs: plug_frames(ctx, x.clone()),
                    rhs: plug_frames(ctx2, x),
                },
                Obligation {
                    kind: ObKind::Active,
                    rule: "testctrl",
                    lhs: reset(app(arg.clone(), z.clone())),
                    rhs: reset(app(arg2.clone(), z)),
                },
            ])
        }
        _ => Err(Mismatch::Kind(a.kind(), b.kind())),
    }
}

fn obligations_callcc(
    a: &NormalForm,
    b: &NormalForm,
    gen: &mut FreshGen,
) -> Result<Vec<Obligation>, Mismatch> {
    // Value testing is lifted to programs: v and w are applied to a fresh
    // variable inside a fresh abstract context.
    let testval_prog = |v: &Rc<Term>, w: &Rc<Term>, gen: &mut FreshGen| {
        let k = gen.next_ctx_var();
        let x = var(gen.next_var());
        Obligation {
            kind: ObKind::Passive,
            rule: "testval",
            lhs: ctx_app(k.clone(), app(v.clone(), x.clone())),
            rhs: ctx_app(k, app(w.clone(), x)),
        }
    };
    match (a, b) {
        // A bare value means the surrounding context was aborted; all such
        // programs are equated.
        (NormalForm::Value(_), NormalForm::Value(_)) => Ok(vec![]),
        (
            NormalForm::ContextStuck { cv, value },
            NormalForm::ContextStuck {
                cv: cv2,
                value: value2,
            },
        ) => {
            if cv != cv2 {
                return Err(Mismatch::CtxVar(
                    cv.as_str().to_string(),
                    cv2.as_str().to_string(),
                ));
            }
            Ok(vec![testval_prog(value, value2, gen)])
        }
        (
            NormalForm::OpenStuck { ctx, head, arg },
            NormalForm::OpenStuck {
                ctx: ctx2,
                head: head2,
                arg: arg2,
            },
        ) => {
            if head != head2 {
                return Err(Mismatch::HeadVar(
                    head.as_str().to_string(),
                    head2.as_str().to_string(),
                ));
            }
            let x = var(gen.next_var());
            Ok(vec![
                Obligation {
                    kind: ObKind::Active,
                    rule: "testevctx",
                    lhs: ctx.plug(x.clone()),
                    rhs: ctx2.plug(x),
                },
                testval_prog(arg, arg2, gen),
            ])
        }
        _ => Err(Mismatch::Kind(a.kind(), b.kind())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{eval, EvalOutcome};
    use crate::parse::parse_term;
    use crate::print::print_term;
    use crate::syntax::alpha_eq;

    fn nf_of(s: &str, calc: CalculusId) -> NormalForm {
        match eval(&parse_term(s, calc).unwrap(), calc, 1000) {
            EvalOutcome::Evaluated { nf, .. } => nf,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lambda_value_value_gives_one_passive() {
        let a = nf_of("\\x. x", CalculusId::Lambda);
        let b = nf_of("\\x. \\y. y", CalculusId::Lambda);
        let mut gen = FreshGen::new();
        let obs = obligations(CalculusId::Lambda, &a, &b, &mut gen).unwrap();
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].kind, ObKind::Passive);
        assert!(alpha_eq(
            &obs[0].lhs,
            &parse_term("(\\x. x) #v0", CalculusId::Lambda).unwrap()
        ));
    }

    #[test]
    fn lambda_open_stuck_same_head() {
        // hole contexts, head y
        let a = nf_of("y (\\q. q)", CalculusId::Lambda);
        let b = nf_of("y (\\q. q q)", CalculusId::Lambda);
        let mut gen = FreshGen::new();
        let obs = obligations(CalculusId::Lambda, &a, &b, &mut gen).unwrap();
        assert_eq!(obs.len(), 2);
        assert_eq!(obs[0].kind, ObKind::Active);
        assert!(alpha_eq(&obs[0].lhs, &obs[0].rhs)); // (#v0, #v0)
        assert_eq!(obs[1].kind, ObKind::Passive);
    }

    #[test]
    fn lambda_kind_clash_is_mismatch() {
        let a = nf_of("y", CalculusId::Lambda);
        let b = nf_of("y (\\q. q)", CalculusId::Lambda);
        let mut gen = FreshGen::new();
        match obligations(CalculusId::Lambda, &a, &b, &mut gen) {
            Err(Mismatch::Kind("value", "open-stuck")) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lambda_head_clash_is_mismatch() {
        let a = nf_of("y (\\q. q)", CalculusId::Lambda);
        let b = nf_of("z (\\q. q)", CalculusId::Lambda);
        let mut gen = FreshGen::new();
        assert!(matches!(
            obligations(CalculusId::Lambda, &a, &b, &mut gen),
            Err(Mismatch::HeadVar(_, _))
        ));
    }

    #[test]
    fn shift_reset_pure_vs_delimited_context_is_mismatch() {
        let a = nf_of("y (\\q. q) w", CalculusId::ShiftReset); // pure context hole w
        let b = nf_of("<y (\\q. q)>", CalculusId::ShiftReset); // context <hole>
        let mut gen = FreshGen::new();
        assert!(matches!(
            obligations(CalculusId::ShiftReset, &a, &b, &mut gen),
            Err(Mismatch::ResetSplit)
        ));
    }

    #[test]
    fn shift_reset_control_stuck_test() {
        // Example: S S vs S (\k. k (\x. x)) in the empty context
        let a = nf_of("S S", CalculusId::ShiftReset);
        let b = nf_of("S (\\k. k (\\x. x))", CalculusId::ShiftReset);
        let mut gen = FreshGen::new();
        let obs = obligations(CalculusId::ShiftReset, &a, &b, &mut gen).unwrap();
        assert_eq!(obs.len(), 2);
        // empty contexts compared by plugging
        assert!(alpha_eq(&obs[0].lhs, &obs[0].rhs));
        // shift arguments compared under reset
        let expected = parse_term("<S #v1>", CalculusId::ShiftReset).unwrap();
        assert!(
            alpha_eq(&obs[1].lhs, &expected),
            "{}",
            print_term(&obs[1].lhs)
        );
        assert_eq!(obs[1].kind, ObKind::Active);
    }

    #[test]
    fn callcc_values_all_equated() {
        let a = nf_of("\\x. x", CalculusId::CallccAbort);
        let b = nf_of("\\x. x x", CalculusId::CallccAbort);
        let mut gen = FreshGen::new();
        let obs = obligations(CalculusId::CallccAbort, &a, &b, &mut gen).unwrap();
        assert!(obs.is_empty());
    }

    #[test]
    fn callcc_context_stuck_same_var() {
        let a = nf_of("k[\\x. x]", CalculusId::CallccAbort);
        let b = nf_of("k[\\x. x x]", CalculusId::CallccAbort);
        let mut gen = FreshGen::new();
        let obs = obligations(CalculusId::CallccAbort, &a, &b, &mut gen).unwrap();
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].kind, ObKind::Passive);
        let expected = parse_term("#k0[(\\x. x) #v0]", CalculusId::CallccAbort).unwrap();
        assert!(
            alpha_eq(&obs[0].lhs, &expected),
            "{}",
            print_term(&obs[0].lhs)
        );
    }

    #[test]
    fn callcc_context_stuck_different_vars_mismatch() {
        let a = nf_of("k[\\x. x]", CalculusId::CallccAbort);
        let b = nf_of("w[\\x. x]", CalculusId::CallccAbort);
        let mut gen = FreshGen::new();
        assert!(matches!(
            obligations(CalculusId::CallccAbort, &a, &b, &mut gen),
            Err(Mismatch::CtxVar(_, _))
        ));
    }

    #[test]
    fn obligation_mismatch_symmetric_in_kind() {
        let a = nf_of("y", CalculusId::Lambda);
        let b = nf_of("y (\\q. q)", CalculusId::Lambda);
        let mut gen = FreshGen::new();
        let fwd = obligations(CalculusId::Lambda, &a, &b, &mut gen).is_err();
        let bwd = obligations(CalculusId::Lambda, &b, &a, &mut gen).is_err();
        assert_eq!(fwd, bwd);
    }
}
