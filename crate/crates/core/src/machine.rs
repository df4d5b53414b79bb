//! Reduction machinery shared by the three calculi: evaluation contexts as
//! outside-in frame lists, unique decomposition into redex or normal form,
//! single steps and fuelled evaluation.

use std::fmt;
use std::rc::Rc;

use crate::print::print_term;
use crate::syntax::{abort, app, bound, ctx_app, reset, CalculusId, CtxVarName, Term, VarName};

/// One evaluation-context frame, outside-in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    /// `[.] t` — the hole is in function position, argument pending.
    AppL(Rc<Term>),
    /// `v [.]` — function already a value, hole in argument position.
    AppR(Rc<Term>),
    /// `<[.]>` — a reset delimiter (shift/reset calculus only).
    Reset,
}

/// An evaluation or program context: optional abstract head context variable
/// (callcc calculus) plus frames listed outside-in.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ctx {
    pub head: Option<CtxVarName>,
    pub frames: Vec<Frame>,
}

impl Ctx {
    pub fn empty() -> Ctx {
        Ctx::default()
    }

    pub fn is_trivial(&self) -> bool {
        self.head.is_none() && self.frames.is_empty()
    }

    pub fn is_pure(&self) -> bool {
        self.head.is_none() && self.frames.iter().all(|f| *f != Frame::Reset)
    }

    /// Plug a term in the context, rebuilding inside-out.
    pub fn plug(&self, t: Rc<Term>) -> Rc<Term> {
        let inner = plug_frames(&self.frames, t);
        match &self.head {
            Some(k) => ctx_app(k.clone(), inner),
            None => inner,
        }
    }
}

pub fn plug_frames(frames: &[Frame], t: Rc<Term>) -> Rc<Term> {
    let mut acc = t;
    for f in frames.iter().rev() {
        acc = match f {
            Frame::AppL(arg) => app(acc, arg.clone()),
            Frame::AppR(fun) => app(fun.clone(), acc),
            Frame::Reset => reset(acc),
        };
    }
    acc
}

/// Splitting an evaluation context at the innermost reset enclosing the hole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResetSplit {
    /// No reset frame: the context is pure.
    Pure(Vec<Frame>),
    /// `F = F'[<E'>]` with `E'` the part inside the innermost reset.
    Split(Vec<Frame>, Vec<Frame>),
}

/// `F` is either pure or uniquely `F'[<E'>]` at the innermost reset.
pub fn split_at_reset(frames: &[Frame]) -> ResetSplit {
    match frames.iter().rposition(|f| *f == Frame::Reset) {
        None => ResetSplit::Pure(frames.to_vec()),
        Some(i) => ResetSplit::Split(frames[..i].to_vec(), frames[i + 1..].to_vec()),
    }
}

/// Classification of an irreducible term or program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForm {
    Value(Rc<Term>),
    /// `F[x v]` — evaluation blocked on a free variable in head position.
    OpenStuck {
        ctx: Ctx,
        head: VarName,
        arg: Rc<Term>,
    },
    /// `E[S v]` with no enclosing reset; `ctx` is pure.
    ControlStuck {
        ctx: Vec<Frame>,
        arg: Rc<Term>,
    },
    /// `k[v]` — a value plugged into an abstract program context.
    ContextStuck {
        cv: CtxVarName,
        value: Rc<Term>,
    },
}

impl NormalForm {
    pub fn kind(&self) -> &'static str {
        match self {
            NormalForm::Value(_) => "value",
            NormalForm::OpenStuck { .. } => "open-stuck",
            NormalForm::ControlStuck { .. } => "control-stuck",
            NormalForm::ContextStuck { .. } => "context-stuck",
        }
    }

    /// Rebuild the term this normal form classifies.
    pub fn as_term(&self) -> Rc<Term> {
        match self {
            NormalForm::Value(v) => v.clone(),
            NormalForm::OpenStuck { ctx, head, arg } => {
                ctx.plug(app(crate::syntax::var(head.clone()), arg.clone()))
            }
            NormalForm::ControlStuck { ctx, arg } => {
                plug_frames(ctx, app(crate::syntax::shift(), arg.clone()))
            }
            NormalForm::ContextStuck { cv, value } => ctx_app(cv.clone(), value.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    Beta,
    Capture,
    ResetValue,
    CallccCapture,
    Abort,
}

impl StepRule {
    pub fn name(self) -> &'static str {
        match self {
            StepRule::Beta => "beta",
            StepRule::Capture => "capture",
            StepRule::ResetValue => "reset-value",
            StepRule::CallccCapture => "callcc-capture",
            StepRule::Abort => "abort",
        }
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of unique decomposition.
#[derive(Debug, Clone)]
pub enum Decomposition {
    Redex {
        ctx: Ctx,
        redex: Rc<Term>,
        rule: StepRule,
    },
    Normal(NormalForm),
}

/// Decompose a calculus-valid term (program, for callcc) into either a unique
/// redex in its context or a normal form.
pub fn decompose(t: &Rc<Term>, calc: CalculusId) -> Decomposition {
    let mut frames: Vec<Frame> = Vec::new();
    let mut head: Option<CtxVarName> = None;
    let mut cur = t.clone();
    if calc == CalculusId::CallccAbort {
        if let Term::CtxApp(k, body) = &*cur {
            head = Some(k.clone());
            cur = body.clone();
        }
    }
    loop {
        if cur.is_value(calc) {
            debug_assert!(frames.is_empty(), "descended into a value");
            return Decomposition::Normal(match head {
                Some(cv) => NormalForm::ContextStuck { cv, value: cur },
                None => NormalForm::Value(cur),
            });
        }
        match &*cur.clone() {
            Term::App(f, a) => {
                if !f.is_value(calc) {
                    frames.push(Frame::AppL(a.clone()));
                    cur = f.clone();
                } else if !a.is_value(calc) {
                    frames.push(Frame::AppR(f.clone()));
                    cur = a.clone();
                } else {
                    // both sides values: classify the application
                    return match &**f {
                        Term::Lam(_, _) => Decomposition::Redex {
                            ctx: Ctx { head, frames },
                            redex: cur,
                            rule: StepRule::Beta,
                        },
                        Term::Var(x) => Decomposition::Normal(NormalForm::OpenStuck {
                            ctx: Ctx { head, frames },
                            head: x.clone(),
                            arg: a.clone(),
                        }),
                        Term::Shift => match split_at_reset(&frames) {
                            ResetSplit::Split(outer, inner) => {
                                let redex = reset(plug_frames(&inner, cur.clone()));
                                Decomposition::Redex {
                                    ctx: Ctx {
                                        head,
                                        frames: outer,
                                    },
                                    redex,
                                    rule: StepRule::Capture,
                                }
                            }
                            ResetSplit::Pure(pure) => {
                                Decomposition::Normal(NormalForm::ControlStuck {
                                    ctx: pure,
                                    arg: a.clone(),
                                })
                            }
                        },
                        Term::CallCC => Decomposition::Redex {
                            ctx: Ctx { head, frames },
                            redex: cur,
                            rule: StepRule::CallccCapture,
                        },
                        other => unreachable!("non-value in function position: {other:?}"),
                    };
                }
            }
            Term::Reset(b) => {
                if b.is_value(calc) {
                    return Decomposition::Redex {
                        ctx: Ctx { head, frames },
                        redex: cur,
                        rule: StepRule::ResetValue,
                    };
                }
                frames.push(Frame::Reset);
                cur = b.clone();
            }
            Term::Abort(_) => {
                return Decomposition::Redex {
                    ctx: Ctx { head, frames },
                    redex: cur,
                    rule: StepRule::Abort,
                };
            }
            Term::CtxApp(k, _) => {
                unreachable!("context application `{k}[...]` below program root")
            }
            Term::Bound(i) => unreachable!("dangling bound index {i}"),
            _ => unreachable!("value handled above"),
        }
    }
}

/// Contract a redex found by `decompose` and replug.
pub fn step(t: &Rc<Term>, calc: CalculusId) -> Option<(Rc<Term>, StepRule)> {
    match decompose(t, calc) {
        Decomposition::Normal(_) => None,
        Decomposition::Redex { ctx, redex, rule } => {
            let contractum = match (rule, &*redex) {
                (StepRule::Beta, Term::App(f, a)) => match &**f {
                    Term::Lam(_, body) => crate::syntax::open(body, a),
                    _ => unreachable!(),
                },
                (StepRule::ResetValue, Term::Reset(v)) => v.clone(),
                (StepRule::Capture, Term::Reset(inner)) => {
                    // <E[S v]>  ->  <v (\x. <E[x]>)>  with the captured E pure
                    let (pure, v) = match decompose_pure_shift(inner, calc) {
                        Some(p) => p,
                        None => unreachable!("capture redex lost its shape"),
                    };
                    debug_assert!(pure.iter().all(|f| *f != Frame::Reset));
                    let reified = crate::syntax::lam("x", reset(plug_frames(&pure, bound(0))));
                    reset(app(v, reified))
                }
                (StepRule::CallccCapture, Term::App(_, v)) => {
                    // F[K v] -> F[v (\y. A(F[y]))]
                    let reified = crate::syntax::lam("y", abort(ctx.plug(bound(0))));
                    app(v.clone(), reified)
                }
                (StepRule::Abort, Term::Abort(p)) => return Some((p.clone(), rule)),
                _ => unreachable!(),
            };
            Some((ctx.plug(contractum), rule))
        }
    }
}

// Inside a capture redex `<body>`: split body as E[S v] with E pure.
fn decompose_pure_shift(body: &Rc<Term>, calc: CalculusId) -> Option<(Vec<Frame>, Rc<Term>)> {
    let mut frames = Vec::new();
    let mut cur = body.clone();
    loop {
        match &*cur.clone() {
            Term::App(f, a) => {
                if !f.is_value(calc) {
                    frames.push(Frame::AppL(a.clone()));
                    cur = f.clone();
                } else if !a.is_value(calc) {
                    frames.push(Frame::AppR(f.clone()));
                    cur = a.clone();
                } else if matches!(&**f, Term::Shift) {
                    return Some((frames, a.clone()));
                } else {
                    return None;
                }
            }
            _ => return None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum EvalOutcome {
    Evaluated {
        nf: NormalForm,
        steps: Vec<(StepRule, Rc<Term>)>,
    },
    FuelExhausted {
        last: Rc<Term>,
        steps: Vec<(StepRule, Rc<Term>)>,
    },
}

impl EvalOutcome {
    pub fn steps(&self) -> &[(StepRule, Rc<Term>)] {
        match self {
            EvalOutcome::Evaluated { steps, .. } => steps,
            EvalOutcome::FuelExhausted { steps, .. } => steps,
        }
    }
}

/// Iterate `step` at most `fuel` times, recording each step for traces.
pub fn eval(t: &Rc<Term>, calc: CalculusId, fuel: usize) -> EvalOutcome {
    let mut steps = Vec::new();
    let mut cur = t.clone();
    for _ in 0..=fuel {
        match decompose(&cur, calc) {
            Decomposition::Normal(nf) => return EvalOutcome::Evaluated { nf, steps },
            Decomposition::Redex { .. } => {
                if steps.len() == fuel {
                    return EvalOutcome::FuelExhausted { last: cur, steps };
                }
                let (next, rule) = step(&cur, calc).expect("redex must step");
                steps.push((rule, next.clone()));
                cur = next;
            }
        }
    }
    unreachable!()
}

/// The reduction chain `t, t1, ..` up to a normal form or the fuel bound.
/// Used by the up-to-reduction search.
pub fn reduction_chain(t: &Rc<Term>, calc: CalculusId, fuel: usize) -> (Vec<Rc<Term>>, bool) {
    let mut chain = vec![t.clone()];
    let mut cur = t.clone();
    for _ in 0..fuel {
        match step(&cur, calc) {
            None => return (chain, true),
            Some((next, _)) => {
                chain.push(next.clone());
                cur = next;
            }
        }
    }
    let done = matches!(decompose(&cur, calc), Decomposition::Normal(_));
    (chain, done)
}

/// All factorizations `t = E[u]` with `E` an evaluation context, outside-in.
/// `pure_only` restricts to pure contexts (never descending through a reset);
/// the callcc calculus carries the program head into every split.
pub fn context_splits(t: &Rc<Term>, calc: CalculusId, pure_only: bool) -> Vec<(Ctx, Rc<Term>)> {
    let mut head = None;
    let mut root = t.clone();
    if calc == CalculusId::CallccAbort {
        if let Term::CtxApp(k, body) = &*root {
            head = Some(k.clone());
            root = body.clone();
        }
    }
    let mut out = Vec::new();
    let mut frames = Vec::new();
    splits_go(&root, calc, pure_only, &mut frames, &mut out);
    out.into_iter()
        .map(|(frames, u)| {
            (
                Ctx {
                    head: head.clone(),
                    frames,
                },
                u,
            )
        })
        .collect()
}

fn splits_go(
    t: &Rc<Term>,
    calc: CalculusId,
    pure_only: bool,
    frames: &mut Vec<Frame>,
    out: &mut Vec<(Vec<Frame>, Rc<Term>)>,
) {
    out.push((frames.clone(), t.clone()));
    match &**t {
        Term::App(f, a) => {
            frames.push(Frame::AppL(a.clone()));
            splits_go(f, calc, pure_only, frames, out);
            frames.pop();
            if f.is_value(calc) {
                frames.push(Frame::AppR(f.clone()));
                splits_go(a, calc, pure_only, frames, out);
                frames.pop();
            }
        }
        Term::Reset(b) if !pure_only => {
            frames.push(Frame::Reset);
            splits_go(b, calc, pure_only, frames, out);
            frames.pop();
        }
        _ => {}
    }
}

pub fn show_nf(nf: &NormalForm) -> String {
    match nf {
        NormalForm::Value(v) => format!("value: {}", print_term(v)),
        NormalForm::OpenStuck { head, arg, .. } => format!(
            "open-stuck at {head}, argument {} in {}",
            print_term(arg),
            print_term(&nf.as_term())
        ),
        NormalForm::ControlStuck { arg, .. } => format!(
            "control-stuck, shift argument {} in {}",
            print_term(arg),
            print_term(&nf.as_term())
        ),
        NormalForm::ContextStuck { cv, value } => {
            format!("context-stuck at {cv} with value {}", print_term(value))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;
    use crate::print::print_term;
    use crate::syntax::alpha_eq;

    fn p(s: &str, c: CalculusId) -> Rc<Term> {
        parse_term(s, c).unwrap()
    }

    #[test]
    fn split_at_reset_examples() {
        // hole w -> pure
        let f = vec![Frame::AppL(p("w", CalculusId::ShiftReset))];
        assert!(matches!(split_at_reset(&f), ResetSplit::Pure(_)));
        // v (<hole w>) -> Split(v hole, hole w)
        let v = p("\\x. x", CalculusId::ShiftReset);
        let w = p("w", CalculusId::ShiftReset);
        let f = vec![Frame::AppR(v.clone()), Frame::Reset, Frame::AppL(w.clone())];
        match split_at_reset(&f) {
            ResetSplit::Split(outer, inner) => {
                assert_eq!(outer, vec![Frame::AppR(v)]);
                assert_eq!(inner, vec![Frame::AppL(w)]);
            }
            other => panic!("expected split, got {other:?}"),
        }
        // <<hole>> -> Split(<hole>, hole)
        let f = vec![Frame::Reset, Frame::Reset];
        match split_at_reset(&f) {
            ResetSplit::Split(outer, inner) => {
                assert_eq!(outer, vec![Frame::Reset]);
                assert!(inner.is_empty());
            }
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn replug_identity_after_split() {
        let f = vec![
            Frame::AppR(p("\\x. x", CalculusId::ShiftReset)),
            Frame::Reset,
            Frame::AppL(p("w", CalculusId::ShiftReset)),
        ];
        if let ResetSplit::Split(outer, inner) = split_at_reset(&f) {
            let mut rebuilt = outer;
            rebuilt.push(Frame::Reset);
            rebuilt.extend(inner);
            assert_eq!(rebuilt, f);
        } else {
            panic!("expected split");
        }
    }

    #[test]
    fn beta_step() {
        let t = p("(\\x. x) z", CalculusId::Lambda);
        let (t2, rule) = step(&t, CalculusId::Lambda).unwrap();
        assert_eq!(rule, StepRule::Beta);
        assert!(alpha_eq(&t2, &p("z", CalculusId::Lambda)));
        assert!(step(&p("y z", CalculusId::Lambda), CalculusId::Lambda).is_none());
    }

    #[test]
    fn decompose_under_value_function() {
        // y ((\x. x) z): redex under AppR(y)
        let t = p("y ((\\x. x) z)", CalculusId::Lambda);
        match decompose(&t, CalculusId::Lambda) {
            Decomposition::Redex { ctx, redex, rule } => {
                assert_eq!(rule, StepRule::Beta);
                assert_eq!(ctx.frames.len(), 1);
                assert!(matches!(ctx.frames[0], Frame::AppR(_)));
                assert!(alpha_eq(&redex, &p("(\\x. x) z", CalculusId::Lambda)));
                assert!(alpha_eq(&ctx.plug(redex), &t));
            }
            other => panic!("expected redex, got {other:?}"),
        }
    }

    #[test]
    fn open_stuck_classification() {
        // (x v') w : open stuck with context hole w
        let t = p("(x (\\a. a)) w", CalculusId::Lambda);
        match decompose(&t, CalculusId::Lambda) {
            Decomposition::Normal(NormalForm::OpenStuck { ctx, head, .. }) => {
                assert_eq!(head.as_str(), "x");
                assert_eq!(ctx.frames.len(), 1);
            }
            other => panic!("expected open stuck, got {other:?}"),
        }
    }

    #[test]
    fn omega_runs_out_of_fuel() {
        let omega = p("(\\x. x x) (\\x. x x)", CalculusId::Lambda);
        match eval(&omega, CalculusId::Lambda, 1000) {
            EvalOutcome::FuelExhausted { .. } => {}
            other => panic!("expected fuel exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn reset_value_steps() {
        let t = p("<\\x. x>", CalculusId::ShiftReset);
        let (t2, rule) = step(&t, CalculusId::ShiftReset).unwrap();
        assert_eq!(rule, StepRule::ResetValue);
        assert!(alpha_eq(&t2, &p("\\x. x", CalculusId::ShiftReset)));
    }

    #[test]
    fn control_stuck_without_reset() {
        let t = p("S (\\k. k)", CalculusId::ShiftReset);
        match eval(&t, CalculusId::ShiftReset, 10) {
            EvalOutcome::Evaluated { nf, steps } => {
                assert!(steps.is_empty());
                assert!(matches!(nf, NormalForm::ControlStuck { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn capture_stays_inside_nearest_reset() {
        // <(S v) w> -> <v (\x. <x w>)>
        let t = p("<(S v) w>", CalculusId::ShiftReset);
        let (t2, rule) = step(&t, CalculusId::ShiftReset).unwrap();
        assert_eq!(rule, StepRule::Capture);
        let expected = p("<v (\\x. <x w>)>", CalculusId::ShiftReset);
        assert!(alpha_eq(&t2, &expected), "got {}", print_term(&t2));
    }

    #[test]
    fn double_shift_value_is_empty_context_representation() {
        // <S S> evaluates to \x. <x>
        let t = p("<S S>", CalculusId::ShiftReset);
        match eval(&t, CalculusId::ShiftReset, 100) {
            EvalOutcome::Evaluated { nf, .. } => match nf {
                NormalForm::Value(v) => {
                    let expected = p("\\x. <x>", CalculusId::ShiftReset);
                    assert!(alpha_eq(&v, &expected), "got {}", print_term(&v));
                }
                other => panic!("expected value, got {other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn abort_discards_context() {
        let t = p("x (A(\\v. v))", CalculusId::CallccAbort);
        match eval(&t, CalculusId::CallccAbort, 10) {
            EvalOutcome::Evaluated { nf, steps } => {
                assert_eq!(steps.len(), 1);
                assert_eq!(steps[0].0, StepRule::Abort);
                assert!(matches!(nf, NormalForm::Value(_)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn context_stuck_program() {
        let t = p("k[\\x. x]", CalculusId::CallccAbort);
        match eval(&t, CalculusId::CallccAbort, 10) {
            EvalOutcome::Evaluated { nf, steps } => {
                assert!(steps.is_empty());
                assert!(matches!(nf, NormalForm::ContextStuck { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn callcc_capture_reifies_program_context() {
        // k[K v] -> k[v (\y. A(k[y]))]
        let t = p("k[K (\\q. q)]", CalculusId::CallccAbort);
        let (t2, rule) = step(&t, CalculusId::CallccAbort).unwrap();
        assert_eq!(rule, StepRule::CallccCapture);
        let expected = p("k[(\\q. q) (\\y. A(k[y]))]", CalculusId::CallccAbort);
        assert!(alpha_eq(&t2, &expected), "got {}", print_term(&t2));
    }

    #[test]
    fn example_5_2_callcc_of_callcc() {
        // k[K K] ->4 k[\x. A(k[x])]
        let t = p("k[K K]", CalculusId::CallccAbort);
        match eval(&t, CalculusId::CallccAbort, 20) {
            EvalOutcome::Evaluated { nf, steps } => {
                assert_eq!(steps.len(), 4);
                let kinds: Vec<_> = steps.iter().map(|(r, _)| *r).collect();
                assert_eq!(
                    kinds,
                    vec![
                        StepRule::CallccCapture,
                        StepRule::CallccCapture,
                        StepRule::Beta,
                        StepRule::Abort
                    ]
                );
                match nf {
                    NormalForm::ContextStuck { cv, value } => {
                        assert_eq!(cv.as_str(), "k");
                        let expected = p("\\x. A(k[x])", CalculusId::CallccAbort);
                        assert!(alpha_eq(&value, &expected), "got {}", print_term(&value));
                    }
                    other => panic!("expected context stuck, got {other:?}"),
                }
            }
            other => panic!("{other:?}"),
        }
    }
}
