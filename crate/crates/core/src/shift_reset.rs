//! The call-by-value lambda calculus with shift and reset: pure-context
//! capture, the relaxed semantics without a top-level reset, and the refined
//! context-testing rules.

use std::rc::Rc;

use crate::machine::{decompose, eval, step, Decomposition, EvalOutcome, NormalForm, StepRule};
pub use crate::machine::{split_at_reset, ResetSplit};
use crate::obligations::{obligations, Mismatch, Obligation};
use crate::syntax::{CalculusId, FreshGen, Term};

pub fn decompose_sr(t: &Rc<Term>) -> Decomposition {
    decompose(t, CalculusId::ShiftReset)
}

pub fn step_sr(t: &Rc<Term>) -> Option<(Rc<Term>, StepRule)> {
    step(t, CalculusId::ShiftReset)
}

pub fn eval_sr(t: &Rc<Term>, fuel: usize) -> EvalOutcome {
    eval(t, CalculusId::ShiftReset, fuel)
}

pub fn obligations_sr(
    a: &NormalForm,
    b: &NormalForm,
    gen: &mut FreshGen,
) -> Result<Vec<Obligation>, Mismatch> {
    obligations(CalculusId::ShiftReset, a, b, gen)
}

/// Pure terms are effect-free: values and delimited terms.
pub fn is_pure_term(t: &Term, calc: CalculusId) -> bool {
    t.is_value(calc) || matches!(t, Term::Reset(_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;
    use crate::print::print_term;
    use crate::syntax::alpha_eq;

    fn p(s: &str) -> Rc<Term> {
        parse_term(s, CalculusId::ShiftReset).unwrap()
    }

    /// The initial term of the delimited-control reduction example:
    /// <(S (\k. i (k i))) (S (\k. omega)) Omega> with i = \a. a and
    /// omega = \x. x x.
    pub fn example_4_1_term() -> Rc<Term> {
        p("<(S (\\k. (\\a. a) (k (\\a. a)))) (S (\\k. \\x. x x)) ((\\x. x x) (\\x. x x))>")
    }

    #[test]
    fn reset_of_value_is_hole_redex() {
        match decompose_sr(&p("<\\x. x>")) {
            Decomposition::Redex { ctx, rule, .. } => {
                assert!(ctx.is_trivial());
                assert_eq!(rule, StepRule::ResetValue);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn capture_redex_found_under_reset() {
        match decompose_sr(&p("<(S v) w>")) {
            Decomposition::Redex { ctx, redex, rule } => {
                assert!(ctx.is_trivial());
                assert_eq!(rule, StepRule::Capture);
                assert!(alpha_eq(&redex, &p("<(S v) w>")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shift_without_reset_is_control_stuck() {
        match decompose_sr(&p("(S v) w")) {
            Decomposition::Normal(NormalForm::ControlStuck { ctx, arg }) => {
                assert_eq!(ctx.len(), 1);
                assert!(alpha_eq(&arg, &p("v")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eight_step_reduction_sequence() {
        // The full trace of the delimited-control example: step kinds
        // capture, beta, beta, capture, beta, reset, beta, reset, ending at
        // omega.
        let t = example_4_1_term();
        match eval_sr(&t, 100) {
            EvalOutcome::Evaluated { nf, steps } => {
                let kinds: Vec<StepRule> = steps.iter().map(|(r, _)| *r).collect();
                assert_eq!(
                    kinds,
                    vec![
                        StepRule::Capture,
                        StepRule::Beta,
                        StepRule::Beta,
                        StepRule::Capture,
                        StepRule::Beta,
                        StepRule::ResetValue,
                        StepRule::Beta,
                        StepRule::ResetValue,
                    ]
                );
                match nf {
                    NormalForm::Value(v) => {
                        assert!(alpha_eq(&v, &p("\\x. x x")), "got {}", print_term(&v))
                    }
                    other => panic!("expected omega, got {other:?}"),
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn double_shift_example() {
        // <S S> ->* \x. <x>, the representation of the empty context
        match eval_sr(&p("<S S>"), 100) {
            EvalOutcome::Evaluated { nf, .. } => match nf {
                NormalForm::Value(v) => assert!(alpha_eq(&v, &p("\\x. <x>"))),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reset_value_in_empty_context() {
        let (t, rule) = step_sr(&p("<v>")).unwrap();
        assert_eq!(rule, StepRule::ResetValue);
        assert!(alpha_eq(&t, &p("v")));
    }

    #[test]
    fn example_4_6_pair_2_reduces_to_pair_3() {
        // <S z> and <(\k. k (\x. x)) z> reduce to <z (\x. <x>)> and <z (\x. x)>
        let a = p("<S z>");
        let b = p("<(\\k. k (\\x. x)) z>");
        let (a_nf, b_nf) = match (eval_sr(&a, 100), eval_sr(&b, 100)) {
            (EvalOutcome::Evaluated { nf: na, .. }, EvalOutcome::Evaluated { nf: nb, .. }) => {
                (na, nb)
            }
            other => panic!("{other:?}"),
        };
        assert!(alpha_eq(&a_nf.as_term(), &p("<z (\\x. <x>)>")));
        assert!(alpha_eq(&b_nf.as_term(), &p("<z (\\x. x)>")));
    }

    #[test]
    fn capture_never_crosses_a_reset() {
        // the inner shift captures only up to the inner reset
        let t = p("<v0 <(S v) w>>");
        let (t2, rule) = step_sr(&t).unwrap();
        assert_eq!(rule, StepRule::Capture);
        assert!(
            alpha_eq(&t2, &p("<v0 <v (\\x. <x w>)>>")),
            "got {}",
            print_term(&t2)
        );
    }

    #[test]
    fn pure_terms_are_values_and_resets() {
        assert!(is_pure_term(&p("\\x. x"), CalculusId::ShiftReset));
        assert!(is_pure_term(&p("S"), CalculusId::ShiftReset));
        assert!(is_pure_term(&p("<x y>"), CalculusId::ShiftReset));
        assert!(!is_pure_term(&p("x y"), CalculusId::ShiftReset));
    }
}
