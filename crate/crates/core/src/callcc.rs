//! The call-by-value lambda calculus with callcc and abort: program-level
//! semantics with context variables and context substitution.

use std::rc::Rc;

use crate::machine::{
    decompose, eval, step, Ctx, Decomposition, EvalOutcome, NormalForm, StepRule,
};
use crate::obligations::{obligations, Mismatch, Obligation};
use crate::syntax::{abort, app, ctx_app, reset, CalculusId, CtxVarName, FreshGen, Term};

pub fn decompose_cc(p: &Rc<Term>) -> Decomposition {
    decompose(p, CalculusId::CallccAbort)
}

pub fn step_cc(p: &Rc<Term>) -> Option<(Rc<Term>, StepRule)> {
    step(p, CalculusId::CallccAbort)
}

pub fn eval_cc(p: &Rc<Term>, fuel: usize) -> EvalOutcome {
    eval(p, CalculusId::CallccAbort, fuel)
}

pub fn obligations_cc(
    a: &NormalForm,
    b: &NormalForm,
    gen: &mut FreshGen,
) -> Result<Vec<Obligation>, Mismatch> {
    obligations(CalculusId::CallccAbort, a, b, gen)
}

/// Context substitution `p{F/k}`:
///
/// ```text
/// (k[t]){F/k} = F[t{F/k}]
/// (w[t]){F/k} = w[t{F/k}]   when w != k
/// ```
///
/// recursing into all subterms and subprograms.
pub fn ctx_subst(p: &Rc<Term>, k: &CtxVarName, f: &Ctx) -> Rc<Term> {
    if !p.free_ctx_vars().contains(k) {
        return p.clone();
    }
    match &**p {
        Term::Bound(_) | Term::Var(_) | Term::Shift | Term::CallCC => p.clone(),
        Term::Lam(h, b) => Rc::new(Term::Lam(h.clone(), ctx_subst(b, k, f))),
        Term::App(fun, arg) => app(ctx_subst(fun, k, f), ctx_subst(arg, k, f)),
        Term::Reset(b) => reset(ctx_subst(b, k, f)),
        Term::Abort(b) => abort(ctx_subst(b, k, f)),
        Term::CtxApp(w, b) => {
            let b2 = ctx_subst(b, k, f);
            if w == k {
                f.plug(b2)
            } else {
                ctx_app(w.clone(), b2)
            }
        }
    }
}

/// Lift a term to a program by plugging it into a fresh abstract context
/// (the testtm rule). Terms that are already programs are left alone.
pub fn lift_to_program(t: &Rc<Term>, gen: &mut FreshGen) -> (Rc<Term>, CtxVarName) {
    let k = gen.next_ctx_var();
    (ctx_app(k.clone(), t.clone()), k)
}
