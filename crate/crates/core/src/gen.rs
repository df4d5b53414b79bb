//! Deterministic random term generation for the randomized property suites.

use std::rc::Rc;

use crate::syntax::{
    abort, app, bound, callcc, ctx_app, lam, reset, shift, var, CalculusId, CtxVarName, Term,
    VarName,
};

/// xorshift64*: small, seedable, reproducible.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n.max(1) as u64) as usize
    }

    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }
}

const FREE_VARS: [&str; 4] = ["x0", "y0", "z0", "w0"];
const CTX_VARS: [&str; 2] = ["k", "w"];

pub fn free_var_pool() -> Vec<VarName> {
    FREE_VARS.iter().map(|s| VarName::new(s).unwrap()).collect()
}

pub fn ctx_var_pool() -> Vec<CtxVarName> {
    CTX_VARS
        .iter()
        .map(|s| CtxVarName::new(s).unwrap())
        .collect()
}

/// A locally closed random term of the calculus with at most `size` nodes.
pub fn gen_term(rng: &mut Rng, calc: CalculusId, size: usize) -> Rc<Term> {
    gen(rng, calc, size.max(1), 0, false)
}

/// A random program of the callcc calculus: possibly an abstract context
/// around a term, with aborts containing subprograms.
pub fn gen_program(rng: &mut Rng, size: usize) -> Rc<Term> {
    let body = gen(rng, CalculusId::CallccAbort, size.max(1), 0, false);
    if rng.chance(60) {
        let pool = ctx_var_pool();
        let k = pool[rng.below(pool.len())].clone();
        ctx_app(k, body)
    } else {
        body
    }
}

/// A random pure term: a value or a delimited term.
pub fn gen_pure_term(rng: &mut Rng, size: usize) -> Rc<Term> {
    if rng.chance(50) {
        gen_value(rng, CalculusId::ShiftReset, size.max(1), 0)
    } else {
        reset(gen(rng, CalculusId::ShiftReset, size.max(1), 0, false))
    }
}

fn gen(rng: &mut Rng, calc: CalculusId, size: usize, depth: usize, in_binder: bool) -> Rc<Term> {
    let _ = in_binder;
    if size <= 1 {
        return gen_leaf(rng, calc, depth);
    }
    match rng.below(10) {
        0 | 1 => gen_leaf(rng, calc, depth),
        2..=4 => {
            // application, split the budget
            let left = 1 + rng.below(size - 1);
            let f = gen(rng, calc, left, depth, false);
            let a = gen(rng, calc, size - left, depth, false);
            app(f, a)
        }
        5..=7 => lam("x", gen(rng, calc, size - 1, depth + 1, true)),
        8 => match calc {
            CalculusId::ShiftReset => reset(gen(rng, calc, size - 1, depth, false)),
            CalculusId::CallccAbort => {
                // abort bodies are programs and may use an abstract context
                let body = gen(rng, calc, size.saturating_sub(2).max(1), depth, false);
                if rng.chance(40) {
                    let pool = ctx_var_pool();
                    let k = pool[rng.below(pool.len())].clone();
                    abort(ctx_app(k, body))
                } else {
                    abort(body)
                }
            }
            CalculusId::Lambda => gen_leaf(rng, calc, depth),
        },
        _ => gen_value(rng, calc, size, depth),
    }
}

fn gen_leaf(rng: &mut Rng, calc: CalculusId, depth: usize) -> Rc<Term> {
    let mut choices = 2;
    if calc != CalculusId::Lambda {
        choices = 3;
    }
    match rng.below(choices) {
        0 if depth > 0 => bound(rng.below(depth)),
        0 | 1 => {
            let pool = free_var_pool();
            var(pool[rng.below(pool.len())].clone())
        }
        _ => match calc {
            CalculusId::ShiftReset => shift(),
            CalculusId::CallccAbort => callcc(),
            CalculusId::Lambda => unreachable!(),
        },
    }
}

fn gen_value(rng: &mut Rng, calc: CalculusId, size: usize, depth: usize) -> Rc<Term> {
    if size <= 1 {
        return gen_leaf_value(rng, calc, depth);
    }
    if rng.chance(60) {
        lam("x", gen(rng, calc, size - 1, depth + 1, true))
    } else {
        gen_leaf_value(rng, calc, depth)
    }
}

fn gen_leaf_value(rng: &mut Rng, calc: CalculusId, depth: usize) -> Rc<Term> {
    match rng.below(3) {
        0 if depth > 0 => bound(rng.below(depth)),
        1 if calc == CalculusId::ShiftReset => shift(),
        1 if calc == CalculusId::CallccAbort => callcc(),
        _ => {
            let pool = free_var_pool();
            var(pool[rng.below(pool.len())].clone())
        }
    }
}
