//! Unified abstract syntax for the three calculi: plain call-by-value lambda,
//! lambda with shift/reset, and lambda with callcc/abort.
//!
//! Bound variables are positional (de Bruijn indices relative to the enclosing
//! binders); free variables carry names. Every term handled outside a binder is
//! locally closed, so substitution of a value for a free variable can never
//! capture and needs no index shifting. Lambda nodes keep a printing hint that
//! is ignored by equality, which makes `==` exactly alpha-equivalence.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

/// Prefix reserved for generator-produced names; user input never starts with it.
pub const GEN_PREFIX: char = '#';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CalculusId {
    Lambda,
    ShiftReset,
    CallccAbort,
}

impl CalculusId {
    pub fn name(self) -> &'static str {
        match self {
            CalculusId::Lambda => "lambda",
            CalculusId::ShiftReset => "shiftreset",
            CalculusId::CallccAbort => "callcc",
        }
    }

    pub fn parse(s: &str) -> Option<CalculusId> {
        match s {
            "lambda" | "lam" => Some(CalculusId::Lambda),
            "shiftreset" | "shift-reset" | "sr" => Some(CalculusId::ShiftReset),
            "callcc" | "callcc-abort" | "cc" => Some(CalculusId::CallccAbort),
            _ => None,
        }
    }
}

impl fmt::Display for CalculusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName(String);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CtxVarName(String);

fn valid_user_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    if matches!(s, "S" | "K" | "A") {
        return false;
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn valid_gen_ident(s: &str, class: char) -> bool {
    let rest = match s.strip_prefix(GEN_PREFIX) {
        Some(r) => r,
        None => return false,
    };
    let digits = match rest.strip_prefix(class) {
        Some(d) => d,
        None => return false,
    };
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

impl VarName {
    /// A user-written variable name. Rejects the reserved `#` namespace.
    pub fn new(s: &str) -> Result<VarName, String> {
        if valid_user_ident(s) || valid_gen_ident(s, 'v') {
            Ok(VarName(s.to_string()))
        } else {
            Err(format!("invalid variable name `{s}`"))
        }
    }

    pub fn generated(index: usize) -> VarName {
        VarName(format!("{GEN_PREFIX}v{index}"))
    }

    pub fn is_generated(&self) -> bool {
        self.0.starts_with(GEN_PREFIX)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl CtxVarName {
    pub fn new(s: &str) -> Result<CtxVarName, String> {
        if valid_user_ident(s) || valid_gen_ident(s, 'k') {
            Ok(CtxVarName(s.to_string()))
        } else {
            Err(format!("invalid context variable name `{s}`"))
        }
    }

    pub fn generated(index: usize) -> CtxVarName {
        CtxVarName(format!("{GEN_PREFIX}k{index}"))
    }

    pub fn is_generated(&self) -> bool {
        self.0.starts_with(GEN_PREFIX)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for CtxVarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Deterministic fresh name supply: lowest-index generator name not in the
/// avoid set. An explicit avoid set (no global counter) keeps results
/// reproducible and the module safe for concurrent use.
pub fn fresh_var(avoid: &BTreeSet<VarName>) -> VarName {
    for i in 0.. {
        let candidate = VarName::generated(i);
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

pub fn fresh_ctx_var(avoid: &BTreeSet<CtxVarName>) -> CtxVarName {
    for i in 0.. {
        let candidate = CtxVarName::generated(i);
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// A fresh-name generator that accumulates everything it has handed out.
#[derive(Debug, Clone, Default)]
pub struct FreshGen {
    avoid_vars: BTreeSet<VarName>,
    avoid_ctx: BTreeSet<CtxVarName>,
}

impl FreshGen {
    pub fn new() -> FreshGen {
        FreshGen::default()
    }

    pub fn avoiding_term(t: &Term) -> FreshGen {
        let mut g = FreshGen::new();
        g.avoid(t);
        g
    }

    pub fn avoid(&mut self, t: &Term) {
        self.avoid_vars.extend(t.free_vars());
        self.avoid_ctx.extend(t.free_ctx_vars());
    }

    pub fn avoid_var(&mut self, v: VarName) {
        self.avoid_vars.insert(v);
    }

    pub fn avoid_ctx_var(&mut self, k: CtxVarName) {
        self.avoid_ctx.insert(k);
    }

    pub fn next_var(&mut self) -> VarName {
        let v = fresh_var(&self.avoid_vars);
        self.avoid_vars.insert(v.clone());
        v
    }

    pub fn next_ctx_var(&mut self) -> CtxVarName {
        let k = fresh_ctx_var(&self.avoid_ctx);
        self.avoid_ctx.insert(k.clone());
        k
    }
}

/// Terms of all three calculi. `CtxApp` is only well formed at program root or
/// as the body of an `Abort`; `check_calculus` enforces this stratification.
#[derive(Debug, Clone)]
pub enum Term {
    /// Bound variable, index into enclosing binders (innermost = 0).
    Bound(usize),
    /// Free variable.
    Var(VarName),
    /// Abstraction; the string is a printing hint, ignored by equality.
    Lam(String, Rc<Term>),
    App(Rc<Term>, Rc<Term>),
    /// The delimited-control operator shift, a value.
    Shift,
    /// The control delimiter.
    Reset(Rc<Term>),
    /// callcc, a value.
    CallCC,
    /// Abort; its body is a program.
    Abort(Rc<Term>),
    /// A term plugged into an abstract program context.
    CtxApp(CtxVarName, Rc<Term>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Bound(i), Term::Bound(j)) => i == j,
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Lam(_, a), Term::Lam(_, b)) => a == b,
            (Term::App(f, a), Term::App(g, b)) => f == g && a == b,
            (Term::Shift, Term::Shift) => true,
            (Term::Reset(a), Term::Reset(b)) => a == b,
            (Term::CallCC, Term::CallCC) => true,
            (Term::Abort(a), Term::Abort(b)) => a == b,
            (Term::CtxApp(k, a), Term::CtxApp(l, b)) => k == l && a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Term::Bound(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            Term::Var(v) => {
                1u8.hash(state);
                v.hash(state);
            }
            Term::Lam(_, b) => {
                2u8.hash(state);
                b.hash(state);
            }
            Term::App(f, a) => {
                3u8.hash(state);
                f.hash(state);
                a.hash(state);
            }
            Term::Shift => 4u8.hash(state),
            Term::Reset(b) => {
                5u8.hash(state);
                b.hash(state);
            }
            Term::CallCC => 6u8.hash(state),
            Term::Abort(b) => {
                7u8.hash(state);
                b.hash(state);
            }
            Term::CtxApp(k, b) => {
                8u8.hash(state);
                k.hash(state);
                b.hash(state);
            }
        }
    }
}

pub fn bound(i: usize) -> Rc<Term> {
    Rc::new(Term::Bound(i))
}

pub fn var(v: VarName) -> Rc<Term> {
    Rc::new(Term::Var(v))
}

pub fn lam(hint: &str, body: Rc<Term>) -> Rc<Term> {
    Rc::new(Term::Lam(hint.to_string(), body))
}

pub fn app(f: Rc<Term>, a: Rc<Term>) -> Rc<Term> {
    Rc::new(Term::App(f, a))
}

pub fn shift() -> Rc<Term> {
    Rc::new(Term::Shift)
}

pub fn reset(t: Rc<Term>) -> Rc<Term> {
    Rc::new(Term::Reset(t))
}

pub fn callcc() -> Rc<Term> {
    Rc::new(Term::CallCC)
}

pub fn abort(t: Rc<Term>) -> Rc<Term> {
    Rc::new(Term::Abort(t))
}

pub fn ctx_app(k: CtxVarName, t: Rc<Term>) -> Rc<Term> {
    Rc::new(Term::CtxApp(k, t))
}

/// Alpha-equivalence. Bound variables are positional and printing hints are
/// ignored by `PartialEq`, so this is plain structural equality.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a == b
}

impl Term {
    /// Values of the given calculus: variables, abstractions, and the control
    /// operator constants of the calculus.
    pub fn is_value(&self, calc: CalculusId) -> bool {
        match self {
            Term::Var(_) | Term::Lam(_, _) => true,
            Term::Shift => calc == CalculusId::ShiftReset,
            Term::CallCC => calc == CalculusId::CallccAbort,
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut acc = BTreeSet::new();
        self.collect_free_vars(&mut acc);
        acc
    }

    fn collect_free_vars(&self, acc: &mut BTreeSet<VarName>) {
        match self {
            Term::Bound(_) | Term::Shift | Term::CallCC => {}
            Term::Var(v) => {
                acc.insert(v.clone());
            }
            Term::Lam(_, b) | Term::Reset(b) | Term::Abort(b) | Term::CtxApp(_, b) => {
                b.collect_free_vars(acc)
            }
            Term::App(f, a) => {
                f.collect_free_vars(acc);
                a.collect_free_vars(acc);
            }
        }
    }

    pub fn free_ctx_vars(&self) -> BTreeSet<CtxVarName> {
        let mut acc = BTreeSet::new();
        self.collect_free_ctx_vars(&mut acc);
        acc
    }

    fn collect_free_ctx_vars(&self, acc: &mut BTreeSet<CtxVarName>) {
        match self {
            Term::Bound(_) | Term::Var(_) | Term::Shift | Term::CallCC => {}
            Term::Lam(_, b) | Term::Reset(b) | Term::Abort(b) => b.collect_free_ctx_vars(acc),
            Term::App(f, a) => {
                f.collect_free_ctx_vars(acc);
                a.collect_free_ctx_vars(acc);
            }
            Term::CtxApp(k, b) => {
                acc.insert(k.clone());
                b.collect_free_ctx_vars(acc);
            }
        }
    }

    /// Node count, used by generators and size-bounded oracles.
    pub fn size(&self) -> usize {
        match self {
            Term::Bound(_) | Term::Var(_) | Term::Shift | Term::CallCC => 1,
            Term::Lam(_, b) | Term::Reset(b) | Term::Abort(b) | Term::CtxApp(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }
}

/// Capture-avoiding substitution of the value `v` for the free variable `x`.
/// Rejects non-value `v`: substitution in this system is value substitution.
/// Binder hints that would shadow a free name of `v` are renamed to generator
/// names so printed output stays faithful.
pub fn subst_value(
    t: &Rc<Term>,
    x: &VarName,
    v: &Rc<Term>,
    calc: CalculusId,
) -> Result<Rc<Term>, String> {
    if !v.is_value(calc) {
        return Err(format!(
            "substitution requires a value, got a non-value for `{x}`"
        ));
    }
    Ok(subst_free(t, x, v))
}

/// Substitution of a locally closed term for a free variable. Bound variables
/// are indices, so no capture is possible; only printing hints are freshened.
pub fn subst_free(t: &Rc<Term>, x: &VarName, v: &Rc<Term>) -> Rc<Term> {
    if !t.free_vars().contains(x) {
        return t.clone();
    }
    let v_free = v.free_vars();
    go(t, x, v, &v_free)
}

fn go(t: &Rc<Term>, x: &VarName, v: &Rc<Term>, v_free: &BTreeSet<VarName>) -> Rc<Term> {
    match &**t {
        Term::Bound(_) | Term::Shift | Term::CallCC => t.clone(),
        Term::Var(y) => {
            if y == x {
                v.clone()
            } else {
                t.clone()
            }
        }
        Term::Lam(h, b) => {
            if !b.free_vars().contains(x) {
                return t.clone();
            }
            let b2 = go(b, x, v, v_free);
            let hint_name = VarName::new(h).ok();
            let hint = match hint_name {
                Some(n) if v_free.contains(&n) => {
                    let mut avoid = b2.free_vars();
                    avoid.extend(v_free.iter().cloned());
                    avoid.insert(x.clone());
                    fresh_var(&avoid).as_str().to_string()
                }
                _ => h.clone(),
            };
            Rc::new(Term::Lam(hint, b2))
        }
        Term::App(f, a) => app(go(f, x, v, v_free), go(a, x, v, v_free)),
        Term::Reset(b) => reset(go(b, x, v, v_free)),
        Term::Abort(b) => abort(go(b, x, v, v_free)),
        Term::CtxApp(k, b) => ctx_app(k.clone(), go(b, x, v, v_free)),
    }
}

/// Instantiate the outermost binder of a lambda body with a locally closed term.
pub fn open(body: &Rc<Term>, arg: &Rc<Term>) -> Rc<Term> {
    open_at(body, 0, arg)
}

fn open_at(t: &Rc<Term>, depth: usize, arg: &Rc<Term>) -> Rc<Term> {
    match &**t {
        Term::Bound(i) => {
            if *i == depth {
                arg.clone()
            } else {
                t.clone()
            }
        }
        Term::Var(_) | Term::Shift | Term::CallCC => t.clone(),
        Term::Lam(h, b) => Rc::new(Term::Lam(h.clone(), open_at(b, depth + 1, arg))),
        Term::App(f, a) => app(open_at(f, depth, arg), open_at(a, depth, arg)),
        Term::Reset(b) => reset(open_at(b, depth, arg)),
        Term::Abort(b) => abort(open_at(b, depth, arg)),
        Term::CtxApp(k, b) => ctx_app(k.clone(), open_at(b, depth, arg)),
    }
}

/// Abstract the free variable `x` as the outermost binder index. Used by the
/// parser when building lambdas.
pub fn close(t: &Rc<Term>, x: &VarName) -> Rc<Term> {
    close_at(t, 0, x)
}

fn close_at(t: &Rc<Term>, depth: usize, x: &VarName) -> Rc<Term> {
    match &**t {
        Term::Bound(_) | Term::Shift | Term::CallCC => t.clone(),
        Term::Var(y) => {
            if y == x {
                bound(depth)
            } else {
                t.clone()
            }
        }
        Term::Lam(h, b) => Rc::new(Term::Lam(h.clone(), close_at(b, depth + 1, x))),
        Term::App(f, a) => app(close_at(f, depth, x), close_at(a, depth, x)),
        Term::Reset(b) => reset(close_at(b, depth, x)),
        Term::Abort(b) => abort(close_at(b, depth, x)),
        Term::CtxApp(k, b) => ctx_app(k.clone(), close_at(b, depth, x)),
    }
}

/// Rename a free variable throughout a term.
pub fn rename_var(t: &Rc<Term>, from: &VarName, to: &VarName) -> Rc<Term> {
    subst_free(t, from, &var(to.clone()))
}

/// Rename a free context variable throughout a term.
pub fn rename_ctx_var(t: &Rc<Term>, from: &CtxVarName, to: &CtxVarName) -> Rc<Term> {
    match &**t {
        Term::Bound(_) | Term::Var(_) | Term::Shift | Term::CallCC => t.clone(),
        Term::Lam(h, b) => Rc::new(Term::Lam(h.clone(), rename_ctx_var(b, from, to))),
        Term::App(f, a) => app(rename_ctx_var(f, from, to), rename_ctx_var(a, from, to)),
        Term::Reset(b) => reset(rename_ctx_var(b, from, to)),
        Term::Abort(b) => abort(rename_ctx_var(b, from, to)),
        Term::CtxApp(k, b) => {
            let k2 = if k == from { to.clone() } else { k.clone() };
            ctx_app(k2, rename_ctx_var(b, from, to))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityError(pub String);

impl fmt::Display for ValidityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "calculus validity: {}", self.0)
    }
}

/// Checks that a term only uses the constructs of `calc`, that `CtxApp` occurs
/// only at program root or directly as an Abort body, and that every bound
/// index is in scope.
pub fn check_calculus(t: &Term, calc: CalculusId) -> Result<(), ValidityError> {
    check_at(t, calc, true, 0)
}

fn check_at(
    t: &Term,
    calc: CalculusId,
    program_pos: bool,
    depth: usize,
) -> Result<(), ValidityError> {
    match t {
        Term::Bound(i) => {
            if *i >= depth {
                Err(ValidityError(format!("bound index {i} out of scope")))
            } else {
                Ok(())
            }
        }
        Term::Var(_) => Ok(()),
        Term::Lam(_, b) => check_at(b, calc, false, depth + 1),
        Term::App(f, a) => {
            check_at(f, calc, false, depth)?;
            check_at(a, calc, false, depth)
        }
        Term::Shift => match calc {
            CalculusId::ShiftReset => Ok(()),
            _ => Err(ValidityError(format!(
                "shift is not part of the {calc} calculus"
            ))),
        },
        Term::Reset(b) => match calc {
            CalculusId::ShiftReset => check_at(b, calc, false, depth),
            _ => Err(ValidityError(format!(
                "reset is not part of the {calc} calculus"
            ))),
        },
        Term::CallCC => match calc {
            CalculusId::CallccAbort => Ok(()),
            _ => Err(ValidityError(format!(
                "callcc is not part of the {calc} calculus"
            ))),
        },
        Term::Abort(b) => match calc {
            CalculusId::CallccAbort => check_at(b, calc, true, depth),
            _ => Err(ValidityError(format!(
                "abort is not part of the {calc} calculus"
            ))),
        },
        Term::CtxApp(k, b) => {
            if calc != CalculusId::CallccAbort {
                return Err(ValidityError(format!(
                    "context application `{k}[...]` is not part of the {calc} calculus"
                )));
            }
            if !program_pos {
                return Err(ValidityError(format!(
                    "context application `{k}[...]` may only appear at program root or as an abort body"
                )));
            }
            check_at(b, calc, false, depth)
        }
    }
}
