//! Printing terms back to the concrete grammar. `parse_term(print_term(t))`
//! is alpha-equal to `t`; binder hints that would clash with a free variable
//! or an enclosing binder are replaced by generator names.

use std::collections::BTreeSet;
use std::rc::Rc;

use crate::syntax::{fresh_var, Term, VarName};

#[derive(Clone, Copy, PartialEq)]
enum Pos {
    Top,
    Fun,
    Arg,
}

pub fn print_term(t: &Rc<Term>) -> String {
    let mut out = String::new();
    let mut env: Vec<String> = Vec::new();
    go(t, Pos::Top, &mut env, &mut out);
    out
}

fn pick_binder(hint: &str, avoid: &BTreeSet<String>) -> String {
    if VarName::new(hint).is_ok() && !avoid.contains(hint) {
        return hint.to_string();
    }
    let mut names: BTreeSet<VarName> = BTreeSet::new();
    for a in avoid {
        if let Ok(n) = VarName::new(a) {
            names.insert(n);
        }
    }
    fresh_var(&names).as_str().to_string()
}

// Enclosing binder names referenced from inside this subterm through indices
// that cross `depth` binders.
fn outer_refs(t: &Term, depth: usize, env: &[String], acc: &mut BTreeSet<String>) {
    match t {
        Term::Bound(i) => {
            if *i >= depth {
                if let Some(name) = env.get(env.len().wrapping_sub(1 + (i - depth))) {
                    acc.insert(name.clone());
                }
            }
        }
        Term::Var(_) | Term::Shift | Term::CallCC => {}
        Term::Lam(_, b) => outer_refs(b, depth + 1, env, acc),
        Term::App(f, a) => {
            outer_refs(f, depth, env, acc);
            outer_refs(a, depth, env, acc);
        }
        Term::Reset(b) | Term::Abort(b) | Term::CtxApp(_, b) => outer_refs(b, depth, env, acc),
    }
}

fn go(t: &Rc<Term>, pos: Pos, env: &mut Vec<String>, out: &mut String) {
    match &**t {
        Term::Bound(i) => {
            let name = env
                .get(env.len().wrapping_sub(1 + *i))
                .cloned()
                .unwrap_or_else(|| format!("?{i}"));
            out.push_str(&name);
        }
        Term::Var(v) => out.push_str(v.as_str()),
        Term::Shift => out.push('S'),
        Term::CallCC => out.push('K'),
        Term::Reset(b) => {
            out.push('<');
            go(b, Pos::Top, env, out);
            out.push('>');
        }
        Term::Abort(b) => {
            out.push_str("A(");
            go(b, Pos::Top, env, out);
            out.push(')');
        }
        Term::CtxApp(k, b) => {
            out.push_str(k.as_str());
            out.push('[');
            go(b, Pos::Top, env, out);
            out.push(']');
        }
        Term::App(f, a) => {
            let parens = pos == Pos::Arg;
            if parens {
                out.push('(');
            }
            go(f, Pos::Fun, env, out);
            out.push(' ');
            go(a, Pos::Arg, env, out);
            if parens {
                out.push(')');
            }
        }
        Term::Lam(_, _) => {
            let parens = pos != Pos::Top;
            if parens {
                out.push('(');
            }
            // a binder name must not capture a free variable or an enclosing
            // binder that is still referenced from inside this lambda
            let mut avoid: BTreeSet<String> = t
                .free_vars()
                .iter()
                .map(|v| v.as_str().to_string())
                .collect();
            outer_refs(t, 0, env, &mut avoid);
            // collapse nested binders: \x y. t
            let mut binders = Vec::new();
            let mut cur = t.clone();
            while let Term::Lam(hint, body) = &*cur {
                let name = pick_binder(hint, &avoid);
                avoid.insert(name.clone());
                binders.push(name.clone());
                env.push(name);
                cur = body.clone();
            }
            out.push('\\');
            out.push_str(&binders.join(" "));
            out.push_str(". ");
            go(&cur, Pos::Top, env, out);
            for _ in &binders {
                env.pop();
            }
            if parens {
                out.push(')');
            }
        }
    }
}
