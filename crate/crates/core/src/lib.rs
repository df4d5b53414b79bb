//! Eager normal forms and normal-form bisimulation checking for three
//! call-by-value calculi: the plain lambda calculus, the lambda calculus with
//! the delimited-control operators shift and reset, and the lambda calculus
//! with callcc and abort.
//!
//! The crate provides the shared syntax and reduction machinery, classifiers
//! for eager normal forms (values, open stuck, control-stuck and context-stuck
//! terms), and an engine that checks candidate relations against the
//! normal-form bisimulation conditions up to a selected set of strong and
//! regular techniques.

pub mod callcc;
pub mod engine;
pub mod gen;
pub mod lambda;
pub mod machine;
pub mod obligations;
pub mod parse;
pub mod print;
pub mod selftest;
pub mod shift_reset;
pub mod syntax;

pub use engine::{Relation, TechniqueSet, Verdict};
pub use machine::{eval, EvalOutcome, NormalForm};
pub use parse::parse_term;
pub use print::print_term;
pub use syntax::{alpha_eq, CalculusId, Term};
