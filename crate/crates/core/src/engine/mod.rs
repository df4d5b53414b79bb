//! Candidate relations, up-to-technique closures, and the diacritical
//! progress check.

pub mod closure;
pub mod relation;
pub mod sexp;
pub mod technique;
pub mod trace;
pub mod verify;

pub use closure::{Proof, Searcher};
pub use relation::{
    match_modulo_fresh, schematize, FreshName, PairOrigin, RelPair, Relation, Renaming, SchemPair,
};
pub use technique::{Technique, TechniqueSet};
pub use verify::{
    auto_prove, distinguish, replay_evidence, verify_bisimulation_up_to, witness_relation,
    Discharge, Engine, EngineConfig, EngineMode, Evidence, EvidenceStep, ObTrace, PairOutcome,
    PairTrace, RunReport, Verdict,
};
