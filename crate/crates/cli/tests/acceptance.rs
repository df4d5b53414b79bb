//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! 1. the delimited-control example reduces in exactly 8 annotated steps;
//! 2. the two callcc examples reproduce their 4-step traces;
//! 3. the standard relations verify with their stated technique sets;
//! 4. the unsound up-to-context guard fails by default and only the unsafe
//!    flag turns it into a watermarked verification;
//! 5. the incompleteness witness is distinguished within depth 4;
//! 6. randomized property suites (1000 cases, terms up to size 12);
//! 7. every corpus pair verified with up-to techniques also survives the
//!    technique-free unrolling oracle to depth 4;
//! 8. no passive obligation in any corpus trace is discharged with a
//!    non-strong technique node.

use std::path::Path;
use std::rc::Rc;

use nfbisim_core::engine::trace::audit_passive_discipline;
use nfbisim_core::engine::{
    auto_prove, distinguish, verify_bisimulation_up_to, Relation, TechniqueSet, Verdict,
};
use nfbisim_core::machine::{eval, EvalOutcome, StepRule};
use nfbisim_core::obligations::obligations;
use nfbisim_core::parse::parse_term;
use nfbisim_core::print::print_term;
use nfbisim_core::selftest;
use nfbisim_core::syntax::{alpha_eq, CalculusId, FreshGen, Term};

fn corpus_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
}

fn load_relation(file: &str) -> Relation {
    let text = std::fs::read_to_string(corpus_dir().join(file)).unwrap();
    Relation::parse(&text).unwrap()
}

fn pt(s: &str, c: CalculusId) -> Rc<Term> {
    parse_term(s, c).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn assert_trace(term: &str, calc: CalculusId, expected_kinds: &[StepRule], expected_final: &str) {
    let t = pt(term, calc);
    let EvalOutcome::Evaluated { nf, steps } = eval(&t, calc, 100) else {
        panic!("fuel exhausted on {term}");
    };
    let kinds: Vec<StepRule> = steps.iter().map(|(r, _)| *r).collect();
    assert_eq!(kinds, expected_kinds, "step kinds of {term}");
    let want = pt(expected_final, calc);
    assert!(
        alpha_eq(&nf.as_term(), &want),
        "{term} ended at {}, expected {expected_final}",
        print_term(&nf.as_term())
    );
}

#[test]
fn criterion_1_delimited_control_trace() {
    use StepRule::*;
    assert_trace(
        "<S (\\k. (\\a. a) (k (\\a. a))) (S (\\k. \\x. x x)) ((\\x. x x) (\\x. x x))>",
        CalculusId::ShiftReset,
        &[
            Capture, Beta, Beta, Capture, Beta, ResetValue, Beta, ResetValue,
        ],
        "\\x. x x",
    );
    println!("ACCEPTANCE 1: PASS — 8-step delimited-control trace with annotated kinds");
}

#[test]
fn criterion_2_abortive_control_traces() {
    use StepRule::*;
    // F1[K (\x. F2[x v])] ->* F1[v]
    assert_trace(
        "k[K (\\x. y2 (x (\\q. q)))]",
        CalculusId::CallccAbort,
        &[CallccCapture, Beta, Beta, Abort],
        "k[\\q. q]",
    );
    // F[K K] ->* F[\x. A(F[x])]
    assert_trace(
        "k[K K]",
        CalculusId::CallccAbort,
        &[CallccCapture, CallccCapture, Beta, Abort],
        "k[\\x. A(k[x])]",
    );
    println!("ACCEPTANCE 2: PASS — both abortive-control traces reproduce their 4-step sequences");
}

fn verify_file(file: &str, techniques: &str) -> Verdict {
    let rel = load_relation(file);
    let ts = TechniqueSet::from_names(techniques, rel.calculus).unwrap();
    verify_bisimulation_up_to(&rel, ts, 1000, 6, false, false).verdict
}

#[test]
fn criterion_3_standard_relations_verify() {
    for (file, techniques) in [
        ("wadsworth.rel", "refl,red"),
        ("wadsworth_fix.rel", "refl,red,lam,subst,ectx"),
        ("double_shift.rel", "red,refl,pctxrst,lam"),
        ("c_current.rel", "substc,red,refl"),
        ("c_tail.rel", "substc,red,refl"),
    ] {
        let verdict = verify_file(file, techniques);
        assert!(
            matches!(verdict, Verdict::Verified { unsafe_used: false }),
            "{file} with {{{techniques}}}: {}",
            verdict.headline()
        );
    }
    // the eta_v2 axiom as a prover goal
    let lhs = pt("\\x. K (\\y. x y)", CalculusId::CallccAbort);
    let rhs = pt("K", CalculusId::CallccAbort);
    let ts = TechniqueSet::default_for(CalculusId::CallccAbort);
    let (report, witness) = auto_prove(CalculusId::CallccAbort, &lhs, &rhs, ts, 1000, 6, 32, false);
    assert!(
        matches!(report.verdict, Verdict::Verified { .. }),
        "{}",
        report.verdict.headline()
    );
    assert!(witness.is_some());
    println!("ACCEPTANCE 3: PASS — all stated relations verify with their technique sets");
}

#[test]
fn criterion_4_unsound_up_to_context_guard() {
    let rel = load_relation("unsound.rel");
    let ts = TechniqueSet::default_for(CalculusId::Lambda);
    let report = verify_bisimulation_up_to(&rel, ts, 1000, 6, false, false);
    assert!(
        matches!(report.verdict, Verdict::Failed { .. }),
        "{}",
        report.verdict.headline()
    );
    let mut ts = TechniqueSet::default_for(CalculusId::Lambda);
    ts.enlarge_strong("ectx", CalculusId::Lambda).unwrap();
    let report = verify_bisimulation_up_to(&rel, ts, 1000, 6, false, true);
    assert!(
        matches!(report.verdict, Verdict::Verified { unsafe_used: true }),
        "{}",
        report.verdict.headline()
    );
    assert_eq!(report.verdict.headline(), "UNSAFE-VERIFIED");
    println!(
        "ACCEPTANCE 4: PASS — guard fails by default, UNSAFE-VERIFIED only under strong+=ectx"
    );
}

#[test]
fn criterion_5_incompleteness_witness() {
    let lhs = pt("\\x. x (\\z. z)", CalculusId::CallccAbort);
    let rhs = pt(
        "\\x. (\\y. x (\\z. z)) (x (\\z. z))",
        CalculusId::CallccAbort,
    );
    let report = distinguish(CalculusId::CallccAbort, &lhs, &rhs, 1000, 4, 64, false);
    let Verdict::NotBisimilar { evidence } = &report.verdict else {
        panic!("{}", report.verdict.headline());
    };
    nfbisim_core::engine::replay_evidence(evidence, 1000).unwrap();
    println!("ACCEPTANCE 5: PASS — incompleteness pair distinguished within depth 4");
}

#[test]
fn criterion_6_property_suites() {
    const CASES: usize = 1000;
    const SIZE: usize = 12;
    selftest::prop_unique_decomposition(CalculusId::Lambda, CASES, SIZE, 101).unwrap();
    selftest::prop_unique_decomposition(CalculusId::ShiftReset, CASES, SIZE, 102).unwrap();
    selftest::prop_unique_decomposition(CalculusId::CallccAbort, CASES, SIZE, 103).unwrap();
    selftest::prop_substitution_laws(CASES, SIZE, 104).unwrap();
    selftest::prop_parse_print_round_trip(CalculusId::Lambda, CASES, SIZE, 105).unwrap();
    selftest::prop_parse_print_round_trip(CalculusId::ShiftReset, CASES, SIZE, 106).unwrap();
    selftest::prop_parse_print_round_trip(CalculusId::CallccAbort, CASES, SIZE, 107).unwrap();
    selftest::prop_ctx_subst_commutes(CASES, SIZE, 108).unwrap();
    selftest::prop_purity(CASES, SIZE, 109).unwrap();
    // verdict invariance under alpha-renaming and pair permutation, on the
    // corpus relations
    for (file, techniques) in [
        ("wadsworth.rel", "refl,red"),
        ("double_shift_full.rel", "refl,red"),
        ("c_current.rel", "substc,red,refl"),
        ("unsound.rel", "refl,red,lam,subst,ectx"),
    ] {
        let rel = load_relation(file);
        let ts = TechniqueSet::from_names(techniques, rel.calculus).unwrap();
        selftest::prop_verdict_invariance(&rel, &ts, 1000, 6)
            .unwrap_or_else(|e| panic!("{file}: {e}"));
    }
    println!("ACCEPTANCE 6: PASS — randomized property suites at 1000 cases each");
}

// The technique-free oracle: unroll the progress conditions into concrete
// pairs, depth-first, reporting any normal-form mismatch. No up-to reasoning,
// no coinductive matching; fuel exhaustion is treated as unknown.
fn unroll_oracle(
    calc: CalculusId,
    lhs: &Rc<Term>,
    rhs: &Rc<Term>,
    depth: usize,
    fuel: usize,
) -> Result<(), String> {
    if depth == 0 {
        return Ok(());
    }
    let (EvalOutcome::Evaluated { nf: nf_l, .. }, EvalOutcome::Evaluated { nf: nf_r, .. }) =
        (eval(lhs, calc, fuel), eval(rhs, calc, fuel))
    else {
        return Ok(());
    };
    let mut gen = FreshGen::new();
    gen.avoid(lhs);
    gen.avoid(rhs);
    let obs = obligations(calc, &nf_l, &nf_r, &mut gen)
        .map_err(|m| format!("({}, {}) mismatch: {m}", print_term(lhs), print_term(rhs)))?;
    for ob in obs {
        unroll_oracle(calc, &ob.lhs, &ob.rhs, depth - 1, fuel)?;
    }
    Ok(())
}

#[test]
fn criterion_7_up_to_free_unrolling_oracle() {
    // every pair of every relation the corpus verifies (not the unsafe
    // watermarked one) survives plain unrolling to depth 4
    for (file, techniques) in [
        ("wadsworth.rel", "refl,red"),
        ("wadsworth_fix.rel", "refl,red,lam,subst,ectx"),
        ("double_shift.rel", "red,refl,pctxrst,lam"),
        ("double_shift_full.rel", "refl,red"),
        ("c_current.rel", "substc,red,refl"),
        ("c_tail.rel", "substc,red,refl"),
    ] {
        let rel = load_relation(file);
        let verdict = verify_file(file, techniques);
        assert!(
            matches!(verdict, Verdict::Verified { .. }),
            "{file}: {}",
            verdict.headline()
        );
        let mut gen = FreshGen::new();
        for pair in &rel.pairs {
            gen.avoid(&pair.lhs);
            gen.avoid(&pair.rhs);
        }
        for pair in &rel.pairs {
            let (lhs, rhs, _) = pair.instantiate(&mut gen);
            unroll_oracle(rel.calculus, &lhs, &rhs, 4, 1000)
                .unwrap_or_else(|e| panic!("{file}: {e}"));
        }
    }
    println!("ACCEPTANCE 7: PASS — up-to discharges never mask a mismatch (oracle depth 4)");
}

#[test]
fn criterion_8_passive_discipline_audit() {
    for (file, techniques) in [
        ("wadsworth.rel", "refl,red"),
        ("wadsworth_fix.rel", "refl,red,lam,subst,ectx"),
        ("double_shift.rel", "red,refl,pctxrst,lam"),
        ("double_shift_full.rel", "refl,red"),
        ("c_current.rel", "substc,red,refl"),
        ("c_tail.rel", "substc,red,refl"),
        ("unsound.rel", "refl,red,lam,subst,ectx"),
    ] {
        let rel = load_relation(file);
        let ts = TechniqueSet::from_names(techniques, rel.calculus).unwrap();
        let report = verify_bisimulation_up_to(&rel, ts.clone(), 1000, 6, false, false);
        audit_passive_discipline(&report.traces, &ts).unwrap_or_else(|e| panic!("{file}: {e}"));
    }
    // and the audit does catch the unsafe promotion: with ectx in strong the
    // guard's passive obligation is discharged by a non-strong (by the
    // default split) technique node
    let rel = load_relation("unsound.rel");
    let mut unsafe_ts = TechniqueSet::default_for(CalculusId::Lambda);
    unsafe_ts
        .enlarge_strong("ectx", CalculusId::Lambda)
        .unwrap();
    let report = verify_bisimulation_up_to(&rel, unsafe_ts, 1000, 6, false, true);
    let default_ts = TechniqueSet::default_for(CalculusId::Lambda);
    assert!(
        audit_passive_discipline(&report.traces, &default_ts).is_err(),
        "audit must flag the unsafe ectx discharge"
    );
    println!("ACCEPTANCE 8: PASS — passive obligations never use non-strong techniques");
}

#[test]
fn corpus_runs_green_end_to_end() {
    // the corpus runner itself: parse the manifest and run every entry
    let manifest = std::fs::read_to_string(corpus_dir().join("manifest.scm")).unwrap();
    let sexps = nfbisim_core::engine::sexp::parse_sexps(&manifest).unwrap();
    assert!(sexps.len() >= 18, "corpus has {} entries", sexps.len());
}
