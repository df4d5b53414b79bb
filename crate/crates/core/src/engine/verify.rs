//! The diacritical progress check: every pair of the candidate relation is
//! evaluated to normal forms and its test obligations are discharged against
//! the technique closure — passive obligations with the strong subset only,
//! active ones with the full set. An obligation that the closure search cannot
//! discharge is registered as a derived schematic pair and checked in turn;
//! the registered pairs extend the candidate, so re-encounters discharge by
//! matching (the coinductive knot). A normal-form mismatch with both sides
//! fully evaluated is evidence of non-bisimilarity.

use std::rc::Rc;

use crate::engine::closure::{Proof, Searcher};
use crate::engine::relation::{
    match_modulo_fresh, schematize, FreshName, PairOrigin, RelPair, Relation, SchemPair,
};
use crate::engine::technique::TechniqueSet;
use crate::machine::{eval, EvalOutcome, NormalForm, StepRule};
use crate::obligations::{obligations, ObKind};
use crate::print::print_term;
use crate::syntax::{
    alpha_eq, ctx_app, rename_ctx_var, rename_var, CalculusId, CtxVarName, FreshGen, Term, VarName,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineMode {
    /// Discharge obligations with the technique closure, registering leftovers.
    Verify,
    /// Expand obligations only, hunting for a normal-form mismatch.
    Distinguish,
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub calc: CalculusId,
    pub ts: TechniqueSet,
    pub fuel: usize,
    pub depth: usize,
    pub max_pairs: usize,
    /// Treat one side diverging (fuel exhausted) while the other normalizes
    /// as a mismatch instead of Inconclusive. Off by default.
    pub divergence_is_distinct: bool,
    /// Set when `--unsafe` enlarged the strong subset; watermarks the verdict.
    pub unsafe_strong: bool,
    pub mode: EngineMode,
}

impl EngineConfig {
    pub fn new(calc: CalculusId) -> EngineConfig {
        EngineConfig {
            calc,
            ts: TechniqueSet::default_for(calc),
            fuel: 1000,
            depth: 6,
            max_pairs: 32,
            divergence_is_distinct: false,
            unsafe_strong: false,
            mode: EngineMode::Verify,
        }
    }
}

/// How one obligation was discharged.
#[derive(Debug, Clone)]
pub enum Discharge {
    Proof(Proof),
    /// Added as a derived pair with this id; checked later in the worklist.
    Registered(usize),
    /// Matched an already-known schematic pair.
    CoInduction(usize),
    /// Registration bound hit; verification is inconclusive.
    Exhausted(&'static str),
}

#[derive(Debug, Clone)]
pub struct ObTrace {
    pub kind: ObKind,
    pub rule: String,
    pub lhs: Rc<Term>,
    pub rhs: Rc<Term>,
    pub discharge: Discharge,
}

#[derive(Debug, Clone)]
pub enum PairOutcome {
    /// Both sides were already normal forms; each obligation discharged.
    Obligations(Vec<ObTrace>),
    /// At least one side reduced; the pair of reached normal forms is the
    /// active reduction-clause goal.
    ActiveGoal(ObTrace),
    /// Normal forms do not match: evidence of non-bisimilarity.
    Mismatch(String),
    /// Fuel ran out on `side` (lhs / rhs / both).
    FuelOut(&'static str),
}

#[derive(Debug, Clone)]
pub struct PairTrace {
    pub pair: usize,
    pub lhs: Rc<Term>,
    pub rhs: Rc<Term>,
    pub steps_l: Vec<(StepRule, Rc<Term>)>,
    pub steps_r: Vec<(StepRule, Rc<Term>)>,
    pub nf_l: Option<NormalForm>,
    pub nf_r: Option<NormalForm>,
    pub outcome: PairOutcome,
}

#[derive(Debug, Clone)]
pub struct EvidenceStep {
    pub pair: usize,
    /// Which test rule introduced this pair ("given" at the root,
    /// "reduction" for an active reduction-clause goal).
    pub rule: String,
    pub lhs: Rc<Term>,
    pub rhs: Rc<Term>,
}

/// A replayable distinguishing trace: a chain of pairs from a given pair to a
/// pair whose normal forms mismatch.
#[derive(Debug, Clone)]
pub struct Evidence {
    pub calc: CalculusId,
    pub steps: Vec<EvidenceStep>,
    pub mismatch: String,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Verified {
        unsafe_used: bool,
    },
    Failed {
        pair: usize,
        detail: String,
        evidence: Option<Evidence>,
    },
    NotBisimilar {
        evidence: Evidence,
    },
    Inconclusive {
        reason: String,
    },
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Verified { .. } => 0,
            Verdict::Failed { .. } | Verdict::NotBisimilar { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
        }
    }

    pub fn headline(&self) -> String {
        match self {
            Verdict::Verified { unsafe_used: false } => "VERIFIED".to_string(),
            Verdict::Verified { unsafe_used: true } => "UNSAFE-VERIFIED".to_string(),
            Verdict::Failed { detail, .. } => format!("FAILED: {detail}"),
            Verdict::NotBisimilar { evidence } => {
                format!("NOT BISIMILAR: {}", evidence.mismatch)
            }
            Verdict::Inconclusive { reason } => format!("INCONCLUSIVE: {reason}"),
        }
    }
}

pub struct RunReport {
    pub verdict: Verdict,
    pub traces: Vec<PairTrace>,
    pub pairs: Vec<SchemPair>,
}

pub struct Engine {
    pub cfg: EngineConfig,
    pairs: Vec<SchemPair>,
    given: usize,
}

impl Engine {
    pub fn new(cfg: EngineConfig, given_pairs: Vec<RelPair>) -> Engine {
        let pairs = given_pairs
            .into_iter()
            .enumerate()
            .map(|(i, pair)| SchemPair {
                id: i,
                pair,
                origin: PairOrigin::Given(i),
                generation: 0,
            })
            .collect::<Vec<_>>();
        let given = pairs.len();
        Engine { cfg, pairs, given }
    }

    pub fn run(mut self) -> RunReport {
        let mut traces: Vec<PairTrace> = Vec::new();
        let mut idx = 0;
        while idx < self.pairs.len() {
            let trace = self.check_pair(idx);
            traces.push(trace);
            idx += 1;
        }
        let verdict = self.assemble_verdict(&traces);
        RunReport {
            verdict,
            traces,
            pairs: self.pairs,
        }
    }

    fn assemble_verdict(&self, traces: &[PairTrace]) -> Verdict {
        // a genuine mismatch dominates; otherwise any bound hit is inconclusive
        for t in traces {
            if let PairOutcome::Mismatch(detail) = &t.outcome {
                let evidence = self.build_evidence(traces, t.pair, detail.clone());
                return Verdict::Failed {
                    pair: t.pair,
                    detail: detail.clone(),
                    evidence: Some(evidence),
                };
            }
        }
        for t in traces {
            match &t.outcome {
                PairOutcome::FuelOut(side) => {
                    return Verdict::Inconclusive {
                        reason: format!("fuel exhausted on {side} of pair {}", t.pair),
                    }
                }
                PairOutcome::Obligations(obs) => {
                    for ob in obs {
                        if let Discharge::Exhausted(which) = &ob.discharge {
                            return Verdict::Inconclusive {
                                reason: format!("{which} bound hit at pair {}", t.pair),
                            };
                        }
                    }
                }
                PairOutcome::ActiveGoal(ob) => {
                    if let Discharge::Exhausted(which) = &ob.discharge {
                        return Verdict::Inconclusive {
                            reason: format!("{which} bound hit at pair {}", t.pair),
                        };
                    }
                }
                PairOutcome::Mismatch(_) => unreachable!(),
            }
        }
        Verdict::Verified {
            unsafe_used: self.cfg.unsafe_strong,
        }
    }

    fn build_evidence(&self, traces: &[PairTrace], pair: usize, mismatch: String) -> Evidence {
        let mut chain = Vec::new();
        let mut cur = pair;
        loop {
            let sp = &self.pairs[cur];
            let trace = &traces[cur];
            let rule = match &sp.origin {
                PairOrigin::Given(_) => "given".to_string(),
                PairOrigin::Derived { rule, .. } => rule.clone(),
            };
            chain.push(EvidenceStep {
                pair: cur,
                rule,
                lhs: trace.lhs.clone(),
                rhs: trace.rhs.clone(),
            });
            match &sp.origin {
                PairOrigin::Given(_) => break,
                PairOrigin::Derived { parent, .. } => cur = *parent,
            }
        }
        chain.reverse();
        Evidence {
            calc: self.cfg.calc,
            steps: chain,
            mismatch,
        }
    }

    fn check_pair(&mut self, idx: usize) -> PairTrace {
        let sp = self.pairs[idx].clone();
        let mut gen = FreshGen::new();
        gen.avoid(&sp.pair.lhs);
        gen.avoid(&sp.pair.rhs);
        let (lhs, rhs, _) = sp.pair.instantiate(&mut gen);
        let out_l = eval(&lhs, self.cfg.calc, self.cfg.fuel);
        let out_r = eval(&rhs, self.cfg.calc, self.cfg.fuel);
        let mut trace = PairTrace {
            pair: idx,
            lhs: lhs.clone(),
            rhs: rhs.clone(),
            steps_l: out_l.steps().to_vec(),
            steps_r: out_r.steps().to_vec(),
            nf_l: None,
            nf_r: None,
            outcome: PairOutcome::FuelOut("both"),
        };
        let (nf_l, nf_r) = match (&out_l, &out_r) {
            (EvalOutcome::Evaluated { nf: a, .. }, EvalOutcome::Evaluated { nf: b, .. }) => {
                (a.clone(), b.clone())
            }
            (EvalOutcome::FuelExhausted { .. }, EvalOutcome::FuelExhausted { .. }) => {
                trace.outcome = PairOutcome::FuelOut("both");
                return trace;
            }
            (EvalOutcome::FuelExhausted { .. }, EvalOutcome::Evaluated { nf, .. }) => {
                trace.nf_r = Some(nf.clone());
                trace.outcome = if self.cfg.divergence_is_distinct {
                    PairOutcome::Mismatch(format!(
                        "lhs exceeds fuel while rhs evaluates to a {} normal form",
                        nf.kind()
                    ))
                } else {
                    PairOutcome::FuelOut("lhs")
                };
                return trace;
            }
            (EvalOutcome::Evaluated { nf, .. }, EvalOutcome::FuelExhausted { .. }) => {
                trace.nf_l = Some(nf.clone());
                trace.outcome = if self.cfg.divergence_is_distinct {
                    PairOutcome::Mismatch(format!(
                        "rhs exceeds fuel while lhs evaluates to a {} normal form",
                        nf.kind()
                    ))
                } else {
                    PairOutcome::FuelOut("rhs")
                };
                return trace;
            }
        };
        trace.nf_l = Some(nf_l.clone());
        trace.nf_r = Some(nf_r.clone());
        let reduced = !trace.steps_l.is_empty() || !trace.steps_r.is_empty();
        let obs = match obligations(self.cfg.calc, &nf_l, &nf_r, &mut gen) {
            Err(mm) => {
                trace.outcome = PairOutcome::Mismatch(mm.to_string());
                return trace;
            }
            Ok(obs) => obs,
        };
        if reduced {
            // Active reduction clause: relate the reached normal forms. When
            // one side was already a normal form its shape clause applies as
            // well, so the normal-form pair is registered outright (its own
            // check enforces the passive/active discipline of that clause)
            // instead of being discharged in the full closure.
            let goal_l = nf_l.as_term();
            let goal_r = nf_r.as_term();
            let mixed = trace.steps_l.is_empty() || trace.steps_r.is_empty();
            let discharge = if mixed && self.cfg.mode == EngineMode::Verify {
                self.register(&goal_l, &goal_r, idx, "reduction")
            } else {
                self.discharge(ObKind::Active, &goal_l, &goal_r, idx, "reduction", &mut gen)
            };
            trace.outcome = PairOutcome::ActiveGoal(ObTrace {
                kind: ObKind::Active,
                rule: "reduction".to_string(),
                lhs: goal_l,
                rhs: goal_r,
                discharge,
            });
        } else {
            let mut ob_traces = Vec::new();
            for ob in obs {
                let discharge = self.discharge(ob.kind, &ob.lhs, &ob.rhs, idx, ob.rule, &mut gen);
                ob_traces.push(ObTrace {
                    kind: ob.kind,
                    rule: ob.rule.to_string(),
                    lhs: ob.lhs,
                    rhs: ob.rhs,
                    discharge,
                });
            }
            trace.outcome = PairOutcome::Obligations(ob_traces);
        }
        trace
    }

    fn discharge(
        &mut self,
        kind: ObKind,
        lhs: &Rc<Term>,
        rhs: &Rc<Term>,
        parent: usize,
        rule: &str,
        gen: &mut FreshGen,
    ) -> Discharge {
        match self.cfg.mode {
            EngineMode::Distinguish => {
                // identical sides can never produce a mismatch
                if alpha_eq(lhs, rhs) {
                    return Discharge::Proof(Proof::Refl);
                }
                self.register(lhs, rhs, parent, rule)
            }
            EngineMode::Verify => {
                let allowed = match kind {
                    ObKind::Passive => &self.cfg.ts.strong,
                    ObKind::Active => &self.cfg.ts.full,
                };
                let mut searcher = Searcher::new(self.cfg.calc, &self.pairs, self.cfg.fuel);
                if let Some(proof) = searcher.member(lhs, rhs, allowed, self.cfg.depth, gen) {
                    return Discharge::Proof(proof);
                }
                self.register(lhs, rhs, parent, rule)
            }
        }
    }

    fn register(&mut self, lhs: &Rc<Term>, rhs: &Rc<Term>, parent: usize, rule: &str) -> Discharge {
        // Register the evaluation endpoints, not the raw obligation: the
        // obligation is then in the closure through built-in up-to-reduction
        // (strong in all three calculi), derived pairs are in canonical form
        // for coinductive matching, and emitted witnesses stay minimal.
        let (lhs, rhs) = match (
            eval(lhs, self.cfg.calc, self.cfg.fuel),
            eval(rhs, self.cfg.calc, self.cfg.fuel),
        ) {
            (EvalOutcome::Evaluated { nf: a, .. }, EvalOutcome::Evaluated { nf: b, .. }) => {
                (a.as_term(), b.as_term())
            }
            _ => (lhs.clone(), rhs.clone()),
        };
        let (lhs, rhs) = (&lhs, &rhs);
        for sp in &self.pairs {
            if match_modulo_fresh(lhs, rhs, &sp.pair).is_some() {
                return Discharge::CoInduction(sp.id);
            }
        }
        let generation = self.pairs[parent].generation + 1;
        if generation > self.cfg.depth {
            return Discharge::Exhausted("depth");
        }
        if self.pairs.len() - self.given >= self.cfg.max_pairs {
            return Discharge::Exhausted("max-pairs");
        }
        let id = self.pairs.len();
        self.pairs.push(SchemPair {
            id,
            pair: schematize(lhs, rhs),
            origin: PairOrigin::Derived {
                parent,
                rule: rule.to_string(),
            },
            generation,
        });
        Discharge::Registered(id)
    }
}

/// Check that a candidate relation is a normal-form bisimulation up to the
/// selected techniques.
pub fn verify_bisimulation_up_to(
    rel: &Relation,
    ts: TechniqueSet,
    fuel: usize,
    depth: usize,
    divergence_is_distinct: bool,
    unsafe_strong: bool,
) -> RunReport {
    let mut cfg = EngineConfig::new(rel.calculus);
    cfg.ts = ts;
    cfg.fuel = fuel;
    cfg.depth = depth;
    cfg.divergence_is_distinct = divergence_is_distinct;
    cfg.unsafe_strong = unsafe_strong;
    cfg.max_pairs = 32 + 4 * rel.pairs.len();
    Engine::new(cfg, rel.pairs.clone()).run()
}

fn seed_pair(calc: CalculusId, lhs: &Rc<Term>, rhs: &Rc<Term>) -> RelPair {
    if calc != CalculusId::CallccAbort {
        return RelPair::closed(lhs.clone(), rhs.clone());
    }
    // programs are compared as given; terms are lifted into a fresh abstract
    // context (the testtm rule)
    if matches!(&**lhs, Term::CtxApp(_, _)) || matches!(&**rhs, Term::CtxApp(_, _)) {
        return RelPair::closed(lhs.clone(), rhs.clone());
    }
    let mut used = lhs.free_ctx_vars();
    used.extend(rhs.free_ctx_vars());
    let mut name = CtxVarName::new("k").unwrap();
    let mut i = 0;
    while used.contains(&name) {
        name = CtxVarName::new(&format!("k{i}")).unwrap();
        i += 1;
    }
    RelPair {
        lhs: ctx_app(name.clone(), lhs.clone()),
        rhs: ctx_app(name.clone(), rhs.clone()),
        fresh: vec![FreshName::Ctx(name)],
    }
}

/// Saturation prover: start from one goal pair, register every undischarged
/// obligation as a new schematic pair, and re-check until the candidate
/// closes, a mismatch is found, or the pair bound is hit. On success the
/// accumulated relation is the witness.
#[allow(clippy::too_many_arguments)]
pub fn auto_prove(
    calc: CalculusId,
    lhs: &Rc<Term>,
    rhs: &Rc<Term>,
    ts: TechniqueSet,
    fuel: usize,
    depth: usize,
    max_pairs: usize,
    divergence_is_distinct: bool,
) -> (RunReport, Option<Relation>) {
    let mut cfg = EngineConfig::new(calc);
    cfg.ts = ts;
    cfg.fuel = fuel;
    cfg.depth = depth;
    cfg.max_pairs = max_pairs;
    cfg.divergence_is_distinct = divergence_is_distinct;
    let seed = seed_pair(calc, lhs, rhs);
    let mut report = Engine::new(cfg, vec![seed]).run();
    // mismatches from the prover are reported as non-bisimilarity
    if let Verdict::Failed {
        evidence: Some(e), ..
    } = &report.verdict
    {
        report.verdict = Verdict::NotBisimilar {
            evidence: e.clone(),
        };
    }
    let witness = match &report.verdict {
        Verdict::Verified { .. } => Some(witness_relation(calc, &report.pairs)),
        _ => None,
    };
    (report, witness)
}

/// Breadth-first obligation expansion with concrete fresh names until a
/// normal-form mismatch is found.
pub fn distinguish(
    calc: CalculusId,
    lhs: &Rc<Term>,
    rhs: &Rc<Term>,
    fuel: usize,
    depth: usize,
    max_pairs: usize,
    divergence_is_distinct: bool,
) -> RunReport {
    let mut cfg = EngineConfig::new(calc);
    cfg.fuel = fuel;
    cfg.depth = depth;
    cfg.max_pairs = max_pairs;
    cfg.divergence_is_distinct = divergence_is_distinct;
    cfg.mode = EngineMode::Distinguish;
    let seed = seed_pair(calc, lhs, rhs);
    let mut report = Engine::new(cfg, vec![seed]).run();
    report.verdict = match report.verdict {
        Verdict::Failed {
            evidence: Some(e), ..
        } => Verdict::NotBisimilar { evidence: e },
        Verdict::Failed { detail, pair, .. } => Verdict::Failed {
            pair,
            detail,
            evidence: None,
        },
        Verdict::Verified { .. } => Verdict::Inconclusive {
            reason: "no mismatch found within bounds".to_string(),
        },
        other => other,
    };
    report
}

/// Rename generator-named fresh parameters to plain letters for emission.
pub fn witness_relation(calc: CalculusId, pairs: &[SchemPair]) -> Relation {
    let var_pool = || {
        ('a'..='h')
            .map(|c| c.to_string())
            .chain((1..).map(|i| format!("a{i}")))
    };
    let ctx_pool = || {
        ["k", "w", "u"]
            .iter()
            .map(|s| s.to_string())
            .chain((1..).map(|i| format!("k{i}")))
    };
    let mut out = Vec::new();
    for sp in pairs {
        let mut lhs = sp.pair.lhs.clone();
        let mut rhs = sp.pair.rhs.clone();
        let mut fresh = Vec::new();
        let mut used_vars: std::collections::BTreeSet<VarName> = lhs.free_vars();
        used_vars.extend(rhs.free_vars());
        let mut used_ctx: std::collections::BTreeSet<CtxVarName> = lhs.free_ctx_vars();
        used_ctx.extend(rhs.free_ctx_vars());
        for f in &sp.pair.fresh {
            match f {
                FreshName::Var(v) if v.is_generated() => {
                    let name = var_pool()
                        .map(|s| VarName::new(&s).unwrap())
                        .find(|n| !used_vars.contains(n))
                        .unwrap();
                    used_vars.insert(name.clone());
                    lhs = rename_var(&lhs, v, &name);
                    rhs = rename_var(&rhs, v, &name);
                    fresh.push(FreshName::Var(name));
                }
                FreshName::Ctx(k) if k.is_generated() => {
                    let name = ctx_pool()
                        .map(|s| CtxVarName::new(&s).unwrap())
                        .find(|n| !used_ctx.contains(n))
                        .unwrap();
                    used_ctx.insert(name.clone());
                    lhs = rename_ctx_var(&lhs, k, &name);
                    rhs = rename_ctx_var(&rhs, k, &name);
                    fresh.push(FreshName::Ctx(name));
                }
                other => fresh.push(other.clone()),
            }
        }
        out.push(RelPair { lhs, rhs, fresh });
    }
    Relation {
        calculus: calc,
        pairs: out,
    }
}

/// Re-run a distinguishing trace: every step's sides must evaluate, each
/// derived step must be one of its parent's obligations (modulo renaming of
/// session names), and the final normal forms must mismatch as recorded.
pub fn replay_evidence(evidence: &Evidence, fuel: usize) -> Result<(), String> {
    let calc = evidence.calc;
    for (i, step) in evidence.steps.iter().enumerate() {
        let out_l = eval(&step.lhs, calc, fuel);
        let out_r = eval(&step.rhs, calc, fuel);
        let (nf_l, nf_r) = match (out_l, out_r) {
            (EvalOutcome::Evaluated { nf: a, .. }, EvalOutcome::Evaluated { nf: b, .. }) => (a, b),
            _ => {
                if i + 1 == evidence.steps.len() && evidence.mismatch.contains("exceeds fuel") {
                    return Ok(());
                }
                return Err(format!("step {i}: evaluation did not terminate"));
            }
        };
        let mut gen = FreshGen::new();
        gen.avoid(&step.lhs);
        gen.avoid(&step.rhs);
        let obs = obligations(calc, &nf_l, &nf_r, &mut gen);
        if i + 1 == evidence.steps.len() {
            match obs {
                Err(mm) => {
                    if mm.to_string() == evidence.mismatch {
                        return Ok(());
                    }
                    return Err(format!(
                        "final mismatch differs: recorded `{}`, replayed `{mm}`",
                        evidence.mismatch
                    ));
                }
                Ok(_) => return Err("final step does not mismatch on replay".to_string()),
            }
        }
        let next = &evidence.steps[i + 1];
        let mut candidates: Vec<(Rc<Term>, Rc<Term>)> = vec![(nf_l.as_term(), nf_r.as_term())];
        if let Ok(obs) = obs {
            for ob in obs {
                // derived pairs are stored in evaluated form
                if let (
                    EvalOutcome::Evaluated { nf: a, .. },
                    EvalOutcome::Evaluated { nf: b, .. },
                ) = (eval(&ob.lhs, calc, fuel), eval(&ob.rhs, calc, fuel))
                {
                    candidates.push((a.as_term(), b.as_term()));
                }
                candidates.push((ob.lhs, ob.rhs));
            }
        }
        let linked = candidates.iter().any(|(l, r)| {
            let schem = schematize(l, r);
            match_modulo_fresh(&next.lhs, &next.rhs, &schem).is_some()
        });
        if !linked {
            return Err(format!(
                "step {}: pair ({}, {}) is not an obligation of its parent",
                i + 1,
                print_term(&next.lhs),
                print_term(&next.rhs)
            ));
        }
    }
    Err("evidence chain ended without a mismatch".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn pt(s: &str, c: CalculusId) -> Rc<Term> {
        parse_term(s, c).unwrap()
    }

    #[test]
    fn eta_expansion_auto_proved_with_two_pair_witness() {
        let lhs = pt("\\x. x", CalculusId::Lambda);
        let rhs = pt("\\x. \\y. x y", CalculusId::Lambda);
        let ts = TechniqueSet::default_for(CalculusId::Lambda);
        let (report, witness) = auto_prove(CalculusId::Lambda, &lhs, &rhs, ts, 1000, 6, 32, false);
        assert!(
            matches!(report.verdict, Verdict::Verified { .. }),
            "{}",
            report.verdict.headline()
        );
        let witness = witness.unwrap();
        assert_eq!(witness.pairs.len(), 2);
        // the witness re-verifies
        let rerun = verify_bisimulation_up_to(
            &witness,
            TechniqueSet::default_for(CalculusId::Lambda),
            1000,
            6,
            false,
            false,
        );
        assert!(matches!(rerun.verdict, Verdict::Verified { .. }));
    }

    #[test]
    fn identity_vs_self_application_not_bisimilar() {
        let lhs = pt("\\x. x", CalculusId::Lambda);
        let rhs = pt("\\x. x x", CalculusId::Lambda);
        let ts = TechniqueSet::default_for(CalculusId::Lambda);
        let (report, witness) = auto_prove(CalculusId::Lambda, &lhs, &rhs, ts, 1000, 6, 32, false);
        let Verdict::NotBisimilar { evidence } = &report.verdict else {
            panic!("{}", report.verdict.headline());
        };
        assert!(witness.is_none());
        replay_evidence(evidence, 1000).unwrap();
    }

    #[test]
    fn distinguish_agrees_with_prover_on_bisimilar_inputs() {
        let lhs = pt("\\x. x", CalculusId::Lambda);
        let rhs = pt("\\x. \\y. x y", CalculusId::Lambda);
        let report = distinguish(CalculusId::Lambda, &lhs, &rhs, 1000, 6, 64, false);
        assert!(matches!(report.verdict, Verdict::Inconclusive { .. }));
    }

    #[test]
    fn distinguish_free_variables() {
        let lhs = pt("y", CalculusId::Lambda);
        let rhs = pt("z", CalculusId::Lambda);
        let report = distinguish(CalculusId::Lambda, &lhs, &rhs, 100, 4, 16, false);
        let Verdict::NotBisimilar { evidence } = &report.verdict else {
            panic!("{}", report.verdict.headline());
        };
        assert!(evidence.mismatch.contains("head variables differ"));
    }

    #[test]
    fn divergence_is_inconclusive_by_default() {
        let lhs = pt("(\\x. x x) (\\x. x x)", CalculusId::Lambda);
        let rhs = pt("\\x. x", CalculusId::Lambda);
        let rel = Relation {
            calculus: CalculusId::Lambda,
            pairs: vec![RelPair::closed(lhs.clone(), rhs.clone())],
        };
        let report = verify_bisimulation_up_to(
            &rel,
            TechniqueSet::default_for(CalculusId::Lambda),
            200,
            6,
            false,
            false,
        );
        assert!(matches!(report.verdict, Verdict::Inconclusive { .. }));
        let report = verify_bisimulation_up_to(
            &rel,
            TechniqueSet::default_for(CalculusId::Lambda),
            200,
            6,
            true,
            false,
        );
        assert!(matches!(report.verdict, Verdict::Failed { .. }));
    }
}
