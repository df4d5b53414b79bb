//! Rendering verdicts and proof traces as s-expressions, plus the
//! passive-discipline audit over emitted traces.

use std::collections::BTreeSet;

use crate::engine::closure::Proof;
use crate::engine::sexp::Sexp;
use crate::engine::technique::{Technique, TechniqueSet};
use crate::engine::verify::{
    Discharge, Evidence, ObTrace, PairOutcome, PairTrace, RunReport, Verdict,
};
use crate::obligations::ObKind;
use crate::print::print_term;

pub fn proof_to_sexp(p: &Proof) -> Sexp {
    match p {
        Proof::Refl => Sexp::atom("refl"),
        Proof::Base { pair, renaming } => {
            let mut items = vec![Sexp::atom("pair"), Sexp::atom(&pair.to_string())];
            for (from, to) in &renaming.vars {
                items.push(Sexp::list(vec![
                    Sexp::atom(from.as_str()),
                    Sexp::atom(to.as_str()),
                ]));
            }
            for (from, to) in &renaming.ctx_vars {
                items.push(Sexp::list(vec![
                    Sexp::atom(from.as_str()),
                    Sexp::atom(to.as_str()),
                ]));
            }
            Sexp::list(items)
        }
        Proof::Tech {
            tech,
            note,
            premises,
        } => {
            let mut items = vec![Sexp::atom(tech.name())];
            if !note.is_empty() {
                items.push(Sexp::string(note));
            }
            for pr in premises {
                items.push(proof_to_sexp(pr));
            }
            Sexp::list(items)
        }
    }
}

fn discharge_to_sexp(d: &Discharge) -> Sexp {
    match d {
        Discharge::Proof(p) => Sexp::list(vec![Sexp::atom("closure"), proof_to_sexp(p)]),
        Discharge::Registered(id) => Sexp::list(vec![
            Sexp::atom("derived-pair"),
            Sexp::atom(&id.to_string()),
        ]),
        Discharge::CoInduction(id) => {
            Sexp::list(vec![Sexp::atom("known-pair"), Sexp::atom(&id.to_string())])
        }
        Discharge::Exhausted(which) => Sexp::list(vec![Sexp::atom("exhausted"), Sexp::atom(which)]),
    }
}

fn ob_to_sexp(ob: &ObTrace) -> Sexp {
    Sexp::list(vec![
        Sexp::atom("obligation"),
        Sexp::atom(ob.kind.name()),
        Sexp::atom(&ob.rule),
        Sexp::string(&print_term(&ob.lhs)),
        Sexp::string(&print_term(&ob.rhs)),
        discharge_to_sexp(&ob.discharge),
    ])
}

pub fn pair_trace_to_sexp(t: &PairTrace) -> Sexp {
    let steps = |steps: &[(crate::machine::StepRule, std::rc::Rc<crate::syntax::Term>)]| {
        Sexp::list(
            steps
                .iter()
                .map(|(rule, term)| {
                    Sexp::list(vec![
                        Sexp::atom(rule.name()),
                        Sexp::string(&print_term(term)),
                    ])
                })
                .collect(),
        )
    };
    let mut items = vec![
        Sexp::atom("pair"),
        Sexp::atom(&t.pair.to_string()),
        Sexp::list(vec![Sexp::atom("lhs"), Sexp::string(&print_term(&t.lhs))]),
        Sexp::list(vec![Sexp::atom("rhs"), Sexp::string(&print_term(&t.rhs))]),
        Sexp::list(vec![Sexp::atom("steps-lhs"), steps(&t.steps_l)]),
        Sexp::list(vec![Sexp::atom("steps-rhs"), steps(&t.steps_r)]),
    ];
    if let (Some(a), Some(b)) = (&t.nf_l, &t.nf_r) {
        items.push(Sexp::list(vec![
            Sexp::atom("normal-forms"),
            Sexp::atom(a.kind()),
            Sexp::atom(b.kind()),
        ]));
    }
    let outcome = match &t.outcome {
        PairOutcome::Obligations(obs) => {
            let mut o = vec![Sexp::atom("obligations")];
            o.extend(obs.iter().map(ob_to_sexp));
            Sexp::list(o)
        }
        PairOutcome::ActiveGoal(ob) => {
            Sexp::list(vec![Sexp::atom("reduction-goal"), ob_to_sexp(ob)])
        }
        PairOutcome::Mismatch(m) => Sexp::list(vec![Sexp::atom("mismatch"), Sexp::string(m)]),
        PairOutcome::FuelOut(side) => Sexp::list(vec![Sexp::atom("fuel-out"), Sexp::atom(side)]),
    };
    items.push(outcome);
    Sexp::list(items)
}

pub fn evidence_to_sexp(e: &Evidence) -> Sexp {
    let mut items = vec![Sexp::atom("distinguishing-trace")];
    for step in &e.steps {
        items.push(Sexp::list(vec![
            Sexp::atom("via"),
            Sexp::atom(&step.rule),
            Sexp::string(&print_term(&step.lhs)),
            Sexp::string(&print_term(&step.rhs)),
        ]));
    }
    items.push(Sexp::list(vec![
        Sexp::atom("mismatch"),
        Sexp::string(&e.mismatch),
    ]));
    Sexp::list(items)
}

pub fn report_to_sexp(report: &RunReport) -> Sexp {
    let verdict = match &report.verdict {
        Verdict::Verified { unsafe_used } => Sexp::list(vec![
            Sexp::atom("verdict"),
            Sexp::atom(if *unsafe_used {
                "unsafe-verified"
            } else {
                "verified"
            }),
        ]),
        Verdict::Failed { pair, detail, .. } => Sexp::list(vec![
            Sexp::atom("verdict"),
            Sexp::atom("failed"),
            Sexp::atom(&pair.to_string()),
            Sexp::string(detail),
        ]),
        Verdict::NotBisimilar { evidence } => Sexp::list(vec![
            Sexp::atom("verdict"),
            Sexp::atom("not-bisimilar"),
            Sexp::string(&evidence.mismatch),
        ]),
        Verdict::Inconclusive { reason } => Sexp::list(vec![
            Sexp::atom("verdict"),
            Sexp::atom("inconclusive"),
            Sexp::string(reason),
        ]),
    };
    let mut items = vec![Sexp::atom("run"), verdict];
    for t in &report.traces {
        items.push(pair_trace_to_sexp(t));
    }
    match &report.verdict {
        Verdict::Failed {
            evidence: Some(e), ..
        } => items.push(evidence_to_sexp(e)),
        Verdict::NotBisimilar { evidence } => items.push(evidence_to_sexp(evidence)),
        _ => {}
    }
    Sexp::list(items)
}

/// The passive-discipline audit: no passive obligation in any trace may be
/// discharged with a technique node outside the strong subset.
pub fn audit_passive_discipline(traces: &[PairTrace], ts: &TechniqueSet) -> Result<(), String> {
    let check_ob = |ob: &ObTrace| -> Result<(), String> {
        if ob.kind != ObKind::Passive {
            return Ok(());
        }
        if let Discharge::Proof(p) = &ob.discharge {
            let mut used = BTreeSet::new();
            p.techniques_used(&mut used);
            for t in used {
                if !ts.strong.contains(&t) {
                    return Err(format!(
                        "passive obligation `{}` discharged with non-strong technique {}",
                        ob.rule, t
                    ));
                }
            }
        }
        Ok(())
    };
    for trace in traces {
        match &trace.outcome {
            PairOutcome::Obligations(obs) => {
                for ob in obs {
                    check_ob(ob)?;
                }
            }
            PairOutcome::ActiveGoal(ob) => check_ob(ob)?,
            _ => {}
        }
    }
    Ok(())
}

/// Count of technique usages across all discharges, used in reports.
pub fn techniques_in_traces(traces: &[PairTrace]) -> BTreeSet<Technique> {
    let mut used = BTreeSet::new();
    for trace in traces {
        let mut collect = |ob: &ObTrace| {
            if let Discharge::Proof(p) = &ob.discharge {
                p.techniques_used(&mut used);
            }
        };
        match &trace.outcome {
            PairOutcome::Obligations(obs) => obs.iter().for_each(&mut collect),
            PairOutcome::ActiveGoal(ob) => collect(ob),
            _ => {}
        }
    }
    used
}
