//! The bundled example corpus: evaluation traces, candidate relations with
//! expected verdicts, prover goals and distinguishing pairs, kept as data so
//! new entries are drop-in.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use nfbisim_core::engine::sexp::{parse_sexps, Sexp};
use nfbisim_core::engine::{
    auto_prove, distinguish, verify_bisimulation_up_to, Relation, TechniqueSet, Verdict,
};
use nfbisim_core::machine::{eval, EvalOutcome};
use nfbisim_core::parse::parse_term;
use nfbisim_core::print::print_term;
use nfbisim_core::syntax::{alpha_eq, CalculusId};

use crate::Opts;

#[derive(Debug, Clone)]
pub enum Entry {
    Eval {
        name: String,
        calc: CalculusId,
        term: String,
        steps: Option<usize>,
        kinds: Option<Vec<String>>,
        final_term: Option<String>,
        final_kind: Option<String>,
        tags: Vec<String>,
    },
    Verify {
        name: String,
        file: String,
        techniques: Option<String>,
        unsafe_strong: Option<String>,
        expect: String,
        tags: Vec<String>,
    },
    Prove {
        name: String,
        calc: CalculusId,
        lhs: String,
        rhs: String,
        techniques: Option<String>,
        expect: String,
        tags: Vec<String>,
    },
    Distinguish {
        name: String,
        calc: CalculusId,
        lhs: String,
        rhs: String,
        depth: Option<usize>,
        expect: String,
        tags: Vec<String>,
    },
}

impl Entry {
    pub fn name(&self) -> &str {
        match self {
            Entry::Eval { name, .. }
            | Entry::Verify { name, .. }
            | Entry::Prove { name, .. }
            | Entry::Distinguish { name, .. } => name,
        }
    }

    fn search_keys(&self) -> Vec<String> {
        let mut keys = vec![self.name().to_string()];
        let (calc, tags) = match self {
            Entry::Eval { calc, tags, .. } => (Some(*calc), tags),
            Entry::Verify { tags, .. } => (None, tags),
            Entry::Prove { calc, tags, .. } => (Some(*calc), tags),
            Entry::Distinguish { calc, tags, .. } => (Some(*calc), tags),
        };
        if let Some(c) = calc {
            keys.push(c.name().to_string());
        }
        keys.extend(tags.iter().cloned());
        keys
    }

    pub fn matches_filter(&self, filter: &str) -> bool {
        self.search_keys().iter().any(|k| k.contains(filter))
    }
}

fn field<'a>(items: &'a [Sexp], key: &str) -> Option<&'a [Sexp]> {
    items.iter().find_map(|s| s.tagged(key))
}

fn field_str(items: &[Sexp], key: &str) -> Option<String> {
    field(items, key)?.first().and_then(|s| {
        s.as_str()
            .map(str::to_string)
            .or_else(|| s.as_atom().map(str::to_string))
    })
}

fn field_usize(items: &[Sexp], key: &str) -> Option<usize> {
    field_str(items, key)?.parse().ok()
}

fn atoms(items: &[Sexp]) -> Vec<String> {
    items
        .iter()
        .filter_map(|s| s.as_atom().map(str::to_string))
        .collect()
}

fn want_atom(s: Option<&Sexp>, what: &str) -> Result<String, String> {
    s.and_then(|x| x.as_atom())
        .map(str::to_string)
        .ok_or_else(|| format!("expected {what}"))
}

fn want_str(s: Option<&Sexp>, what: &str) -> Result<String, String> {
    s.and_then(|x| x.as_str())
        .map(str::to_string)
        .ok_or_else(|| format!("expected {what}"))
}

fn want_calc(s: Option<&Sexp>) -> Result<CalculusId, String> {
    let name = want_atom(s, "a calculus name")?;
    CalculusId::parse(&name).ok_or_else(|| format!("unknown calculus `{name}`"))
}

pub fn parse_manifest(text: &str) -> Result<Vec<Entry>, String> {
    let sexps = parse_sexps(text)?;
    let mut out = Vec::new();
    for sexp in &sexps {
        let items = sexp.as_list().ok_or("manifest entries are lists")?;
        let head = want_atom(items.first(), "an entry kind")?;
        let rest = &items[1..];
        let tags = field(rest, "tags").map(atoms).unwrap_or_default();
        match head.as_str() {
            "eval" => out.push(Entry::Eval {
                name: want_atom(rest.first(), "a name")?,
                calc: want_calc(rest.get(1))?,
                term: want_str(rest.get(2), "a term string")?,
                steps: field_usize(rest, "steps"),
                kinds: field(rest, "kinds").map(atoms),
                final_term: field_str(rest, "final"),
                final_kind: field_str(rest, "final-kind"),
                tags,
            }),
            "verify" => out.push(Entry::Verify {
                name: want_atom(rest.first(), "a name")?,
                file: field_str(rest, "file").ok_or("verify entry needs (file ...)")?,
                techniques: field_str(rest, "techniques"),
                unsafe_strong: field_str(rest, "unsafe"),
                expect: field_str(rest, "expect").ok_or("verify entry needs (expect ...)")?,
                tags,
            }),
            "prove" => out.push(Entry::Prove {
                name: want_atom(rest.first(), "a name")?,
                calc: want_calc(rest.get(1))?,
                lhs: want_str(rest.get(2), "a lhs term")?,
                rhs: want_str(rest.get(3), "a rhs term")?,
                techniques: field_str(rest, "techniques"),
                expect: field_str(rest, "expect").ok_or("prove entry needs (expect ...)")?,
                tags,
            }),
            "distinguish" => out.push(Entry::Distinguish {
                name: want_atom(rest.first(), "a name")?,
                calc: want_calc(rest.get(1))?,
                lhs: want_str(rest.get(2), "a lhs term")?,
                rhs: want_str(rest.get(3), "a rhs term")?,
                depth: field_usize(rest, "depth"),
                expect: field_str(rest, "expect").ok_or("distinguish entry needs (expect ...)")?,
                tags,
            }),
            other => return Err(format!("unknown corpus entry kind `{other}`")),
        }
    }
    Ok(out)
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Verified { unsafe_used: false } => "verified",
        Verdict::Verified { unsafe_used: true } => "unsafe-verified",
        Verdict::Failed { .. } => "failed",
        Verdict::NotBisimilar { .. } => "not-bisimilar",
        Verdict::Inconclusive { .. } => "inconclusive",
    }
}

/// Runs one corpus entry; Ok(()) when the observed behavior matches the
/// entry's expectations, Err with a diff otherwise.
pub fn run_entry(entry: &Entry, dir: &Path, fuel: usize, depth: usize) -> Result<(), String> {
    match entry {
        Entry::Eval {
            calc,
            term,
            steps,
            kinds,
            final_term,
            final_kind,
            ..
        } => {
            let t = parse_term(term, *calc).map_err(|e| e.to_string())?;
            let outcome = eval(&t, *calc, fuel);
            let EvalOutcome::Evaluated { nf, steps: trace } = outcome else {
                return Err("fuel exhausted".to_string());
            };
            if let Some(expected) = steps {
                if trace.len() != *expected {
                    return Err(format!("expected {expected} steps, got {}", trace.len()));
                }
            }
            if let Some(expected) = kinds {
                let got: Vec<&str> = trace.iter().map(|(r, _)| r.name()).collect();
                if got != expected.iter().map(String::as_str).collect::<Vec<_>>() {
                    return Err(format!("step kinds {got:?}, expected {expected:?}"));
                }
            }
            if let Some(expected) = final_kind {
                if nf.kind() != expected {
                    return Err(format!(
                        "final normal form is {}, expected {expected}",
                        nf.kind()
                    ));
                }
            }
            if let Some(expected) = final_term {
                let want = parse_term(expected, *calc).map_err(|e| e.to_string())?;
                if !alpha_eq(&nf.as_term(), &want) {
                    return Err(format!(
                        "final term {}, expected {expected}",
                        print_term(&nf.as_term())
                    ));
                }
            }
            Ok(())
        }
        Entry::Verify {
            file,
            techniques,
            unsafe_strong,
            expect,
            ..
        } => {
            let path = dir.join(file);
            let text =
                std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let rel = Relation::parse(&text).map_err(|e| format!("{file}: {e}"))?;
            let mut ts = match techniques {
                Some(names) => TechniqueSet::from_names(names, rel.calculus)?,
                None => TechniqueSet::default_for(rel.calculus),
            };
            let mut unsafe_used = false;
            if let Some(extra) = unsafe_strong {
                ts.enlarge_strong(extra, rel.calculus)?;
                unsafe_used = true;
            }
            let report = verify_bisimulation_up_to(&rel, ts, fuel, depth, false, unsafe_used);
            let got = verdict_name(&report.verdict);
            if got != expect {
                return Err(format!(
                    "verdict {got}, expected {expect} ({})",
                    report.verdict.headline()
                ));
            }
            Ok(())
        }
        Entry::Prove {
            calc,
            lhs,
            rhs,
            techniques,
            expect,
            ..
        } => {
            let l = parse_term(lhs, *calc).map_err(|e| e.to_string())?;
            let r = parse_term(rhs, *calc).map_err(|e| e.to_string())?;
            let ts = match techniques {
                Some(names) => TechniqueSet::from_names(names, *calc)?,
                None => TechniqueSet::default_for(*calc),
            };
            let (report, witness) = auto_prove(*calc, &l, &r, ts, fuel, depth, 32, false);
            let got = verdict_name(&report.verdict);
            if got != expect {
                return Err(format!(
                    "verdict {got}, expected {expect} ({})",
                    report.verdict.headline()
                ));
            }
            // a successful proof must emit a witness that re-verifies
            if let Some(w) = witness {
                let rerun = verify_bisimulation_up_to(
                    &w,
                    TechniqueSet::default_for(*calc),
                    fuel,
                    depth,
                    false,
                    false,
                );
                if !matches!(rerun.verdict, Verdict::Verified { .. }) {
                    return Err(format!(
                        "witness did not re-verify: {}",
                        rerun.verdict.headline()
                    ));
                }
            }
            Ok(())
        }
        Entry::Distinguish {
            calc,
            lhs,
            rhs,
            depth: entry_depth,
            expect,
            ..
        } => {
            let l = parse_term(lhs, *calc).map_err(|e| e.to_string())?;
            let r = parse_term(rhs, *calc).map_err(|e| e.to_string())?;
            let d = entry_depth.unwrap_or(depth);
            let report = distinguish(*calc, &l, &r, fuel, d, 64, false);
            let got = verdict_name(&report.verdict);
            if got != expect {
                return Err(format!(
                    "verdict {got}, expected {expect} ({})",
                    report.verdict.headline()
                ));
            }
            if let Verdict::NotBisimilar { evidence } = &report.verdict {
                nfbisim_core::engine::replay_evidence(evidence, fuel)
                    .map_err(|e| format!("evidence replay failed: {e}"))?;
            }
            Ok(())
        }
    }
}

pub fn corpus_dir(opts: &Opts) -> PathBuf {
    if let Some(dir) = &opts.dir {
        return PathBuf::from(dir);
    }
    if let Ok(dir) = std::env::var("NFBISIM_CORPUS") {
        return PathBuf::from(dir);
    }
    PathBuf::from("corpus")
}

pub fn cmd_corpus(opts: &Opts) -> Result<ExitCode, String> {
    let dir = corpus_dir(opts);
    let manifest_path = dir.join("manifest.scm");
    let text = std::fs::read_to_string(&manifest_path)
        .map_err(|e| format!("{}: {e}", manifest_path.display()))?;
    let entries = parse_manifest(&text)?;
    let selected: Vec<&Entry> = match &opts.filter {
        Some(f) => entries.iter().filter(|e| e.matches_filter(f)).collect(),
        None => entries.iter().collect(),
    };
    if selected.is_empty() {
        return Err("no corpus entries match the filter".to_string());
    }
    let started = Instant::now();
    // entries are independent; run them concurrently and report in order
    let fuel = opts.fuel();
    let depth = opts.depth();
    let results: Vec<(Result<(), String>, u128)> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|entry| {
                let dir = dir.clone();
                scope.spawn(move || {
                    let t0 = Instant::now();
                    let r = run_entry(entry, &dir, fuel, depth);
                    (r, t0.elapsed().as_millis())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failures = 0;
    for (entry, (result, millis)) in selected.iter().zip(results) {
        match result {
            Ok(()) => println!("PASS {:<28} ({millis} ms)", entry.name()),
            Err(e) => {
                failures += 1;
                println!("FAIL {:<28} {e}", entry.name());
            }
        }
    }
    println!(
        "{}/{} corpus entries passed in {} ms",
        selected.len() - failures,
        selected.len(),
        started.elapsed().as_millis()
    );
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
