//! nfbisim: evaluate terms of the three calculi, check candidate
//! normal-form bisimulations up to techniques, prove or distinguish pairs of
//! terms, and run the bundled example corpus.

use std::process::ExitCode;
use std::rc::Rc;

use nfbisim_core::engine::sexp::Sexp;
use nfbisim_core::engine::trace::{evidence_to_sexp, report_to_sexp};
use nfbisim_core::engine::{
    auto_prove, distinguish, verify_bisimulation_up_to, Relation, RunReport, TechniqueSet, Verdict,
};
use nfbisim_core::machine::{eval, show_nf, EvalOutcome};
use nfbisim_core::parse::parse_term;
use nfbisim_core::print::print_term;
use nfbisim_core::syntax::{CalculusId, Term};

mod corpus;

const USAGE: &str = "\
nfbisim — a workbench for eager normal-form bisimulations

USAGE:
  nfbisim eval --calculus CALC [--fuel N] [--format trace] TERM
  nfbisim verify [--techniques LIST] [--fuel N] [--depth D]
                 [--unsafe strong+=LIST] [--divergence-is-distinct]
                 [--format trace] FILE.rel
  nfbisim prove --calculus CALC [--techniques LIST] [--fuel N] [--depth D]
                [--max-pairs P] [--emit FILE] [--format trace] LHS RHS
  nfbisim distinguish --calculus CALC [--fuel N] [--depth D] [--max-pairs P]
                [--format trace] LHS RHS
  nfbisim corpus [--dir PATH] [--filter STR] [--fuel N] [--depth D]

CALC is one of: lambda, shiftreset, callcc.
Technique names: refl,red,lam,subst,ectx,pctx,pctxrst,ectxpure,result,abort,
substv,substc — plus the macro `ctx`.

Exit codes: 0 verified/ok, 1 failed or not bisimilar, 2 inconclusive,
3 usage or parse error.";

pub struct Opts {
    calculus: Option<CalculusId>,
    fuel: usize,
    depth: usize,
    max_pairs: usize,
    techniques: Option<String>,
    unsafe_strong: Option<String>,
    divergence_is_distinct: bool,
    trace_format: bool,
    emit: Option<String>,
    pub dir: Option<String>,
    pub filter: Option<String>,
    positional: Vec<String>,
}

impl Opts {
    pub fn fuel(&self) -> usize {
        self.fuel
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("{USAGE}");
    ExitCode::from(3)
}

fn parse_opts(args: &[String]) -> Result<Opts, String> {
    let mut opts = Opts {
        calculus: None,
        fuel: 1000,
        depth: 6,
        max_pairs: 32,
        techniques: None,
        unsafe_strong: None,
        divergence_is_distinct: false,
        trace_format: false,
        emit: None,
        dir: None,
        filter: None,
        positional: Vec::new(),
    };
    let mut i = 0;
    let value = |args: &[String], i: &mut usize, flag: &str| -> Result<String, String> {
        *i += 1;
        args.get(*i)
            .cloned()
            .ok_or_else(|| format!("{flag} needs a value"))
    };
    while i < args.len() {
        match args[i].as_str() {
            "--calculus" => {
                let v = value(args, &mut i, "--calculus")?;
                opts.calculus =
                    Some(CalculusId::parse(&v).ok_or_else(|| format!("unknown calculus `{v}`"))?);
            }
            "--fuel" => {
                let v = value(args, &mut i, "--fuel")?;
                opts.fuel = v.parse().map_err(|_| format!("bad fuel `{v}`"))?;
            }
            "--depth" => {
                let v = value(args, &mut i, "--depth")?;
                opts.depth = v.parse().map_err(|_| format!("bad depth `{v}`"))?;
            }
            "--max-pairs" => {
                let v = value(args, &mut i, "--max-pairs")?;
                opts.max_pairs = v.parse().map_err(|_| format!("bad max-pairs `{v}`"))?;
            }
            "--techniques" => opts.techniques = Some(value(args, &mut i, "--techniques")?),
            "--unsafe" => {
                let v = value(args, &mut i, "--unsafe")?;
                let list = v
                    .strip_prefix("strong+=")
                    .ok_or("--unsafe expects strong+=TECH[,TECH...]")?;
                opts.unsafe_strong = Some(list.to_string());
            }
            "--divergence-is-distinct" => opts.divergence_is_distinct = true,
            "--format" => {
                let v = value(args, &mut i, "--format")?;
                match v.as_str() {
                    "trace" => opts.trace_format = true,
                    "text" => opts.trace_format = false,
                    other => return Err(format!("unknown format `{other}`")),
                }
            }
            "--emit" => opts.emit = Some(value(args, &mut i, "--emit")?),
            "--dir" => opts.dir = Some(value(args, &mut i, "--dir")?),
            "--filter" => opts.filter = Some(value(args, &mut i, "--filter")?),
            flag if flag.starts_with("--") => return Err(format!("unknown flag `{flag}`")),
            _ => opts.positional.push(args[i].clone()),
        }
        i += 1;
    }
    Ok(opts)
}

fn technique_set(opts: &Opts, calc: CalculusId) -> Result<(TechniqueSet, bool), String> {
    let mut ts = match &opts.techniques {
        Some(names) => TechniqueSet::from_names(names, calc)?,
        None => TechniqueSet::default_for(calc),
    };
    let mut unsafe_used = false;
    if let Some(extra) = &opts.unsafe_strong {
        ts.enlarge_strong(extra, calc)?;
        unsafe_used = true;
    }
    Ok((ts, unsafe_used))
}

fn parse_input(text: &str, calc: CalculusId) -> Result<Rc<Term>, String> {
    parse_term(text, calc).map_err(|e| format!("`{text}`: {e}"))
}

fn cmd_eval(opts: &Opts) -> Result<ExitCode, String> {
    let calc = opts.calculus.ok_or("eval needs --calculus")?;
    let [text] = opts.positional.as_slice() else {
        return Err("eval takes exactly one term".to_string());
    };
    let term = parse_input(text, calc)?;
    let outcome = eval(&term, calc, opts.fuel);
    if opts.trace_format {
        let steps: Vec<Sexp> = outcome
            .steps()
            .iter()
            .map(|(rule, t)| {
                Sexp::list(vec![Sexp::atom(rule.name()), Sexp::string(&print_term(t))])
            })
            .collect();
        let mut items = vec![Sexp::atom("eval"), Sexp::list(steps)];
        match &outcome {
            EvalOutcome::Evaluated { nf, .. } => items.push(Sexp::list(vec![
                Sexp::atom("normal-form"),
                Sexp::atom(nf.kind()),
                Sexp::string(&print_term(&nf.as_term())),
            ])),
            EvalOutcome::FuelExhausted { last, .. } => items.push(Sexp::list(vec![
                Sexp::atom("fuel-exhausted"),
                Sexp::string(&print_term(last)),
            ])),
        }
        println!("{}", Sexp::list(items));
        if matches!(outcome, EvalOutcome::FuelExhausted { .. }) {
            return Ok(ExitCode::from(2));
        }
        return Ok(ExitCode::SUCCESS);
    }
    for (i, (rule, t)) in outcome.steps().iter().enumerate() {
        println!("step {:<3} {:<15} {}", i + 1, rule.name(), print_term(t));
    }
    match &outcome {
        EvalOutcome::Evaluated { nf, steps } => {
            println!("{}", show_nf(nf));
            println!("steps: {}", steps.len());
            Ok(ExitCode::SUCCESS)
        }
        EvalOutcome::FuelExhausted { last, steps } => {
            println!(
                "fuel exhausted after {} steps at {}",
                steps.len(),
                print_term(last)
            );
            Ok(ExitCode::from(2))
        }
    }
}

fn print_report(report: &RunReport, ts: &TechniqueSet, trace_format: bool) {
    if trace_format {
        println!("{}", report_to_sexp(report));
        return;
    }
    let derived = report
        .pairs
        .iter()
        .filter(|p| matches!(p.origin, nfbisim_core::engine::PairOrigin::Derived { .. }))
        .count();
    println!(
        "techniques: {} (strong: {})",
        TechniqueSet::names(&ts.full),
        TechniqueSet::names(&ts.strong)
    );
    println!(
        "pairs checked: {} given + {} derived",
        report.pairs.len() - derived,
        derived
    );
    match &report.verdict {
        Verdict::Failed {
            evidence: Some(e), ..
        } => {
            println!("{}", report.verdict.headline());
            println!("{}", evidence_to_sexp(e));
        }
        Verdict::NotBisimilar { evidence } => {
            println!("{}", report.verdict.headline());
            println!("{}", evidence_to_sexp(evidence));
        }
        v => println!("{}", v.headline()),
    }
}

fn cmd_verify(opts: &Opts) -> Result<ExitCode, String> {
    let [path] = opts.positional.as_slice() else {
        return Err("verify takes exactly one relation file".to_string());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let rel = Relation::parse(&text).map_err(|e| format!("{path}: {e}"))?;
    let (ts, unsafe_used) = technique_set(opts, rel.calculus)?;
    let report = verify_bisimulation_up_to(
        &rel,
        ts.clone(),
        opts.fuel,
        opts.depth,
        opts.divergence_is_distinct,
        unsafe_used,
    );
    print_report(&report, &ts, opts.trace_format);
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn cmd_prove(opts: &Opts) -> Result<ExitCode, String> {
    let calc = opts.calculus.ok_or("prove needs --calculus")?;
    let [lhs, rhs] = opts.positional.as_slice() else {
        return Err("prove takes exactly two terms".to_string());
    };
    let lhs = parse_input(lhs, calc)?;
    let rhs = parse_input(rhs, calc)?;
    let (ts, unsafe_used) = technique_set(opts, calc)?;
    if unsafe_used {
        return Err("--unsafe applies to verify only".to_string());
    }
    let (report, witness) = auto_prove(
        calc,
        &lhs,
        &rhs,
        ts.clone(),
        opts.fuel,
        opts.depth,
        opts.max_pairs,
        opts.divergence_is_distinct,
    );
    print_report(&report, &ts, opts.trace_format);
    if let Some(w) = &witness {
        let rendered = w.to_file_string();
        match &opts.emit {
            Some(path) => {
                std::fs::write(path, &rendered).map_err(|e| format!("{path}: {e}"))?;
                println!("witness written to {path}");
            }
            None => {
                println!("witness relation:");
                print!("{rendered}");
            }
        }
    }
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn cmd_distinguish(opts: &Opts) -> Result<ExitCode, String> {
    let calc = opts.calculus.ok_or("distinguish needs --calculus")?;
    let [lhs, rhs] = opts.positional.as_slice() else {
        return Err("distinguish takes exactly two terms".to_string());
    };
    let lhs = parse_input(lhs, calc)?;
    let rhs = parse_input(rhs, calc)?;
    let report = distinguish(
        calc,
        &lhs,
        &rhs,
        opts.fuel,
        opts.depth,
        opts.max_pairs.max(64),
        opts.divergence_is_distinct,
    );
    if opts.trace_format {
        println!("{}", report_to_sexp(&report));
    } else {
        match &report.verdict {
            Verdict::NotBisimilar { evidence } => {
                println!("{}", report.verdict.headline());
                println!("{}", evidence_to_sexp(evidence));
            }
            v => println!("{}", v.headline()),
        }
    }
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first().cloned() else {
        return usage_error("missing command");
    };
    let opts = match parse_opts(&args[1..]) {
        Ok(o) => o,
        Err(e) => return usage_error(&e),
    };
    let result = match command.as_str() {
        "eval" => cmd_eval(&opts),
        "verify" => cmd_verify(&opts),
        "prove" => cmd_prove(&opts),
        "distinguish" => cmd_distinguish(&opts),
        "corpus" => corpus::cmd_corpus(&opts),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        other => return usage_error(&format!("unknown command `{other}`")),
    };
    match result {
        Ok(code) => code,
        Err(e) => usage_error(&e),
    }
}
