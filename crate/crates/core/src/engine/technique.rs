//! Up-to techniques per calculus and the strong/full split that governs which
//! may discharge passive obligations.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::CalculusId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Technique {
    Refl,
    Red,
    Lam,
    Subst,
    Ectx,
    Pctx,
    PctxRst,
    EctxPure,
    Result,
    AbortCtx,
    SubstV,
    SubstC,
}

impl Technique {
    pub fn name(self) -> &'static str {
        match self {
            Technique::Refl => "refl",
            Technique::Red => "red",
            Technique::Lam => "lam",
            Technique::Subst => "subst",
            Technique::Ectx => "ectx",
            Technique::Pctx => "pctx",
            Technique::PctxRst => "pctxrst",
            Technique::EctxPure => "ectxpure",
            Technique::Result => "result",
            Technique::AbortCtx => "abort",
            Technique::SubstV => "substv",
            Technique::SubstC => "substc",
        }
    }

    pub fn valid_for(self, calc: CalculusId) -> bool {
        use Technique::*;
        match calc {
            CalculusId::Lambda => matches!(self, Refl | Red | Lam | Subst | Ectx),
            CalculusId::ShiftReset => {
                matches!(self, Refl | Red | Lam | Subst | Pctx | PctxRst | EctxPure)
            }
            CalculusId::CallccAbort => {
                matches!(self, Refl | Result | AbortCtx | Lam | SubstV | SubstC | Red)
            }
        }
    }

    /// Parses one CLI name; `ctx` is a macro expanding to the derived
    /// up-to-context composition of the calculus, never a primitive.
    pub fn parse(name: &str, calc: CalculusId) -> Result<Vec<Technique>, String> {
        use Technique::*;
        let t = match name {
            "refl" => Refl,
            "red" => Red,
            "lam" => Lam,
            "subst" => Subst,
            "ectx" => Ectx,
            "pctx" => Pctx,
            "pctxrst" => PctxRst,
            "ectxpure" => EctxPure,
            "result" => Result,
            "abort" => AbortCtx,
            "substv" => SubstV,
            "substc" => SubstC,
            "ctx" => {
                return Ok(match calc {
                    CalculusId::Lambda => vec![Refl, Lam, Ectx],
                    CalculusId::ShiftReset => vec![Refl, Lam, Pctx, PctxRst, EctxPure],
                    CalculusId::CallccAbort => vec![Refl, Lam, SubstC],
                })
            }
            other => return Err(format!("unknown technique `{other}`")),
        };
        if !t.valid_for(calc) {
            return Err(format!(
                "technique `{name}` is not available in the {calc} calculus"
            ));
        }
        Ok(vec![t])
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The selected techniques: `strong` may discharge passive obligations,
/// `full` active ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TechniqueSet {
    pub full: BTreeSet<Technique>,
    pub strong: BTreeSet<Technique>,
}

impl TechniqueSet {
    /// The compatible set of the calculus with its proven strong subset:
    /// everything but up-to-evaluation-context (lambda), the three context
    /// closures (shift/reset), or context substitution (callcc).
    pub fn default_for(calc: CalculusId) -> TechniqueSet {
        use Technique::*;
        let (full, non_strong): (Vec<Technique>, Vec<Technique>) = match calc {
            CalculusId::Lambda => (vec![Refl, Red, Lam, Subst, Ectx], vec![Ectx]),
            CalculusId::ShiftReset => (
                vec![Refl, Red, Lam, Subst, Pctx, PctxRst, EctxPure],
                vec![Pctx, PctxRst, EctxPure],
            ),
            CalculusId::CallccAbort => (
                vec![Refl, Result, AbortCtx, Lam, SubstV, SubstC, Red],
                vec![SubstC],
            ),
        };
        let full: BTreeSet<Technique> = full.into_iter().collect();
        let strong = full
            .iter()
            .copied()
            .filter(|t| !non_strong.contains(t))
            .collect();
        TechniqueSet { full, strong }
    }

    /// Restrict to a user-supplied comma-separated list. The strong subset is
    /// the intersection with the default strong set; it may only be enlarged
    /// through `enlarge_strong`.
    pub fn from_names(names: &str, calc: CalculusId) -> Result<TechniqueSet, String> {
        let default = TechniqueSet::default_for(calc);
        let mut full = BTreeSet::new();
        for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            for t in Technique::parse(name, calc)? {
                full.insert(t);
            }
        }
        if full.is_empty() {
            return Err("empty technique list".to_string());
        }
        let strong = full
            .iter()
            .copied()
            .filter(|t| default.strong.contains(t))
            .collect();
        Ok(TechniqueSet { full, strong })
    }

    /// Move techniques into the strong subset past the proven split. Only
    /// reachable through the `--unsafe` flag; the resulting verdict is
    /// watermarked.
    pub fn enlarge_strong(&mut self, names: &str, calc: CalculusId) -> Result<(), String> {
        for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            for t in Technique::parse(name, calc)? {
                self.full.insert(t);
                self.strong.insert(t);
            }
        }
        Ok(())
    }

    pub fn names(set: &BTreeSet<Technique>) -> String {
        set.iter().map(|t| t.name()).collect::<Vec<_>>().join(",")
    }
}
