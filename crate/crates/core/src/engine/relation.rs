//! Candidate relations: schematic pairs with declared fresh parameters, the
//! relation file format, instantiation, schematization of derived pairs and
//! matching modulo fresh renaming.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use crate::engine::sexp::{parse_sexps, Sexp};
use crate::parse::parse_term;
use crate::print::print_term;
use crate::syntax::{rename_ctx_var, rename_var, CalculusId, CtxVarName, FreshGen, Term, VarName};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FreshName {
    Var(VarName),
    Ctx(CtxVarName),
}

impl fmt::Display for FreshName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreshName::Var(v) => write!(f, "{v}"),
            FreshName::Ctx(k) => write!(f, "{k}"),
        }
    }
}

/// A schematic pair: the family of all instances of (lhs, rhs) under injective
/// renaming of `fresh` to names unused elsewhere in the pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelPair {
    pub lhs: Rc<Term>,
    pub rhs: Rc<Term>,
    pub fresh: Vec<FreshName>,
}

impl RelPair {
    pub fn closed(lhs: Rc<Term>, rhs: Rc<Term>) -> RelPair {
        RelPair {
            lhs,
            rhs,
            fresh: Vec::new(),
        }
    }

    /// Free names of the pair that are not schematic parameters.
    pub fn fixed_vars(&self) -> BTreeSet<VarName> {
        let mut set = self.lhs.free_vars();
        set.extend(self.rhs.free_vars());
        for f in &self.fresh {
            if let FreshName::Var(v) = f {
                set.remove(v);
            }
        }
        set
    }

    pub fn fixed_ctx_vars(&self) -> BTreeSet<CtxVarName> {
        let mut set = self.lhs.free_ctx_vars();
        set.extend(self.rhs.free_ctx_vars());
        for f in &self.fresh {
            if let FreshName::Ctx(k) = f {
                set.remove(k);
            }
        }
        set
    }

    /// Instantiate the schematic parameters with brand-new generator names.
    pub fn instantiate(
        &self,
        gen: &mut FreshGen,
    ) -> (Rc<Term>, Rc<Term>, Vec<(FreshName, FreshName)>) {
        let mut lhs = self.lhs.clone();
        let mut rhs = self.rhs.clone();
        let mut map = Vec::new();
        for f in &self.fresh {
            match f {
                FreshName::Var(v) => {
                    let n = gen.next_var();
                    lhs = rename_var(&lhs, v, &n);
                    rhs = rename_var(&rhs, v, &n);
                    map.push((f.clone(), FreshName::Var(n)));
                }
                FreshName::Ctx(k) => {
                    let n = gen.next_ctx_var();
                    lhs = rename_ctx_var(&lhs, k, &n);
                    rhs = rename_ctx_var(&rhs, k, &n);
                    map.push((f.clone(), FreshName::Ctx(n)));
                }
            }
        }
        (lhs, rhs, map)
    }

    fn validate(&self, calc: CalculusId) -> Result<(), String> {
        crate::syntax::check_calculus(&self.lhs, calc).map_err(|e| e.to_string())?;
        crate::syntax::check_calculus(&self.rhs, calc).map_err(|e| e.to_string())?;
        let vars: BTreeSet<VarName> = {
            let mut s = self.lhs.free_vars();
            s.extend(self.rhs.free_vars());
            s
        };
        let ctx_vars: BTreeSet<CtxVarName> = {
            let mut s = self.lhs.free_ctx_vars();
            s.extend(self.rhs.free_ctx_vars());
            s
        };
        let mut seen = BTreeSet::new();
        for f in &self.fresh {
            if !seen.insert(f.clone()) {
                return Err(format!("duplicate fresh parameter `{f}`"));
            }
            match f {
                FreshName::Var(v) => {
                    if !vars.contains(v) {
                        return Err(format!(
                            "fresh parameter `{v}` does not occur free in the pair"
                        ));
                    }
                }
                FreshName::Ctx(k) => {
                    if !ctx_vars.contains(k) {
                        return Err(format!(
                            "fresh context parameter `{k}` does not occur in the pair"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// How a schematic pair entered the verification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairOrigin {
    Given(usize),
    Derived { parent: usize, rule: String },
}

/// A pair tracked by the engine: the candidate relation plus pairs derived
/// from undischarged obligations.
#[derive(Debug, Clone)]
pub struct SchemPair {
    pub id: usize,
    pub pair: RelPair,
    pub origin: PairOrigin,
    /// Derivation distance from a given pair; bounded by the depth setting.
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub calculus: CalculusId,
    pub pairs: Vec<RelPair>,
}

impl Relation {
    /// Parse the relation file format:
    ///
    /// ```text
    /// (relation (calculus lambda|shiftreset|callcc)
    ///   (pair (fresh y z) "lhs-term" "rhs-term") ...)
    /// ```
    pub fn parse(text: &str) -> Result<Relation, String> {
        let sexps = parse_sexps(text)?;
        let top = match sexps.as_slice() {
            [one] => one,
            _ => return Err("expected a single (relation ...) form".to_string()),
        };
        let items = top
            .tagged("relation")
            .ok_or("expected (relation ...)".to_string())?;
        let calc_items = items
            .first()
            .and_then(|s| s.tagged("calculus"))
            .ok_or("expected (calculus ...) first".to_string())?;
        let calc_name = calc_items
            .first()
            .and_then(|s| s.as_atom())
            .ok_or("expected calculus name".to_string())?;
        let calculus = CalculusId::parse(calc_name)
            .ok_or_else(|| format!("unknown calculus `{calc_name}`"))?;
        let mut pairs = Vec::new();
        for entry in &items[1..] {
            let fields = entry
                .tagged("pair")
                .ok_or("expected (pair (fresh ...) \"lhs\" \"rhs\")".to_string())?;
            let (fresh_items, rest): (&[Sexp], &[Sexp]) = match fields.first() {
                Some(s) if s.tagged("fresh").is_some() => {
                    (s.tagged("fresh").unwrap(), &fields[1..])
                }
                _ => (&[], fields),
            };
            let [lhs_s, rhs_s] = rest else {
                return Err("pair needs exactly two term strings".to_string());
            };
            let lhs_text = lhs_s
                .as_str()
                .ok_or("pair lhs must be a string".to_string())?;
            let rhs_text = rhs_s
                .as_str()
                .ok_or("pair rhs must be a string".to_string())?;
            if lhs_text.contains('#') || rhs_text.contains('#') {
                return Err("relation files may not contain generator (`#`) names".to_string());
            }
            let lhs = parse_term(lhs_text, calculus).map_err(|e| format!("lhs: {e}"))?;
            let rhs = parse_term(rhs_text, calculus).map_err(|e| format!("rhs: {e}"))?;
            let vars: BTreeSet<VarName> = {
                let mut s = lhs.free_vars();
                s.extend(rhs.free_vars());
                s
            };
            let ctx_vars: BTreeSet<CtxVarName> = {
                let mut s = lhs.free_ctx_vars();
                s.extend(rhs.free_ctx_vars());
                s
            };
            let mut fresh = Vec::new();
            for f in fresh_items {
                let name = f
                    .as_atom()
                    .ok_or("fresh parameters must be plain names".to_string())?;
                let as_var = VarName::new(name).ok().filter(|v| vars.contains(v));
                let as_ctx = CtxVarName::new(name).ok().filter(|k| ctx_vars.contains(k));
                match (as_var, as_ctx) {
                    (Some(v), None) => fresh.push(FreshName::Var(v)),
                    (None, Some(k)) => fresh.push(FreshName::Ctx(k)),
                    (Some(_), Some(_)) => {
                        return Err(format!(
                            "fresh name `{name}` is used both as a variable and a context variable"
                        ))
                    }
                    (None, None) => {
                        return Err(format!(
                            "fresh parameter `{name}` does not occur free in the pair"
                        ))
                    }
                }
            }
            let pair = RelPair { lhs, rhs, fresh };
            pair.validate(calculus)?;
            pairs.push(pair);
        }
        if pairs.is_empty() {
            return Err("relation has no pairs".to_string());
        }
        Ok(Relation { calculus, pairs })
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![
            Sexp::atom("relation"),
            Sexp::list(vec![
                Sexp::atom("calculus"),
                Sexp::atom(self.calculus.name()),
            ]),
        ];
        for p in &self.pairs {
            let mut fields = vec![Sexp::atom("pair")];
            let mut fresh = vec![Sexp::atom("fresh")];
            for f in &p.fresh {
                fresh.push(Sexp::atom(&f.to_string()));
            }
            fields.push(Sexp::list(fresh));
            fields.push(Sexp::string(&print_term(&p.lhs)));
            fields.push(Sexp::string(&print_term(&p.rhs)));
            items.push(Sexp::list(fields));
        }
        Sexp::list(items)
    }

    pub fn to_file_string(&self) -> String {
        let sexp = self.to_sexp();
        // one pair per line for readability
        let mut out = format!("(relation (calculus {})\n", self.calculus.name());
        if let Sexp::List(items) = sexp {
            for item in items.into_iter().skip(2) {
                out.push_str(&format!("  {item}\n"));
            }
        }
        out.push_str(")\n");
        out
    }
}

/// Abstract the session-generated (`#`) names of a concrete pair as fresh
/// parameters, turning an obligation into a schematic pair.
pub fn schematize(lhs: &Rc<Term>, rhs: &Rc<Term>) -> RelPair {
    let mut fresh = Vec::new();
    let mut vars: BTreeSet<VarName> = lhs.free_vars();
    vars.extend(rhs.free_vars());
    for v in vars {
        if v.is_generated() {
            fresh.push(FreshName::Var(v));
        }
    }
    let mut ctx: BTreeSet<CtxVarName> = lhs.free_ctx_vars();
    ctx.extend(rhs.free_ctx_vars());
    for k in ctx {
        if k.is_generated() {
            fresh.push(FreshName::Ctx(k));
        }
    }
    RelPair {
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        fresh,
    }
}

/// Bindings produced by matching modulo fresh renaming.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Renaming {
    pub vars: Vec<(VarName, VarName)>,
    pub ctx_vars: Vec<(CtxVarName, CtxVarName)>,
}

struct MatchState<'a> {
    var_params: BTreeSet<&'a VarName>,
    ctx_params: BTreeSet<&'a CtxVarName>,
    vars: Vec<(VarName, VarName)>,
    ctx_vars: Vec<(CtxVarName, CtxVarName)>,
}

impl<'a> MatchState<'a> {
    fn bind_var(&mut self, p: &VarName, g: &VarName) -> bool {
        if let Some((_, bound)) = self.vars.iter().find(|(q, _)| q == p) {
            return bound == g;
        }
        self.vars.push((p.clone(), g.clone()));
        true
    }

    fn bind_ctx(&mut self, p: &CtxVarName, g: &CtxVarName) -> bool {
        if let Some((_, bound)) = self.ctx_vars.iter().find(|(q, _)| q == p) {
            return bound == g;
        }
        self.ctx_vars.push((p.clone(), g.clone()));
        true
    }

    fn match_term(&mut self, pat: &Term, goal: &Term) -> bool {
        match (pat, goal) {
            (Term::Bound(i), Term::Bound(j)) => i == j,
            (Term::Var(p), Term::Var(g)) => {
                if self.var_params.contains(p) {
                    self.bind_var(p, g)
                } else {
                    p == g
                }
            }
            (Term::Lam(_, a), Term::Lam(_, b)) => self.match_term(a, b),
            (Term::App(f1, a1), Term::App(f2, a2)) => {
                self.match_term(f1, f2) && self.match_term(a1, a2)
            }
            (Term::Shift, Term::Shift) | (Term::CallCC, Term::CallCC) => true,
            (Term::Reset(a), Term::Reset(b)) | (Term::Abort(a), Term::Abort(b)) => {
                self.match_term(a, b)
            }
            (Term::CtxApp(p, a), Term::CtxApp(g, b)) => {
                let head_ok = if self.ctx_params.contains(p) {
                    self.bind_ctx(p, g)
                } else {
                    p == g
                };
                head_ok && self.match_term(a, b)
            }
            _ => false,
        }
    }
}

/// Does the concrete goal pair match `pair` under an injective renaming of its
/// fresh parameters to names unused elsewhere in the pair?
pub fn match_modulo_fresh(goal_lhs: &Term, goal_rhs: &Term, pair: &RelPair) -> Option<Renaming> {
    let mut st = MatchState {
        var_params: pair
            .fresh
            .iter()
            .filter_map(|f| match f {
                FreshName::Var(v) => Some(v),
                _ => None,
            })
            .collect(),
        ctx_params: pair
            .fresh
            .iter()
            .filter_map(|f| match f {
                FreshName::Ctx(k) => Some(k),
                _ => None,
            })
            .collect(),
        vars: Vec::new(),
        ctx_vars: Vec::new(),
    };
    if !st.match_term(&pair.lhs, goal_lhs) || !st.match_term(&pair.rhs, goal_rhs) {
        return None;
    }
    // injectivity within each namespace
    let targets: BTreeSet<&VarName> = st.vars.iter().map(|(_, t)| t).collect();
    if targets.len() != st.vars.len() {
        return None;
    }
    let ctx_targets: BTreeSet<&CtxVarName> = st.ctx_vars.iter().map(|(_, t)| t).collect();
    if ctx_targets.len() != st.ctx_vars.len() {
        return None;
    }
    // fresh parameters denote names unused elsewhere in the pair
    let fixed = pair.fixed_vars();
    if st.vars.iter().any(|(_, t)| fixed.contains(t)) {
        return None;
    }
    let fixed_ctx = pair.fixed_ctx_vars();
    if st.ctx_vars.iter().any(|(_, t)| fixed_ctx.contains(t)) {
        return None;
    }
    Some(Renaming {
        vars: st.vars,
        ctx_vars: st.ctx_vars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_eq;

    fn pt(s: &str, c: CalculusId) -> Rc<Term> {
        parse_term(s, c).unwrap()
    }

    fn wads_pair() -> RelPair {
        // (y, \x. y (J x)) with y fresh; J abbreviated to a free name here,
        // matching only cares about the schematic structure
        RelPair {
            lhs: pt("y", CalculusId::Lambda),
            rhs: pt("\\x. y (j0 x)", CalculusId::Lambda),
            fresh: vec![FreshName::Var(VarName::new("y").unwrap())],
        }
    }

    #[test]
    fn match_renames_fresh_param() {
        let p = wads_pair();
        let goal_l = pt("z", CalculusId::Lambda);
        let goal_r = pt("\\x. z (j0 x)", CalculusId::Lambda);
        let r = match_modulo_fresh(&goal_l, &goal_r, &p).unwrap();
        assert_eq!(r.vars.len(), 1);
        assert_eq!(r.vars[0].1.as_str(), "z");
    }

    #[test]
    fn match_requires_consistent_structure() {
        let p = wads_pair();
        // head shape differs
        let goal_l = pt("a b", CalculusId::Lambda);
        let goal_r = pt("a b", CalculusId::Lambda);
        assert!(match_modulo_fresh(&goal_l, &goal_r, &p).is_none());
    }

    #[test]
    fn match_renaming_injective() {
        // pair (a b, a) with a, b fresh: goal (c c, c) must fail
        let p = RelPair {
            lhs: pt("a b", CalculusId::Lambda),
            rhs: pt("a", CalculusId::Lambda),
            fresh: vec![
                FreshName::Var(VarName::new("a").unwrap()),
                FreshName::Var(VarName::new("b").unwrap()),
            ],
        };
        let bad_l = pt("c c", CalculusId::Lambda);
        let bad_r = pt("c", CalculusId::Lambda);
        assert!(match_modulo_fresh(&bad_l, &bad_r, &p).is_none());
        let good_l = pt("c d", CalculusId::Lambda);
        let good_r = pt("c", CalculusId::Lambda);
        assert!(match_modulo_fresh(&good_l, &good_r, &p).is_some());
    }

    #[test]
    fn match_rejects_fixed_name_target() {
        // pair (y z, y) with y fresh but z fixed: y must not rename to z
        let p = RelPair {
            lhs: pt("y z", CalculusId::Lambda),
            rhs: pt("y", CalculusId::Lambda),
            fresh: vec![FreshName::Var(VarName::new("y").unwrap())],
        };
        let goal_l = pt("z z", CalculusId::Lambda);
        let goal_r = pt("z", CalculusId::Lambda);
        assert!(match_modulo_fresh(&goal_l, &goal_r, &p).is_none());
    }

    #[test]
    fn relation_file_round_trip() {
        let text = r#"
(relation (calculus lambda)
  (pair (fresh y) "\\x. x" "y")
  (pair "\\x. x" "\\z. z"))
"#;
        let rel = Relation::parse(text).unwrap();
        assert_eq!(rel.pairs.len(), 2);
        assert_eq!(rel.pairs[0].fresh.len(), 1);
        let printed = rel.to_file_string();
        let again = Relation::parse(&printed).unwrap();
        assert_eq!(rel, again);
    }

    #[test]
    fn relation_rejects_generator_names() {
        let text = r##"(relation (calculus lambda) (pair (fresh y) "#v0" "y"))"##;
        assert!(Relation::parse(text).is_err());
    }

    #[test]
    fn relation_rejects_unused_fresh() {
        let text = r#"(relation (calculus lambda) (pair (fresh q) "\x. x" "\z. z"))"#;
        assert!(Relation::parse(text).is_err());
    }

    #[test]
    fn instantiation_uses_generator_names() {
        let p = wads_pair();
        let mut gen = FreshGen::new();
        let (l, r, map) = p.instantiate(&mut gen);
        assert!(alpha_eq(&l, &pt("#v0", CalculusId::Lambda)));
        assert!(alpha_eq(&r, &pt("\\x. #v0 (j0 x)", CalculusId::Lambda)));
        assert_eq!(map.len(), 1);
    }

    #[test]
    fn schematize_abstracts_generated_names() {
        let l = pt("#v0 #v1", CalculusId::Lambda);
        let r = pt("#v0 (\\x. #v1 x)", CalculusId::Lambda);
        let p = schematize(&l, &r);
        assert_eq!(p.fresh.len(), 2);
        // the schematic pair matches its own source
        assert!(match_modulo_fresh(&l, &r, &p).is_some());
        // and a renamed copy
        let l2 = pt("#v7 #v9", CalculusId::Lambda);
        let r2 = pt("#v7 (\\x. #v9 x)", CalculusId::Lambda);
        assert!(match_modulo_fresh(&l2, &r2, &p).is_some());
    }
}
