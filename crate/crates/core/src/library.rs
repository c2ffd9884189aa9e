//! Higher-order definitions, libraries of them, and the machinery that turns
//! a theory with higher-order literals into a first-order program.
//!
//! A body literal with higher-order arguments, such as `fold(p,C,A,B)`, is
//! *external*. Grounding replaces each distinct external literal shape by a
//! fresh instance symbol (`fold_1(C,A,B)`) and emits a connector clause
//! `fold_1(A,B,C) :- fold(p,A,B,C)` that links it to the library.

use crate::error::{Error, Result};
use crate::kernel::{
    Atom, AtomClass, Clause, HoVar, Literal, Pred, Substitution, Term, Theory, Var,
};
use crate::parse::{item_to_clause, parse_items, HoSignature};
use crate::subsumption::match_atom;
use crate::symbol::Symbol;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Identifies a definition by name and the number of higher- and
/// first-order arguments of its head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefKey {
    pub name: Symbol,
    pub ho: usize,
    pub fo: usize,
}

impl DefKey {
    pub fn of_atom(a: &Atom) -> Option<DefKey> {
        Some(DefKey {
            name: a.symbol()?,
            ho: a.ho_args.len(),
            fo: a.args.len(),
        })
    }

    pub fn arity(&self) -> usize {
        self.ho + self.fo
    }
}

impl fmt::Display for DefKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub detail: String,
}

impl Violation {
    fn new(rule: &'static str, detail: impl Into<String>) -> Violation {
        Violation {
            rule,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

fn verdict(v: Vec<Violation>) -> std::result::Result<(), Vec<Violation>> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Checks that a clause is proper: its head's higher-order arguments are
/// pairwise distinct variables, and every higher-order variable in the body
/// (as a symbol or as an argument) is one of them.
pub fn validate_proper(c: &Clause) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let mut head_vars = BTreeSet::new();
    if let Pred::Var(_) = c.head.pred {
        out.push(Violation::new("head-symbol", format!("head {} has a variable symbol", c.head)));
    }
    for p in &c.head.ho_args {
        match p {
            Pred::Var(v) => {
                if !head_vars.insert(*v) {
                    out.push(Violation::new(
                        "distinct-ho-args",
                        format!("{p} repeats in head {}", c.head),
                    ));
                }
            }
            Pred::Sym(_) => out.push(Violation::new(
                "distinct-ho-args",
                format!("head {} has symbol {p} as a higher-order argument", c.head),
            )),
        }
    }
    for l in &c.body {
        if let Pred::Var(v) = l.atom.pred {
            if !head_vars.contains(&v) {
                out.push(Violation::new(
                    "body-ho-symbol",
                    format!("{} calls {v}, which is not a head argument", l.atom),
                ));
            }
        }
        for p in &l.atom.ho_args {
            if let Pred::Var(v) = p {
                if !head_vars.contains(v) {
                    out.push(Violation::new(
                        "body-ho-arg",
                        format!("{} passes {v}, which is not a head argument", l.atom),
                    ));
                }
            }
        }
    }
    verdict(out)
}

fn is_external(a: &Atom) -> bool {
    !a.ho_args.is_empty()
}

/// Checks that a candidate theory can be read against a library: heads are
/// first-order, body literals are HO-ground, external symbols are not
/// defined in the theory, and every higher-order argument is defined in it.
pub fn validate_interpretable(t: &Theory) -> std::result::Result<(), Vec<Violation>> {
    let defined = t.head_symbols();
    let mut out = Vec::new();
    for c in &t.clauses {
        if c.head.classify() != AtomClass::FirstOrder {
            out.push(Violation::new("fo-head", format!("head {} is not first-order", c.head)));
        }
        for l in &c.body {
            if l.atom.classify() == AtomClass::HigherOrder {
                out.push(Violation::new("ho-ground", format!("{} is not HO-ground", l.atom)));
                continue;
            }
            if !is_external(&l.atom) {
                continue;
            }
            let sym = l.atom.symbol().unwrap();
            if defined.contains(&sym) {
                out.push(Violation::new(
                    "external-defined",
                    format!("{} has a symbol defined in the theory", l.atom),
                ));
            }
            for p in &l.atom.ho_args {
                let s = p.as_symbol().unwrap();
                if !defined.contains(&s) {
                    out.push(Violation::new(
                        "invention-missing",
                        format!("{} passes {s}, which has no clause", l.atom),
                    ));
                }
            }
        }
    }
    verdict(out)
}

/// Higher-order argument symbols of all external literals: the predicates
/// the theory must invent.
pub fn required_inventions(t: &Theory) -> BTreeSet<Symbol> {
    t.clauses
        .iter()
        .flat_map(|c| &c.body)
        .filter(|l| is_external(&l.atom))
        .flat_map(|l| l.atom.ho_args.iter().filter_map(Pred::as_symbol))
        .collect()
}

/// Rejects definitions whose negative literals touch a higher-order
/// variable; such definitions break the monotonicity that pruning relies on.
pub fn validate_no_ho_negation(d: &HODefinition) -> std::result::Result<(), Violation> {
    for c in &d.clauses {
        for l in c.body.iter().filter(|l| !l.positive) {
            let touches = matches!(l.atom.pred, Pred::Var(_))
                || l.atom.ho_args.iter().any(|p| matches!(p, Pred::Var(_)));
            if touches {
                return Err(Violation::new(
                    "ho-negation",
                    format!("{} negates a higher-order call in {c}", d.key()),
                ));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HODefinition {
    pub name: Symbol,
    pub ho_arity: usize,
    pub fo_arity: usize,
    pub clauses: Vec<Clause>,
}

impl HODefinition {
    /// Groups clauses that share one head shape.
    pub fn new(clauses: Vec<Clause>) -> Result<HODefinition> {
        let first = clauses
            .first()
            .ok_or_else(|| Error::Library("definition has no clauses".into()))?;
        let key = DefKey::of_atom(&first.head)
            .ok_or_else(|| Error::Library(format!("head {} has a variable symbol", first.head)))?;
        if key.ho == 0 {
            return Err(Error::Library(format!(
                "{key} has no higher-order arguments"
            )));
        }
        for c in &clauses {
            if DefKey::of_atom(&c.head) != Some(key) {
                return Err(Error::Library(format!(
                    "clause {c} does not match the head shape of {key}"
                )));
            }
        }
        Ok(HODefinition {
            name: key.name,
            ho_arity: key.ho,
            fo_arity: key.fo,
            clauses,
        })
    }

    pub fn key(&self) -> DefKey {
        DefKey {
            name: self.name,
            ho: self.ho_arity,
            fo: self.fo_arity,
        }
    }

    /// The most general head: `name(#H0,..,V0,..)`.
    pub fn head(&self) -> Atom {
        Atom {
            pred: Pred::Sym(self.name),
            ho_args: (0..self.ho_arity as u32).map(|i| Pred::Var(HoVar(i))).collect(),
            args: (0..self.fo_arity as u32).map(|i| Term::Var(Var(i))).collect(),
        }
    }

    /// Slot names used for invented predicates, taken from the first
    /// clause's higher-order variable names (`#P` gives `p`).
    pub fn slot_names(&self) -> Vec<String> {
        (0..self.ho_arity)
            .map(|i| {
                let letter = b"pqrstuvwxyz".get(i).copied().unwrap_or(b'h');
                if i < 11 {
                    (letter as char).to_string()
                } else {
                    format!("h{i}")
                }
            })
            .collect()
    }

    fn is_self_call(&self, a: &Atom) -> bool {
        a.symbol() == Some(self.name)
            && a.ho_args.len() == self.ho_arity
            && a.args.len() == self.fo_arity
    }
}

/// A context-passing variant: `extra` fresh first-order arguments appended
/// to the head, to every higher-order call, and to every recursive call.
pub fn make_contextual(d: &HODefinition, extra: usize) -> HODefinition {
    let clauses = d
        .clauses
        .iter()
        .map(|c| {
            let base = c.vars().iter().map(|v| v.0 + 1).max().unwrap_or(0);
            let fresh: Vec<Term> = (0..extra as u32).map(|i| Term::Var(Var(base + i))).collect();
            let mut head = c.head.clone();
            head.args.extend(fresh.iter().cloned());
            let body = c
                .body
                .iter()
                .map(|l| {
                    let mut l = l.clone();
                    if matches!(l.atom.pred, Pred::Var(_)) || d.is_self_call(&l.atom) {
                        l.atom.args.extend(fresh.iter().cloned());
                    }
                    l
                })
                .collect();
            Clause { head, body }
        })
        .collect();
    HODefinition {
        name: d.name,
        ho_arity: d.ho_arity,
        fo_arity: d.fo_arity + extra,
        clauses,
    }
}

#[derive(Clone, Debug, Default)]
pub struct Library {
    defs: Vec<HODefinition>,
}

impl Library {
    /// Builds a library, rejecting duplicate keys.
    pub fn new(defs: Vec<HODefinition>) -> Result<Library> {
        let mut seen = BTreeSet::new();
        for d in &defs {
            if !seen.insert(d.key()) {
                return Err(Error::Library(format!("{} is defined twice", d.key())));
            }
        }
        Ok(Library { defs })
    }

    /// Builds a library without the uniqueness check, so that ambiguity can
    /// be observed downstream.
    pub fn new_unchecked(defs: Vec<HODefinition>) -> Library {
        Library { defs }
    }

    /// Parses a library file. Clauses are grouped into definitions by head
    /// shape; `contextual(name/arity, k).` adds a variant with `k` extra
    /// arguments. With `validate`, every clause must be proper and no
    /// definition may negate a higher-order call.
    pub fn parse(text: &str, validate: bool) -> Result<Library> {
        let mut groups: BTreeMap<DefKey, Vec<Clause>> = BTreeMap::new();
        let mut order = Vec::new();
        let mut requests = Vec::new();
        for item in parse_items(text)? {
            if item.body.is_empty() && item.head.name() == Some("contextual") {
                let args = item.head.args();
                let spec = match args {
                    [crate::parse::Ast::Name(slash, na), crate::parse::Ast::Int(k)]
                        if slash == "/" && na.len() == 2 && *k >= 1 =>
                    {
                        match (&na[0], &na[1]) {
                            (crate::parse::Ast::Name(n, e), crate::parse::Ast::Int(a)) if e.is_empty() => {
                                Some((Symbol::intern(n), *a as usize, *k as usize))
                            }
                            _ => None,
                        }
                    }
                    _ => None,
                };
                let spec = spec.ok_or_else(|| {
                    Error::parse(item.line, item.col, "expected contextual(name/arity, k)")
                })?;
                requests.push((spec, item.line, item.col));
                continue;
            }
            let c = item_to_clause(&item, None)?;
            let key = DefKey::of_atom(&c.head).ok_or_else(|| {
                Error::parse(item.line, item.col, "definition head has a variable symbol")
            })?;
            if key.ho == 0 {
                return Err(Error::parse(
                    item.line,
                    item.col,
                    format!("{key} has no higher-order arguments"),
                ));
            }
            if validate {
                if let Err(v) = validate_proper(&c) {
                    return Err(Error::parse(item.line, item.col, format!("improper clause: {}", v[0])));
                }
            }
            if !groups.contains_key(&key) {
                order.push(key);
            }
            groups.entry(key).or_default().push(c);
        }
        let mut defs = Vec::new();
        for key in order {
            let d = HODefinition::new(groups.remove(&key).unwrap())?;
            if validate {
                validate_no_ho_negation(&d).map_err(|v| Error::Library(v.to_string()))?;
            }
            defs.push(d);
        }
        for ((name, arity, extra), line, col) in requests {
            let base = defs
                .iter()
                .find(|d| d.name == name && d.ho_arity + d.fo_arity == arity)
                .ok_or_else(|| Error::parse(line, col, format!("contextual: no definition {name}/{arity}")))?;
            defs.push(make_contextual(base, extra));
        }
        Library::new(defs)
    }

    pub fn definitions(&self) -> &[HODefinition] {
        &self.defs
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn get(&self, key: DefKey) -> Option<&HODefinition> {
        self.defs.iter().find(|d| d.key() == key)
    }

    /// Definitions whose generic head matches `a`.
    pub fn matching(&self, a: &Atom) -> Vec<&HODefinition> {
        match DefKey::of_atom(a) {
            Some(k) => self.defs.iter().filter(|d| d.key() == k).collect(),
            None => Vec::new(),
        }
    }

    /// Which leading arguments are higher-order, for the parser.
    pub fn signature(&self) -> HoSignature {
        let mut sig = HoSignature::new();
        for d in &self.defs {
            sig.insert(d.name, d.ho_arity + d.fo_arity, d.ho_arity);
        }
        sig
    }

    /// All library clauses.
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.defs.iter().flat_map(|d| &d.clauses)
    }
}

/// One external literal of a theory matched against the library.
#[derive(Clone, Debug, PartialEq)]
pub struct ExternalMatch {
    pub clause: usize,
    pub position: usize,
    pub literal: Atom,
    pub def: DefKey,
    /// `mat_L(l)`: maps the generic head of the definition onto the literal.
    pub matcher: Substitution,
}

/// Matches every external literal with exactly one library definition.
pub fn check_compatible(
    t: &Theory,
    lib: &Library,
) -> std::result::Result<Vec<ExternalMatch>, Violation> {
    let mut out = Vec::new();
    for (ci, c) in t.clauses.iter().enumerate() {
        for (li, l) in c.body.iter().enumerate() {
            if !is_external(&l.atom) {
                continue;
            }
            let found = lib.matching(&l.atom);
            let d = match found.as_slice() {
                [d] => *d,
                [] => {
                    return Err(Violation::new(
                        "unmatched",
                        format!("{} matches no definition", l.atom),
                    ))
                }
                _ => {
                    return Err(Violation::new(
                        "ambiguous",
                        format!("{} matches {} definitions", l.atom, found.len()),
                    ))
                }
            };
            let matcher = match_atom(&d.head(), &l.atom).ok_or_else(|| {
                Violation::new("unmatched", format!("{} does not match {}", l.atom, d.key()))
            })?;
            out.push(ExternalMatch {
                clause: ci,
                position: li,
                literal: l.atom.clone(),
                def: d.key(),
                matcher,
            });
        }
    }
    Ok(out)
}

/// A definition together with the higher-order arguments it is applied to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    pub def: DefKey,
    pub ho_args: Vec<Symbol>,
}

impl Instance {
    /// `inst(V0..Vn) :- name(ho_args, V0..Vn).`
    pub fn connector(&self, symbol: Symbol) -> Clause {
        let vars: Vec<Term> = (0..self.def.fo as u32).map(|i| Term::Var(Var(i))).collect();
        Clause::new(
            Atom {
                pred: Pred::Sym(symbol),
                ho_args: Vec::new(),
                args: vars.clone(),
            },
            vec![Literal::pos(Atom {
                pred: Pred::Sym(self.def.name),
                ho_args: self.ho_args.iter().map(|s| Pred::Sym(*s)).collect(),
                args: vars,
            })],
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LGrounding {
    pub principal: Theory,
    pub connectors: Vec<Clause>,
    pub library_clauses: Vec<Clause>,
    pub instance_names: BTreeMap<Instance, Symbol>,
    pub overlap_warnings: Vec<String>,
}

impl LGrounding {
    /// Instance symbol to instance, the inverse of `instance_names`.
    pub fn annotations(&self) -> BTreeMap<Symbol, Instance> {
        self.instance_names
            .iter()
            .map(|(i, s)| (*s, i.clone()))
            .collect()
    }

    /// Every clause needed to run the principal program, besides BK.
    pub fn program(&self) -> Theory {
        self.principal
            .clauses
            .iter()
            .chain(&self.connectors)
            .chain(&self.library_clauses)
            .cloned()
            .collect()
    }
}

/// Deterministic instance symbol for the `k`-th (1-based) instance of a
/// definition name.
pub fn instance_symbol(name: Symbol, k: usize) -> Symbol {
    Symbol::intern(&format!("{name}_{k}"))
}

/// Invented predicate symbol for a slot of the `k`-th instance.
pub fn slot_symbol(name: Symbol, slot: &str, k: usize) -> Symbol {
    Symbol::intern(&format!("{name}_{slot}_{k}"))
}

/// Builds the L-grounding of a compatible theory.
pub fn ground(t: &Theory, lib: &Library) -> Result<LGrounding> {
    let matches = check_compatible(t, lib).map_err(|v| Error::Library(v.to_string()))?;
    let mut instances: BTreeSet<Instance> = BTreeSet::new();
    for m in &matches {
        instances.insert(Instance {
            def: m.def,
            ho_args: m.literal.ho_args.iter().filter_map(Pred::as_symbol).collect(),
        });
    }
    // Number instances per name, ordered by (arity, higher-order tuple).
    let mut by_name: BTreeMap<Symbol, Vec<&Instance>> = BTreeMap::new();
    for i in &instances {
        by_name.entry(i.def.name).or_default().push(i);
    }
    let mut instance_names = BTreeMap::new();
    for (name, mut list) in by_name {
        list.sort_by(|a, b| (a.def.arity(), a.def.fo, &a.ho_args).cmp(&(b.def.arity(), b.def.fo, &b.ho_args)));
        for (k, inst) in list.into_iter().enumerate() {
            instance_names.insert(inst.clone(), instance_symbol(name, k + 1));
        }
    }
    let mut principal = t.clone();
    for m in &matches {
        let inst = Instance {
            def: m.def,
            ho_args: m.literal.ho_args.iter().filter_map(Pred::as_symbol).collect(),
        };
        let sym = instance_names[&inst];
        let lit = &mut principal.clauses[m.clause].body[m.position].atom;
        lit.pred = Pred::Sym(sym);
        lit.ho_args.clear();
    }
    let connectors = instance_names
        .iter()
        .map(|(inst, sym)| inst.connector(*sym))
        .collect();
    let used: BTreeSet<DefKey> = instances.iter().map(|i| i.def).collect();
    let library_clauses = lib
        .definitions()
        .iter()
        .filter(|d| used.contains(&d.key()))
        .flat_map(|d| d.clauses.iter().cloned())
        .collect();
    let mut overlap_warnings = Vec::new();
    let list: Vec<&Instance> = instances.iter().collect();
    for (i, a) in list.iter().enumerate() {
        for b in &list[i + 1..] {
            if a.def == b.def && a.def.ho > 1 {
                let shared = a.ho_args.iter().zip(&b.ho_args).filter(|(x, y)| x == y).count();
                if shared > 0 && shared < a.def.ho {
                    overlap_warnings.push(format!(
                        "{} and {} share {shared} of {} higher-order arguments",
                        instance_names[*a], instance_names[*b], a.def.ho
                    ));
                }
            }
        }
    }
    Ok(LGrounding {
        principal,
        connectors,
        library_clauses,
        instance_names,
        overlap_warnings,
    })
}

pub fn principal_program(g: &LGrounding) -> Theory {
    g.principal.clone()
}

/// Replaces instance literals in a principal program by the external
/// literals they stand for.
pub fn reattach(principal: &Theory, annotations: &BTreeMap<Symbol, Instance>) -> Theory {
    let mut t = principal.clone();
    for c in &mut t.clauses {
        for l in &mut c.body {
            if let Some(inst) = l.atom.symbol().and_then(|s| annotations.get(&s)) {
                l.atom.pred = Pred::Sym(inst.def.name);
                l.atom.ho_args = inst.ho_args.iter().map(|s| Pred::Sym(*s)).collect();
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_clause, parse_theory_with};

    const FOLD: &str = "fold(#P,A,B,C) :- empty(B), C = A.
        fold(#P,A,B,C) :- head(B,H), tail(B,T), #P(A,H,W), fold(#P,W,T,C).";

    fn lib() -> Library {
        Library::parse(FOLD, true).unwrap()
    }

    fn reverse(lib: &Library) -> Theory {
        parse_theory_with(
            "reverse(A,B) :- empty(C), fold(p,C,A,B).
             p(A,B,C) :- head(C,B), tail(C,A).",
            Some(&lib.signature()),
        )
        .unwrap()
    }

    #[test]
    fn proper_clauses() {
        assert!(validate_proper(&parse_clause("fold(#P,A,B,C) :- empty(B), C = A.").unwrap()).is_ok());
        let v = validate_proper(&parse_clause("f(#P,A) :- #Q(A).").unwrap()).unwrap_err();
        assert_eq!(v[0].rule, "body-ho-symbol");
        let v = validate_proper(&parse_clause("f(#P,#P,A) :- #P(A).").unwrap()).unwrap_err();
        assert_eq!(v[0].rule, "distinct-ho-args");
    }

    #[test]
    fn reverse_is_interpretable_and_compatible() {
        let l = lib();
        let t = reverse(&l);
        assert!(validate_interpretable(&t).is_ok());
        assert_eq!(
            required_inventions(&t),
            [Symbol::intern("p")].into_iter().collect()
        );
        let m = check_compatible(&t, &l).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].matcher.to_string(), "{#P->p, A->C, B->A, C->B}");
    }

    #[test]
    fn missing_invention_and_defined_external() {
        let sig = lib().signature();
        let t = parse_theory_with("f(A) :- fold(p,C,A,B).", Some(&sig)).unwrap();
        let v = validate_interpretable(&t).unwrap_err();
        assert!(v.iter().any(|x| x.rule == "invention-missing"));
    }

    #[test]
    fn arity_mismatch_is_unmatched() {
        let l = lib();
        let mut sig = HoSignature::new();
        sig.insert(Symbol::intern("fold"), 3, 1);
        let t = parse_theory_with("f(A) :- fold(p,A,B). p(A,B,C) :- q(A).", Some(&sig)).unwrap();
        assert_eq!(check_compatible(&t, &l).unwrap_err().rule, "unmatched");
    }

    #[test]
    fn duplicate_definitions() {
        let d = lib().definitions()[0].clone();
        assert!(Library::new(vec![d.clone(), d.clone()]).is_err());
        let l = Library::new_unchecked(vec![d.clone(), d]);
        let t = reverse(&l);
        assert_eq!(check_compatible(&t, &l).unwrap_err().rule, "ambiguous");
    }

    #[test]
    fn grounding_reverse() {
        let l = lib();
        let g = ground(&reverse(&l), &l).unwrap();
        assert_eq!(
            g.principal.to_string(),
            "reverse(A,B) :- empty(C), fold_1(C,A,B).\np(A,B,C) :- head(C,B), tail(C,A)."
        );
        assert_eq!(g.connectors.len(), 1);
        assert_eq!(g.connectors[0].to_string(), "fold_1(A,B,C) :- fold(p,A,B,C).");
        assert_eq!(g.library_clauses.len(), 2);
        let back = reattach(&g.principal, &g.annotations());
        assert_eq!(ground(&back, &l).unwrap(), g);
    }

    #[test]
    fn contextual_map() {
        let l = Library::parse(
            "map(#P,[],[]).
             map(#P,[H1|T1],[H2|T2]) :- #P(H1,H2), map(#P,T1,T2).
             contextual(map/3, 1).",
            true,
        )
        .unwrap();
        let m4 = &l.definitions()[1];
        assert_eq!(m4.fo_arity, 3);
        let text: Vec<String> = m4.clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(text[0], "map(#P,[],[],A).");
        assert_eq!(text[1], "map(#P,[A|B],[C|D],E) :- #P(A,C,E), map(#P,B,D,E).");
    }

    #[test]
    fn negated_ho_call_is_rejected() {
        let err = Library::parse("neg(#P,A) :- \\+ #P(A).", true).unwrap_err();
        assert!(err.to_string().contains("ho-negation"));
        assert!(Library::parse("neg(#P,A) :- \\+ #P(A).", false).is_ok());
        assert!(Library::parse("g(#P,A) :- \\+ empty(A), #P(A).", true).is_ok());
    }
}
