//! Constraints, the reference pruning check, call graphs and separability.

use crate::kernel::Theory;
use crate::library::Instance;
use crate::subsumption::{is_generalization, is_specialization};
use crate::symbol::Symbol;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ConstraintKind {
    Generalization,
    Specialization,
    Elimination,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub theory: Theory,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[", self.kind)?;
        for (i, c) in self.theory.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A principal program proposed by the generator.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub theory: Theory,
    /// Instance symbol to the external literal it stands for.
    pub annotations: BTreeMap<Symbol, Instance>,
    pub size: usize,
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.theory.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Heads of `p` called from some clause of `p`.
fn called_symbols(p: &Theory) -> HashSet<Symbol> {
    p.clauses
        .iter()
        .flat_map(|c| c.body.iter().filter_map(|l| l.atom.symbol()))
        .collect()
}

/// Elimination: `e` occurs in `p` clause for clause (up to renaming, as
/// both sides are canonical) and no clause of `p` calls a head of `e`.
pub fn eliminates(e: &Theory, p: &Theory) -> bool {
    use crate::kernel::canonical_clause;
    let pc: Vec<_> = p.clauses.iter().map(canonical_clause).collect();
    let contained = e
        .clauses
        .iter()
        .all(|c| pc.contains(&canonical_clause(c)));
    if !contained {
        return false;
    }
    let called = called_symbols(p);
    !e.head_symbols().iter().any(|h| called.contains(h))
}

/// The reference store: a plain list, every check against every constraint.
#[derive(Clone, Debug, Default)]
pub struct ConstraintStore {
    pub constraints: Vec<Constraint>,
}

impl ConstraintStore {
    pub fn new() -> ConstraintStore {
        ConstraintStore::default()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Adds a constraint; returns false when an identical one is present.
    pub fn add(&mut self, c: Constraint) -> bool {
        if self.constraints.contains(&c) {
            return false;
        }
        self.constraints.push(c);
        true
    }

    /// Index of the first constraint pruning `p`.
    pub fn prunes(&self, p: &Theory) -> Option<usize> {
        self.constraints.iter().position(|c| match c.kind {
            ConstraintKind::Generalization => is_generalization(p, &c.theory),
            ConstraintKind::Specialization => is_specialization(p, &c.theory),
            ConstraintKind::Elimination => eliminates(&c.theory, p),
        })
    }
}

/// Every defined head is reachable from `main` along clause calls and from
/// instance symbols to their higher-order arguments.
pub fn call_graph_ok(p: &Theory, annotations: &BTreeMap<Symbol, Instance>, main: Symbol) -> bool {
    let mut edges: HashMap<Symbol, BTreeSet<Symbol>> = HashMap::new();
    for c in &p.clauses {
        let Some(h) = c.head.symbol() else { return false };
        let e = edges.entry(h).or_default();
        for l in &c.body {
            if let Some(s) = l.atom.symbol() {
                e.insert(s);
            }
            for a in &l.atom.ho_args {
                if let Some(s) = a.as_symbol() {
                    e.insert(s);
                }
            }
        }
    }
    for (s, inst) in annotations {
        edges.entry(*s).or_default().extend(inst.ho_args.iter().copied());
    }
    let mut seen = HashSet::from([main]);
    let mut stack = vec![main];
    while let Some(s) = stack.pop() {
        if let Some(next) = edges.get(&s) {
            for n in next {
                if seen.insert(*n) {
                    stack.push(*n);
                }
            }
        }
    }
    p.head_symbols().iter().all(|h| seen.contains(h))
}

/// Maximal separable clause sets, one per head symbol. Clauses that call an
/// instance, define a higher-order argument of one, or call their own head
/// are never separable.
pub fn separable_subsets(p: &Theory, annotations: &BTreeMap<Symbol, Instance>) -> Vec<Theory> {
    let ho_args: HashSet<Symbol> = annotations
        .values()
        .flat_map(|i| i.ho_args.iter().copied())
        .collect();
    let mut groups: BTreeMap<Symbol, Vec<_>> = BTreeMap::new();
    for c in &p.clauses {
        let Some(h) = c.head.symbol() else { continue };
        let linked = ho_args.contains(&h)
            || c.body.iter().any(|l| {
                l.atom.symbol().is_some_and(|s| annotations.contains_key(&s) || s == h)
                    || !l.atom.ho_args.is_empty()
            });
        if !linked {
            groups.entry(h).or_default().push(c.clone());
        }
    }
    groups.into_values().map(Theory::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{ground, Library};
    use crate::parse::{parse_theory, parse_theory_with};

    #[test]
    fn reference_store_semantics() {
        let prog = parse_theory("f(A) :- g(A).").unwrap();
        let mut s = ConstraintStore::new();
        assert_eq!(s.prunes(&prog), None);
        assert!(s.add(Constraint {
            kind: ConstraintKind::Generalization,
            theory: prog.clone()
        }));
        assert_eq!(s.prunes(&prog), Some(0));
        assert!(!s.add(Constraint {
            kind: ConstraintKind::Generalization,
            theory: prog.clone()
        }));
    }

    #[test]
    fn elimination_needs_no_caller() {
        let e = parse_theory("f(A) :- g(A).").unwrap();
        let p = parse_theory("f(A) :- g(A). h(A) :- i(A).").unwrap();
        assert!(eliminates(&e, &p));
        let q = parse_theory("f(A) :- g(A). f(A) :- i(A,B), f(B).").unwrap();
        assert!(!eliminates(&e, &q));
    }

    #[test]
    fn separable_sets() {
        let p = parse_theory("f(A) :- g(A). h(A) :- i(A).").unwrap();
        assert_eq!(separable_subsets(&p, &BTreeMap::new()).len(), 2);
        let r = parse_theory("f(A) :- t(A,B), f(B).").unwrap();
        assert!(separable_subsets(&r, &BTreeMap::new()).is_empty());
    }

    #[test]
    fn grounded_reverse_is_linked() {
        let lib = Library::parse(
            "fold(#_,X,[],X).
             fold(#P,Acc,[H|T],Y) :- #P(Acc,H,W), fold(#P,W,T,Y).",
            true,
        )
        .unwrap();
        let t = parse_theory_with(
            "reverse(A,B) :- empty(C), fold(fold_p_1,C,A,B).
             fold_p_1(A,B,C) :- head(C,B), tail(C,A).",
            Some(&lib.signature()),
        )
        .unwrap();
        let g = ground(&t, &lib).unwrap();
        let ann = g.annotations();
        let main = Symbol::intern("reverse");
        assert!(call_graph_ok(&g.principal, &ann, main));
        assert!(separable_subsets(&g.principal, &ann).is_empty());
        let orphan = parse_theory("reverse(A,B) :- empty(A), empty(B). p1(A,B) :- head(A,B).").unwrap();
        assert!(!call_graph_ok(&orphan, &BTreeMap::new(), main));
    }
}
