//! θ-subsumption between clauses and between theories.
//!
//! `c1` subsumes `c2` when some substitution over the variables of `c1` maps
//! the head of `c1` onto the head of `c2` and every body literal of `c1` onto
//! a body literal of `c2` of the same polarity. Variables of `c2` are treated
//! as constants. Clauses are read as sets, so duplicate literals collapse.

use crate::kernel::{Atom, Clause, HoVar, Literal, Pred, Term, Theory, Var};
use crate::kernel::Substitution;
use std::collections::HashMap;

/// One subsumed clause together with the clause that subsumes it and the
/// substitution witnessing it.
#[derive(Clone, Debug, PartialEq)]
pub struct ClauseMatch {
    /// Index into the subsumed theory.
    pub subsumed: usize,
    /// Index into the subsuming theory.
    pub by: usize,
    pub substitution: Substitution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsumptionWitness {
    pub matches: Vec<ClauseMatch>,
}

impl SubsumptionWitness {
    /// The substitution of the first (for clauses, the only) match.
    pub fn substitution(&self) -> Option<&Substitution> {
        self.matches.first().map(|m| &m.substitution)
    }
}

#[derive(Clone, Default)]
struct Bindings {
    fo: HashMap<Var, Term>,
    ho: HashMap<HoVar, Pred>,
    fo_trail: Vec<Var>,
    ho_trail: Vec<HoVar>,
}

impl Bindings {
    fn mark(&self) -> (usize, usize) {
        (self.fo_trail.len(), self.ho_trail.len())
    }

    fn undo(&mut self, mark: (usize, usize)) {
        while self.fo_trail.len() > mark.0 {
            let v = self.fo_trail.pop().unwrap();
            self.fo.remove(&v);
        }
        while self.ho_trail.len() > mark.1 {
            let v = self.ho_trail.pop().unwrap();
            self.ho.remove(&v);
        }
    }

    fn pred(&mut self, pat: Pred, target: Pred) -> bool {
        match pat {
            Pred::Sym(_) => pat == target,
            Pred::Var(v) => match self.ho.get(&v) {
                Some(b) => *b == target,
                None => {
                    self.ho.insert(v, target);
                    self.ho_trail.push(v);
                    true
                }
            },
        }
    }

    fn term(&mut self, pat: &Term, target: &Term) -> bool {
        match pat {
            Term::Var(v) => match self.fo.get(v) {
                Some(b) => b == target,
                None => {
                    self.fo.insert(*v, target.clone());
                    self.fo_trail.push(*v);
                    true
                }
            },
            Term::App(f, xs) => match target {
                Term::App(g, ys) if f == g && xs.len() == ys.len() => {
                    xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
                }
                _ => false,
            },
            _ => pat == target,
        }
    }

    /// One-way match of `pat` onto `target`; on failure the bindings are
    /// left as they were.
    fn atom(&mut self, pat: &Atom, target: &Atom) -> bool {
        if pat.ho_args.len() != target.ho_args.len() || pat.args.len() != target.args.len() {
            return false;
        }
        let m = self.mark();
        let ok = self.pred(pat.pred, target.pred)
            && pat
                .ho_args
                .iter()
                .zip(&target.ho_args)
                .all(|(x, y)| self.pred(*x, *y))
            && pat.args.iter().zip(&target.args).all(|(x, y)| self.term(x, y));
        if !ok {
            self.undo(m);
        }
        ok
    }

    fn into_substitution(self) -> Substitution {
        Substitution {
            ho: self.ho.into_iter().collect(),
            fo: self.fo.into_iter().collect(),
        }
    }
}

fn compatible(pat: &Literal, target: &Literal) -> bool {
    pat.positive == target.positive
        && pat.atom.ho_args.len() == target.atom.ho_args.len()
        && pat.atom.args.len() == target.atom.args.len()
        && match pat.atom.pred {
            Pred::Sym(_) => pat.atom.pred == target.atom.pred,
            Pred::Var(_) => true,
        }
}

fn dedup(body: &[Literal]) -> Vec<&Literal> {
    let mut out: Vec<&Literal> = Vec::with_capacity(body.len());
    for l in body {
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

/// One-way matching: a substitution over the variables of `pat` that maps it
/// onto `target`, whose variables stay fixed.
pub fn match_atom(pat: &Atom, target: &Atom) -> Option<Substitution> {
    let mut b = Bindings::default();
    b.atom(pat, target).then(|| b.into_substitution())
}

/// Decides `c1 ≤θ c2`.
pub fn clause_subsumes(c1: &Clause, c2: &Clause) -> Option<SubsumptionWitness> {
    let mut b = Bindings::default();
    if !b.atom(&c1.head, &c2.head) {
        return None;
    }
    let pats = dedup(&c1.body);
    let targets = dedup(&c2.body);
    let mut order: Vec<(usize, Vec<usize>)> = pats
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let cands = targets
                .iter()
                .enumerate()
                .filter(|(_, t)| compatible(p, t))
                .map(|(j, _)| j)
                .collect();
            (i, cands)
        })
        .collect();
    if order.iter().any(|(_, c)| c.is_empty()) {
        return None;
    }
    order.sort_by_key(|(_, c)| c.len());
    if !backtrack(&order, &pats, &targets, &mut b, 0) {
        return None;
    }
    Some(SubsumptionWitness {
        matches: vec![ClauseMatch {
            subsumed: 0,
            by: 0,
            substitution: b.into_substitution(),
        }],
    })
}

fn backtrack(
    order: &[(usize, Vec<usize>)],
    pats: &[&Literal],
    targets: &[&Literal],
    b: &mut Bindings,
    depth: usize,
) -> bool {
    let Some((pi, cands)) = order.get(depth) else {
        return true;
    };
    let before = b.mark();
    for &ti in cands {
        if b.atom(&pats[*pi].atom, &targets[ti].atom) {
            if backtrack(order, pats, targets, b, depth + 1) {
                return true;
            }
            b.undo(before);
        }
    }
    false
}

/// Decides whether every clause of `t2` is subsumed by some clause of `t1`.
pub fn theory_subsumes(t1: &Theory, t2: &Theory) -> Option<SubsumptionWitness> {
    let mut matches = Vec::with_capacity(t2.len());
    for (j, c2) in t2.clauses.iter().enumerate() {
        let found = t1
            .clauses
            .iter()
            .enumerate()
            .find_map(|(i, c1)| clause_subsumes(c1, c2).map(|w| (i, w)))?;
        let (i, w) = found;
        matches.push(ClauseMatch {
            subsumed: j,
            by: i,
            substitution: w.matches.into_iter().next().unwrap().substitution,
        });
    }
    Some(SubsumptionWitness { matches })
}

/// `t1` is a generalization of `t2`: `t1 ≤θ t2`.
pub fn is_generalization(t1: &Theory, t2: &Theory) -> bool {
    theory_subsumes(t1, t2).is_some()
}

/// `t1` is a specialization of `t2`: `t2 ≤θ t1`.
pub fn is_specialization(t1: &Theory, t2: &Theory) -> bool {
    theory_subsumes(t2, t1).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Substitutable;
    use crate::parse::{parse_clause, parse_theory};

    fn c(s: &str) -> Clause {
        parse_clause(s).unwrap()
    }

    #[test]
    fn reflexive() {
        let x = c("p(A,B) :- q(A,C), r(C,B).");
        let w = clause_subsumes(&x, &x).unwrap();
        assert_eq!(x.apply(w.substitution().unwrap()), x);
    }

    #[test]
    fn shorter_body_subsumes_longer() {
        let f = c("p1(A) :- p(A).");
        let s = c("p1(A) :- p(A), q(A).");
        let w = clause_subsumes(&f, &s).unwrap();
        assert_eq!(w.substitution().unwrap().to_string(), "{A->A}");
        assert!(clause_subsumes(&s, &f).is_none());
    }

    #[test]
    fn theory_level() {
        let a = parse_theory("p(A) :- q(A).").unwrap();
        let b = parse_theory("p(A) :- r(A).").unwrap();
        assert!(theory_subsumes(&a, &b).is_none());
        assert!(is_generalization(&a, &a) && is_specialization(&a, &a));
    }

    #[test]
    fn heads_only_map_to_heads() {
        let a = c("p(A) :- p(B).");
        let b = c("q(A) :- p(A).");
        assert!(clause_subsumes(&a, &b).is_none());
    }

    #[test]
    fn polarity_must_match() {
        let a = c("p(A) :- \\+ q(A).");
        let b = c("p(A) :- q(A).");
        assert!(clause_subsumes(&a, &b).is_none());
        assert!(clause_subsumes(&a, &c("p(A) :- q(A), \\+ q(A).")).is_some());
    }

    #[test]
    fn variables_of_target_are_rigid() {
        // p(A,A) does not subsume p(A,B), but p(A,B) subsumes p(A,A).
        assert!(clause_subsumes(&c("p(A,A)."), &c("p(A,B).")).is_none());
        assert!(clause_subsumes(&c("p(A,B)."), &c("p(A,A).")).is_some());
    }
}
