use super::{Atom, Clause, HoVar, Literal, Pred, Substitutable, Substitution, Term, Theory, Var};
use std::collections::{BTreeMap, BTreeSet};

/// Body-only variable count up to which canonicalization is exact (it tries
/// every numbering). Above it a first-occurrence heuristic is used.
const EXACT_LIMIT: usize = 7;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarSet {
    pub fo: BTreeSet<Var>,
    pub ho: BTreeSet<HoVar>,
}

impl VarSet {
    pub fn of_clause(c: &Clause) -> VarSet {
        VarSet {
            fo: c.vars().into_iter().collect(),
            ho: c.ho_vars().into_iter().collect(),
        }
    }

    pub fn extend(&mut self, c: &Clause) {
        self.fo.extend(c.vars());
        self.ho.extend(c.ho_vars());
    }
}

/// A variant of `c` sharing no variable with `avoid`. Variables are shifted
/// past the largest avoided id, so the renaming is a bijection.
pub fn rename_apart(c: &Clause, avoid: &VarSet) -> Clause {
    let fo = c.vars();
    let ho = c.ho_vars();
    let mut s = Substitution::new();
    if fo.iter().any(|v| avoid.fo.contains(v)) {
        let base = avoid.fo.iter().next_back().map_or(0, |v| v.0 + 1);
        for v in &fo {
            s.fo.insert(*v, Term::Var(Var(base + v.0)));
        }
    }
    if ho.iter().any(|v| avoid.ho.contains(v)) {
        let base = avoid.ho.iter().next_back().map_or(0, |v| v.0 + 1);
        for v in &ho {
            s.ho.insert(*v, Pred::Var(HoVar(base + v.0)));
        }
    }
    if s.is_empty() {
        c.clone()
    } else {
        c.apply(&s)
    }
}

fn renumber_head(head: &Atom) -> (Substitution, u32) {
    let mut s = Substitution::new();
    let mut vs = Vec::new();
    head.collect_vars(&mut vs);
    let mut next = 0;
    for v in vs {
        if let std::collections::btree_map::Entry::Vacant(e) = s.fo.entry(v) {
            e.insert(Term::Var(Var(next)));
            next += 1;
        }
    }
    (s, next)
}

fn sorted_body(body: &[Literal], s: &Substitution) -> Vec<Literal> {
    let mut out: Vec<Literal> = body.iter().map(|l| l.apply(s)).collect();
    out.sort();
    out.dedup();
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn canonical_ho(c: Clause) -> Clause {
    let hv = c.ho_vars();
    if hv.is_empty() || hv.iter().enumerate().all(|(i, v)| v.0 == i as u32) {
        return c;
    }
    let mut s = Substitution::new();
    for (i, v) in hv.iter().enumerate() {
        s.ho.insert(*v, Pred::Var(HoVar(i as u32)));
    }
    let mut out = c.apply(&s);
    out.body.sort();
    out.body.dedup();
    out
}

/// Canonical representative of a clause up to variable renaming and body
/// order. Duplicate body literals are collapsed.
pub fn canonical_clause(c: &Clause) -> Clause {
    let (mut s, h) = renumber_head(&c.head);
    let body_only: Vec<Var> = c.vars().into_iter().filter(|v| !s.fo.contains_key(v)).collect();
    let head = c.head.apply(&s);
    let body = if body_only.is_empty() {
        sorted_body(&c.body, &s)
    } else if body_only.len() <= EXACT_LIMIT {
        let mut perm: Vec<usize> = (0..body_only.len()).collect();
        let mut best: Option<Vec<Literal>> = None;
        loop {
            for (slot, v) in perm.iter().zip(&body_only) {
                s.fo.insert(*v, Term::Var(Var(h + *slot as u32)));
            }
            let cand = sorted_body(&c.body, &s);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.unwrap()
    } else {
        // Order literals with body-only variables blanked, then number by
        // first occurrence in that order.
        let blank: BTreeMap<Var, Term> = body_only.iter().map(|v| (*v, Term::Var(Var(u32::MAX)))).collect();
        let blank_s = Substitution {
            ho: BTreeMap::new(),
            fo: s.fo.clone().into_iter().chain(blank).collect(),
        };
        let mut order: Vec<(Literal, &Literal)> =
            c.body.iter().map(|l| (l.apply(&blank_s), l)).collect();
        order.sort();
        let mut next = h;
        for (_, l) in &order {
            let mut vs = Vec::new();
            l.atom.collect_vars(&mut vs);
            for v in vs {
                if let std::collections::btree_map::Entry::Vacant(e) = s.fo.entry(v) {
                    e.insert(Term::Var(Var(next)));
                    next += 1;
                }
            }
        }
        sorted_body(&c.body, &s)
    };
    canonical_ho(Clause { head, body })
}

/// Canonical representative of a theory: canonical clauses, sorted, with
/// duplicates removed.
pub fn canonical_form(t: &Theory) -> Theory {
    let mut clauses: Vec<Clause> = t.clauses.iter().map(canonical_clause).collect();
    clauses.sort();
    clauses.dedup();
    Theory { clauses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::unify;

    fn v(i: u32) -> Term {
        Term::var(i)
    }

    fn cl(head: Atom, body: Vec<Atom>) -> Clause {
        Clause::new(head, body.into_iter().map(Literal::pos).collect())
    }

    #[test]
    fn rename_apart_forced() {
        let c = cl(Atom::new("p", vec![v(0)]), vec![Atom::new("q", vec![v(0)])]);
        assert_eq!(rename_apart(&c, &VarSet::default()), c);
        let avoid = VarSet::of_clause(&c);
        let r = rename_apart(&c, &avoid);
        assert!(r.vars().iter().all(|x| !avoid.fo.contains(x)));
        let s = unify(&c.head, &r.head).unwrap();
        assert!(s.is_renaming());
    }

    #[test]
    fn alpha_equivalent_theories_collapse() {
        let a = Theory::new(vec![cl(Atom::new("p", vec![v(23)]), vec![Atom::new("q", vec![v(23)])])]);
        let b = Theory::new(vec![cl(Atom::new("p", vec![v(24)]), vec![Atom::new("q", vec![v(24)])])]);
        assert_eq!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn body_order_is_irrelevant() {
        let a = cl(
            Atom::new("p", vec![v(0)]),
            vec![Atom::new("q", vec![v(0)]), Atom::new("r", vec![v(0)])],
        );
        let b = cl(
            Atom::new("p", vec![v(0)]),
            vec![Atom::new("r", vec![v(0)]), Atom::new("q", vec![v(0)])],
        );
        assert_eq!(canonical_clause(&a), canonical_clause(&b));
    }

    #[test]
    fn body_only_variables_are_minimized() {
        // p(A) :- q(A,B), q(A,C), r(C)  ~  p(A) :- q(A,C), q(A,B), r(B)
        let a = cl(
            Atom::new("p", vec![v(0)]),
            vec![
                Atom::new("q", vec![v(0), v(1)]),
                Atom::new("q", vec![v(0), v(2)]),
                Atom::new("r", vec![v(2)]),
            ],
        );
        let b = cl(
            Atom::new("p", vec![v(0)]),
            vec![
                Atom::new("r", vec![v(1)]),
                Atom::new("q", vec![v(0), v(2)]),
                Atom::new("q", vec![v(0), v(1)]),
            ],
        );
        assert_eq!(canonical_clause(&a), canonical_clause(&b));
    }
}
