use super::{Atom, Clause, HoVar, Literal, Pred, Term, Theory, Var};
use std::collections::BTreeMap;
use std::fmt;

/// A pair of finite maps over the two variable namespaces. Application is
/// simultaneous: terms introduced by the map are not traversed again.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    pub ho: BTreeMap<HoVar, Pred>,
    pub fo: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn is_empty(&self) -> bool {
        self.ho.is_empty() && self.fo.is_empty()
    }

    pub fn bind(mut self, v: Var, t: Term) -> Substitution {
        self.fo.insert(v, t);
        self
    }

    pub fn bind_ho(mut self, v: HoVar, p: Pred) -> Substitution {
        self.ho.insert(v, p);
        self
    }

    /// True when every FO binding maps to a distinct variable and every HO
    /// binding to a distinct HO variable.
    pub fn is_renaming(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        let fo_ok = self.fo.values().all(|t| match t {
            Term::Var(v) => seen.insert(*v),
            _ => false,
        });
        let mut seen_ho = std::collections::BTreeSet::new();
        let ho_ok = self.ho.values().all(|p| match p {
            Pred::Var(v) => seen_ho.insert(*v),
            _ => false,
        });
        fo_ok && ho_ok
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (k, v) in &self.ho {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{k}->{v}")?;
        }
        for (k, v) in &self.fo {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{k}->{v}")?;
        }
        f.write_str("}")
    }
}

pub trait Substitutable: Sized {
    fn apply(&self, s: &Substitution) -> Self;
}

impl Substitutable for Term {
    fn apply(&self, s: &Substitution) -> Term {
        match self {
            Term::Var(v) => s.fo.get(v).cloned().unwrap_or(Term::Var(*v)),
            Term::Const(_) | Term::Int(_) => self.clone(),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.apply(s)).collect()),
        }
    }
}

impl Substitutable for Pred {
    fn apply(&self, s: &Substitution) -> Pred {
        match self {
            Pred::Var(v) => s.ho.get(v).copied().unwrap_or(*self),
            Pred::Sym(_) => *self,
        }
    }
}

impl Substitutable for Atom {
    fn apply(&self, s: &Substitution) -> Atom {
        Atom {
            pred: self.pred.apply(s),
            ho_args: self.ho_args.iter().map(|p| p.apply(s)).collect(),
            args: self.args.iter().map(|t| t.apply(s)).collect(),
        }
    }
}

impl Substitutable for Literal {
    fn apply(&self, s: &Substitution) -> Literal {
        Literal {
            atom: self.atom.apply(s),
            positive: self.positive,
        }
    }
}

impl Substitutable for Clause {
    fn apply(&self, s: &Substitution) -> Clause {
        Clause {
            head: self.head.apply(s),
            body: self.body.iter().map(|l| l.apply(s)).collect(),
        }
    }
}

impl Substitutable for Theory {
    fn apply(&self, s: &Substitution) -> Theory {
        Theory {
            clauses: self.clauses.iter().map(|c| c.apply(s)).collect(),
        }
    }
}

/// Most general unifier of two atoms over both variable namespaces, with the
/// occurs check enabled.
pub fn unify(a: &Atom, b: &Atom) -> Option<Substitution> {
    unify_with(a, b, true)
}

pub fn unify_with(a: &Atom, b: &Atom, occurs_check: bool) -> Option<Substitution> {
    if a.ho_args.len() != b.ho_args.len() || a.args.len() != b.args.len() {
        return None;
    }
    let mut u = Unifier {
        s: Substitution::new(),
        occurs_check,
    };
    u.pred(a.pred, b.pred)?;
    for (x, y) in a.ho_args.iter().zip(&b.ho_args) {
        u.pred(*x, *y)?;
    }
    for (x, y) in a.args.iter().zip(&b.args) {
        u.term(x, y)?;
    }
    Some(u.finish())
}

/// Triangular-form unifier; `finish` resolves chains into an idempotent map.
struct Unifier {
    s: Substitution,
    occurs_check: bool,
}

impl Unifier {
    fn walk_pred(&self, mut p: Pred) -> Pred {
        while let Pred::Var(v) = p {
            match self.s.ho.get(&v) {
                Some(next) => p = *next,
                None => break,
            }
        }
        p
    }

    fn pred(&mut self, a: Pred, b: Pred) -> Option<()> {
        let (a, b) = (self.walk_pred(a), self.walk_pred(b));
        match (a, b) {
            _ if a == b => Some(()),
            (Pred::Var(v), other) | (other, Pred::Var(v)) => {
                self.s.ho.insert(v, other);
                Some(())
            }
            _ => None,
        }
    }

    fn walk<'t>(&'t self, mut t: &'t Term) -> &'t Term {
        while let Term::Var(v) = t {
            match self.s.fo.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a)),
            _ => false,
        }
    }

    fn term(&mut self, a: &Term, b: &Term) -> Option<()> {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => Some(()),
            (Term::Var(x), _) => {
                if self.occurs_check && self.occurs(*x, &b) {
                    return None;
                }
                self.s.fo.insert(*x, b);
                Some(())
            }
            (_, Term::Var(y)) => {
                if self.occurs_check && self.occurs(*y, &a) {
                    return None;
                }
                self.s.fo.insert(*y, a);
                Some(())
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                for (x, y) in xs.iter().zip(ys) {
                    self.term(x, y)?;
                }
                Some(())
            }
            _ if a == b => Some(()),
            _ => None,
        }
    }

    fn resolve(&self, t: &Term, depth: usize) -> Term {
        // Without the occurs check a cyclic binding may exist; stop expanding
        // rather than loop.
        if depth > 256 {
            return t.clone();
        }
        match self.walk(t) {
            Term::App(f, args) => Term::App(
                *f,
                args.iter().map(|a| self.resolve(a, depth + 1)).collect(),
            ),
            other => other.clone(),
        }
    }

    fn finish(self) -> Substitution {
        let mut out = Substitution::new();
        for v in self.s.ho.keys() {
            out.ho.insert(*v, self.walk_pred(Pred::Var(*v)));
        }
        for v in self.s.fo.keys() {
            out.fo.insert(*v, self.resolve(&Term::Var(*v), 0));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Pred;

    fn v(i: u32) -> Term {
        Term::var(i)
    }

    #[test]
    fn empty_substitution_is_identity() {
        let a = Atom::new("p", vec![v(0), v(1)]);
        assert_eq!(a.apply(&Substitution::new()), a);
    }

    #[test]
    fn apply_fold_matcher() {
        // {P->p, A->C, B->A, C->B} applied to fold(P,A,B,C)
        let s = Substitution::new()
            .bind_ho(HoVar(0), Pred::sym("p"))
            .bind(Var(0), v(2))
            .bind(Var(1), v(0))
            .bind(Var(2), v(1));
        let a = Atom::with_ho("fold", vec![Pred::Var(HoVar(0))], vec![v(0), v(1), v(2)]);
        assert_eq!(a.apply(&s).to_string(), "fold(p,C,A,B)");
    }

    #[test]
    fn apply_is_single_pass() {
        // {A->f(X), X->c} on p(A,X) gives p(f(X),c)
        let x = 23;
        let s = Substitution::new()
            .bind(Var(0), Term::App("f".into(), vec![v(x)]))
            .bind(Var(x), Term::constant("c"));
        let a = Atom::new("p", vec![v(0), v(x)]);
        assert_eq!(a.apply(&s).to_string(), "p(f(X),c)");
    }

    #[test]
    fn unify_identical_is_empty() {
        let a = Atom::new("p", vec![v(0)]);
        assert_eq!(unify(&a, &a), Some(Substitution::new()));
    }

    #[test]
    fn unify_library_head_with_external_literal() {
        let head = Atom::with_ho("fold", vec![Pred::Var(HoVar(0))], vec![v(0), v(1), v(2)]);
        let lit = Atom::with_ho("fold", vec![Pred::sym("p")], vec![v(12), v(10), v(11)]);
        let s = unify(&head, &lit).unwrap();
        let expected = Substitution::new()
            .bind_ho(HoVar(0), Pred::sym("p"))
            .bind(Var(0), v(12))
            .bind(Var(1), v(10))
            .bind(Var(2), v(11));
        assert_eq!(s, expected);
        assert_eq!(head.apply(&s), lit.apply(&s));
    }

    #[test]
    fn unify_clash_is_absent() {
        let a = Atom::new("p", vec![v(0), v(0)]);
        let b = Atom::new("p", vec![Term::constant("c"), Term::constant("d")]);
        assert_eq!(unify(&a, &b), None);
    }

    #[test]
    fn occurs_check() {
        let a = Atom::new("p", vec![v(0)]);
        let b = Atom::new("p", vec![Term::App("f".into(), vec![v(0)])]);
        assert_eq!(unify(&a, &b), None);
    }

    #[test]
    fn unifier_is_idempotent() {
        let a = Atom::new("p", vec![v(0), v(1), v(2)]);
        let b = Atom::new(
            "p",
            vec![v(1), Term::App("g".into(), vec![v(2)]), Term::constant("k")],
        );
        let s = unify(&a, &b).unwrap();
        assert_eq!(a.apply(&s), b.apply(&s));
        assert_eq!(a.apply(&s).apply(&s), a.apply(&s));
    }
}
