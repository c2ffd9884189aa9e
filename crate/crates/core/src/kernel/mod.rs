//! Terms, atoms, literals, clauses and theories.
//!
//! Atoms carry their higher-order arguments separately from their
//! first-order ones: `p(T1,..,Tm, t1,..,tn)` is stored as symbol `p`,
//! `ho_args = [T1..Tm]` and `args = [t1..tn]`. First-order and higher-order
//! variables live in disjoint namespaces.

mod canonical;
mod subst;

pub use canonical::{canonical_clause, canonical_form, rename_apart, VarSet};
pub use subst::{unify, unify_with, Substitutable, Substitution};

use crate::symbol::Symbol;
use std::collections::BTreeSet;
use std::fmt;

pub const NIL: &str = "[]";
pub const CONS: &str = "[|]";

/// First-order variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

/// Higher-order (predicate) variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoVar(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(Symbol),
    Int(i64),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(i: u32) -> Term {
        Term::Var(Var(i))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Symbol::intern(name))
    }

    pub fn nil() -> Term {
        Term::Const(Symbol::intern(NIL))
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::App(Symbol::intern(CONS), vec![head, tail])
    }

    pub fn list<I: IntoIterator<Item = Term>>(items: I) -> Term
    where
        I::IntoIter: DoubleEndedIterator,
    {
        items
            .into_iter()
            .rev()
            .fold(Term::nil(), |acc, t| Term::cons(t, acc))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) | Term::Int(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => out.push(*v),
            Term::Const(_) | Term::Int(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Elements of a proper list, or `None` for anything else.
    pub fn as_list(&self) -> Option<Vec<&Term>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::Const(s) if s.as_str() == NIL => return Some(out),
                Term::App(f, args) if f.as_str() == CONS && args.len() == 2 => {
                    out.push(&args[0]);
                    cur = &args[1];
                }
                _ => return None,
            }
        }
    }
}

/// Symbol position of an atom, or a higher-order argument: either a concrete
/// predicate symbol or a higher-order variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pred {
    Sym(Symbol),
    Var(HoVar),
}

impl Pred {
    pub fn sym(name: &str) -> Pred {
        Pred::Sym(Symbol::intern(name))
    }

    pub fn as_symbol(&self) -> Option<Symbol> {
        match self {
            Pred::Sym(s) => Some(*s),
            Pred::Var(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomClass {
    FirstOrder,
    HoGround,
    HigherOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Pred,
    pub ho_args: Vec<Pred>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(name: &str, args: Vec<Term>) -> Atom {
        Atom {
            pred: Pred::sym(name),
            ho_args: Vec::new(),
            args,
        }
    }

    pub fn with_ho(name: &str, ho_args: Vec<Pred>, args: Vec<Term>) -> Atom {
        Atom {
            pred: Pred::sym(name),
            ho_args,
            args,
        }
    }

    /// `sym(a)`
    pub fn sym(&self) -> Pred {
        self.pred
    }

    /// `arg_h(a)`
    pub fn arg_h(&self) -> &[Pred] {
        &self.ho_args
    }

    /// `arg_f(a)`
    pub fn arg_f(&self) -> &[Term] {
        &self.args
    }

    pub fn symbol(&self) -> Option<Symbol> {
        self.pred.as_symbol()
    }

    pub fn fo_arity(&self) -> usize {
        self.args.len()
    }

    pub fn arity(&self) -> usize {
        self.ho_args.len() + self.args.len()
    }

    pub fn classify(&self) -> AtomClass {
        match self.pred {
            Pred::Var(_) => AtomClass::HigherOrder,
            Pred::Sym(_) if self.ho_args.is_empty() => AtomClass::FirstOrder,
            Pred::Sym(_) if self.ho_args.iter().all(|p| matches!(p, Pred::Sym(_))) => {
                AtomClass::HoGround
            }
            Pred::Sym(_) => AtomClass::HigherOrder,
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self.pred, Pred::Sym(_))
            && self.ho_args.iter().all(|p| matches!(p, Pred::Sym(_)))
            && self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        self.args.iter().for_each(|t| t.collect_vars(out));
    }

    pub fn collect_ho_vars(&self, out: &mut Vec<HoVar>) {
        if let Pred::Var(v) = self.pred {
            out.push(v);
        }
        for p in &self.ho_args {
            if let Pred::Var(v) = p {
                out.push(*v);
            }
        }
    }
}

/// Classification of an atom as first-order, HO-ground or higher-order.
pub fn classify(atom: &Atom) -> AtomClass {
    atom.classify()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Literal {
        Literal {
            atom,
            positive: true,
        }
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal {
            atom,
            positive: false,
        }
    }
}

/// A definite clause: a positive head and an ordered body.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn new(head: Atom, body: Vec<Literal>) -> Clause {
        Clause { head, body }
    }

    pub fn fact(head: Atom) -> Clause {
        Clause {
            head,
            body: Vec::new(),
        }
    }

    /// Distinct first-order variables in first-occurrence order.
    pub fn vars(&self) -> Vec<Var> {
        let mut all = Vec::new();
        self.head.collect_vars(&mut all);
        for l in &self.body {
            l.atom.collect_vars(&mut all);
        }
        let mut seen = BTreeSet::new();
        all.retain(|v| seen.insert(*v));
        all
    }

    pub fn ho_vars(&self) -> Vec<HoVar> {
        let mut all = Vec::new();
        self.head.collect_ho_vars(&mut all);
        for l in &self.body {
            l.atom.collect_ho_vars(&mut all);
        }
        let mut seen = BTreeSet::new();
        all.retain(|v| seen.insert(*v));
        all
    }

    /// Number of literals, head included.
    pub fn size(&self) -> usize {
        1 + self.body.len()
    }

    pub fn is_function_free(&self) -> bool {
        let ff = |a: &Atom| a.args.iter().all(|t| matches!(t, Term::Var(_)));
        ff(&self.head) && self.body.iter().all(|l| ff(&l.atom))
    }

    pub fn head_symbol(&self) -> Option<Symbol> {
        self.head.symbol()
    }
}

/// A finite set of clauses, kept in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Theory {
    pub clauses: Vec<Clause>,
}

impl Theory {
    pub fn new(clauses: Vec<Clause>) -> Theory {
        Theory { clauses }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Total literal count, heads included.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::size).sum()
    }

    pub fn is_first_order(&self) -> bool {
        self.clauses.iter().all(|c| {
            c.head.classify() == AtomClass::FirstOrder
                && c.body
                    .iter()
                    .all(|l| l.atom.classify() == AtomClass::FirstOrder)
        })
    }

    pub fn head_symbols(&self) -> BTreeSet<Symbol> {
        self.clauses.iter().filter_map(Clause::head_symbol).collect()
    }
}

impl FromIterator<Clause> for Theory {
    fn from_iter<T: IntoIterator<Item = Clause>>(iter: T) -> Self {
        Theory {
            clauses: iter.into_iter().collect(),
        }
    }
}

// ---------------------------------------------------------------- display

pub fn var_name(v: Var) -> String {
    if v.0 < 26 {
        ((b'A' + v.0 as u8) as char).to_string()
    } else {
        format!("V{}", v.0)
    }
}

pub fn ho_var_name(v: HoVar) -> String {
    const LETTERS: &[u8] = b"PQRSTUVWXYZ";
    if (v.0 as usize) < LETTERS.len() {
        format!("#{}", LETTERS[v.0 as usize] as char)
    } else {
        format!("#H{}", v.0)
    }
}

fn is_infix(name: &str) -> bool {
    matches!(name, "=" | "<" | ">" | ">=" | "=<" | "\\=")
}

fn needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => !name.chars().all(|c| c.is_alphanumeric() || c == '_'),
        _ => !(name == NIL || is_infix(name)),
    }
}

fn write_name(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if needs_quotes(name) {
        write!(f, "'{}'", name.replace('\'', "\\'"))
    } else {
        f.write_str(name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&var_name(*self))
    }
}

impl fmt::Display for HoVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&ho_var_name(*self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(s) => write_name(f, s.as_str()),
            Term::Int(i) => write!(f, "{i}"),
            Term::App(s, args) if s.as_str() == CONS && args.len() == 2 => {
                f.write_str("[")?;
                write!(f, "{}", args[0])?;
                let mut tail = &args[1];
                loop {
                    match tail {
                        Term::App(s, a) if s.as_str() == CONS && a.len() == 2 => {
                            write!(f, ",{}", a[0])?;
                            tail = &a[1];
                        }
                        Term::Const(s) if s.as_str() == NIL => break,
                        other => {
                            write!(f, "|{other}")?;
                            break;
                        }
                    }
                }
                f.write_str("]")
            }
            Term::App(s, args) => {
                write_name(f, s.as_str())?;
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Sym(s) => write_name(f, s.as_str()),
            Pred::Var(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Pred::Sym(s) = self.pred {
            if is_infix(s.as_str()) && self.ho_args.is_empty() && self.args.len() == 2 {
                return write!(f, "{} {} {}", self.args[0], s, self.args[1]);
            }
        }
        write!(f, "{}", self.pred)?;
        if self.arity() == 0 {
            return Ok(());
        }
        f.write_str("(")?;
        let mut first = true;
        for p in &self.ho_args {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{p}")?;
        }
        for t in &self.args {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "\\+ {}", self.atom)
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Term {
        Term::var(i)
    }

    #[test]
    fn classification_matches_definition() {
        let head = Atom::new("head", vec![v(0), v(1)]);
        assert_eq!(classify(&head), AtomClass::FirstOrder);
        let ground = Atom::with_ho("fold", vec![Pred::sym("p")], vec![v(2), v(0), v(1)]);
        assert_eq!(classify(&ground), AtomClass::HoGround);
        let ho = Atom::with_ho("fold", vec![Pred::Var(HoVar(0))], vec![v(0), v(1), v(2)]);
        assert_eq!(classify(&ho), AtomClass::HigherOrder);
        let call = Atom {
            pred: Pred::Var(HoVar(0)),
            ho_args: vec![],
            args: vec![v(0)],
        };
        assert_eq!(classify(&call), AtomClass::HigherOrder);
    }

    #[test]
    fn display_lists_and_clauses() {
        let l = Term::list(vec![Term::Int(1), Term::Int(2)]);
        assert_eq!(l.to_string(), "[1,2]");
        let partial = Term::cons(v(7), v(8));
        assert_eq!(partial.to_string(), "[H|I]");
        let c = Clause::new(
            Atom::new("p", vec![v(0)]),
            vec![
                Literal::pos(Atom::new("q", vec![v(0)])),
                Literal::neg(Atom::new("r", vec![v(0)])),
            ],
        );
        assert_eq!(c.to_string(), "p(A) :- q(A), \\+ r(A).");
    }

    #[test]
    fn sizes_count_heads() {
        let c = Clause::new(
            Atom::new("p", vec![v(0)]),
            vec![Literal::pos(Atom::new("q", vec![v(0)]))],
        );
        let t = Theory::new(vec![c.clone(), c]);
        assert_eq!(t.size(), 4);
    }
}
