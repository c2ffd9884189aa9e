//! Depth-first SLD resolution with a deterministic step budget.
//!
//! Programs are compiled into clause templates over a flat argument list:
//! higher-order arguments come first and are ordinary atoms at run time, so
//! `fold(fold_p_1,A,B,C)` calls `fold/4` and binds the head's `#P` to the
//! atom `fold_p_1`. A goal whose symbol is a variable is dispatched on the
//! atom that variable is bound to.

mod builtins;
mod engine;

pub use builtins::builtin_names;
pub use engine::Engine;

use crate::kernel::{Atom, Clause, Pred, Term, Theory};
use crate::symbol::Symbol;
use std::collections::HashMap;
use std::sync::Arc;

/// Limits for one query. Running out of either makes the query
/// `Exhausted`, which learning treats as not entailed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u64,
    pub max_depth: u32,
    pub occurs_check: bool,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_steps: 10_000,
            max_depth: 400,
            occurs_check: true,
        }
    }
}

impl Budget {
    pub fn steps(max_steps: u64) -> Budget {
        Budget {
            max_steps,
            ..Budget::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Verdict {
    Entailed,
    NotEntailed,
    Exhausted,
}

impl Verdict {
    pub fn is_entailed(self) -> bool {
        self == Verdict::Entailed
    }
}

/// Per-example verdicts over the positive and negative examples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub pos: Vec<Verdict>,
    pub neg: Vec<Verdict>,
    pub steps: u64,
}

impl Outcome {
    pub fn pos_covered(&self) -> usize {
        self.pos.iter().filter(|v| v.is_entailed()).count()
    }

    pub fn neg_covered(&self) -> usize {
        self.neg.iter().filter(|v| v.is_entailed()).count()
    }

    pub fn all_pos(&self) -> bool {
        self.pos.iter().all(|v| v.is_entailed())
    }

    pub fn no_neg(&self) -> bool {
        !self.neg.iter().any(|v| v.is_entailed())
    }

    pub fn is_solution(&self) -> bool {
        self.all_pos() && self.no_neg()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tpl {
    Var(u32),
    Atom(Symbol),
    Int(i64),
    App(Symbol, Box<[Tpl]>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum GoalPred {
    Sym(Symbol),
    Var(u32),
}

#[derive(Clone, Debug)]
pub(crate) struct Goal {
    pub pred: GoalPred,
    pub args: Box<[Tpl]>,
    pub positive: bool,
}

#[derive(Debug)]
pub(crate) struct ClauseTpl {
    pub head: Box<[Tpl]>,
    /// Body goals in execution order.
    pub body: Box<[Goal]>,
    pub nvars: u32,
}

fn tpl_of(t: &Term) -> Tpl {
    match t {
        Term::Var(v) => Tpl::Var(v.0),
        Term::Const(s) => Tpl::Atom(*s),
        Term::Int(i) => Tpl::Int(*i),
        Term::App(f, args) => Tpl::App(*f, args.iter().map(tpl_of).collect()),
    }
}

fn flat_args(a: &Atom, ho_base: u32) -> Box<[Tpl]> {
    a.ho_args
        .iter()
        .map(|p| match p {
            Pred::Sym(s) => Tpl::Atom(*s),
            Pred::Var(v) => Tpl::Var(ho_base + v.0),
        })
        .chain(a.args.iter().map(tpl_of))
        .collect()
}

/// Variables of a clause are numbered densely: first-order ids as they are,
/// higher-order ids after the largest first-order one.
fn compile(c: &Clause, order: Option<&[usize]>) -> ClauseTpl {
    let fo_max = c.vars().iter().map(|v| v.0 + 1).max().unwrap_or(0);
    let ho_max = c.ho_vars().iter().map(|v| v.0 + 1).max().unwrap_or(0);
    let head = flat_args(&c.head, fo_max);
    let idx: Vec<usize> = match order {
        Some(o) => o.to_vec(),
        None => (0..c.body.len()).collect(),
    };
    let body = idx
        .into_iter()
        .map(|i| {
            let l = &c.body[i];
            Goal {
                pred: match l.atom.pred {
                    Pred::Sym(s) => GoalPred::Sym(s),
                    Pred::Var(v) => GoalPred::Var(fo_max + v.0),
                },
                args: flat_args(&l.atom, fo_max),
                positive: l.positive,
            }
        })
        .collect();
    ClauseTpl {
        head,
        body,
        nvars: fo_max + ho_max,
    }
}

pub(crate) type Procedure = Arc<Vec<Arc<ClauseTpl>>>;

/// Compiled clauses indexed by symbol and flat arity.
#[derive(Clone, Debug, Default)]
pub struct Database {
    preds: HashMap<(Symbol, u32), Procedure>,
}

impl Database {
    pub fn new() -> Database {
        Database::default()
    }

    pub fn from_theory(t: &Theory) -> Database {
        let mut db = Database::new();
        db.extend(t);
        db
    }

    pub fn extend(&mut self, t: &Theory) {
        for c in &t.clauses {
            self.insert(c, None);
        }
    }

    /// Adds a clause whose body runs in the given order (textual order when
    /// `None`). Clauses without a symbol head are ignored.
    pub fn insert(&mut self, c: &Clause, order: Option<&[usize]>) {
        let Some(sym) = c.head.symbol() else { return };
        let key = (sym, c.head.arity() as u32);
        let tpl = Arc::new(compile(c, order));
        let proc = self.preds.entry(key).or_default();
        Arc::make_mut(proc).push(tpl);
    }

    pub fn defines(&self, sym: Symbol, arity: usize) -> bool {
        self.preds.contains_key(&(sym, arity as u32))
    }

    pub(crate) fn lookup(&self, sym: Symbol, arity: u32) -> Option<&Procedure> {
        self.preds.get(&(sym, arity))
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }
}

/// Runs every example against `base` extended with `overlay`.
pub fn test(
    base: &Database,
    overlay: Option<&Database>,
    pos: &[Atom],
    neg: &[Atom],
    budget: Budget,
) -> crate::Result<Outcome> {
    let mut out = Outcome::default();
    for a in pos {
        let mut e = Engine::new(base, overlay, budget);
        out.pos.push(e.solve(a)?);
        out.steps += e.steps();
    }
    for a in neg {
        let mut e = Engine::new(base, overlay, budget);
        out.neg.push(e.solve(a)?);
        out.steps += e.steps();
    }
    Ok(out)
}

/// Solves one goal against a theory with default limits.
pub fn solve(program: &Theory, goal: &Atom, budget: Budget) -> crate::Result<Verdict> {
    let db = Database::from_theory(program);
    Engine::new(&db, None, budget).solve(goal)
}
