use super::builtins::{builtin, Builtin};
use super::{Budget, ClauseTpl, Database, Goal, GoalPred, Procedure, Tpl, Verdict};
use crate::error::{Error, Result};
use crate::kernel::{Atom, Pred, Term, Var};
use crate::symbol::Symbol;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

/// A heap cell. `Ref(i)` pointing at itself is an unbound variable; a
/// structure's arguments live in `heap[start..start + arity]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Cell {
    Ref(u32),
    Atom(Symbol),
    Int(i64),
    Str(Symbol, u32, u32),
}

struct Cont {
    clause: Arc<ClauseTpl>,
    idx: usize,
    base: u32,
    depth: u32,
    next: Option<Rc<Cont>>,
}

struct Choice {
    alts: Procedure,
    next_alt: usize,
    args: Vec<Cell>,
    cont: Option<Rc<Cont>>,
    depth: u32,
    heap_mark: usize,
    trail_mark: usize,
}

pub struct Engine<'a> {
    base: &'a Database,
    overlay: Option<&'a Database>,
    budget: Budget,
    pub(crate) heap: Vec<Cell>,
    trail: Vec<u32>,
    steps: u64,
    out_of_steps: bool,
    depth_hit: bool,
}

enum Flow {
    Solved,
    Failed,
}

impl<'a> Engine<'a> {
    pub fn new(base: &'a Database, overlay: Option<&'a Database>, budget: Budget) -> Engine<'a> {
        Engine {
            base,
            overlay,
            budget,
            heap: Vec::with_capacity(1024),
            trail: Vec::with_capacity(256),
            steps: 0,
            out_of_steps: false,
            depth_hit: false,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn lookup(&self, sym: Symbol, arity: u32) -> Option<&'a Procedure> {
        if let Some(o) = self.overlay {
            if let Some(p) = o.lookup(sym, arity) {
                return Some(p);
            }
        }
        self.base.lookup(sym, arity)
    }

    // ------------------------------------------------------------ heap ops

    pub(crate) fn deref(&self, mut c: Cell) -> Cell {
        while let Cell::Ref(i) = c {
            let next = self.heap[i as usize];
            if next == Cell::Ref(i) {
                return c;
            }
            c = next;
        }
        c
    }

    fn fresh(&mut self) -> u32 {
        let i = self.heap.len() as u32;
        self.heap.push(Cell::Ref(i));
        i
    }

    fn bind(&mut self, v: u32, c: Cell) {
        self.heap[v as usize] = c;
        self.trail.push(v);
    }

    fn undo(&mut self, heap_mark: usize, trail_mark: usize) {
        while self.trail.len() > trail_mark {
            let v = self.trail.pop().unwrap();
            if (v as usize) < heap_mark {
                self.heap[v as usize] = Cell::Ref(v);
            }
        }
        self.heap.truncate(heap_mark);
    }

    fn occurs(&self, v: u32, c: Cell) -> bool {
        match self.deref(c) {
            Cell::Ref(w) => w == v,
            Cell::Str(_, s, n) => (s..s + n).any(|i| self.occurs(v, Cell::Ref(i))),
            _ => false,
        }
    }

    pub(crate) fn unify(&mut self, a: Cell, b: Cell) -> bool {
        let mut stack = vec![(a, b)];
        while let Some((a, b)) = stack.pop() {
            let a = self.deref(a);
            let b = self.deref(b);
            match (a, b) {
                (Cell::Ref(x), Cell::Ref(y)) if x == y => {}
                (Cell::Ref(x), Cell::Ref(y)) => {
                    // Bind the younger variable to the older one.
                    if x < y {
                        self.bind(y, a)
                    } else {
                        self.bind(x, b)
                    }
                }
                (Cell::Ref(x), other) | (other, Cell::Ref(x)) => {
                    if self.budget.occurs_check && self.occurs(x, other) {
                        return false;
                    }
                    self.bind(x, other);
                }
                (Cell::Atom(x), Cell::Atom(y)) if x == y => {}
                (Cell::Int(x), Cell::Int(y)) if x == y => {}
                (Cell::Str(f, s1, n1), Cell::Str(g, s2, n2)) if f == g && n1 == n2 => {
                    for k in 0..n1 {
                        stack.push((Cell::Ref(s1 + k), Cell::Ref(s2 + k)));
                    }
                }
                _ => return false,
            }
        }
        true
    }

    fn build(&mut self, t: &Tpl, base: u32) -> Cell {
        match t {
            Tpl::Var(i) => Cell::Ref(base + i),
            Tpl::Atom(s) => Cell::Atom(*s),
            Tpl::Int(i) => Cell::Int(*i),
            Tpl::App(f, args) => {
                let start = self.heap.len() as u32;
                let n = args.len() as u32;
                for _ in 0..n {
                    self.heap.push(Cell::Int(0));
                }
                for (k, a) in args.iter().enumerate() {
                    let c = self.build(a, base);
                    self.heap[start as usize + k] = c;
                }
                Cell::Str(*f, start, n)
            }
        }
    }

    /// Unifies a head template against a goal cell without building the
    /// head first.
    fn unify_head(&mut self, t: &Tpl, base: u32, c: Cell) -> bool {
        match t {
            Tpl::Var(i) => self.unify(Cell::Ref(base + i), c),
            Tpl::Atom(s) => match self.deref(c) {
                Cell::Atom(x) => x == *s,
                Cell::Ref(v) => {
                    self.bind(v, Cell::Atom(*s));
                    true
                }
                _ => false,
            },
            Tpl::Int(i) => match self.deref(c) {
                Cell::Int(x) => x == *i,
                Cell::Ref(v) => {
                    self.bind(v, Cell::Int(*i));
                    true
                }
                _ => false,
            },
            Tpl::App(f, args) => match self.deref(c) {
                Cell::Str(g, s, n) if g == *f && n as usize == args.len() => args
                    .iter()
                    .enumerate()
                    .all(|(k, a)| self.unify_head(a, base, Cell::Ref(s + k as u32))),
                Cell::Ref(v) => {
                    let built = self.build(t, base);
                    if self.budget.occurs_check && self.occurs(v, built) {
                        return false;
                    }
                    self.bind(v, built);
                    true
                }
                _ => false,
            },
        }
    }

    pub(crate) fn cell_of_term(&mut self, t: &Term, vars: &mut HashMap<Var, u32>) -> Cell {
        match t {
            Term::Var(v) => {
                let i = match vars.get(v) {
                    Some(i) => *i,
                    None => {
                        let i = self.fresh();
                        vars.insert(*v, i);
                        i
                    }
                };
                Cell::Ref(i)
            }
            Term::Const(s) => Cell::Atom(*s),
            Term::Int(i) => Cell::Int(*i),
            Term::App(f, args) => {
                let start = self.heap.len() as u32;
                let n = args.len() as u32;
                for _ in 0..n {
                    self.heap.push(Cell::Int(0));
                }
                for (k, a) in args.iter().enumerate() {
                    let c = self.cell_of_term(a, vars);
                    self.heap[start as usize + k] = c;
                }
                Cell::Str(*f, start, n)
            }
        }
    }

    pub(crate) fn term_of_cell(&self, c: Cell) -> Term {
        match self.deref(c) {
            Cell::Ref(i) => Term::Var(Var(i)),
            Cell::Atom(s) => Term::Const(s),
            Cell::Int(i) => Term::Int(i),
            Cell::Str(f, s, n) => Term::App(
                f,
                (s..s + n).map(|i| self.term_of_cell(Cell::Ref(i))).collect(),
            ),
        }
    }

    // ------------------------------------------------------------- solving

    fn tick(&mut self) -> bool {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            self.out_of_steps = true;
            false
        } else {
            true
        }
    }

    fn goal_args(&mut self, atom: &Atom, vars: &mut HashMap<Var, u32>) -> Result<(Symbol, Vec<Cell>)> {
        let sym = match atom.pred {
            Pred::Sym(s) => s,
            Pred::Var(_) => return Err(Error::Fault(format!("query {atom} has a variable symbol"))),
        };
        let mut args = Vec::with_capacity(atom.arity());
        for p in &atom.ho_args {
            match p {
                Pred::Sym(s) => args.push(Cell::Atom(*s)),
                Pred::Var(_) => return Err(Error::Fault(format!("query {atom} has a variable argument"))),
            }
        }
        for t in &atom.args {
            let c = self.cell_of_term(t, vars);
            args.push(c);
        }
        Ok((sym, args))
    }

    /// Decides a goal.
    pub fn solve(&mut self, goal: &Atom) -> Result<Verdict> {
        let mut vars = HashMap::new();
        let (sym, args) = self.goal_args(goal, &mut vars)?;
        let found = self.call(sym, args, None, 0, &mut Vec::new())?;
        Ok(self.verdict(found))
    }

    fn verdict(&self, found: bool) -> Verdict {
        if found {
            Verdict::Entailed
        } else if self.out_of_steps || self.depth_hit {
            Verdict::Exhausted
        } else {
            Verdict::NotEntailed
        }
    }

    /// Enumerates up to `limit` answers, each given as the goal's first-order
    /// arguments. The second component tells whether the search finished
    /// within the budget.
    pub fn solve_all(&mut self, goal: &Atom, limit: usize) -> Result<(Vec<Vec<Term>>, bool)> {
        let mut vars = HashMap::new();
        let (sym, args) = self.goal_args(goal, &mut vars)?;
        let fo_start = goal.ho_args.len();
        let mut choices = Vec::new();
        let mut answers = Vec::new();
        let mut found = self.call(sym, args.clone(), None, 0, &mut choices)?;
        while found {
            answers.push(args[fo_start..].iter().map(|c| self.term_of_cell(*c)).collect());
            if answers.len() >= limit {
                return Ok((answers, true));
            }
            found = matches!(self.run(None, &mut choices, true)?, Flow::Solved);
        }
        Ok((answers, !(self.out_of_steps || self.depth_hit)))
    }

    /// Calls `sym(args)` and continues with `cont`; choice points go onto
    /// `choices`.
    fn call(
        &mut self,
        sym: Symbol,
        args: Vec<Cell>,
        cont: Option<Rc<Cont>>,
        depth: u32,
        choices: &mut Vec<Choice>,
    ) -> Result<bool> {
        if !self.tick() {
            return Ok(false);
        }
        let arity = args.len() as u32;
        if let Some(alts) = self.lookup(sym, arity) {
            choices.push(Choice {
                alts: alts.clone(),
                next_alt: 0,
                args,
                cont,
                depth: depth + 1,
                heap_mark: self.heap.len(),
                trail_mark: self.trail.len(),
            });
            return Ok(matches!(self.run(None, choices, true)?, Flow::Solved));
        }
        match builtin(sym, arity) {
            Some(b) => {
                if self.call_builtin(b, &args) {
                    Ok(matches!(self.run(cont, choices, false)?, Flow::Solved))
                } else {
                    Ok(matches!(self.run(None, choices, true)?, Flow::Solved))
                }
            }
            None => Ok(matches!(self.run(None, choices, true)?, Flow::Solved)),
        }
    }

    /// Tries the remaining alternatives of the top choice point.
    fn retry(&mut self, ch: &mut Choice) -> Option<Rc<Cont>> {
        while ch.next_alt < ch.alts.len() {
            self.undo(ch.heap_mark, ch.trail_mark);
            if !self.tick() {
                return None;
            }
            let clause = ch.alts[ch.next_alt].clone();
            ch.next_alt += 1;
            let base = self.heap.len() as u32;
            for _ in 0..clause.nvars {
                self.fresh();
            }
            let ok = clause
                .head
                .iter()
                .zip(&ch.args)
                .all(|(t, c)| self.unify_head(t, base, *c));
            if ok {
                return Some(Rc::new(Cont {
                    clause,
                    idx: 0,
                    base,
                    depth: ch.depth,
                    next: ch.cont.clone(),
                }));
            }
        }
        self.undo(ch.heap_mark, ch.trail_mark);
        None
    }

    fn run(
        &mut self,
        start: Option<Rc<Cont>>,
        choices: &mut Vec<Choice>,
        mut backtrack: bool,
    ) -> Result<Flow> {
        let mut cont = start;
        loop {
            if self.out_of_steps {
                return Ok(Flow::Failed);
            }
            if backtrack {
                loop {
                    let Some(ch) = choices.last_mut() else {
                        return Ok(Flow::Failed);
                    };
                    let mut ch_taken = std::mem::replace(
                        ch,
                        Choice {
                            alts: Arc::new(Vec::new()),
                            next_alt: 0,
                            args: Vec::new(),
                            cont: None,
                            depth: 0,
                            heap_mark: 0,
                            trail_mark: 0,
                        },
                    );
                    let next = self.retry(&mut ch_taken);
                    let exhausted = ch_taken.next_alt >= ch_taken.alts.len();
                    *choices.last_mut().unwrap() = ch_taken;
                    if exhausted {
                        // No alternatives left: the bindings made by the
                        // chosen clause are kept, so drop the choice point
                        // without undoing.
                        choices.pop();
                    }
                    if self.out_of_steps {
                        return Ok(Flow::Failed);
                    }
                    if let Some(n) = next {
                        cont = Some(n);
                        break;
                    }
                }
                backtrack = false;
            }
            let Some(c) = cont.take() else {
                return Ok(Flow::Solved);
            };
            if c.idx == c.clause.body.len() {
                cont = c.next.clone();
                continue;
            }
            if !self.tick() {
                return Ok(Flow::Failed);
            }
            let goal: &Goal = &c.clause.body[c.idx];
            let next = if c.idx + 1 == c.clause.body.len() {
                c.next.clone()
            } else {
                Some(Rc::new(Cont {
                    clause: c.clause.clone(),
                    idx: c.idx + 1,
                    base: c.base,
                    depth: c.depth,
                    next: c.next.clone(),
                }))
            };
            let sym = match goal.pred {
                GoalPred::Sym(s) => s,
                GoalPred::Var(i) => match self.deref(Cell::Ref(c.base + i)) {
                    Cell::Atom(s) => s,
                    Cell::Ref(_) => {
                        return Err(Error::Fault("call with an unbound predicate variable".into()))
                    }
                    other => {
                        return Err(Error::Fault(format!(
                            "call with a non-atom predicate {:?}",
                            self.term_of_cell(other)
                        )))
                    }
                },
            };
            let args: Vec<Cell> = goal.args.iter().map(|t| self.build(t, c.base)).collect();
            if !goal.positive {
                let (hm, tm) = (self.heap.len(), self.trail.len());
                let mut sub = Vec::new();
                let found = self.call(sym, args, None, c.depth, &mut sub)?;
                self.undo(hm, tm);
                if self.out_of_steps {
                    return Ok(Flow::Failed);
                }
                if found {
                    backtrack = true;
                } else {
                    cont = next;
                }
                continue;
            }
            if c.depth >= self.budget.max_depth {
                self.depth_hit = true;
                backtrack = true;
                continue;
            }
            let arity = args.len() as u32;
            if let Some(alts) = self.lookup(sym, arity) {
                choices.push(Choice {
                    alts: alts.clone(),
                    next_alt: 0,
                    args,
                    cont: next,
                    depth: c.depth + 1,
                    heap_mark: self.heap.len(),
                    trail_mark: self.trail.len(),
                });
                backtrack = true;
                continue;
            }
            match builtin(sym, arity) {
                Some(b) if self.call_builtin(b, &args) => cont = next,
                _ => backtrack = true,
            }
        }
    }

    fn call_builtin(&mut self, b: Builtin, args: &[Cell]) -> bool {
        let a: Vec<Cell> = args.iter().map(|c| self.deref(*c)).collect();
        b.run(self, &a)
    }

    pub(crate) fn bind_or_check_int(&mut self, c: Cell, v: i64) -> bool {
        match self.deref(c) {
            Cell::Int(x) => x == v,
            Cell::Ref(i) => {
                self.bind(i, Cell::Int(v));
                true
            }
            _ => false,
        }
    }

    pub(crate) fn bind_or_check_atom(&mut self, c: Cell, s: Symbol) -> bool {
        self.unify(c, Cell::Atom(s))
    }

    /// Length of a proper list cell.
    pub(crate) fn list_len(&self, c: Cell) -> Option<i64> {
        let nil = Symbol::intern(crate::kernel::NIL);
        let cons = Symbol::intern(crate::kernel::CONS);
        let mut n = 0;
        let mut cur = self.deref(c);
        loop {
            match cur {
                Cell::Atom(s) if s == nil => return Some(n),
                Cell::Str(f, s, 2) if f == cons => {
                    n += 1;
                    cur = self.deref(Cell::Ref(s + 1));
                }
                _ => return None,
            }
        }
    }
}
