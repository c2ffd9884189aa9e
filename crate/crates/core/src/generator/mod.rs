//! Candidate generation in nondecreasing literal count.
//!
//! Programs are sets of canonical clauses drawn from per-head universes.
//! A depth-first search fills the main head first and then the slots of
//! every instance the program calls, in the order the instances are first
//! called; instances of one definition are numbered in that order, which
//! removes programs that differ only in instance numbering.

mod constraints;
mod index;
pub mod space;

pub use constraints::{
    call_graph_ok, eliminates, separable_subsets, Candidate, Constraint, ConstraintKind,
    ConstraintStore,
};
pub use space::{exec_order, Catalog};

use crate::bias::{BiasSpec, PredKey};
use crate::kernel::canonical_clause;
use crate::kernel::{Clause, Pred, Theory};
use crate::library::Library;
use crate::symbol::Symbol;
use index::FastIndex;
use space::Universe;
use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::time::Instant;

pub(crate) struct ClauseInfo {
    pub clause: Clause,
    pub size: usize,
    pub head: Symbol,
    /// Instances called, in body order, without repeats.
    pub instances: Vec<usize>,
    /// Instances whose slot symbols are called directly.
    pub slot_calls: Vec<usize>,
    pub calls: Vec<Symbol>,
    pub order: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
struct Node {
    group: usize,
    next: usize,
    in_group: usize,
    chosen: usize,
    queued: usize,
    used: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenStats {
    /// Complete programs reached by the search.
    pub generated: u64,
    /// Complete programs rejected by a constraint.
    pub pruned: u64,
    /// Partial programs cut together with all their extensions.
    pub cut: u64,
}

/// Stateful candidate generator for one search session.
pub struct Generator {
    bias: BiasSpec,
    cat: Catalog,
    main: Universe,
    slots: BTreeMap<PredKey, Universe>,
    reg: Vec<ClauseInfo>,
    reg_index: HashMap<Clause, u32>,
    main_list: Vec<u32>,
    slot_lists: HashMap<(usize, usize), Vec<u32>>,
    grown: usize,
    min_clause: usize,
    store: ConstraintStore,
    index: FastIndex,
    size: usize,
    max_size: usize,
    stack: Vec<Node>,
    chosen: Vec<u32>,
    queue: Vec<usize>,
    started: bool,
    stats: GenStats,
    audit: Option<Vec<(Candidate, usize)>>,
    trace: Option<Box<dyn Write + Send>>,
    deadline: Option<Instant>,
    capped: bool,
    use_constraints: bool,
}

fn shape_key(c: &Clause, cat: &Catalog) -> String {
    // Instance numbers are blanked so that renumbering instances of one
    // definition keeps the relative order of clauses.
    let mut c = c.clone();
    for l in &mut c.body {
        if let Some(i) = l.atom.symbol().and_then(|s| cat.instance_of(s)) {
            l.atom.pred = Pred::Sym(cat.instances[i].def.name);
        }
    }
    c.to_string()
}

impl Generator {
    pub fn new(bias: &BiasSpec, lib: &Library) -> Generator {
        let cat = Catalog::build(bias, lib);
        let main = Universe::new(bias.head_pred.0, bias.head_pred.1, bias, &cat);
        let mut slots = BTreeMap::new();
        for i in &cat.instances {
            for g in &i.generic {
                slots
                    .entry(*g)
                    .or_insert_with(|| Universe::new(g.0, g.1, bias, &cat));
            }
        }
        let min_clause = if std::iter::once(&main).chain(slots.values()).any(|u| !u.valid[0].is_empty()) {
            1
        } else {
            2
        };
        Generator {
            bias: bias.clone(),
            cat,
            main,
            slots,
            reg: Vec::new(),
            reg_index: HashMap::new(),
            main_list: Vec::new(),
            slot_lists: HashMap::new(),
            grown: 0,
            min_clause,
            store: ConstraintStore::new(),
            index: FastIndex::default(),
            size: 0,
            max_size: bias.max_clauses * (1 + bias.max_body),
            stack: Vec::new(),
            chosen: Vec::new(),
            queue: Vec::new(),
            started: false,
            stats: GenStats::default(),
            audit: None,
            trace: None,
            deadline: None,
            capped: false,
            use_constraints: true,
        }
    }

    /// Ignores every constraint: the plain size-ordered enumeration.
    pub fn without_constraints(mut self) -> Generator {
        self.use_constraints = false;
        self
    }

    /// Records every pruned program instead of cutting partial programs.
    pub fn with_audit(mut self) -> Generator {
        self.audit = Some(Vec::new());
        self
    }

    pub fn with_trace(mut self, out: Box<dyn Write + Send>) -> Generator {
        self.trace = Some(out);
        self
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    /// True when the last `next_candidate` stopped at the deadline.
    pub fn capped(&self) -> bool {
        self.capped
    }

    pub fn catalog(&self) -> &Catalog {
        &self.cat
    }

    pub fn store(&self) -> &ConstraintStore {
        &self.store
    }

    pub fn stats(&self) -> &GenStats {
        &self.stats
    }

    pub fn audit_log(&self) -> Option<&[(Candidate, usize)]> {
        self.audit.as_deref()
    }

    /// Size of the programs currently being enumerated.
    pub fn current_size(&self) -> usize {
        self.size
    }

    /// Execution order of a clause of a returned candidate.
    pub fn exec_order(&self, c: &Clause) -> Option<Vec<usize>> {
        match self.reg_index.get(c) {
            Some(id) => self.reg[*id as usize].order.clone(),
            None => exec_order(c, &self.bias, &self.cat.ctx),
        }
    }

    fn register(&mut self, c: Clause) -> u32 {
        if let Some(id) = self.reg_index.get(&c) {
            return *id;
        }
        let mut instances = Vec::new();
        let mut slot_calls = Vec::new();
        let mut calls = Vec::new();
        for l in &c.body {
            let Some(s) = l.atom.symbol() else { continue };
            calls.push(s);
            if let Some(i) = self.cat.instance_of(s) {
                if !instances.contains(&i) {
                    instances.push(i);
                }
            }
            if let Some((i, _)) = self.cat.slot_owner(s) {
                if !slot_calls.contains(&i) {
                    slot_calls.push(i);
                }
            }
        }
        let order = exec_order(&c, &self.bias, &self.cat.ctx);
        let id = self.reg.len() as u32;
        self.reg.push(ClauseInfo {
            size: c.size(),
            head: c.head.symbol().unwrap(),
            instances,
            slot_calls,
            calls,
            order,
            clause: c.clone(),
        });
        self.reg_index.insert(c, id);
        id
    }

    /// Grows every universe to `len` body literals and extends the group
    /// lists with the new clauses. False when the deadline cut it short.
    fn grow(&mut self, len: usize) -> bool {
        let len = len.min(self.bias.max_body);
        let ctx = self.cat.ctx.clone();
        if !self.main.grow_to(len, &self.bias, &ctx, self.deadline) {
            return false;
        }
        for u in self.slots.values_mut() {
            if !u.grow_to(len, &self.bias, &ctx, self.deadline) {
                return false;
            }
        }
        while self.grown <= len {
            let l = self.grown;
            let mut fresh: Vec<(String, Clause)> = self.main.valid[l]
                .iter()
                .map(|c| (shape_key(c, &self.cat), c.clone()))
                .collect();
            fresh.sort();
            for (_, c) in fresh {
                let id = self.register(c);
                self.main_list.push(id);
            }
            for i in 0..self.cat.instances.len() {
                for j in 0..self.cat.instances[i].slots.len() {
                    let g = self.cat.instances[i].generic[j];
                    let sym = self.cat.instances[i].slots[j].0;
                    let mut fresh: Vec<(String, Clause)> = self.slots[&g].valid[l]
                        .iter()
                        .map(|c| {
                            let mut c = c.clone();
                            c.head.pred = Pred::Sym(sym);
                            let c = canonical_clause(&c);
                            (shape_key(&c, &self.cat), c)
                        })
                        .collect();
                    fresh.sort();
                    for (_, c) in fresh {
                        let id = self.register(c);
                        self.slot_lists.entry((i, j)).or_default().push(id);
                    }
                }
            }
            self.grown += 1;
        }
        true
    }

    /// Adds a constraint over a previously returned program (or a subset of
    /// one). Returns false for duplicates.
    pub fn add_constraint(&mut self, kind: ConstraintKind, theory: &Theory) -> bool {
        let mut ids: Vec<u32> = theory
            .clauses
            .iter()
            .map(|c| match self.reg_index.get(c) {
                Some(id) => *id,
                None => self.register(canonical_clause(c)),
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        if !self.index.add(kind, ids, &self.reg) {
            return false;
        }
        self.store.constraints.push(Constraint {
            kind,
            theory: theory.clone(),
        });
        true
    }

    fn group_of(&self, g: usize) -> Option<(usize, usize)> {
        // Group 0 is the main head; then the slots of queued instances.
        if g == 0 {
            return None;
        }
        let mut k = g - 1;
        for &i in &self.queue {
            let n = self.cat.instances[i].slots.len();
            if k < n {
                return Some((i, k));
            }
            k -= n;
        }
        unreachable!("group index past the queue")
    }

    fn group_count(&self) -> usize {
        1 + self
            .queue
            .iter()
            .map(|i| self.cat.instances[*i].slots.len())
            .sum::<usize>()
    }

    fn list(&self, g: usize) -> &[u32] {
        match self.group_of(g) {
            None => &self.main_list,
            Some(key) => self.slot_lists.get(&key).map_or(&[], |v| v.as_slice()),
        }
    }

    /// Queues the instances a clause introduces, or reports that it breaks
    /// the numbering order.
    fn admit(&mut self, id: u32) -> bool {
        let info = &self.reg[id as usize];
        let mut added = Vec::new();
        for &i in &info.instances {
            if self.queue.contains(&i) || added.contains(&i) {
                continue;
            }
            let def = self.cat.instances[i].def;
            let have = self
                .queue
                .iter()
                .chain(&added)
                .filter(|q| self.cat.instances[**q].def == def)
                .count();
            if self.cat.instances[i].nth != have + 1 {
                return false;
            }
            added.push(i);
        }
        if info
            .slot_calls
            .iter()
            .any(|i| !self.queue.contains(i) && !added.contains(i))
        {
            return false;
        }
        self.queue.extend(added);
        true
    }

    fn feasible(&self, group: usize, in_group: usize, used: usize) -> bool {
        let pending = self.group_count() - group - 1 + usize::from(in_group == 0);
        let remaining = self.size - used;
        pending * self.min_clause <= remaining
            && self.chosen.len() + pending <= self.bias.max_clauses
            && (remaining == 0 || pending > 0 || remaining >= self.min_clause)
    }

    fn candidate(&self) -> Candidate {
        let mut ids = self.chosen.clone();
        ids.sort_unstable();
        Candidate {
            theory: ids.iter().map(|i| self.reg[*i as usize].clause.clone()).collect(),
            annotations: self
                .queue
                .iter()
                .map(|i| (self.cat.instances[*i].symbol, self.cat.instances[*i].instance.clone()))
                .collect(),
            size: self.size,
        }
    }

    fn trace_line(&mut self, cand: &Candidate, pruned_by: Option<usize>) {
        if let Some(out) = self.trace.as_mut() {
            let by = pruned_by.map_or("none".to_string(), |i| i.to_string());
            let _ = writeln!(out, "{cand} -- size={} pruned_by={by}", cand.size);
        }
    }

    fn start_size(&mut self) -> bool {
        self.size += 1;
        if self.size > self.max_size {
            return false;
        }
        self.chosen.clear();
        self.queue.clear();
        self.stack.push(Node {
            group: 0,
            next: 0,
            in_group: 0,
            chosen: 0,
            queued: 0,
            used: 0,
        });
        true
    }

    /// The next unpruned candidate, or `None` once the bounded space is
    /// exhausted or the deadline passed.
    pub fn next_candidate(&mut self) -> Option<Candidate> {
        if !self.started {
            self.started = true;
            self.size = 0;
        }
        let mut ticks: u32 = 0;
        loop {
            ticks = ticks.wrapping_add(1);
            if ticks.is_multiple_of(16) {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        self.capped = true;
                        return None;
                    }
                }
            }
            let Some(top) = self.stack.last().cloned() else {
                if !self.start_size() {
                    self.size = self.max_size;
                    return None;
                }
                continue;
            };
            self.chosen.truncate(top.chosen);
            self.queue.truncate(top.queued);
            let len = self.list(top.group).len();
            if top.next < len {
                let id = self.list(top.group)[top.next];
                let csize = self.reg[id as usize].size;
                let last = self.stack.len() - 1;
                if top.used + csize > self.size {
                    // Lists are sorted by size: nothing further fits.
                    self.stack[last].next = len;
                    continue;
                }
                self.stack[last].next += 1;
                if !self.admit(id) {
                    continue;
                }
                self.chosen.push(id);
                let used = top.used + csize;
                if !self.feasible(top.group, top.in_group + 1, used) {
                    continue;
                }
                if self.use_constraints
                    && self.audit.is_none()
                    && self.index.gen_prunes(&self.chosen, &self.reg).is_some()
                {
                    self.stats.cut += 1;
                    continue;
                }
                self.stack.push(Node {
                    group: top.group,
                    next: top.next + 1,
                    in_group: top.in_group + 1,
                    chosen: self.chosen.len(),
                    queued: self.queue.len(),
                    used,
                });
            } else if top.next == len {
                // Lists grow one body length at a time, only once a search
                // reaches the end of one with room for a longer clause.
                if self.grown <= self.bias.max_body && self.grown < self.size - top.used {
                    if !self.grow(self.grown) {
                        self.capped = true;
                        return None;
                    }
                    continue;
                }
                let last = self.stack.len() - 1;
                self.stack[last].next += 1;
                if top.in_group == 0 {
                    continue;
                }
                if top.group + 1 < self.group_count() {
                    if self.feasible(top.group + 1, 0, top.used) {
                        self.stack.push(Node {
                            group: top.group + 1,
                            next: 0,
                            in_group: 0,
                            chosen: top.chosen,
                            queued: top.queued,
                            used: top.used,
                        });
                    }
                    continue;
                }
                if top.used != self.size {
                    continue;
                }
                self.stats.generated += 1;
                let pruned = if self.use_constraints {
                    self.index.prunes(&self.chosen, &self.reg)
                } else {
                    None
                };
                let cand = self.candidate();
                debug_assert!(call_graph_ok(&cand.theory, &cand.annotations, self.bias.head_pred.0));
                self.trace_line(&cand, pruned);
                match pruned {
                    Some(by) => {
                        self.stats.pruned += 1;
                        if let Some(log) = self.audit.as_mut() {
                            log.push((cand, by));
                        }
                    }
                    None => return Some(cand),
                }
            } else {
                self.stack.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_theory;

    fn bias(text: &str) -> BiasSpec {
        BiasSpec::parse(text).unwrap()
    }

    #[test]
    fn singleton_space() {
        let b = bias("head_pred(p,1). body_pred(q,1). max_vars(1). max_body(1). max_clauses(1).");
        let mut g = Generator::new(&b, &Library::default());
        let c = g.next_candidate().unwrap();
        assert_eq!(c.theory, parse_theory("p(A) :- q(A).").unwrap());
        assert_eq!(g.next_candidate(), None);
    }

    #[test]
    fn sizes_never_decrease_and_no_duplicates() {
        let b = bias(
            "head_pred(f,1). body_pred(g,1). body_pred(h,2). max_vars(2). max_body(2). max_clauses(2).",
        );
        let mut g = Generator::new(&b, &Library::default()).without_constraints();
        let mut seen = std::collections::HashSet::new();
        let mut last = 0;
        while let Some(c) = g.next_candidate() {
            assert!(c.size >= last);
            last = c.size;
            let key = crate::kernel::canonical_form(&c.theory);
            assert!(seen.insert(key), "duplicate {c}");
        }
        assert!(seen.len() > 5);
    }

    #[test]
    fn generalization_prunes_supersets() {
        let b = bias("head_pred(f,1). body_pred(g,1). body_pred(h,1). max_vars(1). max_body(2). max_clauses(2).");
        let mut g = Generator::new(&b, &Library::default());
        let first = g.next_candidate().unwrap();
        g.add_constraint(ConstraintKind::Generalization, &first.theory);
        while let Some(c) = g.next_candidate() {
            assert!(g.store().prunes(&c.theory).is_none(), "{c} should be pruned");
        }
    }

    #[test]
    fn all_even_solution_shape_is_reached() {
        let lib = Library::parse("all(#_,[]). all(#P,[H|T]) :- #P(H), all(#P,T).", true).unwrap();
        let b = bias(
            "head_pred(all_even,1). body_pred(all,1). body_pred(even,1).
             type(all_even,(list)). type(all,(list)). type(all_p,(element)). type(even,(element)).
             max_vars(2). max_body(2). max_clauses(2).",
        );
        let mut g = Generator::new(&b, &lib).without_constraints();
        let want = parse_theory("all_even(A) :- all_1(A). all_p_1(A) :- even(A).").unwrap();
        let mut found = None;
        while let Some(c) = g.next_candidate() {
            if c.theory == want {
                found = Some(c.size);
                break;
            }
        }
        assert_eq!(found, Some(4));
    }
}
