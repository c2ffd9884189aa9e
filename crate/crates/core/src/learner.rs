//! The generate, test and constrain loop.

use crate::bias::BiasSpec;
use crate::error::{Error, Result};
use crate::evaluator::{Budget, Database, Engine, Verdict};
use crate::generator::{separable_subsets, Candidate, ConstraintKind, GenStats, Generator};
use crate::kernel::{Atom, Clause, Theory};
use crate::library::{reattach, LGrounding, Library};
use std::io::Write;
use std::time::{Duration, Instant};

#[derive(Clone, Debug)]
pub struct Task {
    pub name: String,
    pub bias: BiasSpec,
    pub bk: Theory,
    pub library: Library,
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
    pub budget: Budget,
}

impl Task {
    /// Examples must be ground atoms of the head predicate.
    pub fn check(&self) -> Result<()> {
        let (h, a) = self.bias.head_pred;
        for e in self.pos.iter().chain(&self.neg) {
            if e.symbol() != Some(h) || e.args.len() != a || !e.ho_args.is_empty() {
                return Err(Error::Task(format!("example {e} is not an atom of {h}/{a}")));
            }
            if !e.is_ground() {
                return Err(Error::Task(format!("example {e} is not ground")));
            }
        }
        Ok(())
    }

    /// BK, library clauses and the connectors of every instance the bias
    /// allows.
    pub fn base_database(&self, gen: &Generator) -> Database {
        let mut db = Database::from_theory(&self.bk);
        db.extend(&self.library.clauses().cloned().collect());
        db.extend(&gen.catalog().connectors());
        db
    }
}

#[derive(Default)]
pub struct LearnOptions {
    pub wallclock: Option<Duration>,
    pub audit: bool,
    pub trace: Option<Box<dyn Write + Send>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Status {
    Solved,
    Exhausted,
    Capped,
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize)]
pub struct LearnStats {
    pub generated: u64,
    pub tested: u64,
    /// Complete programs rejected by a constraint without testing.
    pub pruned: u64,
    /// Partial programs cut with all their extensions.
    pub cut: u64,
    pub constraints: u64,
    pub steps: u64,
    pub exhausted_examples: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub candidate: Candidate,
    pub grounding: LGrounding,
}

impl Solution {
    /// Literal count of the principal program.
    pub fn literals(&self) -> usize {
        self.candidate.size
    }

    /// The program with instance literals written as external literals, in
    /// executable body order.
    pub fn higher_order_form(&self) -> Theory {
        reattach(&self.grounding.principal, &self.candidate.annotations)
    }

    /// Everything needed to run the solution next to the BK: principal
    /// program, connectors and the library clauses it uses.
    pub fn program(&self) -> Theory {
        self.grounding.program()
    }
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub checked: usize,
    /// Pruned candidates that turned out to be solutions, with the id of
    /// the pruning constraint.
    pub violations: Vec<(Candidate, usize)>,
}

#[derive(Clone, Debug)]
pub struct LearnResult {
    pub status: Status,
    pub solution: Option<Solution>,
    pub stats: LearnStats,
    pub audit: Option<AuditReport>,
}

/// Coverage summary of one candidate, with short-circuiting: positives stop
/// once both a covered and an uncovered one are seen, negatives at the first
/// covered one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Coverage {
    pub some_pos_covered: bool,
    pub some_pos_uncovered: bool,
    pub some_neg_covered: bool,
}

impl Coverage {
    pub fn is_solution(&self) -> bool {
        !self.some_pos_uncovered && !self.some_neg_covered
    }
}

fn overlay_of(c: &Candidate, gen: &Generator) -> Database {
    let mut db = Database::new();
    for cl in &c.theory.clauses {
        db.insert(cl, gen.exec_order(cl).as_deref());
    }
    db
}

fn coverage(base: &Database, overlay: &Database, task: &Task, stats: &mut LearnStats) -> Result<Coverage> {
    let mut cov = Coverage::default();
    let run = |e: &Atom, stats: &mut LearnStats| -> Result<bool> {
        let mut eng = Engine::new(base, Some(overlay), task.budget);
        let v = eng.solve(e)?;
        stats.steps += eng.steps();
        if v == Verdict::Exhausted {
            stats.exhausted_examples += 1;
        }
        Ok(v.is_entailed())
    };
    for e in &task.pos {
        if run(e, stats)? {
            cov.some_pos_covered = true;
        } else {
            cov.some_pos_uncovered = true;
        }
        if cov.some_pos_covered && cov.some_pos_uncovered {
            break;
        }
    }
    for e in &task.neg {
        if run(e, stats)? {
            cov.some_neg_covered = true;
            break;
        }
    }
    Ok(cov)
}

/// The candidate's clauses with bodies in the order the learner ran them,
/// so the program also runs under plain left-to-right resolution.
fn executable(c: &Candidate, gen: &Generator) -> Theory {
    c.theory
        .clauses
        .iter()
        .map(|cl| match gen.exec_order(cl) {
            Some(order) => Clause::new(cl.head.clone(), order.iter().map(|i| cl.body[*i].clone()).collect()),
            None => cl.clone(),
        })
        .collect()
}

fn solution(c: Candidate, task: &Task, gen: &Generator) -> Solution {
    let grounding = LGrounding {
        principal: executable(&c, gen),
        connectors: c
            .annotations
            .iter()
            .map(|(s, i)| i.connector(*s))
            .collect(),
        library_clauses: task
            .library
            .definitions()
            .iter()
            .filter(|d| c.annotations.values().any(|i| i.def == d.key()))
            .flat_map(|d| d.clauses.iter().cloned())
            .collect(),
        instance_names: c.annotations.iter().map(|(s, i)| (i.clone(), *s)).collect(),
        overlap_warnings: Vec::new(),
    };
    Solution { candidate: c, grounding }
}

fn finish_stats(stats: &mut LearnStats, g: &GenStats, started: Instant) {
    stats.generated = g.generated;
    stats.pruned = g.pruned;
    stats.cut = g.cut;
    stats.seconds = started.elapsed().as_secs_f64();
}

/// Runs the loop until a solution is found, the space is exhausted or the
/// wall-clock cap passes.
pub fn learn(task: &Task, mut opts: LearnOptions) -> Result<LearnResult> {
    task.check()?;
    let started = Instant::now();
    let mut gen = Generator::new(&task.bias, &task.library);
    if opts.audit {
        gen = gen.with_audit();
    }
    if let Some(t) = opts.trace.take() {
        gen = gen.with_trace(t);
    }
    gen.set_deadline(opts.wallclock.map(|d| started + d));
    let base = task.base_database(&gen);
    let mut stats = LearnStats::default();
    let mut found = None;
    while let Some(c) = gen.next_candidate() {
        stats.tested += 1;
        let overlay = overlay_of(&c, &gen);
        let cov = coverage(&base, &overlay, task, &mut stats)?;
        if cov.is_solution() {
            found = Some(c);
            break;
        }
        let mut add = |gen: &mut Generator, kind, t: &Theory| {
            if gen.add_constraint(kind, t) {
                stats.constraints += 1;
            }
        };
        if cov.some_pos_uncovered {
            add(&mut gen, ConstraintKind::Specialization, &c.theory);
        }
        if cov.some_neg_covered {
            add(&mut gen, ConstraintKind::Generalization, &c.theory);
        }
        if !cov.some_pos_covered {
            for e in separable_subsets(&c.theory, &c.annotations) {
                add(&mut gen, ConstraintKind::Elimination, &e);
            }
        }
    }
    let status = match (&found, gen.capped()) {
        (Some(_), _) => Status::Solved,
        (None, true) => Status::Capped,
        (None, false) => Status::Exhausted,
    };
    let audit = if opts.audit {
        let log = gen.audit_log().unwrap_or_default();
        let mut violations = Vec::new();
        let mut scratch = LearnStats::default();
        for (c, by) in log {
            let cov = coverage(&base, &overlay_of(c, &gen), task, &mut scratch)?;
            if cov.is_solution() {
                violations.push((c.clone(), *by));
            }
        }
        Some(AuditReport {
            checked: log.len(),
            violations,
        })
    } else {
        None
    };
    finish_stats(&mut stats, gen.stats(), started);
    Ok(LearnResult {
        status,
        solution: found.map(|c| solution(c, task, &gen)),
        stats,
        audit,
    })
}

/// Number of candidates in the bounded space, counting at most `limit + 1`.
pub fn space_size(task: &Task, limit: u128) -> u128 {
    let mut gen = Generator::new(&task.bias, &task.library).without_constraints();
    let mut n: u128 = 0;
    while n <= limit && gen.next_candidate().is_some() {
        n += 1;
    }
    n
}

/// Tests every candidate in size order without constraints. Refuses when
/// the space holds more than `ceiling` candidates.
pub fn enumerate_oracle(task: &Task, ceiling: u128, wallclock: Option<Duration>) -> Result<LearnResult> {
    task.check()?;
    let estimate = space_size(task, ceiling);
    if estimate > ceiling || ceiling == 0 {
        return Err(Error::Refusal {
            estimate: estimate.max(1),
            ceiling,
        });
    }
    let started = Instant::now();
    let mut gen = Generator::new(&task.bias, &task.library).without_constraints();
    gen.set_deadline(wallclock.map(|d| started + d));
    let base = task.base_database(&gen);
    let mut stats = LearnStats::default();
    let mut found = None;
    while let Some(c) = gen.next_candidate() {
        stats.tested += 1;
        let cov = coverage(&base, &overlay_of(&c, &gen), task, &mut stats)?;
        if cov.is_solution() {
            found = Some(c);
            break;
        }
    }
    let status = match (&found, gen.capped()) {
        (Some(_), _) => Status::Solved,
        (None, true) => Status::Capped,
        (None, false) => Status::Exhausted,
    };
    finish_stats(&mut stats, gen.stats(), started);
    Ok(LearnResult {
        status,
        solution: found.map(|c| solution(c, task, &gen)),
        stats,
        audit: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_atom, parse_theory_with};

    fn atoms(xs: &[&str]) -> Vec<Atom> {
        xs.iter().map(|x| parse_atom(x).unwrap()).collect()
    }

    fn all_even_task() -> Task {
        Task {
            name: "all_even".into(),
            bias: BiasSpec::parse(
                "head_pred(all_even,1). body_pred(all,1). body_pred(even,1).
                 type(all_even,(list)). type(all,(list)). type(all_p,(element)). type(even,(element)).
                 max_vars(2). max_body(2). max_clauses(2).",
            )
            .unwrap(),
            bk: Theory::default(),
            library: Library::parse("all(#_,[]). all(#P,[H|T]) :- #P(H), all(#P,T).", true).unwrap(),
            pos: atoms(&["all_even([2,4])", "all_even([])", "all_even([0,6,8])"]),
            neg: atoms(&["all_even([1])", "all_even([2,3])", "all_even([5,4])"]),
            budget: Budget::default(),
        }
    }

    #[test]
    fn learns_all_even() {
        let t = all_even_task();
        let r = learn(&t, LearnOptions::default()).unwrap();
        assert_eq!(r.status, Status::Solved);
        let s = r.solution.unwrap();
        assert_eq!(s.literals(), 4);
        let want = parse_theory_with(
            "all_even(A) :- all(all_p_1,A). all_p_1(A) :- even(A).",
            Some(&t.library.signature()),
        );
        assert_eq!(s.higher_order_form(), want.unwrap());
    }

    #[test]
    fn undeclared_example_is_rejected() {
        let mut t = all_even_task();
        t.pos.push(parse_atom("other([])").unwrap());
        assert!(matches!(learn(&t, LearnOptions::default()), Err(Error::Task(_))));
    }

    #[test]
    fn oracle_refuses_at_zero_ceiling() {
        assert!(matches!(enumerate_oracle(&all_even_task(), 0, None), Err(Error::Refusal { .. })));
    }

    #[test]
    fn oracle_agrees_on_all_even() {
        let t = all_even_task();
        let o = enumerate_oracle(&t, 100_000, None).unwrap();
        let l = learn(&t, LearnOptions::default()).unwrap();
        assert_eq!(o.solution.unwrap().literals(), l.solution.as_ref().unwrap().literals());
        assert!(l.stats.tested <= o.stats.tested);
    }
}
