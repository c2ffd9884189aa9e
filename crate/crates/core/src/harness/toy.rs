//! A seeded family of small tasks with bounded spaces, for comparing the
//! learner with the exhaustive oracle.
//!
//! Each task draws random BK facts and a target program from its own
//! hypothesis space, then labels every atom of a small universe with the
//! target. Half of the tasks use a negation-free higher-order library.

use crate::bias::BiasSpec;
use crate::evaluator::{Budget, Database, Engine, Verdict};
use crate::generator::{Candidate, Generator};
use crate::kernel::{Atom, Clause, Term, Theory};
use crate::learner::Task;
use crate::library::Library;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Spaces above this many candidates are redrawn.
pub const TOY_CEILING: u128 = 100_000;

pub struct ToyTask {
    pub task: Task,
    pub target: Candidate,
    pub space: u128,
}

const TOY_LIBRARY: &str = "
    all(#_,[]).
    all(#P,[H|T]) :- #P(H), all(#P,T).
    some(#P,[H|_]) :- #P(H).
    some(#P,[_|T]) :- some(#P,T).
";

fn facts(name: &str, arity: usize, domain: i64, density: f64, rng: &mut ChaCha8Rng) -> Vec<Clause> {
    let mut out = Vec::new();
    let tuples: Vec<Vec<i64>> = match arity {
        1 => (0..domain).map(|a| vec![a]).collect(),
        _ => (0..domain).flat_map(|a| (0..domain).map(move |b| vec![a, b])).collect(),
    };
    for t in tuples {
        if rng.gen_bool(density) {
            out.push(Clause::fact(Atom::new(name, t.into_iter().map(Term::Int).collect())));
        }
    }
    out
}

fn all_lists(alphabet: i64, max_len: usize) -> Vec<Term> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in &frontier {
            for x in 0..alphabet {
                let mut m: Vec<Term> = l.clone();
                m.push(Term::Int(x));
                next.push(m);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.into_iter().map(Term::list).collect()
}

fn first_order(rng: &mut ChaCha8Rng) -> (Task, Vec<Atom>) {
    let domain = 4;
    let mut bk = Vec::new();
    let names = [("u1", 1), ("u2", 1), ("r1", 2), ("r2", 2)];
    for (n, a) in names {
        bk.extend(facts(n, a, domain, 0.4, rng));
    }
    let head_arity = rng.gen_range(1..=2);
    let mut bias = BiasSpec::new("f", head_arity).with_limits(3, rng.gen_range(2..=3), rng.gen_range(1..=3));
    let mut chosen = names.to_vec();
    chosen.shuffle(rng);
    for (n, a) in chosen.iter().take(3) {
        bias = bias.with_body(n, *a);
    }
    let universe: Vec<Atom> = if head_arity == 1 {
        (0..domain).map(|a| Atom::new("f", vec![Term::Int(a)])).collect()
    } else {
        (0..domain)
            .flat_map(|a| (0..domain).map(move |b| Atom::new("f", vec![Term::Int(a), Term::Int(b)])))
            .collect()
    };
    let task = Task {
        name: String::new(),
        bias,
        bk: Theory::new(bk),
        library: Library::default(),
        pos: Vec::new(),
        neg: Vec::new(),
        budget: Budget::default(),
    };
    (task, universe)
}

fn higher_order(rng: &mut ChaCha8Rng) -> (Task, Vec<Atom>) {
    let mut bk = facts("u1", 1, 3, 0.5, rng);
    bk.extend(facts("u2", 1, 3, 0.5, rng));
    let mut bias = BiasSpec::new("f", 1).with_limits(2, 2, 3);
    for (n, a) in [("u1", 1), ("u2", 1), ("even", 1), ("all", 1), ("some", 1)] {
        if n.starts_with('u') || n == "all" || n == "some" || rng.gen_bool(0.5) {
            bias = bias.with_body(n, a);
        }
    }
    let universe = all_lists(3, 3)
        .into_iter()
        .map(|l| Atom::new("f", vec![l]))
        .collect();
    let task = Task {
        name: String::new(),
        bias,
        bk: Theory::new(bk),
        library: Library::parse(TOY_LIBRARY, true).expect("toy library parses"),
        pos: Vec::new(),
        neg: Vec::new(),
        budget: Budget::default(),
    };
    (task, universe)
}

/// Labels `universe` with `target`; `None` when one side comes out empty.
fn label(task: &Task, gen: &Generator, target: &Candidate, universe: &[Atom]) -> Option<(Vec<Atom>, Vec<Atom>)> {
    let base = task.base_database(gen);
    let mut overlay = Database::new();
    for c in &target.theory.clauses {
        overlay.insert(c, gen.exec_order(c).as_deref());
    }
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for a in universe {
        match Engine::new(&base, Some(&overlay), task.budget).solve(a).ok()? {
            Verdict::Entailed => pos.push(a.clone()),
            Verdict::NotEntailed => neg.push(a.clone()),
            Verdict::Exhausted => return None,
        }
    }
    (!pos.is_empty() && !neg.is_empty()).then_some((pos, neg))
}

/// `n` toy tasks, alternating first-order and higher-order ones.
pub fn toy_family(n: usize, seed: u64) -> Vec<ToyTask> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let (mut task, universe) = if out.len() % 2 == 0 {
            first_order(&mut rng)
        } else {
            higher_order(&mut rng)
        };
        let mut gen = Generator::new(&task.bias, &task.library).without_constraints();
        let mut space = Vec::new();
        while let Some(c) = gen.next_candidate() {
            space.push(c);
            if space.len() as u128 > TOY_CEILING {
                break;
            }
        }
        if space.is_empty() || space.len() as u128 > TOY_CEILING {
            continue;
        }
        let target = space[rng.gen_range(0..space.len())].clone();
        let Some((pos, neg)) = label(&task, &gen, &target, &universe) else {
            continue;
        };
        task.name = format!("toy{}", out.len());
        task.pos = pos;
        task.neg = neg;
        out.push(ToyTask {
            task,
            target,
            space: space.len() as u128,
        });
    }
    out
}
