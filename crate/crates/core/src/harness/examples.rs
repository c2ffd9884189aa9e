//! Seeded example generation from a reference solution.
//!
//! A `gen.pl` file lists input samplers per argument, with `out` marking
//! arguments the reference computes:
//!
//! ```text
//! sample(dropK(range(0,4), list(nat), out)).
//! counts(12, 12).
//! ```
//!
//! Positives come from the reference's answers on sampled inputs; negatives
//! are near-miss perturbations of positives (and failed samples of test
//! predicates) that the reference refutes within its budget.

use super::{ground_reference, Grounded};
use crate::error::{Error, Result};
use crate::evaluator::{Budget, Engine, Verdict};
use crate::kernel::{Atom, Pred, Term, Theory};
use crate::learner::Task;
use crate::parse::{parse_items, Ast};
use crate::symbol::Symbol;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq)]
pub enum Gen {
    Range(i64, i64),
    Even,
    Char,
    List(Box<Gen>, usize, usize),
    Sorted(Box<Gen>, usize, usize),
    Palindrome(Box<Gen>, usize, usize),
    Tree(usize),
    Out,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub head: Symbol,
    pub samples: Vec<Vec<Gen>>,
    pub pos: usize,
    pub neg: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExampleSet {
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
}

const MAX_LEN: usize = 5;
const MAX_INT: i64 = 7;

fn gen_of(a: &Ast) -> Option<Gen> {
    let len_args = |args: &[Ast]| -> Option<(Gen, usize, usize)> {
        let g = gen_of(args.first()?)?;
        match args {
            [_] => Some((g, 0, MAX_LEN)),
            [_, Ast::Int(lo), Ast::Int(hi)] if lo <= hi && *lo >= 0 => Some((g, *lo as usize, *hi as usize)),
            _ => None,
        }
    };
    match (a.name()?, a.args()) {
        ("nat", []) => Some(Gen::Range(0, MAX_INT)),
        ("even", []) => Some(Gen::Even),
        ("char", []) => Some(Gen::Char),
        ("out", []) => Some(Gen::Out),
        ("tree", []) => Some(Gen::Tree(2)),
        ("tree", [Ast::Int(d)]) if *d >= 0 => Some(Gen::Tree(*d as usize)),
        ("range", [Ast::Int(lo), Ast::Int(hi)]) if lo <= hi => Some(Gen::Range(*lo, *hi)),
        ("list", args) => len_args(args).map(|(g, l, h)| Gen::List(Box::new(g), l, h)),
        ("sorted", args) => len_args(args).map(|(g, l, h)| Gen::Sorted(Box::new(g), l, h)),
        ("palindrome", args) => len_args(args).map(|(g, l, h)| Gen::Palindrome(Box::new(g), l, h)),
        _ => None,
    }
}

impl SampleSpec {
    pub fn parse(text: &str) -> Result<SampleSpec> {
        let mut head = None;
        let mut samples = Vec::new();
        let (mut pos, mut neg) = (10, 10);
        for item in parse_items(text)? {
            let err = |m: String| Error::parse(item.line, item.col, m);
            match (item.head.name(), item.head.args()) {
                (Some("sample"), [a]) => {
                    let name = a.name().ok_or_else(|| err("sample needs an atom".into()))?;
                    let sym = Symbol::intern(name);
                    if head.is_some_and(|h| h != sym) {
                        return Err(err("samples must share one head".into()));
                    }
                    head = Some(sym);
                    let gens = a
                        .args()
                        .iter()
                        .map(|x| gen_of(x).ok_or_else(|| err(format!("unknown sampler {x:?}"))))
                        .collect::<Result<Vec<_>>>()?;
                    samples.push(gens);
                }
                (Some("counts"), [Ast::Int(p), Ast::Int(n)]) if *p >= 0 && *n >= 0 => {
                    pos = *p as usize;
                    neg = *n as usize;
                }
                _ => return Err(err("expected sample(..) or counts(P,N)".into())),
            }
        }
        let head = head.ok_or_else(|| Error::Task("no sample directive".into()))?;
        Ok(SampleSpec {
            head,
            samples,
            pos,
            neg,
        })
    }
}

fn draw(g: &Gen, rng: &mut ChaCha8Rng) -> Term {
    match g {
        Gen::Range(lo, hi) => Term::Int(rng.gen_range(*lo..=*hi)),
        Gen::Even => Term::Int(2 * rng.gen_range(0..=MAX_INT / 2)),
        Gen::Char => {
            let c = rng.gen_range(b'c'..=b'z') as char;
            Term::Const(Symbol::intern(&c.to_string()))
        }
        Gen::List(e, lo, hi) => {
            let n = rng.gen_range(*lo..=*hi);
            Term::list((0..n).map(|_| draw(e, rng)).collect::<Vec<_>>())
        }
        Gen::Sorted(e, lo, hi) => {
            let n = rng.gen_range(*lo..=*hi);
            let mut xs: Vec<Term> = (0..n).map(|_| draw(e, rng)).collect();
            xs.sort();
            Term::list(xs)
        }
        Gen::Palindrome(e, lo, hi) => {
            let n = rng.gen_range(*lo..=*hi);
            let half: Vec<Term> = (0..n.div_ceil(2)).map(|_| draw(e, rng)).collect();
            let mut xs = half.clone();
            xs.extend(half.into_iter().rev().skip(n % 2));
            Term::list(xs)
        }
        Gen::Tree(d) => {
            let k = if *d == 0 { 0 } else { rng.gen_range(0..=2) };
            let kids: Vec<Term> = (0..k).map(|_| draw(&Gen::Tree(d - 1), rng)).collect();
            Term::App(Symbol::intern("t"), vec![Term::Int(rng.gen_range(0..=MAX_INT)), Term::list(kids)])
        }
        Gen::Out => unreachable!("outputs are not drawn"),
    }
}

/// A small structural change to one term.
fn perturb(t: &Term, rng: &mut ChaCha8Rng) -> Option<Term> {
    match t {
        Term::Int(n) => Some(Term::Int(match rng.gen_range(0..3) {
            0 => n + 1,
            1 if *n > 0 => n - 1,
            _ => rng.gen_range(0..=MAX_INT),
        })),
        Term::Const(s) => {
            if let Some(items) = t.as_list() {
                debug_assert!(items.is_empty());
                return None;
            }
            let mut cs = s.as_str().chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => {
                    let d = if c == 'z' { 'y' } else { (c as u8 + 1) as char };
                    Some(Term::Const(Symbol::intern(&d.to_string())))
                }
                _ => None,
            }
        }
        Term::App(f, args) => {
            if let Some(items) = t.as_list() {
                let mut xs: Vec<Term> = items.into_iter().cloned().collect();
                if xs.is_empty() {
                    return None;
                }
                let i = rng.gen_range(0..xs.len());
                match rng.gen_range(0..5) {
                    0 => {
                        xs.remove(i);
                    }
                    1 => {
                        let x = xs[i].clone();
                        xs.insert(rng.gen_range(0..=xs.len()), x);
                    }
                    2 if xs.len() > 1 => {
                        let j = (i + 1) % xs.len();
                        xs.swap(i, j);
                    }
                    3 => xs.reverse(),
                    _ => xs[i] = perturb(&xs[i], rng)?,
                }
                return Some(Term::list(xs));
            }
            let mut args = args.clone();
            let i = rng.gen_range(0..args.len());
            args[i] = perturb(&args[i], rng)?;
            Some(Term::App(*f, args))
        }
        Term::Var(_) => None,
    }
}

fn verdict(g: &Grounded, a: &Atom, budget: Budget) -> Result<Verdict> {
    Engine::new(&g.db, None, budget).solve(a)
}

/// Generates examples for `task` from `reference`. Deterministic in `seed`.
pub fn generate_examples(task: &Task, reference: &Theory, spec: &SampleSpec, seed: u64) -> Result<ExampleSet> {
    let g = ground_reference(task, reference)?;
    let budget = Budget::steps(200_000);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ExampleSet::default();
    let mut seen: HashSet<Atom> = HashSet::new();
    let mut attempts = 0;
    while (out.pos.len() < spec.pos || out.neg.len() < spec.neg) && attempts < 50_000 {
        attempts += 1;
        let gens = &spec.samples[attempts % spec.samples.len()];
        let mut next_var = 0;
        let args: Vec<Term> = gens
            .iter()
            .map(|x| match x {
                Gen::Out => {
                    next_var += 1;
                    Term::var(next_var - 1)
                }
                other => draw(other, &mut rng),
            })
            .collect();
        let goal = Atom {
            pred: Pred::Sym(spec.head),
            ho_args: Vec::new(),
            args,
        };
        if next_var == 0 {
            match verdict(&g, &goal, budget)? {
                Verdict::Entailed if out.pos.len() < spec.pos && seen.insert(goal.clone()) => {
                    out.pos.push(goal)
                }
                Verdict::NotEntailed
                    if out.neg.len() < spec.neg && rng.gen_bool(0.3) && seen.insert(goal.clone()) =>
                {
                    out.neg.push(goal)
                }
                _ => {}
            }
        } else if out.pos.len() < spec.pos {
            let (answers, _) = Engine::new(&g.db, None, budget).solve_all(&goal, 16)?;
            if let Some(args) = answers.choose(&mut rng) {
                let a = Atom {
                    args: args.clone(),
                    ..goal
                };
                if a.is_ground() && seen.insert(a.clone()) {
                    out.pos.push(a);
                }
            }
        }
        if out.neg.len() < spec.neg {
            let Some(p) = out.pos.choose(&mut rng).cloned() else { continue };
            let outs: Vec<usize> = (0..gens.len()).filter(|i| gens[*i] == Gen::Out).collect();
            let i = if outs.is_empty() || rng.gen_bool(0.2) {
                rng.gen_range(0..p.args.len())
            } else {
                *outs.choose(&mut rng).unwrap()
            };
            let Some(t) = perturb(&p.args[i], &mut rng) else { continue };
            let mut q = p.clone();
            q.args[i] = t;
            if !seen.contains(&q) && verdict(&g, &q, budget)? == Verdict::NotEntailed {
                seen.insert(q.clone());
                out.neg.push(q);
            }
        }
    }
    if out.pos.len() < spec.pos || out.neg.len() < spec.neg {
        return Err(Error::Task(format!(
            "{}: only {} positives and {} negatives after {attempts} samples",
            task.name,
            out.pos.len(),
            out.neg.len()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bias::BiasSpec;
    use crate::library::Library;
    use crate::parse::parse_theory;

    fn task() -> Task {
        Task {
            name: "len".into(),
            bias: BiasSpec::new("len1", 2),
            bk: parse_theory("tail([_|T],T). empty([]).").unwrap(),
            library: Library::default(),
            pos: Vec::new(),
            neg: Vec::new(),
            budget: Budget::default(),
        }
    }

    #[test]
    fn spec_parses() {
        let s = SampleSpec::parse("sample(f(list(nat,1,3), out)). counts(4,5).").unwrap();
        assert_eq!(s.samples[0][1], Gen::Out);
        assert_eq!((s.pos, s.neg), (4, 5));
    }

    #[test]
    fn generated_examples_agree_with_the_reference() {
        let reference = parse_theory("len1(A,B) :- empty(A), B = 0. len1(A,B) :- tail(A,C), len1(C,D), succ(D,B).").unwrap();
        let spec = SampleSpec::parse("sample(len1(list(nat), out)). counts(6,6).").unwrap();
        let a = generate_examples(&task(), &reference, &spec, 3).unwrap();
        let b = generate_examples(&task(), &reference, &spec, 3).unwrap();
        assert_eq!(a, b);
        for e in &a.pos {
            let n = e.args[0].as_list().unwrap().len() as i64;
            assert_eq!(e.args[1], Term::Int(n));
        }
        for e in &a.neg {
            let n = e.args[0].as_list().map(|l| l.len() as i64);
            assert_ne!(Some(e.args[1].clone()), n.map(Term::Int));
        }
    }
}
