//! Task bundles on disk, example generation, the benchmark runner and the
//! toy task family used by the property checks.
//!
//! A bundle directory holds `bias.pl`, `bk.pl`, `examples.pl`, and
//! optionally `library.pl` and `reference.pl`. Corpus tasks keep one bundle
//! per mode (`<task>/ho`, `<task>/fo`) next to a `gen.pl` sampling spec.

mod bench;
mod examples;
mod toy;

pub use bench::{bench, run, BenchOptions, BenchReport, BenchRow, RunOptions};
pub use examples::{generate_examples, ExampleSet, SampleSpec};
pub use toy::{toy_family, ToyTask};

use crate::bias::{well_formed_with, BiasSpec, HoContext};
use crate::error::{Error, Result};
use crate::evaluator::{builtin_names, test, Budget, Database, Outcome};
use crate::generator::space::slot_arities;
use crate::kernel::{Atom, Theory};
use crate::learner::Task;
use crate::library::{ground, LGrounding, Library};
use crate::parse::{ast_to_atom, parse_items, parse_theory, parse_theory_with};
use crate::symbol::Symbol;
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

/// A loaded bundle: the task plus its reference solution, if shipped.
#[derive(Clone, Debug)]
pub struct TaskBundle {
    pub dir: PathBuf,
    pub task: Task,
    pub reference: Option<Theory>,
}

fn read(dir: &Path, file: &str) -> Result<String> {
    let p = dir.join(file);
    fs::read_to_string(&p).map_err(|e| Error::from(e).in_file(p))
}

fn read_opt(dir: &Path, file: &str) -> Result<Option<String>> {
    let p = dir.join(file);
    if p.exists() {
        read(dir, file).map(Some)
    } else {
        Ok(None)
    }
}

/// Name of a bundle: the task directory, skipping a trailing mode directory.
pub fn bundle_name(dir: &Path) -> String {
    let last = dir.file_name().and_then(|s| s.to_str()).unwrap_or("task");
    if matches!(last, "ho" | "fo") {
        if let Some(p) = dir.parent().and_then(|p| p.file_name()).and_then(|s| s.to_str()) {
            return p.to_string();
        }
    }
    last.to_string()
}

/// Parses `pos(..).` and `neg(..).` facts.
pub fn parse_examples(text: &str) -> Result<(Vec<Atom>, Vec<Atom>)> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for item in parse_items(text)? {
        let err = |m: &str| Error::parse(item.line, item.col, m.to_string());
        if !item.body.is_empty() {
            return Err(err("examples are facts"));
        }
        let target = match item.head.name() {
            Some("pos") => &mut pos,
            Some("neg") => &mut neg,
            _ => return Err(err("expected pos(..) or neg(..)")),
        };
        let [a] = item.head.args() else {
            return Err(err("an example wraps one atom"));
        };
        target.push(ast_to_atom(a, item.line, item.col)?);
    }
    Ok((pos, neg))
}

pub fn format_examples(pos: &[Atom], neg: &[Atom]) -> String {
    let mut out = String::new();
    for a in pos {
        out.push_str(&format!("pos({a}).\n"));
    }
    for a in neg {
        out.push_str(&format!("neg({a}).\n"));
    }
    out
}

/// Every body predicate must be a BK predicate, a built-in, a library
/// definition or the head itself.
fn check_references(bias: &BiasSpec, bk: &Theory, lib: &Library) -> Result<()> {
    let mut known: BTreeSet<(Symbol, usize)> = bk
        .clauses
        .iter()
        .filter_map(|c| Some((c.head.symbol()?, c.head.args.len())))
        .collect();
    known.extend(builtin_names().iter().map(|(n, a)| (Symbol::intern(n), *a)));
    known.extend(lib.definitions().iter().map(|d| (d.name, d.fo_arity)));
    known.insert(bias.head_pred);
    for p in &bias.body_preds {
        if !known.contains(p) {
            return Err(Error::Task(format!("body predicate {}/{} is not defined", p.0, p.1)));
        }
    }
    Ok(())
}

/// Loads and validates a bundle. Library validators run here.
pub fn load_bundle(dir: &Path) -> Result<TaskBundle> {
    load(dir, true)
}

/// Loads a bundle whose `examples.pl` may be missing, as before example
/// generation. Examples present on disk are ignored.
pub fn load_unlabelled(dir: &Path) -> Result<TaskBundle> {
    load(dir, false)
}

fn load(dir: &Path, labelled: bool) -> Result<TaskBundle> {
    let bias = BiasSpec::parse(&read(dir, "bias.pl")?).map_err(|e| e.in_file(dir.join("bias.pl")))?;
    let bk = parse_theory(&read(dir, "bk.pl")?).map_err(|e| e.in_file(dir.join("bk.pl")))?;
    let library = match read_opt(dir, "library.pl")? {
        Some(t) => Library::parse(&t, true).map_err(|e| e.in_file(dir.join("library.pl")))?,
        None => Library::default(),
    };
    let (pos, neg) = if labelled {
        parse_examples(&read(dir, "examples.pl")?).map_err(|e| e.in_file(dir.join("examples.pl")))?
    } else {
        (Vec::new(), Vec::new())
    };
    check_references(&bias, &bk, &library)?;
    let reference = match read_opt(dir, "reference.pl")? {
        Some(t) => Some(
            parse_theory_with(&t, Some(&library.signature()))
                .map_err(|e| e.in_file(dir.join("reference.pl")))?,
        ),
        None => None,
    };
    let task = Task {
        name: bundle_name(dir),
        bias,
        bk,
        library,
        pos,
        neg,
        budget: Budget::default(),
    };
    task.check().map_err(|e| e.in_file(dir.join("examples.pl")))?;
    Ok(TaskBundle {
        dir: dir.to_path_buf(),
        task,
        reference,
    })
}

pub fn load_task(dir: impl AsRef<Path>) -> Result<Task> {
    load_bundle(dir.as_ref()).map(|b| b.task)
}

/// Instance and invented symbols of a grounded reference, keyed the way
/// the bias declares them.
pub fn grounding_context(g: &LGrounding, lib: &Library) -> HoContext {
    let mut ctx = HoContext::default();
    for (inst, sym) in &g.instance_names {
        ctx.instances.insert(*sym, inst.def);
        let Some(d) = lib.get(inst.def) else { continue };
        let names = d.slot_names();
        for ((s, name), a) in inst.ho_args.iter().zip(&names).zip(slot_arities(d)) {
            let generic = Symbol::intern(&format!("{}_{name}", d.name));
            ctx.invented.insert(*s, (generic, a.unwrap_or(0)));
        }
    }
    ctx
}

/// A grounded reference ready to run.
pub struct Grounded {
    pub grounding: LGrounding,
    pub ctx: HoContext,
    pub db: Database,
}

pub fn ground_reference(task: &Task, reference: &Theory) -> Result<Grounded> {
    let grounding = ground(reference, &task.library)?;
    let ctx = grounding_context(&grounding, &task.library);
    let mut db = Database::from_theory(&task.bk);
    db.extend(&grounding.program());
    Ok(Grounded { grounding, ctx, db })
}

/// Result of checking a reference solution against its bundle.
#[derive(Clone, Debug)]
pub struct ReferenceCheck {
    pub literals: usize,
    pub violations: Vec<String>,
    pub outcome: Outcome,
}

impl ReferenceCheck {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.outcome.is_solution()
    }
}

/// Grounds the reference, checks it against the bias and tests it on the
/// bundle's examples.
pub fn check_reference(b: &TaskBundle) -> Result<ReferenceCheck> {
    let reference = b
        .reference
        .as_ref()
        .ok_or_else(|| Error::Task(format!("{}: no reference solution", b.dir.display())))?;
    let g = ground_reference(&b.task, reference)?;
    let violations = well_formed_with(&g.grounding.principal, &b.task.bias, &g.ctx)
        .iter()
        .map(|v| v.to_string())
        .collect();
    let outcome = test(&g.db, None, &b.task.pos, &b.task.neg, Budget::steps(200_000))?;
    Ok(ReferenceCheck {
        literals: g.grounding.principal.size(),
        violations,
        outcome,
    })
}

/// Bundle directories below a corpus root, sorted by path. A directory is
/// a bundle when it has a `bias.pl`.
pub fn corpus_bundles(root: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        if d.join("bias.pl").exists() {
            out.push(d.clone());
        }
        for e in fs::read_dir(&d).map_err(|e| Error::from(e).in_file(&d))? {
            let p = e?.path();
            if p.is_dir() {
                stack.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_round_trip() {
        let text = "pos(f([1,2])).\nneg(f([])).\n";
        let (p, n) = parse_examples(text).unwrap();
        assert_eq!((p.len(), n.len()), (1, 1));
        assert_eq!(format_examples(&p, &n), text);
    }

    #[test]
    fn bundle_names_skip_mode_dirs() {
        assert_eq!(bundle_name(Path::new("corpus/allEven/ho")), "allEven");
        assert_eq!(bundle_name(Path::new("tasks/mine")), "mine");
    }
}
