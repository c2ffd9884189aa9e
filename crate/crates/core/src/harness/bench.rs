//! Single runs and corpus sweeps, one report row per run.

use super::{ground_reference, load_bundle, TaskBundle};
use crate::error::{Error, Result};
use crate::evaluator::Budget;
use crate::learner::{enumerate_oracle, learn, LearnOptions, LearnResult, Status};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

#[derive(Default)]
pub struct RunOptions {
    pub wallclock: Option<Duration>,
    pub step_budget: Option<u64>,
    /// Run the constraint-free oracle with this candidate ceiling.
    pub oracle: Option<u128>,
    pub audit: bool,
    pub trace: Option<Box<dyn Write + Send>>,
}

/// One task under one mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub task: String,
    pub mode: String,
    pub status: String,
    pub solved: bool,
    pub literals: Option<usize>,
    /// Literal count of the shipped reference solution.
    pub expected: Option<usize>,
    pub tested: u64,
    pub pruned: u64,
    pub steps: u64,
    pub seconds: f64,
    pub program: Option<String>,
    pub error: Option<String>,
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Solved => "solved",
        Status::Exhausted => "exhausted",
        Status::Capped => "capped",
    }
}

fn mode_of(dir: &Path) -> String {
    dir.file_name()
        .and_then(|s| s.to_str())
        .filter(|s| matches!(*s, "ho" | "fo"))
        .unwrap_or("ho")
        .to_string()
}

fn expected_literals(b: &TaskBundle) -> Option<usize> {
    let r = b.reference.as_ref()?;
    ground_reference(&b.task, r).ok().map(|g| g.grounding.principal.size())
}

/// Runs one bundle and builds its report row.
pub fn run(b: &TaskBundle, opts: RunOptions) -> Result<(LearnResult, BenchRow)> {
    let mut task = b.task.clone();
    if let Some(n) = opts.step_budget {
        task.budget = Budget {
            max_steps: n,
            ..task.budget
        };
    }
    let r = match opts.oracle {
        Some(ceiling) => enumerate_oracle(&task, ceiling, opts.wallclock)?,
        None => learn(
            &task,
            LearnOptions {
                wallclock: opts.wallclock,
                audit: opts.audit,
                trace: opts.trace,
            },
        )?,
    };
    let row = BenchRow {
        task: task.name.clone(),
        mode: mode_of(&b.dir),
        status: status_name(r.status).to_string(),
        solved: r.status == Status::Solved,
        literals: r.solution.as_ref().map(|s| s.literals()),
        expected: expected_literals(b),
        tested: r.stats.tested,
        pruned: r.stats.pruned,
        steps: r.stats.steps,
        seconds: r.stats.seconds,
        program: r.solution.as_ref().map(|s| {
            s.higher_order_form()
                .clauses
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }),
        error: None,
    };
    Ok((r, row))
}

pub struct BenchOptions {
    pub modes: Vec<String>,
    pub wallclock: Option<Duration>,
    pub workers: usize,
}

impl Default for BenchOptions {
    fn default() -> BenchOptions {
        BenchOptions {
            modes: vec!["ho".into()],
            wallclock: Some(Duration::from_secs(300)),
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// One JSON object per line.
    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).expect("rows serialize"));
            out.push('\n');
        }
        out
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<14} {:<4} {:<10} {:>8} {:>8} {:>10} {:>10} {:>9}",
            "task", "mode", "status", "literals", "expected", "tested", "pruned", "seconds"
        );
        let show = |x: Option<usize>| x.map_or("-".to_string(), |n| n.to_string());
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<14} {:<4} {:<10} {:>8} {:>8} {:>10} {:>10} {:>9.2}",
                r.task,
                r.mode,
                r.status,
                show(r.literals),
                show(r.expected),
                r.tested,
                r.pruned,
                r.seconds
            );
        }
        let solved = self.rows.iter().filter(|r| r.solved).count();
        let _ = writeln!(out, "solved {solved} of {} runs", self.rows.len());
        out
    }
}

/// Task bundles under `corpus` for the given modes, ordered by task then
/// mode.
fn sweep_dirs(corpus: &Path, modes: &[String]) -> Result<Vec<PathBuf>> {
    let mut tasks: Vec<PathBuf> = fs::read_dir(corpus)
        .map_err(|e| Error::from(e).in_file(corpus))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    tasks.sort();
    let mut out = Vec::new();
    for t in tasks {
        for m in modes {
            let d = t.join(m);
            if d.join("bias.pl").exists() {
                out.push(d);
            }
        }
    }
    Ok(out)
}

/// Runs every task of the corpus under every mode. Failures are recorded
/// per row.
pub fn bench(corpus: &Path, opts: &BenchOptions) -> Result<BenchReport> {
    let dirs = sweep_dirs(corpus, &opts.modes)?;
    let one = |d: &PathBuf| -> BenchRow {
        let res = load_bundle(d).and_then(|b| {
            run(
                &b,
                RunOptions {
                    wallclock: opts.wallclock,
                    ..RunOptions::default()
                },
            )
        });
        match res {
            Ok((_, row)) => row,
            Err(e) => BenchRow {
                task: super::bundle_name(d),
                mode: mode_of(d),
                status: "error".into(),
                solved: false,
                literals: None,
                expected: None,
                tested: 0,
                pruned: 0,
                steps: 0,
                seconds: 0.0,
                program: None,
                error: Some(e.to_string()),
            },
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::Task(format!("worker pool: {e}")))?;
    let rows = pool.install(|| dirs.par_iter().map(one).collect());
    Ok(BenchReport { rows })
}
