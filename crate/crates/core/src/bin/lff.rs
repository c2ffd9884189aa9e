use clap::{Parser, Subcommand};
use lff_core::harness::{
    bench, check_reference, format_examples, generate_examples, load_bundle, load_unlabelled, run, BenchOptions,
    RunOptions, SampleSpec,
};
use lff_core::learner::Status;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "lff", about = "Learn logic programs from examples, with higher-order definitions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Learn a program for one task bundle.
    Learn {
        #[arg(long)]
        task: PathBuf,
        /// Bundle subdirectory to use when TASK holds per-mode bundles.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        max_vars: Option<usize>,
        #[arg(long)]
        max_body: Option<usize>,
        #[arg(long)]
        max_clauses: Option<usize>,
        /// Resolution steps per example.
        #[arg(long)]
        step_budget: Option<u64>,
        /// Wall-clock cap in seconds.
        #[arg(long)]
        wallclock_cap: Option<f64>,
        /// Run the constraint-free oracle, refusing spaces above this size.
        #[arg(long)]
        oracle: Option<u128>,
        /// Re-test pruned candidates after the run.
        #[arg(long)]
        audit: bool,
        /// Write one line per generated candidate to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print the run row as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run every task of a corpus and write one JSON line per run.
    Bench {
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "ho")]
        modes: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 300.0)]
        wallclock_cap: f64,
    },
    /// Write examples.pl for a bundle from its reference and the task's gen.pl.
    GenExamples {
        #[arg(long)]
        task: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Validate bundles and check their reference solutions.
    Check {
        paths: Vec<PathBuf>,
    },
}

fn bundle_dir(task: &Path, mode: Option<&str>) -> PathBuf {
    match mode {
        Some(m) => task.join(m),
        None if !task.join("bias.pl").exists() && task.join("ho").join("bias.pl").exists() => task.join("ho"),
        None => task.to_path_buf(),
    }
}

/// `gen.pl` lives beside the bundle or one level up for per-mode layouts.
fn find_gen(dir: &Path) -> Option<PathBuf> {
    [dir.join("gen.pl"), dir.parent()?.join("gen.pl")]
        .into_iter()
        .find(|p| p.exists())
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn real_main(cli: Cli) -> lff_core::Result<ExitCode> {
    match cli.cmd {
        Cmd::Learn {
            task,
            mode,
            max_vars,
            max_body,
            max_clauses,
            step_budget,
            wallclock_cap,
            oracle,
            audit,
            trace,
            json,
        } => {
            let mut b = load_bundle(&bundle_dir(&task, mode.as_deref()))?;
            let bias = &mut b.task.bias;
            bias.max_vars = max_vars.unwrap_or(bias.max_vars);
            bias.max_body = max_body.unwrap_or(bias.max_body);
            bias.max_clauses = max_clauses.unwrap_or(bias.max_clauses);
            let trace = match trace {
                Some(p) => Some(Box::new(fs::File::create(&p)?) as Box<dyn std::io::Write + Send>),
                None => None,
            };
            let (r, row) = run(
                &b,
                RunOptions {
                    wallclock: wallclock_cap.map(Duration::from_secs_f64),
                    step_budget,
                    oracle,
                    audit,
                    trace,
                },
            )?;
            if json {
                println!("{}", serde_json::to_string(&row)?);
            } else {
                match &r.solution {
                    Some(s) => {
                        for c in &s.higher_order_form().clauses {
                            println!("{c}");
                        }
                    }
                    None => println!("% no solution ({})", row.status),
                }
                eprintln!(
                    "% {} literals, {} tested, {} pruned, {:.2}s",
                    row.literals.map_or("-".into(), |n| n.to_string()),
                    row.tested,
                    row.pruned,
                    row.seconds
                );
            }
            if let Some(a) = &r.audit {
                eprintln!("% audit: {} pruned programs re-tested, {} were solutions", a.checked, a.violations.len());
            }
            Ok(ExitCode::from(match r.status {
                Status::Solved => 0,
                Status::Exhausted => 2,
                Status::Capped => 3,
            }))
        }
        Cmd::Bench {
            corpus,
            modes,
            out,
            workers,
            wallclock_cap,
        } => {
            let report = bench(
                &corpus,
                &BenchOptions {
                    modes,
                    wallclock: Some(Duration::from_secs_f64(wallclock_cap)),
                    workers,
                },
            )?;
            if let Some(p) = out {
                fs::write(&p, report.jsonl())?;
            }
            print!("{}", report.table());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::GenExamples { task, seed } => {
            let dir = task;
            let b = load_unlabelled(&dir)?;
            let gen = find_gen(&dir).ok_or_else(|| lff_core::Error::Task(format!("no gen.pl for {}", dir.display())))?;
            let spec = SampleSpec::parse(&fs::read_to_string(&gen)?).map_err(|e| e.in_file(&gen))?;
            let reference = b
                .reference
                .as_ref()
                .ok_or_else(|| lff_core::Error::Task(format!("{}: no reference solution", dir.display())))?;
            let ex = generate_examples(&b.task, reference, &spec, seed)?;
            fs::write(dir.join("examples.pl"), format_examples(&ex.pos, &ex.neg))?;
            println!("{}: {} positive, {} negative", dir.display(), ex.pos.len(), ex.neg.len());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check { paths } => {
            let mut bad = 0;
            for root in paths {
                for dir in lff_core::harness::corpus_bundles(&root)? {
                    let res = load_bundle(&dir).and_then(|b| check_reference(&b));
                    match res {
                        Ok(c) if c.ok() => println!("ok    {} ({} literals)", dir.display(), c.literals),
                        Ok(c) => {
                            bad += 1;
                            println!("FAIL  {} {:?} {:?}", dir.display(), c.violations, c.outcome);
                        }
                        Err(e) => {
                            bad += 1;
                            println!("ERROR {}: {e}", dir.display());
                        }
                    }
                }
            }
            Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
