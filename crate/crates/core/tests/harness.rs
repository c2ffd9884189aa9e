use lff_core::harness::{
    bench, check_reference, corpus_bundles, format_examples, generate_examples, load_bundle, load_unlabelled,
    parse_examples, run, BenchOptions, RunOptions, SampleSpec,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// A scratch corpus under the system temp dir, removed on drop.
struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Scratch {
        let p = std::env::temp_dir().join(format!("lff-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&p);
        fs::create_dir_all(&p).unwrap();
        Scratch(p)
    }

    fn copy_bundle(&self, task: &str, mode: &str) -> PathBuf {
        let from = corpus().join(task).join(mode);
        let to = self.0.join(task).join(mode);
        fs::create_dir_all(&to).unwrap();
        for e in fs::read_dir(&from).unwrap() {
            let e = e.unwrap();
            fs::copy(e.path(), to.join(e.file_name())).unwrap();
        }
        to
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

#[test]
fn every_bundle_loads_and_its_reference_solves_it() {
    let dirs = corpus_bundles(&corpus()).unwrap();
    assert!(dirs.len() >= 22);
    for d in dirs {
        let b = load_bundle(&d).unwrap();
        let c = check_reference(&b).unwrap();
        assert!(c.ok(), "{}: {:?}", d.display(), c.violations);
    }
}

#[test]
fn example_generation_is_seeded() {
    let dir = corpus().join("member").join("ho");
    let b = load_unlabelled(&dir).unwrap();
    let spec = SampleSpec::parse(&fs::read_to_string(corpus().join("member/gen.pl")).unwrap()).unwrap();
    let reference = b.reference.as_ref().unwrap();
    let a = generate_examples(&b.task, reference, &spec, 3).unwrap();
    let again = generate_examples(&b.task, reference, &spec, 3).unwrap();
    let other = generate_examples(&b.task, reference, &spec, 4).unwrap();
    assert_eq!(a, again);
    assert_ne!(a, other);
    assert!(!a.pos.is_empty() && !a.neg.is_empty());

    // The shipped examples are the seed-1 draw.
    let shipped = generate_examples(&b.task, reference, &spec, 1).unwrap();
    let on_disk = fs::read_to_string(dir.join("examples.pl")).unwrap();
    assert_eq!(format_examples(&shipped.pos, &shipped.neg), on_disk);
}

#[test]
fn malformed_examples_are_rejected() {
    assert!(parse_examples("pos(f(a)) :- q.").is_err());
    assert!(parse_examples("maybe(f(a)).").is_err());
    assert!(parse_examples("pos(f(a), f(b)).").is_err());
}

#[test]
fn missing_files_name_the_path() {
    let s = Scratch::new("missing");
    let dir = s.copy_bundle("allEven", "ho");
    fs::remove_file(dir.join("examples.pl")).unwrap();
    let err = load_bundle(&dir).unwrap_err().to_string();
    assert!(err.contains("examples.pl"), "{err}");
    assert!(load_unlabelled(&dir).is_ok());
}

#[test]
fn undefined_body_predicate_is_an_error() {
    let s = Scratch::new("undefined");
    let dir = s.copy_bundle("allEven", "ho");
    let bias = fs::read_to_string(dir.join("bias.pl")).unwrap();
    fs::write(dir.join("bias.pl"), format!("{bias}\nbody_pred(nowhere,2).\n")).unwrap();
    let err = load_bundle(&dir).unwrap_err().to_string();
    assert!(err.contains("nowhere/2"), "{err}");
}

#[test]
fn bench_reports_every_bundle() {
    let s = Scratch::new("bench");
    s.copy_bundle("allEven", "ho");
    s.copy_bundle("allEven", "fo");
    let broken = s.copy_bundle("member", "ho");
    fs::write(broken.join("bk.pl"), "this is not prolog(").unwrap();
    let report = bench(
        &s.0,
        &BenchOptions {
            modes: vec!["ho".into(), "fo".into()],
            wallclock: Some(Duration::from_secs(60)),
            workers: 1,
        },
    )
    .unwrap();
    let rows: Vec<(&str, &str, &str)> = report
        .rows
        .iter()
        .map(|r| (r.task.as_str(), r.mode.as_str(), r.status.as_str()))
        .collect();
    assert_eq!(
        rows,
        [("allEven", "ho", "solved"), ("allEven", "fo", "solved"), ("member", "ho", "error")]
    );
    assert_eq!(report.rows[0].literals, report.rows[0].expected);
    assert_eq!(report.jsonl().lines().count(), 3);
    assert!(report.table().contains("solved 2 of 3 runs"));
}

#[test]
fn oracle_run_matches_learner_on_a_small_task() {
    let b = load_bundle(&corpus().join("allEven/ho")).unwrap();
    let (_, learned) = run(&b, RunOptions::default()).unwrap();
    let (_, oracle) = run(
        &b,
        RunOptions {
            oracle: Some(1_000_000),
            ..RunOptions::default()
        },
    )
    .unwrap();
    assert_eq!(learned.literals, oracle.literals);
    assert!(learned.tested <= oracle.tested);
}
