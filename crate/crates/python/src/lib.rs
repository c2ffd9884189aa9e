use pyo3::prelude::*;

#[pymodule]
mod lff {
    use lff_core::harness::load_bundle;
    use lff_core::learner::{learn as run_learn, LearnOptions, Status};
    use lff_core::parse::{parse_clause, parse_theory};
    use lff_core::subsumption::clause_subsumes;
    use pyo3::exceptions::PyValueError;
    use pyo3::prelude::*;
    use std::path::PathBuf;
    use std::time::Duration;

    fn err(e: lff_core::Error) -> PyErr {
        PyValueError::new_err(e.to_string())
    }

    /// Outcome of one learning run.
    #[pyclass(frozen, get_all)]
    pub struct Learned {
        status: String,
        literals: Option<usize>,
        program: Vec<String>,
        tested: u64,
        pruned: u64,
        seconds: f64,
    }

    #[pymethods]
    impl Learned {
        fn __repr__(&self) -> String {
            format!("Learned(status={:?}, literals={:?})", self.status, self.literals)
        }
    }

    /// Task summary: (name, head predicate, arity, positives, negatives).
    #[pyfunction]
    fn load_task(dir: PathBuf) -> PyResult<(String, String, usize, usize, usize)> {
        let b = load_bundle(&dir).map_err(err)?;
        let (h, a) = b.task.bias.head_pred;
        Ok((b.task.name, h.to_string(), a, b.task.pos.len(), b.task.neg.len()))
    }

    /// Clauses of a program text, printed back in canonical syntax.
    #[pyfunction]
    fn parse(text: &str) -> PyResult<Vec<String>> {
        let t = parse_theory(text).map_err(err)?;
        Ok(t.clauses.iter().map(|c| c.to_string()).collect())
    }

    /// The substitution under which `c1` subsumes `c2`, if any.
    #[pyfunction]
    fn subsume(c1: &str, c2: &str) -> PyResult<Option<String>> {
        let a = parse_clause(c1).map_err(err)?;
        let b = parse_clause(c2).map_err(err)?;
        Ok(clause_subsumes(&a, &b).and_then(|w| w.substitution().map(|s| s.to_string())))
    }

    #[pyfunction]
    #[pyo3(signature = (dir, wallclock=None))]
    fn learn(py: Python<'_>, dir: PathBuf, wallclock: Option<f64>) -> PyResult<Learned> {
        let b = load_bundle(&dir).map_err(err)?;
        let opts = LearnOptions {
            wallclock: wallclock.map(Duration::from_secs_f64),
            ..LearnOptions::default()
        };
        let r = py.detach(|| run_learn(&b.task, opts)).map_err(err)?;
        let status = match r.status {
            Status::Solved => "solved",
            Status::Exhausted => "exhausted",
            Status::Capped => "capped",
        };
        Ok(Learned {
            status: status.into(),
            literals: r.solution.as_ref().map(|s| s.literals()),
            program: r
                .solution
                .map(|s| s.higher_order_form().clauses.iter().map(|c| c.to_string()).collect())
                .unwrap_or_default(),
            tested: r.stats.tested,
            pruned: r.stats.pruned,
            seconds: r.stats.seconds,
        })
    }
}
