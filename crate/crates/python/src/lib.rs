//! Python bindings. Every function takes file contents as strings.

use std::time::Duration;

use bcidx_core::format::{parse_goal_file, parse_proof_file, parse_terms_file, render_proof_file};
use bcidx_core::length::length_of;
use bcidx_core::proof::{check_proof, eliminate_restr, ProofVerdict};
use bcidx_core::rewrite::normalize as normalize_term;
use bcidx_core::search::{candidate_pool, search_with_hints, SearchBudget, SearchError};
use bcidx_core::term::order::CanonicalOrder;
use bcidx_core::term::parse_term;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn malformed(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn order_from(src: Option<&str>, sig: &bcidx_core::term::Signature) -> PyResult<CanonicalOrder> {
    match src {
        Some(s) => CanonicalOrder::from_order_file(s, sig).map_err(malformed),
        None => Ok(CanonicalOrder::default()),
    }
}

/// Result of checking a proof.
#[pyclass(frozen, get_all)]
struct Verdict {
    accepted: bool,
    path: Option<Vec<usize>>,
    rule: Option<String>,
    failure: Option<String>,
    message: Option<String>,
}

#[pymethods]
impl Verdict {
    fn __bool__(&self) -> bool {
        self.accepted
    }

    fn __repr__(&self) -> String {
        match (&self.failure, &self.path) {
            (Some(f), Some(p)) => format!("Verdict(reject, {f} at {p:?})"),
            _ => "Verdict(accept)".to_string(),
        }
    }
}

/// Normal forms of the terms in a terms file.
#[pyfunction]
#[pyo3(signature = (src, order=None))]
fn normalize(src: &str, order: Option<&str>) -> PyResult<Vec<String>> {
    let (d, terms) = parse_terms_file(src).map_err(malformed)?;
    let o = order_from(order, &d.sig)?;
    terms.iter().map(|t| normalize_term(t, &o).map(|n| n.to_string()).map_err(malformed)).collect()
}

/// Checks a proof file.
#[pyfunction]
#[pyo3(signature = (src, order=None))]
fn check(src: &str, order: Option<&str>) -> PyResult<Verdict> {
    let (d, der) = parse_proof_file(src).map_err(malformed)?;
    let o = order_from(order, &d.sig)?;
    Ok(match check_proof(&der, &o, &d.lengths) {
        ProofVerdict::Accept => Verdict { accepted: true, path: None, rule: None, failure: None, message: None },
        ProofVerdict::Reject { path, rule, error } => Verdict {
            accepted: false,
            path: Some(path),
            rule: Some(rule.to_string()),
            failure: Some(error.kind.name().to_string()),
            message: Some(error.message),
        },
    })
}

/// Searches for a proof of a goal file. Returns the proof file, or `None`
/// when the budget is exhausted.
#[pyfunction]
#[pyo3(signature = (src, max_depth=12, max_candidates=4096, timeout=60.0, hints=Vec::new(), jobs=1))]
fn search(
    py: Python<'_>,
    src: &str,
    max_depth: usize,
    max_candidates: usize,
    timeout: f64,
    hints: Vec<String>,
    jobs: usize,
) -> PyResult<Option<String>> {
    let (d, goal) = parse_goal_file(src).map_err(malformed)?;
    let hints = hints.iter().map(|h| parse_term(h, &d.sig)).collect::<Result<Vec<_>, _>>().map_err(malformed)?;
    let budget = SearchBudget {
        max_depth,
        max_candidates,
        timeout: Duration::from_secs_f64(timeout.max(0.0)),
        max_nested_cs: None,
        jobs: jobs.max(1),
    };
    let o = CanonicalOrder::default();
    let r = py.detach(|| search_with_hints(&goal, &budget, &o, &d.lengths, &hints));
    match r {
        Ok(r) => Ok(Some(render_proof_file(&d, &r.proof))),
        Err(SearchError::NotFound(_) | SearchError::Timeout(_)) => Ok(None),
        Err(e) => Err(PyRuntimeError::new_err(e.to_string())),
    }
}

/// The proof with every Restr node removed.
#[pyfunction]
fn restr_elim(src: &str) -> PyResult<String> {
    let (d, der) = parse_proof_file(src).map_err(malformed)?;
    let out = eliminate_restr(&der).map_err(malformed)?;
    Ok(render_proof_file(&d, &out))
}

/// The candidate set of a goal file.
#[pyfunction]
#[pyo3(signature = (src, max_candidates=4096))]
fn candidates(src: &str, max_candidates: usize) -> PyResult<Vec<String>> {
    let (_, goal) = parse_goal_file(src).map_err(malformed)?;
    let b = candidate_pool(&goal, &CanonicalOrder::default(), max_candidates).map_err(malformed)?;
    Ok(b.terms.iter().map(|t| t.to_string()).collect())
}

/// Lengths of the terms in a terms file; `None` where undefined.
#[pyfunction]
fn length(src: &str) -> PyResult<Vec<Option<String>>> {
    let (d, terms) = parse_terms_file(src).map_err(malformed)?;
    Ok(terms.iter().map(|t| length_of(t, &d.lengths).map(|l| l.to_string())).collect())
}

#[pymodule]
fn bcidx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(restr_elim, m)?)?;
    m.add_function(wrap_pyfunction!(candidates, m)?)?;
    m.add_function(wrap_pyfunction!(length, m)?)?;
    Ok(())
}
