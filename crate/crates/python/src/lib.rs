//! Python module `pygrp`.
//!
//! Histories cross the boundary as `list[list[tuple[str, float]]]`: one inner
//! list per item, each event a `("PM" | "CM", interarrival_time)` pair.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use grp_core::io::{read_history_file, write_history_file};
use grp_core::{CeConfig, Event, EventHistory, EventKind, FitSpace, GenerationConfig, GrpError};

type PyHistory = Vec<Vec<(String, f64)>>;

fn to_py_err(e: GrpError) -> PyErr {
    match e {
        GrpError::InvalidInput(_) | GrpError::Parse { .. } => PyValueError::new_err(e.to_string()),
        GrpError::NumericOverflow { .. } => PyOverflowError::new_err(e.to_string()),
        GrpError::DegenerateObjective { .. } => PyRuntimeError::new_err(e.to_string()),
        GrpError::Io { .. } => PyOSError::new_err(e.to_string()),
    }
}

fn event_from(kind: &str, t: f64) -> PyResult<Event> {
    let kind: EventKind = kind.parse().map_err(to_py_err)?;
    Event::new(kind, t).map_err(to_py_err)
}

fn events_from(seq: &[(String, f64)]) -> PyResult<Vec<Event>> {
    seq.iter().map(|(k, t)| event_from(k, *t)).collect()
}

fn history_from(items: &PyHistory) -> PyResult<EventHistory> {
    let seqs = items.iter().map(|s| events_from(s)).collect::<PyResult<Vec<_>>>()?;
    Ok(EventHistory::from_sequences(seqs))
}

fn history_to(history: &EventHistory) -> PyHistory {
    history
        .items()
        .iter()
        .map(|item| item.events.iter().map(|e| (e.kind().to_string(), e.t())).collect())
        .collect()
}

#[pyclass(name = "WeibullParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyWeibullParams(grp_core::WeibullParams);

#[pymethods]
impl PyWeibullParams {
    #[new]
    fn new(a: f64, b: f64) -> PyResult<Self> {
        grp_core::WeibullParams::new(a, b).map(Self).map_err(to_py_err)
    }

    #[staticmethod]
    fn from_theta(theta: f64, b: f64) -> PyResult<Self> {
        grp_core::WeibullParams::from_theta(theta, b).map(Self).map_err(to_py_err)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta()
    }

    fn __repr__(&self) -> String {
        format!("WeibullParams(a={}, b={})", self.0.a(), self.0.b())
    }
}

#[pyclass(name = "RestorationFactors", frozen, from_py_object)]
#[derive(Clone)]
struct PyRestorationFactors(grp_core::RestorationFactors);

#[pymethods]
impl PyRestorationFactors {
    #[new]
    fn new(q_pm: f64, q_cm: f64) -> PyResult<Self> {
        grp_core::RestorationFactors::new(q_pm, q_cm).map(Self).map_err(to_py_err)
    }

    #[getter]
    fn q_pm(&self) -> f64 {
        self.0.q_pm()
    }

    #[getter]
    fn q_cm(&self) -> f64 {
        self.0.q_cm()
    }

    fn __repr__(&self) -> String {
        format!("RestorationFactors(q_pm={}, q_cm={})", self.0.q_pm(), self.0.q_cm())
    }
}

#[pyclass(name = "FitResult", frozen)]
struct PyFitResult(grp_core::FitResult);

#[pymethods]
impl PyFitResult {
    #[getter]
    fn params(&self) -> PyWeibullParams {
        PyWeibullParams(self.0.params)
    }

    #[getter]
    fn factors(&self) -> PyRestorationFactors {
        PyRestorationFactors(self.0.factors)
    }

    #[getter]
    fn log_likelihood(&self) -> f64 {
        self.0.log_likelihood
    }

    /// `(q_pm_extreme, q_cm_extreme)`.
    #[getter]
    fn extreme_flags(&self) -> (bool, bool) {
        (self.0.extreme_flags.q_pm, self.0.extreme_flags.q_cm)
    }

    /// Best log-likelihood reached by each restart.
    #[getter]
    fn start_log_likelihoods(&self) -> Vec<f64> {
        self.0.per_start.iter().map(|s| s.log_likelihood).collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("fit result serializes")
    }
}

#[pyfunction]
fn virtual_age_step(v_prev: f64, q: f64, t: f64) -> PyResult<f64> {
    grp_core::virtual_age_step(v_prev, q, t).map_err(to_py_err)
}

#[pyfunction]
fn trajectory(events: Vec<(String, f64)>, factors: PyRestorationFactors) -> PyResult<Vec<f64>> {
    Ok(grp_core::trajectory(&events_from(&events)?, &factors.0))
}

#[pyfunction]
fn event_log_likelihood(params: PyWeibullParams, v_prev: f64, kind: &str, t: f64) -> PyResult<f64> {
    grp_core::event_log_likelihood(&params.0, v_prev, &event_from(kind, t)?).map_err(to_py_err)
}

#[pyfunction]
fn history_log_likelihood(
    params: PyWeibullParams,
    factors: PyRestorationFactors,
    history: PyHistory,
) -> PyResult<f64> {
    let history = history_from(&history)?;
    grp_core::history_log_likelihood(&params.0, &factors.0, &history).map_err(to_py_err)
}

#[pyfunction]
fn conditional_quantile(params: PyWeibullParams, v: f64, u: f64) -> PyResult<f64> {
    grp_core::conditional_quantile(&params.0, v, u).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (params, factors, events_per_item, n_items = 1, k_cm = 1.0, seed = 0))]
fn generate(
    params: PyWeibullParams,
    factors: PyRestorationFactors,
    events_per_item: usize,
    n_items: usize,
    k_cm: f64,
    seed: u64,
) -> PyResult<PyHistory> {
    let config = GenerationConfig {
        params: params.0,
        factors: factors.0,
        k_cm,
        events_per_item,
        n_items,
        seed,
    };
    grp_core::generate(&config).map(|h| history_to(&h)).map_err(to_py_err)
}

#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (
    history,
    *,
    starts = 5,
    population = 1000,
    elite_fraction = 0.1,
    smoothing = 0.7,
    max_iterations = 200,
    seed = 0,
    ln_a_bounds = None,
    b_bounds = None,
    fixed_q_pm = None,
    fixed_q_cm = None,
))]
fn fit_mle(
    py: Python<'_>,
    history: PyHistory,
    starts: usize,
    population: usize,
    elite_fraction: f64,
    smoothing: f64,
    max_iterations: usize,
    seed: u64,
    ln_a_bounds: Option<(f64, f64)>,
    b_bounds: Option<(f64, f64)>,
    fixed_q_pm: Option<f64>,
    fixed_q_cm: Option<f64>,
) -> PyResult<PyFitResult> {
    let history = history_from(&history)?;
    let defaults = FitSpace::default();
    let space = FitSpace {
        ln_a: ln_a_bounds.unwrap_or(defaults.ln_a),
        b: b_bounds.unwrap_or(defaults.b),
        fixed_q_pm,
        fixed_q_cm,
        starts,
    };
    let ce = CeConfig {
        population,
        elite_fraction,
        smoothing,
        max_iterations,
        seed,
        ..CeConfig::default()
    };
    py.detach(|| grp_core::fit_mle(&history, &space, &ce))
        .map(PyFitResult)
        .map_err(to_py_err)
}

#[pyfunction]
fn evaluate(params: PyWeibullParams, factors: PyRestorationFactors, history: PyHistory) -> PyResult<f64> {
    let history = history_from(&history)?;
    grp_core::evaluate(&history, &params.0, &factors.0).map_err(to_py_err)
}

#[pyfunction]
fn read_csv(path: PathBuf) -> PyResult<PyHistory> {
    read_history_file(&path).map(|h| history_to(&h)).map_err(to_py_err)
}

#[pyfunction]
fn write_csv(history: PyHistory, path: PathBuf) -> PyResult<()> {
    write_history_file(&history_from(&history)?, &path).map_err(to_py_err)
}

#[pymodule]
fn pygrp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeibullParams>()?;
    m.add_class::<PyRestorationFactors>()?;
    m.add_class::<PyFitResult>()?;
    m.add_function(wrap_pyfunction!(virtual_age_step, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(event_log_likelihood, m)?)?;
    m.add_function(wrap_pyfunction!(history_log_likelihood, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(fit_mle, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(read_csv, m)?)?;
    m.add_function(wrap_pyfunction!(write_csv, m)?)?;
    m.add("EXTREME_THRESHOLD", grp_core::estimator::EXTREME_THRESHOLD)?;
    Ok(())
}
