//! Python bindings: feasible sets and their oracles, the two line-searched
//! learners, and config-driven experiments.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ofw_core::harness::{self, Scope};
use ofw_core::learners::{Learner, Ofw, ScOfw};
use ofw_core::{point, FeasibleSet, Point};

fn py_err(e: ofw_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point(coords: Vec<f64>) -> PyResult<Point> {
    Point::new(coords).map_err(py_err)
}

#[pyclass(name = "FeasibleSet", module = "pyofw", frozen)]
struct PySet {
    inner: FeasibleSet,
}

#[pymethods]
impl PySet {
    #[staticmethod]
    fn l2_ball(dim: usize, radius: f64) -> PyResult<Self> {
        Ok(Self {
            inner: FeasibleSet::l2_ball(dim, radius).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn lp_ball(dim: usize, radius: f64, p: f64) -> PyResult<Self> {
        Ok(Self {
            inner: FeasibleSet::lp_ball(dim, radius, p).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn l1_ball(dim: usize, radius: f64) -> PyResult<Self> {
        Ok(Self {
            inner: FeasibleSet::l1_ball(dim, radius).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn simplex(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: FeasibleSet::simplex(dim).map_err(py_err)?,
        })
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    /// Strong-convexity modulus with respect to the Euclidean norm; 0 for
    /// sets that are not strongly convex.
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.strong_convexity_modulus()
    }

    fn anchor(&self) -> Vec<f64> {
        self.inner.anchor().into_vec()
    }

    fn lmo(&self, g: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.lmo(&point(g)?).map_err(py_err)?.into_vec())
    }

    fn project(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.project(&point(x)?).map_err(py_err)?.into_vec())
    }

    #[pyo3(signature = (x, tol = 1e-9))]
    fn contains(&self, x: Vec<f64>, tol: f64) -> PyResult<bool> {
        self.inner.contains(&point(x)?, tol).map_err(py_err)
    }

    fn random_feasible(&self, seed: u64) -> Vec<f64> {
        self.inner.random_feasible(seed).into_vec()
    }

    fn __repr__(&self) -> String {
        format!("FeasibleSet({}, dim={})", self.inner.kind(), self.inner.dim())
    }
}

/// Online Frank-Wolfe with line search, tuned to a fixed horizon.
#[pyclass(name = "Ofw", module = "pyofw")]
struct PyOfw {
    inner: Ofw,
}

#[pymethods]
impl PyOfw {
    #[new]
    fn new(set: &PySet, horizon: usize, lipschitz: f64) -> PyResult<Self> {
        Ok(Self {
            inner: Ofw::new(set.inner.clone(), horizon, lipschitz).map_err(py_err)?,
        })
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta()
    }

    #[getter]
    fn rounds(&self) -> usize {
        self.inner.rounds()
    }

    fn decision(&self) -> Vec<f64> {
        self.inner.decision().coords().to_vec()
    }

    /// Absorbs the gradient at the current decision; returns the step size.
    fn step(&mut self, grad: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.step(&point(grad)?).map_err(py_err)?.sigma)
    }
}

/// Strongly convex online Frank-Wolfe; needs no horizon.
#[pyclass(name = "ScOfw", module = "pyofw")]
struct PyScOfw {
    inner: ScOfw,
}

#[pymethods]
impl PyScOfw {
    #[new]
    fn new(set: &PySet, lam: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ScOfw::new(set.inner.clone(), lam).map_err(py_err)?,
        })
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn rounds(&self) -> usize {
        self.inner.rounds()
    }

    fn decision(&self) -> Vec<f64> {
        self.inner.decision().coords().to_vec()
    }

    fn step(&mut self, grad: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.step(&point(grad)?).map_err(py_err)?.sigma)
    }
}

/// Exact minimizer of `sigma a + sigma^2 b` over `[0, 1]`.
#[pyfunction]
fn line_search(a: f64, b: f64) -> PyResult<f64> {
    point::line_search_quadratic(point::StepCoefficients::new(a, b)).map_err(py_err)
}

/// Runs a TOML experiment config and returns its summary and CSV trace.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyDict>> {
    let spec = harness::parse_config(config).map_err(py_err)?;
    let trace = harness::run_experiment(&spec).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("horizon", trace.summary.horizon)?;
    out.set_item("final_regret", trace.summary.final_regret)?;
    out.set_item("comparator_total", trace.summary.comparator_total)?;
    out.set_item("bound", trace.summary.bound)?;
    out.set_item("passed", trace.passed())?;
    out.set_item(
        "violations",
        trace
            .violations
            .iter()
            .map(|v| format!("{} at t={}", v.check, v.t))
            .collect::<Vec<_>>(),
    )?;
    out.set_item("csv", harness::emit_csv(&trace))?;
    Ok(out)
}

/// Regret bound for a config at horizon `t`; raises when none applies.
#[pyfunction]
fn theorem_bound(config: &str, t: usize) -> PyResult<f64> {
    let spec = harness::parse_config(config).map_err(py_err)?;
    harness::theorem_bound(&spec, t).map_err(py_err)
}

/// Surrogate-gap bound for a config at round `t`; raises when none applies.
#[pyfunction]
fn gap_bound(config: &str, t: usize) -> PyResult<f64> {
    let spec = harness::parse_config(config).map_err(py_err)?;
    harness::gap_bound(&spec, t).map_err(py_err)
}

#[pyfunction]
fn loglog_slope(points: Vec<(f64, f64)>) -> PyResult<f64> {
    harness::loglog_slope(&points).map_err(py_err)
}

/// Runs an invariant suite and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (scope = "all"))]
fn verify(scope: &str) -> PyResult<String> {
    let scope: Scope = scope.parse().map_err(py_err)?;
    Ok(harness::verify_suite(scope).to_json())
}

#[pymodule]
fn pyofw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySet>()?;
    m.add_class::<PyOfw>()?;
    m.add_class::<PyScOfw>()?;
    m.add_function(wrap_pyfunction!(line_search, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_bound, m)?)?;
    m.add_function(wrap_pyfunction!(gap_bound, m)?)?;
    m.add_function(wrap_pyfunction!(loglog_slope, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("CSV_HEADER", harness::CSV_HEADER)?;
    Ok(())
}
