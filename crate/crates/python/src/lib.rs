//! Python bindings for `bykov-core`.
//!
//! Structured results (certificates, audits, scans) are returned as plain
//! Python dicts built from their JSON form.

use bykov_core::audit::{run_audit, AuditConfig};
use bykov_core::circle::{
    critical_points, k_of_lambda, lambda_a_n, lambda_n, misiurewicz_check, singular_limit_convergence,
    superstable_search, CircleMap, ConvergenceGrid, MisiurewiczOptions, SuperstableOptions, DEFAULT_CRITICAL_CELLS,
};
use bykov_core::io::{RunConfig, REPORT_SCHEMA};
use bykov_core::model::{CylinderPoint, MapKind, PerturbationSpec};
use bykov_core::orbit::{classify_cell, iterate as iterate_orbit, lyapunov as lyapunov_estimate, Budget, LyapunovOptions};
use bykov_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn to_py(e: Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Converts any serialisable value to Python objects through `json.loads`.
fn to_object<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(json_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "ModelParams", module = "bykov", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModelParams(bykov_core::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    #[allow(clippy::too_many_arguments)]
    fn new(c1: f64, e1: f64, omega1: f64, c2: f64, e2: f64, omega2: f64, xi: f64, lambda_: f64) -> PyResult<Self> {
        let spec = bykov_core::model::ModelParamsSpec { c1, e1, omega1, c2, e2, omega2, xi, lambda: lambda_ };
        bykov_core::ModelParams::try_from(spec).map(Self).map_err(to_py)
    }

    /// Reference model `(C₁, E₁) = (2, 1)`, `(C₂, E₂) = (3, 1)`, equal `ω`.
    #[staticmethod]
    fn reference(omega: f64, lambda_: f64) -> PyResult<Self> {
        bykov_core::ModelParams::reference(omega, lambda_).map(Self).map_err(to_py)
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta()
    }

    #[getter]
    fn k_omega(&self) -> f64 {
        self.0.k_omega()
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda()
    }

    #[getter]
    fn xi(&self) -> f64 {
        self.0.xi()
    }

    /// `(δ₁, δ₂, δ, K_ω)`.
    fn constants(&self) -> (f64, f64, f64, f64) {
        let d = self.0.derived();
        (d.delta1, d.delta2, d.delta, d.k_omega)
    }

    fn with_lambda(&self, lambda_: f64) -> PyResult<Self> {
        self.0.with_lambda(lambda_).map(Self).map_err(to_py)
    }

    fn with_twisting_number(&self, k_omega: f64) -> PyResult<Self> {
        self.0.with_twisting_number(k_omega).map(Self).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(k_omega={}, delta={}, lambda={})", self.0.k_omega(), self.0.delta(), self.0.lambda())
    }
}

#[pyclass(name = "Perturbation", module = "bykov", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPerturbation(bykov_core::Perturbation);

#[pymethods]
impl PyPerturbation {
    /// `Φ₁ = cos x`, `Φ₂ = 1.1 + sin x`.
    #[staticmethod]
    fn reference() -> Self {
        Self(bykov_core::Perturbation::reference())
    }

    #[staticmethod]
    fn constant(phi1: f64, phi2: f64) -> PyResult<Self> {
        bykov_core::Perturbation::constant(phi1, phi2).map(Self).map_err(to_py)
    }

    /// Builds from the JSON form of a `[perturbation]` table.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec: PerturbationSpec = serde_json::from_str(text).map_err(json_err)?;
        bykov_core::Perturbation::from_spec(spec).map(Self).map_err(to_py)
    }

    fn phi1(&self, x: f64, y: f64) -> f64 {
        self.0.phi1(x, y)
    }

    fn phi2(&self, x: f64, y: f64) -> f64 {
        self.0.phi2(x, y)
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon()
    }
}

fn map_kind(kind: &str) -> PyResult<MapKind> {
    match kind {
        "eta" => Ok(MapKind::Eta),
        "psi21" => Ok(MapKind::Psi21),
        "return" => Ok(MapKind::Return),
        "rescaled" => Ok(MapKind::Rescaled),
        _ => Err(PyValueError::new_err(format!("unknown map kind {kind:?}; expected eta, psi21, return or rescaled"))),
    }
}

#[pyclass(name = "ReturnMap", module = "bykov", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyReturnMap(bykov_core::ReturnMap);

#[pymethods]
impl PyReturnMap {
    #[new]
    fn new(params: &PyModelParams, pert: &PyPerturbation) -> Self {
        Self(bykov_core::ReturnMap::new(params.0.clone(), pert.0.clone()))
    }

    #[getter]
    fn params(&self) -> PyModelParams {
        PyModelParams(self.0.params().clone())
    }

    fn apply(&self, x: f64, y: f64) -> PyResult<(f64, f64)> {
        let p = self.0.apply(CylinderPoint::new(x, y)).map_err(to_py)?;
        Ok((p.x, p.y))
    }

    fn apply_rescaled(&self, x: f64, ybar: f64) -> PyResult<(f64, f64)> {
        self.0.apply_rescaled(x, ybar).map_err(to_py)
    }

    /// `kind` is one of `eta`, `psi21`, `return`, `rescaled`.
    #[pyo3(signature = (x, y, kind = "return"))]
    fn evaluate(&self, x: f64, y: f64, kind: &str) -> PyResult<(f64, f64)> {
        self.0.evaluate(map_kind(kind)?, x, y).map_err(to_py)
    }

    /// Row-major `((a, b), (c, d))`.
    #[pyo3(signature = (x, y, kind = "return"))]
    fn jacobian(&self, x: f64, y: f64, kind: &str) -> PyResult<((f64, f64), (f64, f64))> {
        let m = self.0.jacobian(map_kind(kind)?, x, y).map_err(to_py)?;
        Ok(((m.a, m.b), (m.c, m.d)))
    }

    fn det_factorized(&self, x: f64, y: f64) -> PyResult<f64> {
        self.0.det_factorized(x, y).map_err(to_py)
    }
}

#[pyclass(name = "CircleMapFamily", module = "bykov", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCircleMapFamily(bykov_core::circle::CircleMapFamily);

#[pymethods]
impl PyCircleMapFamily {
    #[staticmethod]
    fn from_model(params: &PyModelParams, pert: &PyPerturbation) -> PyResult<Self> {
        bykov_core::circle::CircleMapFamily::from_model(&params.0, &pert.0).map(Self).map_err(to_py)
    }

    /// `h_a(x) = x + a − K_ω ln(1.1 + sin x)`.
    #[staticmethod]
    fn reference(k_omega: f64) -> Self {
        Self(bykov_core::circle::CircleMapFamily::reference(k_omega))
    }

    #[getter]
    fn k_omega(&self) -> f64 {
        self.0.k_omega()
    }

    fn eval(&self, a: f64, x: f64) -> f64 {
        self.0.eval(a, x)
    }

    fn lift(&self, a: f64, x: f64) -> f64 {
        self.0.lift(a, x)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.0.derivative(x)
    }

    /// `[(c, h''(c)), ...]` sorted by `c`.
    fn critical_points(&self) -> PyResult<Vec<(f64, f64)>> {
        let set = critical_points(&self.0, DEFAULT_CRITICAL_CELLS).map_err(to_py)?;
        Ok(set.points.iter().map(|p| (p.x, p.second_derivative)).collect())
    }

    #[pyo3(signature = (a, delta0 = 0.05, horizon = 50))]
    fn misiurewicz_check<'py>(&self, py: Python<'py>, a: f64, delta0: f64, horizon: usize) -> PyResult<Bound<'py, PyAny>> {
        let opts = MisiurewiczOptions { delta0, horizon, ..Default::default() };
        let cert = py.detach(|| misiurewicz_check(&self.0, a, &opts)).map_err(to_py)?;
        to_object(py, &cert)
    }

    #[pyo3(signature = (period = 2))]
    fn superstable_search<'py>(&self, py: Python<'py>, period: usize) -> PyResult<Bound<'py, PyAny>> {
        let opts = SuperstableOptions { period, ..Default::default() };
        let roots = py.detach(|| superstable_search(&self.0, &opts)).map_err(to_py)?;
        to_object(py, &roots)
    }
}

#[pyfunction]
fn iterate(map: &PyReturnMap, x0: f64, y0: f64, n: usize, burn_in: usize) -> PyResult<Vec<(f64, f64)>> {
    let p0 = CylinderPoint::try_new(x0, y0).map_err(to_py)?;
    let rec = iterate_orbit(&map.0, p0, n, burn_in);
    Ok(rec.points.iter().map(|p| (p.x, p.y)).collect())
}

#[pyfunction]
#[pyo3(signature = (map, x0, y0, iterates = 100_000, burn_in = 1000))]
fn lyapunov<'py>(py: Python<'py>, map: &PyReturnMap, x0: f64, y0: f64, iterates: usize, burn_in: usize) -> PyResult<Bound<'py, PyAny>> {
    let p0 = CylinderPoint::try_new(x0, y0).map_err(to_py)?;
    let opts = LyapunovOptions { iterates, burn_in, ..Default::default() };
    let est = py.detach(|| lyapunov_estimate(&map.0, p0, &opts)).map_err(to_py)?;
    to_object(py, &est)
}

/// Regime label and diagnostics for one `(λ, K_ω)` cell. `budget` is the
/// JSON form of a `[scan.budget]` table.
#[pyfunction]
#[pyo3(signature = (map, budget = None))]
fn classify<'py>(py: Python<'py>, map: &PyReturnMap, budget: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let budget: Budget = match budget {
        Some(t) => serde_json::from_str(t).map_err(json_err)?,
        None => Budget::default(),
    };
    let cell = py.detach(|| classify_cell(&map.0, &budget)).map_err(to_py)?;
    to_object(py, &cell)
}

#[pyfunction]
fn singular_limit<'py>(py: Python<'py>, map: &PyReturnMap, a: f64, ns: Vec<u32>) -> PyResult<Bound<'py, PyAny>> {
    let table = py.detach(|| singular_limit_convergence(&map.0, a, &ns, ConvergenceGrid::default())).map_err(to_py)?;
    to_object(py, &table)
}

/// Runs the H1-H7 audit. `config` is the JSON form of an `[audit]` table.
#[pyfunction]
#[pyo3(signature = (params, pert, config = None, seed = 0))]
fn audit<'py>(py: Python<'py>, params: &PyModelParams, pert: &PyPerturbation, config: Option<&str>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let cfg: AuditConfig = match config {
        Some(t) => serde_json::from_str(t).map_err(json_err)?,
        None => AuditConfig::default(),
    };
    let report = py.detach(|| run_audit(&params.0, &pert.0, &cfg, seed)).map_err(to_py)?;
    to_object(py, &report)
}

/// Parses and validates a TOML run configuration; returns its canonical form.
#[pyfunction]
fn load_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = RunConfig::from_toml_str(text).map_err(to_py)?;
    cfg.resolve().map_err(to_py)?;
    to_object(py, &cfg.canonical())
}

#[pyfunction(name = "lambda_n")]
fn py_lambda_n(k_omega: f64, n: u32) -> f64 {
    lambda_n(k_omega, n)
}

#[pyfunction(name = "lambda_a_n")]
fn py_lambda_a_n(k_omega: f64, a: f64, n: u32) -> f64 {
    lambda_a_n(k_omega, a, n)
}

#[pyfunction(name = "k_of_lambda")]
fn py_k_of_lambda(k_omega: f64, lambda_: f64) -> f64 {
    k_of_lambda(k_omega, lambda_)
}

#[pymodule]
pub fn bykov(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("REPORT_SCHEMA", REPORT_SCHEMA)?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyPerturbation>()?;
    m.add_class::<PyReturnMap>()?;
    m.add_class::<PyCircleMapFamily>()?;
    m.add_function(wrap_pyfunction!(iterate, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(singular_limit, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(load_config, m)?)?;
    m.add_function(wrap_pyfunction!(py_lambda_n, m)?)?;
    m.add_function(wrap_pyfunction!(py_lambda_a_n, m)?)?;
    m.add_function(wrap_pyfunction!(py_k_of_lambda, m)?)?;
    Ok(())
}
