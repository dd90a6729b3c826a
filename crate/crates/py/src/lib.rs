//! Python bindings. Reports cross the boundary as JSON and come back as
//! plain dicts with the same shape the command-line tool prints.

use pyo3::exceptions::{PyRuntimeError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;

use supra_cli::parse::{parse_map, parse_psi, point_from_values};
use supra_cli::{build_construction, render, run as run_cli, sampling_box, RunConfig, SpaceArgs};
use supra_core::constructions::Construction as CoreConstruction;
use supra_core::fixpoint::{self as fp, BallOptions, ContractionProblem, Horizon, SelfMap};
use supra_core::matkowski::{self as mk, ComparisonFunction as CorePsi};
use supra_core::space::check_axioms;
use supra_core::{Error, Point, SpaceClass, SpaceParams};

fn err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Parse { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn params(b: f64, rho: f64) -> PyResult<SpaceParams> {
    SpaceParams::new(b, rho).map_err(err)
}

fn point_to_py<'py>(py: Python<'py>, p: &Point) -> PyResult<Bound<'py, PyAny>> {
    Ok(match p {
        Point::Scalar(v) => v.into_pyobject(py)?.into_any(),
        Point::Vector(vs) | Point::GridFn(vs) => PyList::new(py, vs)?.into_any(),
        Point::Discrete(d) => d.to_string().into_pyobject(py)?.into_any(),
    })
}

/// Re-wraps Python output in the kind of the input point.
fn point_like(like: &Point, obj: &Bound<'_, PyAny>) -> PyResult<Point> {
    Ok(match like {
        Point::Scalar(_) => Point::Scalar(obj.extract()?),
        Point::Vector(_) => Point::Vector(obj.extract()?),
        Point::GridFn(_) => Point::GridFn(obj.extract()?),
        Point::Discrete(_) => return Err(PyTypeError::new_err("callable maps on discrete points are unsupported")),
    })
}

/// A b-suprametric construction, e.g. `Construction("lp", p=0.5, dim=3)`.
#[pyclass(module = "supra_fixpoint", frozen)]
struct Construction {
    inner: CoreConstruction,
}

impl Construction {
    fn point(&self, obj: &Bound<'_, PyAny>) -> PyResult<Point> {
        let vs = match obj.extract::<f64>() {
            Ok(v) => vec![v],
            Err(_) => obj.extract::<Vec<f64>>()?,
        };
        point_from_values(vs, &self.inner).map_err(err)
    }
}

#[pymethods]
impl Construction {
    #[new]
    #[pyo3(signature = (kind, *, a=None, scale=None, beta=None, gamma=None, p=None, dim=None, grid=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        kind: String,
        a: Option<f64>,
        scale: Option<f64>,
        beta: Option<f64>,
        gamma: Option<f64>,
        p: Option<f64>,
        dim: Option<usize>,
        grid: Option<usize>,
    ) -> PyResult<Self> {
        let args = SpaceArgs { kind, a, scale, beta, gamma, p, dim, grid };
        Ok(Construction { inner: build_construction(&args).map_err(err)? })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    /// Declared `(b, rho)`, or `None` when nothing is claimed.
    #[getter]
    fn declared(&self) -> Option<(f64, f64)> {
        self.inner.declared.map(|p| (p.b, p.rho))
    }

    fn distance(&self, x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>) -> PyResult<f64> {
        self.inner.distance.distance(&self.point(x)?, &self.point(y)?).map_err(err)
    }

    /// Samples triples and checks the inequality for `(b, rho)`, defaulting
    /// to the declared parameters.
    #[pyo3(signature = (*, b=None, rho=None, samples=100_000, tol=1e-9, seed=0, lo=None, hi=None))]
    #[allow(clippy::too_many_arguments)]
    fn check_axioms<'py>(
        &self,
        py: Python<'py>,
        b: Option<f64>,
        rho: Option<f64>,
        samples: usize,
        tol: f64,
        seed: u64,
        lo: Option<f64>,
        hi: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let target = match (b, rho, self.inner.declared) {
            (None, None, Some(d)) => d,
            (None, None, None) => return Err(PyValueError::new_err("no declared parameters; pass b and rho")),
            (b, rho, _) => params(b.unwrap_or(1.0), rho.unwrap_or(0.0))?,
        };
        let (lo, hi) = sampling_box(&self.inner, lo, hi);
        let sampler = self.inner.sampler(lo, hi);
        let report = py
            .detach(|| {
                check_axioms(&self.inner.distance, SpaceClass::from(target), sampler.as_ref(), samples, tol, seed)
            })
            .map_err(err)?;
        to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        format!("Construction({})", self.inner.distance.label())
    }
}

/// A comparison function: `"linear:c"`, `"rational"`, `"sqrt-shift"`, an
/// expression in `t`, or a Python callable.
#[pyclass(module = "supra_fixpoint", frozen)]
struct ComparisonFunction {
    inner: CorePsi,
}

fn psi_from(obj: &Bound<'_, PyAny>) -> PyResult<CorePsi> {
    if let Ok(psi) = obj.cast::<ComparisonFunction>() {
        return Ok(psi.get().inner.clone());
    }
    if let Ok(src) = obj.extract::<String>() {
        return parse_psi(&src).map_err(err);
    }
    if obj.is_callable() {
        let f: Py<PyAny> = obj.clone().unbind();
        let label = obj.repr()?.to_string();
        return Ok(CorePsi::new(label, move |t| {
            Python::attach(|py| f.call1(py, (t,)).and_then(|v| v.extract::<f64>(py)).unwrap_or(f64::NAN))
        }));
    }
    Err(PyTypeError::new_err("psi must be a ComparisonFunction, a string or a callable"))
}

fn map_from(obj: &Bound<'_, PyAny>) -> PyResult<SelfMap> {
    if let Ok(src) = obj.extract::<String>() {
        return parse_map(&src).map_err(err);
    }
    if obj.is_callable() {
        let f: Py<PyAny> = obj.clone().unbind();
        let label = obj.repr()?.to_string();
        return Ok(SelfMap::new(label, move |x| {
            Python::attach(|py| {
                let out = f.call1(py, (point_to_py(py, x)?,))?;
                point_like(x, out.bind(py))
            })
            .map_err(|e| Error::Domain(format!("map raised: {e}")))
        }));
    }
    Err(PyTypeError::new_err("map must be a string or a callable"))
}

#[pymethods]
impl ComparisonFunction {
    #[new]
    fn new(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(ComparisonFunction { inner: psi_from(spec)? })
    }

    #[getter]
    fn label(&self) -> &str {
        self.inner.label()
    }

    fn __call__(&self, t: f64) -> f64 {
        self.inner.apply(t)
    }

    /// `psi^n(t)`.
    fn iterate(&self, n: u64, t: f64) -> f64 {
        self.inner.iterate(n, t)
    }

    fn orbit(&self, n: u64, t: f64) -> Vec<f64> {
        self.inner.orbit(n, t)
    }

    /// Membership in M, and in M_b when `b` is given.
    #[pyo3(signature = (b=None))]
    fn check<'py>(&self, py: Python<'py>, b: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        let m = mk::check_m(&self.inner, &mk::DEFAULT_GRID, mk::DEFAULT_N_MAX, mk::DEFAULT_VANISH_TOL).map_err(err)?;
        let mb = b
            .map(|b| mk::check_mb(&self.inner, b, &mk::DEFAULT_GRID, mk::DEFAULT_N_WINDOW))
            .transpose()
            .map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("m", to_py(py, &m)?)?;
        out.set_item("m_b", mb.map(|r| to_py(py, &r)).transpose()?)?;
        Ok(out.into_any())
    }

    fn __repr__(&self) -> String {
        format!("ComparisonFunction({:?})", self.inner.label())
    }
}

/// A self-map on a construction together with a comparison function and a
/// start point. `b` and `rho` override the declared parameters.
#[pyclass(module = "supra_fixpoint", frozen)]
struct Problem {
    construction: Py<Construction>,
    inner: ContractionProblem,
}

#[pymethods]
impl Problem {
    #[new]
    #[pyo3(signature = (construction, map, psi, x0, *, b=None, rho=None))]
    fn new(
        construction: Bound<'_, Construction>,
        map: &Bound<'_, PyAny>,
        psi: &Bound<'_, PyAny>,
        x0: &Bound<'_, PyAny>,
        b: Option<f64>,
        rho: Option<f64>,
    ) -> PyResult<Self> {
        let c = construction.get();
        let space = match (b, rho, c.inner.declared) {
            (None, None, Some(d)) => d,
            (None, None, None) => return Err(PyValueError::new_err("no declared parameters; pass b and rho")),
            (b, rho, _) => params(b.unwrap_or(1.0), rho.unwrap_or(0.0))?,
        };
        let inner =
            ContractionProblem::new(c.inner.distance.clone(), space, map_from(map)?, psi_from(psi)?, c.point(x0)?);
        Ok(Problem { construction: construction.unbind(), inner })
    }

    /// Picard iteration from `x0`.
    #[pyo3(signature = (*, max_iter=fp::DEFAULT_MAX_ITER, step_tol=fp::DEFAULT_STEP_TOL))]
    fn solve<'py>(&self, py: Python<'py>, max_iter: u64, step_tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &fp::picard(&self.inner, max_iter, step_tol).map_err(err)?)
    }

    /// Picard iteration with the full orbit: `(points, step_distances)`.
    #[pyo3(signature = (*, max_iter=fp::DEFAULT_MAX_ITER, step_tol=fp::DEFAULT_STEP_TOL))]
    fn trace<'py>(&self, py: Python<'py>, max_iter: u64, step_tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &fp::picard(&self.inner, max_iter, step_tol).map_err(err)?.trace)
    }

    /// Samples pairs and checks `d(fx, fy) <= psi(d(x, y))`.
    #[pyo3(signature = (*, pairs=1000, tol=1e-9, seed=0, lo=None, hi=None))]
    fn verify_contraction<'py>(
        &self,
        py: Python<'py>,
        pairs: usize,
        tol: f64,
        seed: u64,
        lo: Option<f64>,
        hi: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.contraction(py, pairs, tol, seed, lo, hi)?)
    }

    /// Runs from each start and compares the limits.
    #[pyo3(signature = (starts, *, tol=1e-9, max_iter=fp::DEFAULT_MAX_ITER, step_tol=fp::DEFAULT_STEP_TOL))]
    fn uniqueness<'py>(
        &self,
        py: Python<'py>,
        starts: Vec<Bound<'py, PyAny>>,
        tol: f64,
        max_iter: u64,
        step_tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let c = self.construction.get();
        let starts = starts.iter().map(|s| c.point(s)).collect::<PyResult<Vec<_>>>()?;
        to_py(py, &fp::uniqueness_check(&self.inner, &starts, tol, max_iter, step_tol).map_err(err)?)
    }

    /// Cauchy certificate and invariant-ball check at `epsilon`, after a
    /// sampled contraction check.
    #[pyo3(signature = (epsilon, *, max_m=50, samples=1000, seed=0, pairs=1000, q_cap=fp::DEFAULT_Q_CAP))]
    #[allow(clippy::too_many_arguments)]
    fn certify<'py>(
        &self,
        py: Python<'py>,
        epsilon: f64,
        max_m: u64,
        samples: usize,
        seed: u64,
        pairs: usize,
        q_cap: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let contraction = self.contraction(py, pairs, 1e-9, seed, None, None)?;
        let opts = BallOptions { samples, seed, q_cap };
        to_py(py, &fp::invariant_ball_check(&self.inner, &contraction, epsilon, max_m, opts).map_err(err)?)
    }
}

impl Problem {
    fn contraction(
        &self,
        py: Python<'_>,
        pairs: usize,
        tol: f64,
        seed: u64,
        lo: Option<f64>,
        hi: Option<f64>,
    ) -> PyResult<fp::ContractionReport> {
        let c = &self.construction.bind(py).get().inner;
        let (lo, hi) = sampling_box(c, lo, hi);
        fp::verify_contraction(&self.inner, c.sampler(lo, hi).as_ref(), pairs, tol, seed).map_err(err)
    }
}

#[pyfunction]
fn c_q(b: f64, rho: f64, q: u64) -> PyResult<f64> {
    fp::c_q_constant(params(b, rho)?, q).map_err(err)
}

#[pyfunction]
fn chain_bound(b: f64, rho: f64, ds: Vec<f64>) -> PyResult<f64> {
    fp::chain_bound(params(b, rho)?, &ds).map_err(err)
}

#[pyfunction]
fn esp_bound(b: f64, rho: f64, ds: Vec<f64>) -> PyResult<f64> {
    fp::esp_bound(params(b, rho)?, &ds).map_err(err)
}

/// Smallest `q` whose Cauchy threshold holds at `epsilon`.
#[pyfunction]
#[pyo3(signature = (psi, b, rho, epsilon, q_cap=fp::DEFAULT_Q_CAP))]
fn q_threshold<'py>(
    py: Python<'py>,
    psi: &Bound<'py, PyAny>,
    b: f64,
    rho: f64,
    epsilon: f64,
    q_cap: u64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &fp::q_threshold(&psi_from(psi)?, params(b, rho)?, epsilon, q_cap).map_err(err)?)
}

/// Bound on `d(x_p, x_q)` from `d0 = d(x_0, x_1)`; `q=None` is the infinite horizon.
#[pyfunction]
#[pyo3(signature = (psi, b, rho, d0, p, q=None))]
fn series_bound(psi: &Bound<'_, PyAny>, b: f64, rho: f64, d0: f64, p: u64, q: Option<u64>) -> PyResult<f64> {
    let horizon = q.map_or(Horizon::Infinite, Horizon::Finite);
    fp::series_bound(params(b, rho)?, &psi_from(psi)?, d0, p, horizon).map_err(err)
}

/// Runs a command-line invocation in-process: `run(["psi-check", "--psi",
/// "rational"])` returns `(exit_code, report)`.
#[pyfunction]
fn run<'py>(py: Python<'py>, args: Vec<String>) -> PyResult<(i32, Bound<'py, PyAny>)> {
    let argv = std::iter::once("supra-fixpoint".to_string()).chain(args);
    let config = <RunConfig as clap::Parser>::try_parse_from(argv).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let outcome = py.detach(|| run_cli(&config));
    let report = py.import("json")?.call_method1("loads", (render(&outcome.report),))?;
    Ok((outcome.code, report))
}

#[pymodule]
fn supra_fixpoint(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Construction>()?;
    m.add_class::<ComparisonFunction>()?;
    m.add_class::<Problem>()?;
    m.add_function(wrap_pyfunction!(c_q, m)?)?;
    m.add_function(wrap_pyfunction!(chain_bound, m)?)?;
    m.add_function(wrap_pyfunction!(esp_bound, m)?)?;
    m.add_function(wrap_pyfunction!(q_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(series_bound, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
