//! Python bindings: parameters, the dispersion function, the solvers and the
//! small-eps expansions.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use resonance_core::asymptotics::leading_order;
use resonance_core::dispersion::{d_epsilon, ModelParams};
use resonance_core::riemann::{hankel_h1_0, sheet_sqrt, Dimension, Sheet, SheetPoint};
use resonance_core::rootfinder::{self, Regime, SolveOptions};
use resonance_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_) | Error::Domain(_) | Error::Unsupported(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn sheet(index: i32) -> PyResult<Sheet> {
    Sheet::try_from(index).map_err(to_py)
}

#[pyclass(name = "ModelParams", from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (d, theta0, c, epsilon, b = 1.0))]
    fn new(d: u8, theta0: f64, c: f64, epsilon: f64, b: f64) -> PyResult<Self> {
        let d = Dimension::try_from(d).map_err(to_py)?;
        let inner = ModelParams::new(d, theta0, c, epsilon).with_b(b);
        inner.validate().map_err(to_py)?;
        Ok(PyModelParams { inner })
    }

    #[getter]
    fn d(&self) -> u8 {
        self.inner.d.get()
    }

    #[getter]
    fn theta0(&self) -> f64 {
        self.inner.theta0
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(d={}, theta0={}, c={}, epsilon={}, b={})",
            p.d, p.theta0, p.c, p.epsilon, p.b
        )
    }
}

#[pyclass(name = "Singularity", frozen)]
struct PySingularity {
    #[pyo3(get)]
    kind: String,
    #[pyo3(get)]
    location: Complex64,
    #[pyo3(get)]
    sheet: i32,
    #[pyo3(get)]
    method: String,
    #[pyo3(get)]
    residual: f64,
}

#[pymethods]
impl PySingularity {
    fn __repr__(&self) -> String {
        format!(
            "Singularity(kind={:?}, location={}, sheet={}, method={:?}, residual={:e})",
            self.kind, self.location, self.sheet, self.method, self.residual
        )
    }
}

impl From<rootfinder::Singularity> for PySingularity {
    fn from(s: rootfinder::Singularity) -> Self {
        PySingularity {
            kind: s.kind.as_str().into(),
            location: s.location,
            sheet: s.sheet.index(),
            method: s.method.as_str().into(),
            residual: s.residual,
        }
    }
}

/// Regime cell number 1..7 for the parameters.
#[pyfunction]
fn classify_regime(params: &PyModelParams) -> u8 {
    Regime::classify(&params.inner).cell()
}

/// D_eps(z) with z on `sheet` and sqrt(z - 1) on `zm1_sheet`.
#[pyfunction]
#[pyo3(signature = (params, z, sheet = 0, zm1_sheet = 0))]
fn dispersion(params: &PyModelParams, z: Complex64, sheet: i32, zm1_sheet: i32) -> PyResult<Complex64> {
    let p = SheetPoint::new(z, self::sheet(sheet)?);
    d_epsilon(&params.inner, p, self::sheet(zm1_sheet)?).map_err(to_py)
}

/// sqrt(z) on the given sheet.
#[pyfunction]
#[pyo3(signature = (z, sheet = 0))]
fn sqrt_on_sheet(z: Complex64, sheet: i32) -> PyResult<Complex64> {
    sheet_sqrt(SheetPoint::new(z, self::sheet(sheet)?)).map_err(to_py)
}

#[pyfunction]
fn hankel1_0(eta: Complex64) -> PyResult<Complex64> {
    hankel_h1_0(eta).map_err(to_py)
}

/// All singularities near the threshold.
#[pyfunction]
#[pyo3(signature = (params, tol = rootfinder::DEFAULT_TOL, max_iter = rootfinder::DEFAULT_MAX_ITER))]
fn locate_singularities(params: &PyModelParams, tol: f64, max_iter: usize) -> PyResult<Vec<PySingularity>> {
    let report = rootfinder::locate_singularities(&params.inner, &SolveOptions { tol, max_iter }).map_err(to_py)?;
    Ok(report.singularities.into_iter().map(PySingularity::from).collect())
}

/// The small-eps expansion of the regime's singularity, evaluated at eps.
#[pyfunction]
fn expansion(params: &PyModelParams) -> PyResult<Complex64> {
    let p = &params.inner;
    let e = leading_order(p, &Regime::classify(p)).map_err(to_py)?;
    Ok(e.evaluate(p.epsilon))
}

#[pymodule]
fn resonance(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PySingularity>()?;
    m.add_function(wrap_pyfunction!(classify_regime, m)?)?;
    m.add_function(wrap_pyfunction!(dispersion, m)?)?;
    m.add_function(wrap_pyfunction!(sqrt_on_sheet, m)?)?;
    m.add_function(wrap_pyfunction!(hankel1_0, m)?)?;
    m.add_function(wrap_pyfunction!(locate_singularities, m)?)?;
    m.add_function(wrap_pyfunction!(expansion, m)?)?;
    m.add("A", resonance_core::riemann::A)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
