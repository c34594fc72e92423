//! Python bindings for `bose_thermo`.
//!
//! Scalars come back as floats; structured reports come back as plain dicts
//! with the same field names as the JSON the CLI writes.

use bose_thermo::bound::{self, BoundConfig};
use bose_thermo::ideal_gas;
use bose_thermo::kernels::dyson::random_scatterers;
use bose_thermo::kernels::{
    certify_dyson, decay_bound_check, verify_hole_lemma, CutoffProfile, DysonCheckConfig, LanczosOptions, Lattice,
    ProductBump, UChoice,
};
use bose_thermo::potentials::{self as pot, PairPotential, RadialPotential};
use bose_thermo::scattering::{self, default_r_max};
use bose_thermo::Error;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Resolution(_) | Error::Parse(_) => PyValueError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        Error::Bracket(_) | Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A radial pair potential.
#[pyclass(frozen, name = "Potential", module = "bose_thermo_py")]
struct PyPotential {
    inner: RadialPotential,
}

#[pymethods]
impl PyPotential {
    #[staticmethod]
    fn hard_core(radius: f64) -> PyResult<Self> {
        Ok(PyPotential { inner: RadialPotential::hard_core(radius).map_err(py_err)? })
    }

    #[staticmethod]
    fn step(height: f64, width: f64) -> PyResult<Self> {
        Ok(PyPotential { inner: RadialPotential::step(height, width).map_err(py_err)? })
    }

    #[staticmethod]
    fn tabulated(r: Vec<f64>, v: Vec<f64>) -> PyResult<Self> {
        Ok(PyPotential { inner: RadialPotential::tabulated(r, v).map_err(py_err)? })
    }

    #[staticmethod]
    fn attractive_well(lam: f64, range: f64) -> PyResult<Self> {
        Ok(PyPotential { inner: RadialPotential::attractive_well(lam, range).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyPotential { inner: RadialPotential::from_json(text).map_err(py_err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn range(&self) -> f64 {
        self.inner.range()
    }

    fn __call__(&self, r: f64) -> PyResult<f64> {
        pot::eval(&self.inner, r).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Potential({})", self.inner.to_json())
    }
}

/// Scattering length by `method` in {"ode", "variational"}.
#[pyfunction]
#[pyo3(signature = (potential, method = "ode", r_max = None, radius = None, mesh = 4096))]
fn scattering_length(
    potential: &PyPotential,
    method: &str,
    r_max: Option<f64>,
    radius: Option<f64>,
    mesh: usize,
) -> PyResult<f64> {
    let p = &potential.inner;
    let sol = match method {
        "ode" => scattering::scattering_length_ode(p, r_max.unwrap_or_else(|| default_r_max(p)), 16),
        "variational" => scattering::scattering_length_variational(p, radius.unwrap_or(4.0 * p.range()), mesh),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    Ok(sol.map_err(py_err)?.a)
}

/// Truncation report: the truncated potential, its moment and both scattering lengths.
#[pyfunction]
fn truncate<'py>(py: Python<'py>, potential: &PyPotential, phi: f64) -> PyResult<Bound<'py, PyAny>> {
    let p = &potential.inner;
    let t = pot::truncate(p, phi).map_err(py_err)?;
    let a = scattering::scattering_length_ode(p, default_r_max(p), 16).map_err(py_err)?.a;
    let a_tilde = scattering::scattering_length_ode(&t, default_r_max(&t), 16).map_err(py_err)?.a;
    let report = bose_thermo::cli::TruncationReport { moment: t.moment().map_err(py_err)?, potential: t, a, a_tilde };
    to_dict(py, &report)
}

#[pyfunction]
fn hard_sphere_truncated_a(a: f64, phi: f64) -> PyResult<f64> {
    scattering::hard_sphere_truncated_a(a, phi).map_err(py_err)
}

#[pyfunction]
fn critical_density(beta: f64) -> PyResult<f64> {
    ideal_gas::critical_density(beta).map_err(py_err)
}

#[pyfunction]
fn mu0(beta: f64, rho: f64) -> PyResult<f64> {
    ideal_gas::mu0(beta, rho).map_err(py_err)
}

#[pyfunction]
fn f0(beta: f64, rho: f64) -> PyResult<f64> {
    ideal_gas::f0(beta, rho).map_err(py_err)
}

/// All ideal-gas observables at one state point.
#[pyfunction]
fn ideal_gas_point<'py>(py: Python<'py>, beta: f64, rho: f64) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &ideal_gas::IdealGasPoint::new(beta, rho).map_err(py_err)?)
}

#[pyfunction]
fn correction_term(a: f64, beta: f64, rho: f64) -> PyResult<f64> {
    bound::correction_term(a, beta, rho).map_err(py_err)
}

#[pyfunction]
fn alpha_exponent(delta: f64) -> PyResult<f64> {
    bound::alpha_exponent(delta).map_err(py_err)
}

/// Lower-bound report with both branches, their parameters and the error budget.
#[pyfunction]
#[pyo3(signature = (a, beta, rho, delta = bound::DEFAULT_DELTA, a_tilde = None, r0 = None))]
fn lower_bound<'py>(
    py: Python<'py>,
    a: f64,
    beta: f64,
    rho: f64,
    delta: f64,
    a_tilde: Option<f64>,
    r0: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = BoundConfig::new(a, beta, rho).with_delta(delta);
    cfg.a_tilde = a_tilde;
    cfg.r0 = r0;
    to_dict(py, &bound::lower_bound(&cfg).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (r0, r, lam, mesh = 1024))]
fn hole_lemma<'py>(py: Python<'py>, r0: f64, r: f64, lam: f64, mesh: usize) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &verify_hole_lemma(r0, r, lam, mesh).map_err(py_err)?)
}

/// Decay check for the smooth product bump, or the polynomial one when `power` is given.
#[pyfunction]
#[pyo3(signature = (s, box_l, grid_n, n, power = None))]
fn decay_check<'py>(
    py: Python<'py>,
    s: f64,
    box_l: f64,
    grid_n: usize,
    n: u32,
    power: Option<u32>,
) -> PyResult<Bound<'py, PyAny>> {
    let bump = power.map_or(ProductBump::Smooth, |power| ProductBump::Polynomial { power });
    let lattice = Lattice::new(box_l, grid_n).map_err(py_err)?;
    to_dict(py, &decay_bound_check(&bump, s, &lattice, n).map_err(py_err)?)
}

/// Dyson-type certification for a truncated hard sphere around seeded scatterers.
#[pyfunction]
#[pyo3(signature = (
    a = 4.0, phi = 40.0, box_l = 32.0, grids = vec![16, 24, 32], scatterers = 1, r = 8.0, s = 8.0,
    epsilon = 0.3, kappa = 0.0, hole = true, seed = 0
))]
#[allow(clippy::too_many_arguments)]
fn dyson_check<'py>(
    py: Python<'py>,
    a: f64,
    phi: f64,
    box_l: f64,
    grids: Vec<usize>,
    scatterers: usize,
    r: f64,
    s: f64,
    epsilon: f64,
    kappa: f64,
    hole: bool,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cert = py
        .detach(|| {
            let potential = pot::truncate(&RadialPotential::hard_core(a)?, phi)?;
            let points = random_scatterers(scatterers, box_l, 8, r / 5.0, seed)?;
            let cfg = DysonCheckConfig {
                kappa,
                u_choice: if hole { UChoice::HatWithHole } else { UChoice::Hat },
                ..DysonCheckConfig::new(points, r, epsilon)
            };
            let opts = LanczosOptions { seed, ..LanczosOptions::default() };
            certify_dyson(&cfg, &potential, &CutoffProfile::new(s)?, box_l, &grids, &opts)
        })
        .map_err(py_err)?;
    to_dict(py, &cert)
}

#[pymodule]
fn bose_thermo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotential>()?;
    m.add_function(wrap_pyfunction!(scattering_length, m)?)?;
    m.add_function(wrap_pyfunction!(truncate, m)?)?;
    m.add_function(wrap_pyfunction!(hard_sphere_truncated_a, m)?)?;
    m.add_function(wrap_pyfunction!(critical_density, m)?)?;
    m.add_function(wrap_pyfunction!(mu0, m)?)?;
    m.add_function(wrap_pyfunction!(f0, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_gas_point, m)?)?;
    m.add_function(wrap_pyfunction!(correction_term, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(hole_lemma, m)?)?;
    m.add_function(wrap_pyfunction!(decay_check, m)?)?;
    m.add_function(wrap_pyfunction!(dyson_check, m)?)?;
    Ok(())
}
