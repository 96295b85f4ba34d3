use num_complex::Complex64;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use taubnut_core::clifford::{dirac_apply, SpinorField as _};
use taubnut_core::geometry::{self, CoordPoint, MetricParams, Profile};
use taubnut_core::harness::config::Config;
use taubnut_core::harness::norms::{l2_norm_squared, FieldRef};
use taubnut_core::harness::quadrature::QuadratureSpec;
use taubnut_core::harness::suite;
use taubnut_core::rs_bundle::{divergence, rs_apply, SpinorOneFormField as _};
use taubnut_core::solutions::{self, ClosedOneFormField, ClosedSpinorField, HarmonicKind};
use taubnut_core::specfun::{self, BranchInput, KummerParams};
use taubnut_core::LabError;

fn err(e: LabError) -> PyErr {
    match e {
        LabError::UnknownCheck(id) => PyKeyError::new_err(format!("unknown check id `{id}`")),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn profile(name: &str) -> PyResult<Profile> {
    match name.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
        "taubnut" => Ok(Profile::TaubNut),
        "negativenut" => Ok(Profile::NegativeNut),
        "scalarflat" => Ok(Profile::ScalarFlat),
        _ => Err(PyValueError::new_err(format!("unknown profile `{name}`"))),
    }
}

fn point(r: f64, theta: f64, phi: f64, psi: f64) -> CoordPoint {
    CoordPoint::new(r, theta, phi, psi)
}

/// A Taub-NUT type metric.
#[pyclass(frozen, module = "taubnut")]
struct Metric {
    inner: MetricParams,
}

#[pymethods]
impl Metric {
    #[new]
    #[pyo3(signature = (n, c1, c2, profile_name = "ScalarFlat"))]
    fn new(n: f64, c1: f64, c2: f64, profile_name: &str) -> PyResult<Self> {
        Ok(Metric { inner: MetricParams::new(n, c1, c2, profile(profile_name)?).map_err(err)? })
    }

    #[staticmethod]
    fn taub_nut(n: f64) -> PyResult<Self> {
        Ok(Metric { inner: MetricParams::taub_nut(n).map_err(err)? })
    }

    #[staticmethod]
    fn negative_nut(n: f64) -> PyResult<Self> {
        Ok(Metric { inner: MetricParams::negative_nut(n).map_err(err)? })
    }

    #[staticmethod]
    fn scalar_flat(n: f64, c1: f64, c2: f64) -> PyResult<Self> {
        Ok(Metric { inner: MetricParams::scalar_flat(n, c1, c2).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> f64 {
        self.inner.n()
    }

    #[getter]
    fn c1(&self) -> f64 {
        self.inner.c1()
    }

    #[getter]
    fn c2(&self) -> f64 {
        self.inner.c2()
    }

    #[getter]
    fn profile(&self) -> String {
        format!("{:?}", self.inner.profile())
    }

    fn f(&self, r: f64) -> PyResult<f64> {
        geometry::profile_f(&self.inner, r).map_err(err)
    }

    #[pyo3(signature = (r, theta = std::f64::consts::FRAC_PI_2))]
    fn scalar_curvature(&self, r: f64, theta: f64) -> PyResult<f64> {
        Ok(geometry::curvature(&self.inner, &point(r, theta, 0.0, 0.0)).map_err(err)?.scalar)
    }

    /// Scalar curvature evaluated in exact rational arithmetic.
    fn scalar_curvature_exact(&self, r: f64) -> PyResult<f64> {
        geometry::scalar_curvature_exact(&self.inner, r).map_err(err)
    }

    /// Diagonal of the Ricci tensor in the orthonormal frame.
    fn ricci_diag(&self, r: f64, theta: f64, phi: f64, psi: f64) -> PyResult<[f64; 4]> {
        Ok(geometry::curvature(&self.inner, &point(r, theta, phi, psi)).map_err(err)?.ricci_diag)
    }

    fn total_mass(&self, cutoff: f64) -> PyResult<f64> {
        geometry::total_mass(&self.inner, cutoff).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Metric(n={}, c1={}, c2={}, profile={:?})", self.inner.n(), self.inner.c1(), self.inner.c2(), self.inner.profile())
    }
}

/// Closed-form spinor field (parallel or harmonic).
#[pyclass(frozen, module = "taubnut")]
struct Spinor {
    inner: ClosedSpinorField,
    label: String,
}

#[pymethods]
impl Spinor {
    #[staticmethod]
    fn parallel(profile_name: &str, c3: Complex64, c4: Complex64) -> PyResult<Self> {
        let inner = solutions::parallel_spinor(profile(profile_name)?, c3, c4).map_err(err)?;
        Ok(Spinor { inner, label: format!("parallel({profile_name})") })
    }

    /// `kind` is one of `plus`, `minus`, `maxwell_minus`.
    #[staticmethod]
    fn harmonic(kind: &str, n: f64, c3: Complex64, c4: Complex64) -> PyResult<Self> {
        let k = match kind {
            "plus" => HarmonicKind::Plus,
            "minus" => HarmonicKind::Minus,
            "maxwell_minus" => HarmonicKind::MaxwellMinus,
            _ => return Err(PyValueError::new_err(format!("unknown harmonic kind `{kind}`"))),
        };
        let inner = solutions::harmonic_spinor(k, n, c3, c4).map_err(err)?;
        Ok(Spinor { inner, label: format!("harmonic({kind}, n={n})") })
    }

    fn evaluate(&self, r: f64, theta: f64, phi: f64, psi: f64) -> PyResult<[Complex64; 4]> {
        Ok(self.inner.evaluate(&point(r, theta, phi, psi)).map_err(err)?.0)
    }

    /// The Dirac operator applied at a point.
    fn dirac(&self, metric: &Metric, r: f64, theta: f64, phi: f64, psi: f64) -> PyResult<[Complex64; 4]> {
        Ok(dirac_apply(&self.inner, &point(r, theta, phi, psi), &metric.inner).map_err(err)?.0)
    }

    #[pyo3(signature = (metric, rel_tol = 1e-9))]
    fn l2_norm_squared(&self, py: Python<'_>, metric: &Metric, rel_tol: f64) -> PyResult<f64> {
        let spec = QuadratureSpec::to_infinity(metric.inner.n()).with_rel_tol(rel_tol);
        py.detach(|| l2_norm_squared(FieldRef::Spinor(&self.inner), &metric.inner, &spec)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Spinor.{}", self.label)
    }
}

/// Closed-form Rarita-Schwinger field.
#[pyclass(frozen, module = "taubnut")]
struct RsField {
    inner: ClosedOneFormField,
}

#[pymethods]
impl RsField {
    #[new]
    fn new(profile_name: &str, n: f64, c3: Complex64, c4: Complex64) -> PyResult<Self> {
        Ok(RsField { inner: solutions::rs_field(profile(profile_name)?, n, c3, c4).map_err(err)? })
    }

    /// The four spinor components `Ψ_i`.
    fn evaluate(&self, r: f64, theta: f64, phi: f64, psi: f64) -> PyResult<Vec<[Complex64; 4]>> {
        Ok(self.inner.evaluate(&point(r, theta, phi, psi)).map_err(err)?.psi.iter().map(|s| s.0).collect())
    }

    fn rs_residual(&self, metric: &Metric, r: f64, theta: f64, phi: f64, psi: f64) -> PyResult<f64> {
        Ok(rs_apply(&self.inner, &point(r, theta, phi, psi), &metric.inner).map_err(err)?.norm())
    }

    fn divergence_residual(&self, metric: &Metric, r: f64, theta: f64, phi: f64, psi: f64) -> PyResult<f64> {
        Ok(divergence(&self.inner, &point(r, theta, phi, psi), &metric.inner).map_err(err)?.norm())
    }

    #[pyo3(signature = (metric, rel_tol = 1e-9))]
    fn l2_norm_squared(&self, py: Python<'_>, metric: &Metric, rel_tol: f64) -> PyResult<f64> {
        let spec = QuadratureSpec::to_infinity(metric.inner.n()).with_rel_tol(rel_tol);
        py.detach(|| l2_norm_squared(FieldRef::OneForm(&self.inner), &metric.inner, &spec)).map_err(err)
    }
}

#[pyfunction]
fn kummer_1f1(alpha: Complex64, gamma: Complex64, z: Complex64) -> PyResult<Complex64> {
    specfun::kummer_1f1(&KummerParams::new(alpha, gamma).map_err(err)?, z).map_err(err)
}

#[pyfunction]
fn gauss_2f1(a: Complex64, b: Complex64, c: Complex64, z: f64) -> PyResult<Complex64> {
    specfun::gauss_2f1(a, b, c, z).map_err(err)
}

/// Square root of `x² − λ²y²` on branch `k`.
#[pyfunction]
#[pyo3(signature = (x, y, lam, k = 0))]
fn branch_sqrt(x: f64, y: f64, lam: Complex64, k: u8) -> PyResult<Complex64> {
    specfun::branch_sqrt(&BranchInput { x, y, lambda: lam, k }).map_err(err)
}

/// `(id, description)` for every registered check.
#[pyfunction]
fn list_checks() -> Vec<(&'static str, &'static str)> {
    suite::registry().iter().map(|c| (c.id, c.description)).collect()
}

#[pyfunction]
fn default_config() -> String {
    Config::default().to_json()
}

/// Runs checks and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (checks = None, config_json = None, workers = None))]
fn run_suite(py: Python<'_>, checks: Option<Vec<String>>, config_json: Option<&str>, workers: Option<usize>) -> PyResult<String> {
    let config = match config_json {
        Some(text) => Config::from_json(text).map_err(err)?,
        None => Config::default(),
    };
    let names = checks.unwrap_or_default();
    let report = py.detach(|| suite::run_suite(&config, &names, workers)).map_err(err)?;
    Ok(report.to_json())
}

#[pymodule]
fn taubnut(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Metric>()?;
    m.add_class::<Spinor>()?;
    m.add_class::<RsField>()?;
    m.add_function(wrap_pyfunction!(kummer_1f1, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_2f1, m)?)?;
    m.add_function(wrap_pyfunction!(branch_sqrt, m)?)?;
    m.add_function(wrap_pyfunction!(list_checks, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("SCHEMA_VERSION", taubnut_core::harness::report::SCHEMA_VERSION)?;
    Ok(())
}
