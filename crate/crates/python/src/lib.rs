//! Python bindings. Instances hold either `float` or exact rational entries;
//! exact values cross into Python as `fractions.Fraction`.

use kronrank_core::cli::{run_check, Check};
use kronrank_core::closed_form::{BreakdownReport, FactorReport};
use kronrank_core::generator::{random_instance, Profile};
use kronrank_core::io::{instance_to_string, parse_instance};
use kronrank_core::oracle::dense_cap_from_env;
use kronrank_core::permutation::DEFAULT_TUPLE_LIMIT;
use kronrank_core::verify::verify_instance;
use kronrank_core::{
    closed_form_det, determinant as core_determinant, kron as core_kron, leibniz_det as core_leibniz_det,
    lu_sign_log_det as core_lu_sign_log_det, materialize, materialized_det, BigRational, DenseMatrix, Error,
    KronRankOneInstance, Scalar, ScalarMode,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyFloat, PyList};

create_exception!(
    kronrank,
    ResourceLimitError,
    PyException,
    "A size or enumeration limit was exceeded."
);
create_exception!(kronrank, VerificationError, PyException, "An identity check failed.");

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Resource { .. } => ResourceLimitError::new_err(e.to_string()),
        Error::Verification { .. } => VerificationError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<ScalarMode> {
    mode.parse().map_err(to_py_err)
}

fn parse_profile(profile: &str) -> PyResult<Profile> {
    profile.parse().map_err(to_py_err)
}

fn scalar_from_py<T: Scalar>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    if obj.is_instance_of::<PyFloat>() {
        let v: f64 = obj.extract()?;
        if !v.is_finite() {
            return Err(PyValueError::new_err(format!("non-finite entry {v}")));
        }
        return Ok(T::from_f64_exact(v));
    }
    // int, str, Fraction and Decimal all print as literals the parser accepts
    T::parse_literal(&obj.str()?.to_string()).map_err(to_py_err)
}

fn matrix_from_py<T: Scalar>(obj: &Bound<'_, PyAny>) -> PyResult<DenseMatrix<T>> {
    let rows: Vec<Vec<Bound<'_, PyAny>>> = obj.extract()?;
    let rows = rows
        .iter()
        .map(|r| r.iter().map(scalar_from_py).collect::<PyResult<Vec<T>>>())
        .collect::<PyResult<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(PyValueError::new_err("matrix has no rows"));
    }
    DenseMatrix::from_rows(rows).map_err(to_py_err)
}

fn scalar_to_py<'py, T: Scalar>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    match T::MODE {
        ScalarMode::Float => Ok(PyFloat::new(py, v.to_f64()).into_any()),
        ScalarMode::Exact => py.import("fractions")?.getattr("Fraction")?.call1((v.to_text(),)),
    }
}

fn matrix_to_py<'py, T: Scalar>(py: Python<'py>, m: &DenseMatrix<T>) -> PyResult<Bound<'py, PyList>> {
    let rows = m
        .to_rows()
        .iter()
        .map(|r| {
            let items = r.iter().map(|v| scalar_to_py(py, v)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)
        })
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, rows)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn resolve_cap(cap: Option<usize>) -> PyResult<usize> {
    cap.map_or_else(|| dense_cap_from_env().map_err(to_py_err), Ok)
}

/// A determinant as sign, log magnitude, and (possibly saturated) float value.
#[pyclass(module = "kronrank", frozen)]
pub struct Determinant {
    report: FactorReport,
}

#[pymethods]
impl Determinant {
    /// -1, 0 or 1.
    #[getter]
    fn sign(&self) -> i8 {
        self.report.sign_log.sign()
    }

    /// Natural log of |det|, or None when the determinant is zero.
    #[getter]
    fn log_abs(&self) -> Option<f64> {
        self.report.sign_log.log_abs()
    }

    #[getter]
    fn value(&self) -> f64 {
        self.report.value.value
    }

    #[getter]
    fn overflow(&self) -> bool {
        self.report.value.overflow
    }

    #[getter]
    fn underflow(&self) -> bool {
        self.report.value.underflow
    }

    /// The exact value as a Fraction (exact mode only).
    #[getter]
    fn exact<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.report
            .exact
            .as_ref()
            .map(|e| py.import("fractions")?.getattr("Fraction")?.call1((e.as_str(),)))
            .transpose()
    }

    fn __float__(&self) -> f64 {
        self.report.value.value
    }

    fn __repr__(&self) -> String {
        let log = self.report.sign_log.log_abs().map_or("None".into(), |l| format!("{l}"));
        match &self.report.exact {
            Some(e) => format!("Determinant(sign={}, log_abs={log}, exact={e})", self.sign()),
            None => format!(
                "Determinant(sign={}, log_abs={log}, value={:e})",
                self.sign(),
                self.value()
            ),
        }
    }
}

impl Determinant {
    fn from_det<T: Scalar>(d: &kronrank_core::Det<T>) -> Self {
        Determinant {
            report: FactorReport::from_det(d),
        }
    }
}

enum Inner {
    Float(KronRankOneInstance<f64>),
    Exact(KronRankOneInstance<BigRational>),
}

macro_rules! dispatch {
    ($inner:expr, $inst:ident => $body:expr) => {
        match $inner {
            Inner::Float($inst) => $body,
            Inner::Exact($inst) => $body,
        }
    };
}

/// `G = sum_n A[n] ⊗ X[:, n] Y[:, n]ᵀ` with `N` terms of size `F`.
#[pyclass(module = "kronrank", frozen)]
pub struct Instance {
    inner: Inner,
}

fn build<T: Scalar>(
    a: &Bound<'_, PyAny>,
    x: &Bound<'_, PyAny>,
    y: &Bound<'_, PyAny>,
) -> PyResult<KronRankOneInstance<T>> {
    let a_list: Vec<Bound<'_, PyAny>> = a.extract()?;
    let a = a_list.iter().map(matrix_from_py).collect::<PyResult<Vec<_>>>()?;
    let x = matrix_from_py(x)?;
    let y = matrix_from_py(y)?;
    let f = a.first().map_or(0, |m| m.rows());
    KronRankOneInstance::new(f, x.rows(), a, x, y).map_err(to_py_err)
}

fn expand_checks<'py, T: Scalar>(
    py: Python<'py>,
    inst: &KronRankOneInstance<T>,
    checks: &[Check],
    limit: u128,
) -> PyResult<Bound<'py, PyAny>> {
    let outcomes = checks
        .iter()
        .map(|&c| run_check(c, inst, limit))
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py_err)?;
    json_to_py(py, &serde_json::to_value(outcomes).expect("outcomes serialize"))
}

#[pymethods]
impl Instance {
    /// `a` is a list of N square F x F matrices; `x`, `y` are N x N.
    /// Entries may be floats, ints, Fractions or strings such as "3/4".
    #[new]
    #[pyo3(signature = (a, x, y, mode = "float"))]
    fn new(a: &Bound<'_, PyAny>, x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>, mode: &str) -> PyResult<Self> {
        let inner = match parse_mode(mode)? {
            ScalarMode::Float => Inner::Float(build(a, x, y)?),
            ScalarMode::Exact => Inner::Exact(build(a, x, y)?),
        };
        Ok(Instance { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, mode = "float"))]
    fn from_json(text: &str, mode: &str) -> PyResult<Self> {
        let inner = match parse_mode(mode)? {
            ScalarMode::Float => Inner::Float(parse_instance(text).map_err(to_py_err)?),
            ScalarMode::Exact => Inner::Exact(parse_instance(text).map_err(to_py_err)?),
        };
        Ok(Instance { inner })
    }

    /// Seeded instance; `profile` is one of UNIFORM, INTEGER_SMALL,
    /// ILL_CONDITIONED, SINGULAR_A, SINGULAR_X, SINGULAR_Y, IDENTITY.
    #[staticmethod]
    #[pyo3(signature = (n, f, seed = 0, profile = "UNIFORM", mode = "float"))]
    fn random(n: usize, f: usize, seed: u64, profile: &str, mode: &str) -> PyResult<Self> {
        let profile = parse_profile(profile)?;
        let inner = match parse_mode(mode)? {
            ScalarMode::Float => Inner::Float(random_instance(n, f, seed, profile).map_err(to_py_err)?),
            ScalarMode::Exact => Inner::Exact(random_instance(n, f, seed, profile).map_err(to_py_err)?),
        };
        Ok(Instance { inner })
    }

    fn to_json(&self) -> String {
        dispatch!(&self.inner, i => instance_to_string(i))
    }

    #[getter]
    fn n(&self) -> usize {
        dispatch!(&self.inner, i => i.n())
    }

    #[getter]
    fn f(&self) -> usize {
        dispatch!(&self.inner, i => i.f())
    }

    #[getter]
    fn mode(&self) -> String {
        dispatch!(&self.inner, i => mode_name(i))
    }

    #[getter]
    fn a<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyList>>> {
        dispatch!(&self.inner, i => i.a().iter().map(|m| matrix_to_py(py, m)).collect())
    }

    #[getter]
    fn x<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        dispatch!(&self.inner, i => matrix_to_py(py, i.x()))
    }

    #[getter]
    fn y<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        dispatch!(&self.inner, i => matrix_to_py(py, i.y()))
    }

    /// The NF x NF matrix G.
    fn materialize<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        dispatch!(&self.inner, i => matrix_to_py(py, &materialize(i)))
    }

    /// det(G) from the factor determinants.
    fn closed_form(&self) -> Determinant {
        dispatch!(&self.inner, i => Determinant::from_det(&closed_form_det(i).total))
    }

    /// Per-factor determinants as a dict.
    fn breakdown<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = dispatch!(&self.inner, i => BreakdownReport::new(i, &closed_form_det(i)));
        json_to_py(py, &serde_json::to_value(report).expect("report serializes"))
    }

    /// det(G) by elimination on the materialized matrix.
    #[pyo3(signature = (cap = None))]
    fn materialized_det(&self, cap: Option<usize>) -> PyResult<Determinant> {
        let cap = resolve_cap(cap)?;
        dispatch!(&self.inner, i => materialized_det(i, cap).map(|d| Determinant::from_det(&d)).map_err(to_py_err))
    }

    /// Closed form against the dense oracle; returns the record as a dict.
    #[pyo3(signature = (cap = None))]
    fn verify<'py>(&self, py: Python<'py>, cap: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let cap = resolve_cap(cap)?;
        let record = dispatch!(&self.inner, i => verify_instance(i, cap, None)).map_err(to_py_err)?;
        json_to_py(py, &serde_json::to_value(record).expect("record serializes"))
    }

    /// Expansion checks by name (detb, cdiag, sumdiag, ypower, columns,
    /// full-leibniz); all of them by default.
    #[pyo3(signature = (checks = None, limit = DEFAULT_TUPLE_LIMIT))]
    fn expand<'py>(&self, py: Python<'py>, checks: Option<Vec<String>>, limit: u128) -> PyResult<Bound<'py, PyAny>> {
        let checks = match checks {
            None => Check::ALL.to_vec(),
            Some(names) => names.iter().map(|n| parse_check(n)).collect::<PyResult<Vec<_>>>()?,
        };
        dispatch!(&self.inner, i => expand_checks(py, i, &checks, limit))
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, f={}, mode={:?})", self.n(), self.f(), self.mode())
    }
}

fn parse_check(name: &str) -> PyResult<Check> {
    Check::ALL
        .into_iter()
        .find(|c| {
            serde_json::to_value(c)
                .ok()
                .and_then(|v| v.as_str().map(|s| s.eq_ignore_ascii_case(name)))
                == Some(true)
        })
        .ok_or_else(|| PyValueError::new_err(format!("unknown check {name:?}")))
}

fn mode_name<T: Scalar>(_: &KronRankOneInstance<T>) -> String {
    T::MODE.to_string()
}

/// `(sign, log|det|)` by LU with partial pivoting; log is None for zero.
#[pyfunction]
fn lu_sign_log_det(m: &Bound<'_, PyAny>) -> PyResult<(i8, Option<f64>)> {
    let m = matrix_from_py::<f64>(m)?;
    let sl = core_lu_sign_log_det(&m).map_err(to_py_err)?;
    Ok((sl.sign(), sl.log_abs()))
}

#[pyfunction]
#[pyo3(signature = (m, mode = "float"))]
fn determinant(m: &Bound<'_, PyAny>, mode: &str) -> PyResult<Determinant> {
    match parse_mode(mode)? {
        ScalarMode::Float => core_determinant(&matrix_from_py::<f64>(m)?).map(|d| Determinant::from_det(&d)),
        ScalarMode::Exact => core_determinant(&matrix_from_py::<BigRational>(m)?).map(|d| Determinant::from_det(&d)),
    }
    .map_err(to_py_err)
}

/// Determinant by permutation expansion (size at most 9).
#[pyfunction]
#[pyo3(signature = (m, mode = "exact"))]
fn leibniz_det<'py>(py: Python<'py>, m: &Bound<'py, PyAny>, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    match parse_mode(mode)? {
        ScalarMode::Float => scalar_to_py(py, &core_leibniz_det(&matrix_from_py::<f64>(m)?).map_err(to_py_err)?),
        ScalarMode::Exact => scalar_to_py(
            py,
            &core_leibniz_det(&matrix_from_py::<BigRational>(m)?).map_err(to_py_err)?,
        ),
    }
}

#[pyfunction]
#[pyo3(signature = (a, b, mode = "float"))]
fn kron<'py>(
    py: Python<'py>,
    a: &Bound<'py, PyAny>,
    b: &Bound<'py, PyAny>,
    mode: &str,
) -> PyResult<Bound<'py, PyList>> {
    match parse_mode(mode)? {
        ScalarMode::Float => matrix_to_py(py, &core_kron(&matrix_from_py::<f64>(a)?, &matrix_from_py::<f64>(b)?)),
        ScalarMode::Exact => matrix_to_py(
            py,
            &core_kron(&matrix_from_py::<BigRational>(a)?, &matrix_from_py::<BigRational>(b)?),
        ),
    }
}

#[pymodule]
fn kronrank(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_class::<Determinant>()?;
    m.add_function(wrap_pyfunction!(lu_sign_log_det, m)?)?;
    m.add_function(wrap_pyfunction!(determinant, m)?)?;
    m.add_function(wrap_pyfunction!(leibniz_det, m)?)?;
    m.add_function(wrap_pyfunction!(kron, m)?)?;
    m.add("ResourceLimitError", m.py().get_type::<ResourceLimitError>())?;
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    Ok(())
}
