//! Python bindings. Reports come back as plain dicts, matrices as nested
//! lists of `complex`.

use bellrand::adversary::{self, Branch};
use bellrand::belltest::{self, BellScenario};
use bellrand::qobjects::{
    self as povms, beta_of_theta, povm_extremality, povm_validity, theta_from_beta,
    AncillaRealization,
};
use bellrand::tomography::{self, CorrelationRow, EtaMatrix};
use bellrand::{Angle, CMat, Povm as CorePovm, C64};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;

fn err(e: bellrand::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn angle(theta: f64) -> PyResult<Angle> {
    Angle::new(theta).map_err(err)
}

fn ancilla(name: &str) -> PyResult<AncillaRealization> {
    match name {
        "pure" => Ok(AncillaRealization::Pure),
        "mixed" => Ok(AncillaRealization::Mixed),
        _ => Err(PyValueError::new_err(format!(
            "ancilla must be \"pure\" or \"mixed\", got {name:?}"
        ))),
    }
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a
                .iter()
                .map(|x| to_py(py, x))
                .collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn report<'py, T: Serialize>(py: Python<'py>, r: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(r).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn mat_to_rows(m: &CMat) -> Vec<Vec<C64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn rows_to_mat(rows: Vec<Vec<C64>>) -> PyResult<CMat> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    CMat::from_vec(r, c, rows.into_iter().flatten().collect()).map_err(err)
}

/// A qubit (or larger) POVM.
#[pyclass(name = "Povm", module = "bellrand_py", from_py_object)]
#[derive(Clone)]
struct PyPovm {
    inner: CorePovm,
}

#[pymethods]
impl PyPovm {
    /// Build from a list of square matrices given as nested lists of complex.
    #[new]
    fn new(elements: Vec<Vec<Vec<C64>>>) -> PyResult<Self> {
        let mats = elements
            .into_iter()
            .map(rows_to_mat)
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyPovm {
            inner: CorePovm::new(mats).map_err(err)?,
        })
    }

    /// Rank-one POVM `|v><v|` for each ket.
    #[staticmethod]
    fn from_kets(kets: Vec<Vec<C64>>) -> PyResult<Self> {
        Ok(PyPovm {
            inner: CorePovm::from_kets(kets).map_err(err)?,
        })
    }

    #[staticmethod]
    fn adjusted_tetrahedral(theta: f64) -> PyResult<Self> {
        Ok(PyPovm {
            inner: povms::adjusted_tetrahedral(angle(theta)?),
        })
    }

    #[staticmethod]
    fn modified_mercedes(theta: f64) -> PyResult<Self> {
        Ok(PyPovm {
            inner: povms::modified_mercedes(angle(theta)?),
        })
    }

    #[staticmethod]
    fn near_y_tetrahedral(epsilon: f64) -> PyResult<Self> {
        Ok(PyPovm {
            inner: povms::near_y_tetrahedral(epsilon).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Povm(outcomes={}, dim={})",
            self.inner.len(),
            self.inner.dim()
        )
    }

    fn elements(&self) -> Vec<Vec<Vec<C64>>> {
        self.inner.elements().iter().map(mat_to_rows).collect()
    }

    fn validity<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &povm_validity(&self.inner))
    }

    fn extremality<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &povm_extremality(&self.inner))
    }

    /// Rows `[E_I, E_X, E_Y, E_Z]` of correlations with the ideal Bob side.
    fn correlations(&self, theta: f64) -> PyResult<Vec<[f64; 4]>> {
        let rows = tomography::correlations_from_povm(&self.inner, angle(theta)?).map_err(err)?;
        Ok(rows.into_iter().map(|r| r.values).collect())
    }

    /// Inverse of `correlations`.
    #[staticmethod]
    fn reconstruct(rows: Vec<[f64; 4]>, theta: f64) -> PyResult<Self> {
        let rows: Vec<CorrelationRow> = rows
            .into_iter()
            .enumerate()
            .map(|(outcome, values)| CorrelationRow { outcome, values })
            .collect();
        Ok(PyPovm {
            inner: tomography::reconstruct_povm(&rows, angle(theta)?).map_err(err)?,
        })
    }

    /// Dimension of the admissible off-diagonal coefficient space.
    fn offdiag_null_dim(&self) -> PyResult<usize> {
        Ok(tomography::offdiag_set(&self.inner)
            .map_err(err)?
            .null_basis
            .len())
    }

    fn to_json(&self) -> PyResult<String> {
        bellrand::serial::povm_to_json(&self.inner).map_err(err)
    }
}

#[pyfunction]
fn beta(theta: f64) -> PyResult<f64> {
    Ok(beta_of_theta(angle(theta)?))
}

#[pyfunction]
fn theta_of_beta(beta: f64) -> PyResult<f64> {
    Ok(theta_from_beta(beta).map_err(err)?.radians())
}

/// Closed-form `(I, J, S)` at `theta`.
#[pyfunction]
fn ideal_bell_values(theta: f64) -> PyResult<(f64, f64, f64)> {
    Ok(belltest::ideal_bell_values(angle(theta)?))
}

/// Bell values computed from the explicit ideal state and observables.
#[pyfunction]
#[pyo3(signature = (theta, ancilla = "pure"))]
fn eval_bell<'py>(py: Python<'py>, theta: f64, ancilla: &str) -> PyResult<Bound<'py, PyAny>> {
    let s = BellScenario::ideal(angle(theta)?, self::ancilla(ancilla)?);
    report(py, &belltest::eval_bell(&s).map_err(err)?)
}

#[pyfunction]
fn spectral_selftest<'py>(py: Python<'py>, beta: f64) -> PyResult<Bound<'py, PyAny>> {
    report(py, &belltest::spectral_selftest(beta).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (theta, ancilla = "pure"))]
fn projective_joint<'py>(
    py: Python<'py>,
    theta: f64,
    ancilla: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let r = belltest::projective_joint_distribution(angle(theta)?, self::ancilla(ancilla)?)
        .map_err(err)?;
    report(py, &r)
}

#[pyfunction]
fn local_povm<'py>(py: Python<'py>, theta: f64) -> PyResult<Bound<'py, PyAny>> {
    report(
        py,
        &belltest::local_povm_distribution(angle(theta)?).map_err(err)?,
    )
}

#[pyfunction]
fn global_povm<'py>(py: Python<'py>, theta: f64, epsilon: f64) -> PyResult<Bound<'py, PyAny>> {
    report(
        py,
        &belltest::global_povm_distribution(angle(theta)?, epsilon).map_err(err)?,
    )
}

/// The 4×4 matrix of traces between reconstruction operators and Pauli settings.
#[pyfunction]
fn eta_matrix(theta: f64) -> PyResult<[[f64; 4]; 4]> {
    Ok(EtaMatrix::new(angle(theta)?).entries)
}

#[pyfunction]
fn eta_condition_number(theta: f64) -> PyResult<f64> {
    Ok(EtaMatrix::new(angle(theta)?).condition_number())
}

/// Conjugation attack on two POVMs. Returns the coefficients and Eve's
/// conditional tables, plus the brute-force residual against the closed form.
#[pyfunction]
fn attack<'py>(
    py: Python<'py>,
    alice: &PyPovm,
    bob: &PyPovm,
    theta: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let a = adversary::build_attack(&alice.inner, &bob.inner, angle(theta)?).map_err(err)?;
    let cj = a.conditional_joint().map_err(err)?;
    let mut brute = 0.0f64;
    for (branch, table) in [(Branch::Plus, &cj.p_plus), (Branch::Minus, &cj.p_minus)] {
        let b = adversary::brute_force_joint(&a, branch).map_err(err)?;
        for (row, ref_row) in b.iter().zip(table) {
            for (x, y) in row.iter().zip(ref_row) {
                brute = brute.max((x - y).abs());
            }
        }
    }
    let ideal = adversary::ideal_joint(&alice.inner, &bob.inner, a.theta).map_err(err)?;
    let mut avg = 0.0f64;
    for (row, ref_row) in cj.average.iter().zip(&ideal) {
        for (x, y) in row.iter().zip(ref_row) {
            avg = avg.max((x - y).abs());
        }
    }

    let d = report(py, &cj)?.cast_into::<PyDict>()?;
    d.set_item("lambda", a.lambda.clone())?;
    d.set_item("mu", a.mu.clone())?;
    d.set_item("target", a.target)?;
    d.set_item("brute_force_residual", brute)?;
    d.set_item("average_residual", avg)?;
    Ok(d.into_any())
}

/// Upper bound on the certifiable bits from the attack.
#[pyfunction]
fn randomness_cap() -> f64 {
    adversary::randomness_cap()
}

#[pyfunction]
fn min_entropy(dist: Vec<f64>) -> PyResult<f64> {
    adversary::min_entropy(&dist).map_err(err)
}

#[pymodule]
fn bellrand_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPovm>()?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(theta_of_beta, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_bell_values, m)?)?;
    m.add_function(wrap_pyfunction!(eval_bell, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_selftest, m)?)?;
    m.add_function(wrap_pyfunction!(projective_joint, m)?)?;
    m.add_function(wrap_pyfunction!(local_povm, m)?)?;
    m.add_function(wrap_pyfunction!(global_povm, m)?)?;
    m.add_function(wrap_pyfunction!(eta_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(eta_condition_number, m)?)?;
    m.add_function(wrap_pyfunction!(attack, m)?)?;
    m.add_function(wrap_pyfunction!(randomness_cap, m)?)?;
    m.add_function(wrap_pyfunction!(min_entropy, m)?)?;
    Ok(())
}
