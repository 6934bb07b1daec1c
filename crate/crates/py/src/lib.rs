//! Python bindings: groups, units, pair verdicts, invariants and the
//! ping-pong checks. Structured results come back as plain dicts.

use std::path::PathBuf;
use std::sync::Arc;

use freepairs::freeness::{nilpotent_parts, SweepOptions};
use freepairs::pingpong::{a5_case_study, bass_at_root, metabelian_stau};
use freepairs::spectral::SpectralConfig;
use freepairs::units::{enumerate_bicyclic, parse_unit};
use freepairs::{
    group_invariant, min_power, pair_verdict, salwa_check, FiniteGroup, FreePointKB, InvariantMode,
    UnitKind, UnitValue,
};
use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

create_exception!(pyfreepairs, FreepairsError, PyException);

fn err(e: freepairs::Error) -> PyErr {
    FreepairsError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(o) => {
            let dict = PyDict::new(py);
            for (k, x) in o {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn kb(path: Option<PathBuf>) -> PyResult<FreePointKB> {
    match path {
        Some(p) => FreePointKB::load(&p).map_err(err),
        None => Ok(FreePointKB::default()),
    }
}

fn config(precision: u32, max_precision: u32) -> SpectralConfig {
    SpectralConfig {
        start_bits: precision,
        max_bits: max_precision.max(precision),
    }
}

/// A finite permutation group given by a spec such as `S4`, `A5`, `D12`.
#[pyclass(frozen, module = "pyfreepairs")]
struct Group {
    inner: Arc<FiniteGroup>,
}

#[pymethods]
impl Group {
    #[new]
    #[pyo3(signature = (spec, order_cap = 1024))]
    fn new(spec: &str, order_cap: usize) -> PyResult<Self> {
        Ok(Group {
            inner: FiniteGroup::from_spec_with_cap(spec, order_cap).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    /// Elements in cycle notation; index 0 is the identity.
    fn elements(&self) -> Vec<String> {
        (0..self.inner.order())
            .map(|g| self.inner.element_word(g))
            .collect()
    }

    /// Distinct non-trivial bicyclic units of type `beta` or `gamma`.
    fn bicyclic_units(&self, kind: &str) -> PyResult<Vec<Unit>> {
        let kind = match kind {
            "beta" => UnitKind::Beta,
            "gamma" => UnitKind::Gamma,
            _ => {
                return Err(FreepairsError::new_err(format!(
                    "unit type `{kind}`; expected beta or gamma"
                )))
            }
        };
        Ok(enumerate_bicyclic(&self.inner, kind)
            .into_iter()
            .map(|inner| Unit { inner })
            .collect())
    }

    /// Parses `beta:<x>:<h>`, `gamma:<x>:<h>` or `bass:<x>:<k>:<m>`.
    fn unit(&self, text: &str) -> PyResult<Unit> {
        Ok(Unit {
            inner: parse_unit(&self.inner, text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Group('{}', order={})",
            self.inner.name(),
            self.inner.order()
        )
    }
}

/// A unit of the integral group ring together with its parameters.
#[pyclass(frozen, module = "pyfreepairs")]
struct Unit {
    inner: UnitValue,
}

#[pymethods]
impl Unit {
    #[getter]
    fn descriptor(&self) -> String {
        self.inner.describe()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.descriptor.kind().name()
    }

    /// Support of the element as `[[group element, coefficient], ...]`.
    fn element<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.element.to_json())
    }

    /// Coefficient of the identity.
    fn trace(&self) -> BigInt {
        self.inner.element.trace()
    }

    fn is_one(&self) -> bool {
        self.inner.element.is_one()
    }

    /// `u^e` as a plain element dict.
    fn pow<'py>(&self, py: Python<'py>, e: u64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.element.pow(e).to_json())
    }

    fn __eq__(&self, other: &Unit) -> bool {
        self.inner.element == other.inner.element
    }

    fn __repr__(&self) -> String {
        format!("Unit('{}')", self.inner.describe())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Verdict for the pair `(u, v)`: spectrum of `ab`, classified points and
/// the trace `T(ab)`.
#[pyfunction]
#[pyo3(signature = (u, v, kb_path = None, precision = 128, max_precision = 2048))]
fn verdict<'py>(
    py: Python<'py>,
    u: &Unit,
    v: &Unit,
    kb_path: Option<PathBuf>,
    precision: u32,
    max_precision: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let (ue, ve) = (&u.inner.element, &v.inner.element);
    let kb = kb(kb_path)?;
    let res = py.detach(|| -> freepairs::Result<Value> {
        let verdict = pair_verdict(ue, ve, &kb, &config(precision, max_precision))?;
        let (a, b) = nilpotent_parts(ue, ve)?;
        let mut json = verdict.to_json();
        json["trace"] = freepairs::group_ring::bigint_json(&(&a * &b).trace());
        json["salwa"] = Value::Bool(salwa_check(ue, ve)?);
        Ok(json)
    });
    let mut json = res.map_err(err)?;
    json["u"] = Value::String(u.inner.describe());
    json["v"] = Value::String(v.inner.describe());
    to_py(py, &json)
}

/// Smallest `t` with `(u, v^t)` certified free, and the first `t` at which
/// freeness is not ruled out.
#[pyfunction]
#[pyo3(signature = (u, v, kb_path = None, precision = 128, max_precision = 2048))]
fn freeing_power<'py>(
    py: Python<'py>,
    u: &Unit,
    v: &Unit,
    kb_path: Option<PathBuf>,
    precision: u32,
    max_precision: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let kb = kb(kb_path)?;
    let cfg = config(precision, max_precision);
    let (mp, spectrum) = py
        .detach(|| min_power(&u.inner.element, &v.inner.element, &kb, &cfg))
        .map_err(err)?;
    let mut json = mp.to_json();
    json["spectrum"] = spectrum.to_json();
    to_py(py, &json)
}

/// The invariant over all pairs (`"M"`) or same-type pairs (`"m"`).
#[pyfunction]
#[pyo3(signature = (group, mode, jobs = None, kb_path = None, precision = 128, max_precision = 2048))]
fn invariant<'py>(
    py: Python<'py>,
    group: &Group,
    mode: &str,
    jobs: Option<usize>,
    kb_path: Option<PathBuf>,
    precision: u32,
    max_precision: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let mode: InvariantMode = mode.parse().map_err(err)?;
    let kb = kb(kb_path)?;
    let cfg = config(precision, max_precision);
    let g = group.inner.clone();
    let res = py
        .detach(|| {
            group_invariant(
                &g,
                mode,
                &kb,
                &cfg,
                SweepOptions {
                    jobs,
                    progress: false,
                },
            )
        })
        .map_err(err)?;
    to_py(py, &res.to_json())
}

/// The exact A5 ping-pong verification.
#[pyfunction]
fn stau_a5(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    let r = py.detach(a5_case_study).map_err(err)?;
    to_py(py, &r.to_json())
}

/// Ping-pong hypotheses for the metabelian family `C_q ⋊ C_p`.
#[pyfunction]
fn stau_metabelian(
    py: Python<'_>,
    q: u64,
    exponents: Vec<u64>,
    k: u64,
    m: u64,
) -> PyResult<Bound<'_, PyAny>> {
    let r = py
        .detach(|| metabelian_stau(q, &exponents, k, m))
        .map_err(err)?;
    to_py(py, &r.to_json())
}

/// `u_{k,m,d}` at `ζ_d^j`, exactly.
#[pyfunction]
fn bass_eval(py: Python<'_>, d: u64, k: u64, m: u64, j: u64) -> PyResult<Bound<'_, PyAny>> {
    let v = bass_at_root(k, m, d, j).map_err(err)?;
    let mut json = v.to_json();
    json["display"] = Value::String(v.to_string());
    to_py(py, &json)
}

#[pymodule]
fn pyfreepairs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<Unit>()?;
    m.add_function(wrap_pyfunction!(verdict, m)?)?;
    m.add_function(wrap_pyfunction!(freeing_power, m)?)?;
    m.add_function(wrap_pyfunction!(invariant, m)?)?;
    m.add_function(wrap_pyfunction!(stau_a5, m)?)?;
    m.add_function(wrap_pyfunction!(stau_metabelian, m)?)?;
    m.add_function(wrap_pyfunction!(bass_eval, m)?)?;
    m.add("FreepairsError", m.py().get_type::<FreepairsError>())?;
    Ok(())
}
