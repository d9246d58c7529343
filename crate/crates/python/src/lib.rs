//! Python bindings. Distributions and channels are wrapped as classes;
//! every structured result comes back as plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use infomono::region::DEFAULT_LATTICE_DIRECTIONS;
use infomono::{
    conditional_mutual_information, default_directions, entropy, feasibility_test,
    gk_common_information, inefficiencies, intercepts, is_perfectly_resolvable, region_approx,
    region_point_for_channel, region_t2k, scratch_characterization_perfect, simulate_pi_s,
    support_function, total_correlation, wyner_with, AuxChannel, Direction, JointPmf, MarginSpec,
    RegionOptions, ScratchCertificate, WynerOptions,
};

create_exception!(infomono, InfomonoError, PyValueError);

fn err(e: infomono::Error) -> PyErr {
    InfomonoError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| InfomonoError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: serde::de::DeserializeOwned>(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = py
        .import("json")?
        .call_method1("dumps", (obj,))?
        .extract()?;
    serde_json::from_str(&text).map_err(|e| InfomonoError::new_err(e.to_string()))
}

fn spec(coords: Vec<usize>) -> PyResult<MarginSpec> {
    MarginSpec::new(coords).map_err(err)
}

/// `directions` is either a lattice size or a list of weight vectors.
fn directions(py: Python<'_>, obj: &Bound<'_, PyAny>, dim: usize) -> PyResult<Vec<Direction>> {
    if let Ok(n) = obj.extract::<usize>() {
        return Ok(default_directions(dim, n));
    }
    let dirs: Vec<Direction> = from_py(py, obj)?;
    if dirs.iter().any(|d| d.dim() != dim) {
        return Err(InfomonoError::new_err(format!(
            "directions must have {dim} weights"
        )));
    }
    Ok(dirs)
}

fn region_opts(q_size: Option<usize>, restarts: usize, seed: u64) -> RegionOptions {
    RegionOptions {
        q_size,
        restarts,
        seed,
        ..Default::default()
    }
}

#[pyclass(name = "JointPmf", module = "infomono", frozen)]
struct PyJointPmf {
    inner: JointPmf,
}

#[pymethods]
impl PyJointPmf {
    #[new]
    fn new(alphabet_sizes: Vec<usize>, probs: Vec<f64>) -> PyResult<Self> {
        JointPmf::new(alphabet_sizes, probs)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn uniform(alphabet_sizes: Vec<usize>) -> PyResult<Self> {
        JointPmf::uniform(alphabet_sizes)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(|inner| Self { inner })
            .map_err(|e| InfomonoError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("pmf serializes")
    }

    #[getter]
    fn alphabet_sizes(&self) -> Vec<usize> {
        self.inner.sizes().to_vec()
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    #[getter]
    fn num_coords(&self) -> usize {
        self.inner.num_coords()
    }

    fn prob(&self, symbol: Vec<usize>) -> PyResult<f64> {
        let sizes = self.inner.sizes();
        if symbol.len() != sizes.len() || symbol.iter().zip(sizes).any(|(s, n)| s >= n) {
            return Err(InfomonoError::new_err(format!(
                "symbol {symbol:?} outside alphabet {sizes:?}"
            )));
        }
        Ok(self.inner.prob(&symbol))
    }

    fn marginal(&self, coords: Vec<usize>) -> PyResult<Self> {
        let inner = self.inner.marginal(&spec(coords)?).map_err(err)?;
        Ok(Self { inner })
    }

    /// Appends Q drawn from `channel` as a new last coordinate.
    fn extend(&self, channel: &PyAuxChannel) -> PyResult<Self> {
        let inner = self.inner.extend(&channel.inner).map_err(err)?;
        Ok(Self { inner })
    }

    fn tensor(&self, other: &PyJointPmf) -> PyResult<Self> {
        let inner = self.inner.tensor(&other.inner).map_err(err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("JointPmf(alphabet_sizes={:?})", self.inner.sizes())
    }
}

#[pyclass(name = "AuxChannel", module = "infomono", frozen)]
struct PyAuxChannel {
    inner: AuxChannel,
}

#[pymethods]
impl PyAuxChannel {
    #[new]
    fn new(q_size: usize, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        AuxChannel::new(q_size, rows)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn deterministic(labels: Vec<usize>, q_size: usize) -> PyResult<Self> {
        AuxChannel::deterministic(&labels, q_size)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn constant(num_rows: usize) -> Self {
        Self {
            inner: AuxChannel::constant(num_rows),
        }
    }

    #[getter]
    fn q_size(&self) -> usize {
        self.inner.q_size()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows().map(<[f64]>::to_vec).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "AuxChannel(q_size={}, rows={})",
            self.inner.q_size(),
            self.inner.num_rows()
        )
    }
}

#[pyfunction]
#[pyo3(name = "entropy")]
fn py_entropy(p: &PyJointPmf, coords: Vec<usize>) -> PyResult<f64> {
    entropy(&p.inner, &spec(coords)?).map_err(err)
}

#[pyfunction]
#[pyo3(name = "mutual_information", signature = (p, a, b, c = None))]
fn py_mutual_information(
    p: &PyJointPmf,
    a: Vec<usize>,
    b: Vec<usize>,
    c: Option<Vec<usize>>,
) -> PyResult<f64> {
    let c = c.map(spec).transpose()?;
    conditional_mutual_information(&p.inner, &spec(a)?, &spec(b)?, c.as_ref()).map_err(err)
}

#[pyfunction]
#[pyo3(name = "total_correlation", signature = (p, given = None))]
fn py_total_correlation(p: &PyJointPmf, given: Option<Vec<usize>>) -> PyResult<f64> {
    let given = given.map(spec).transpose()?;
    total_correlation(&p.inner, given.as_ref()).map_err(err)
}

#[pyfunction]
fn gacs_korner<'py>(py: Python<'py>, p: &PyJointPmf) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &gk_common_information(&p.inner))
}

#[pyfunction]
#[pyo3(signature = (p, q_size = None, restarts = 8, seed = 0))]
fn wyner<'py>(
    py: Python<'py>,
    p: &PyJointPmf,
    q_size: Option<usize>,
    restarts: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = WynerOptions {
        q_size,
        restarts,
        seed,
        ..Default::default()
    };
    let r = py.detach(|| wyner_with(&p.inner, &opts)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn is_resolvable(p: &PyJointPmf) -> bool {
    is_perfectly_resolvable(&p.inner).resolvable
}

#[pyfunction]
#[pyo3(name = "inefficiencies")]
fn py_inefficiencies<'py>(
    py: Python<'py>,
    p: &PyJointPmf,
    channel: &PyAuxChannel,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &inefficiencies(&p.inner, &channel.inner).map_err(err)?)
}

#[pyfunction]
fn region_point(p: &PyJointPmf, channel: &PyAuxChannel) -> PyResult<Vec<f64>> {
    region_point_for_channel(&p.inner, &channel.inner)
        .map(|r| r.coords())
        .map_err(err)
}

/// Returns `(value, witness)` for one direction of the region.
#[pyfunction]
#[pyo3(name = "support_function", signature = (p, direction, q_size, restarts = 4, seed = 0))]
fn py_support_function(
    py: Python<'_>,
    p: &PyJointPmf,
    direction: Vec<f64>,
    q_size: usize,
    restarts: usize,
    seed: u64,
) -> PyResult<(f64, PyAuxChannel)> {
    let d = Direction::new(direction).map_err(err)?;
    let (v, w) = py
        .detach(|| support_function(&p.inner, &d, q_size, restarts, seed))
        .map_err(err)?;
    Ok((v, PyAuxChannel { inner: w }))
}

#[pyfunction]
#[pyo3(signature = (p, directions = None, kind = "ari", q_size = None, restarts = 4, seed = 0))]
fn region<'py>(
    py: Python<'py>,
    p: &PyJointPmf,
    directions: Option<&Bound<'py, PyAny>>,
    kind: &str,
    q_size: Option<usize>,
    restarts: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let k = p.inner.num_coords();
    let dim = match kind {
        "ari" => k + 1,
        "two_k" => 2 * k,
        other => {
            return Err(InfomonoError::new_err(format!(
                "unknown region kind {other:?}"
            )))
        }
    };
    let dirs = match directions {
        Some(obj) => self::directions(py, obj, dim)?,
        None => default_directions(dim, DEFAULT_LATTICE_DIRECTIONS),
    };
    let opts = region_opts(q_size, restarts, seed);
    let r = py
        .detach(|| match kind {
            "ari" => region_approx(&p.inner, &dirs, &opts),
            _ => region_t2k(&p.inner, &dirs, &opts),
        })
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(name = "intercepts")]
fn py_intercepts<'py>(py: Python<'py>, p: &PyJointPmf) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &intercepts(&p.inner).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (p, t = 1))]
fn scratch<'py>(py: Python<'py>, p: &PyJointPmf, t: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &scratch_characterization_perfect(&p.inner, t).map_err(err)?,
    )
}

/// `certificate` is the dict returned by [`scratch`].
#[pyfunction]
#[pyo3(signature = (certificate, samples = 100_000, initiator = 0, seed = 0))]
fn simulate<'py>(
    py: Python<'py>,
    certificate: &Bound<'py, PyAny>,
    samples: usize,
    initiator: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cert: ScratchCertificate = from_py(py, certificate)?;
    let sim = py
        .detach(|| simulate_pi_s(&cert, initiator, samples, seed))
        .map_err(err)?;
    to_py(py, &sim)
}

#[pyfunction]
#[pyo3(signature = (setup, target, n = 1, m = 1, directions = None, q_size = None, restarts = 4, seed = 0, tolerance = 1e-3))]
#[allow(clippy::too_many_arguments)]
fn feasible<'py>(
    py: Python<'py>,
    setup: &PyJointPmf,
    target: &PyJointPmf,
    n: u32,
    m: u32,
    directions: Option<&Bound<'py, PyAny>>,
    q_size: Option<usize>,
    restarts: usize,
    seed: u64,
    tolerance: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let dim = setup.inner.num_coords() + 1;
    let dirs = match directions {
        Some(obj) => self::directions(py, obj, dim)?,
        None => default_directions(dim, DEFAULT_LATTICE_DIRECTIONS),
    };
    let opts = region_opts(q_size, restarts, seed);
    let r = py
        .detach(|| feasibility_test(&setup.inner, &target.inner, n, m, &dirs, &opts, tolerance))
        .map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
#[pyo3(name = "infomono")]
fn infomono_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("InfomonoError", m.py().get_type::<InfomonoError>())?;
    m.add_class::<PyJointPmf>()?;
    m.add_class::<PyAuxChannel>()?;
    m.add_function(wrap_pyfunction!(py_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(py_mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(py_total_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(gacs_korner, m)?)?;
    m.add_function(wrap_pyfunction!(wyner, m)?)?;
    m.add_function(wrap_pyfunction!(is_resolvable, m)?)?;
    m.add_function(wrap_pyfunction!(py_inefficiencies, m)?)?;
    m.add_function(wrap_pyfunction!(region_point, m)?)?;
    m.add_function(wrap_pyfunction!(py_support_function, m)?)?;
    m.add_function(wrap_pyfunction!(region, m)?)?;
    m.add_function(wrap_pyfunction!(py_intercepts, m)?)?;
    m.add_function(wrap_pyfunction!(scratch, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(feasible, m)?)?;
    Ok(())
}
