//! Python bindings for `qturan_core`.
//!
//! Subsets travel as integer bitmasks (bit `i` is element `i + 1`), vectors
//! over F_2 as integers, and exact rationals as `fractions.Fraction`.

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qturan_core::construction::{self, c_threshold as core_c_threshold};
use qturan_core::cube::LayerId;
use qturan_core::detector;
use qturan_core::io::{self, EdgeListFile};
use qturan_core::{Error, GF2Vec, LayerSubgraph, QnGraph, SubsetMask, VectorAssignment};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Exhausted(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, q: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    let num: BigInt = q.numer().clone();
    let den: BigInt = q.denom().clone();
    cls.call1((num, den))
}

fn vectors(bits: &[u64], r: u32) -> PyResult<Vec<GF2Vec>> {
    bits.iter()
        .map(|&b| GF2Vec::new(b, r).map_err(py_err))
        .collect()
}

fn masks(vs: &[SubsetMask]) -> Vec<u64> {
    vs.iter().map(|s| s.0).collect()
}

fn graph_from_edges(n: u32, edges: Vec<(u64, u64)>) -> PyResult<QnGraph> {
    QnGraph::from_edges(n, edges.into_iter().map(|(x, y)| (SubsetMask(x), SubsetMask(y)))).map_err(py_err)
}

/// Rank over F_2 of integer-encoded vectors of dimension `r`.
#[pyfunction]
fn rank(vs: Vec<u64>, r: u32) -> PyResult<u32> {
    qturan_core::rank(&vectors(&vs, r)?, r).map_err(py_err)
}

#[pyfunction]
fn is_basis(vs: Vec<u64>, r: u32) -> PyResult<bool> {
    qturan_core::is_basis(&vectors(&vs, r)?, r).map_err(py_err)
}

#[pyfunction]
fn in_span(v: u64, vs: Vec<u64>, r: u32) -> PyResult<bool> {
    let v = GF2Vec::new(v, r).map_err(py_err)?;
    qturan_core::in_span(v, &vectors(&vs, r)?).map_err(py_err)
}

/// Vectors attached to the ground set of one layer.
#[pyclass(name = "Assignment", module = "qturan", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAssignment {
    inner: VectorAssignment,
}

#[pymethods]
impl PyAssignment {
    #[new]
    fn new(n: u32, r: u32, v0: u64, vs: Vec<u64>) -> PyResult<Self> {
        let v0 = GF2Vec::new(v0, r).map_err(py_err)?;
        let inner = VectorAssignment::new(n, r, v0, vectors(&vs, r)?).map_err(py_err)?;
        Ok(PyAssignment { inner })
    }

    #[staticmethod]
    fn sample(n: u32, r: u32, seed: u64) -> PyResult<Self> {
        let inner = construction::sample_assignment(n, r, seed).map_err(py_err)?;
        Ok(PyAssignment { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = io::parse_assignment(text).map_err(py_err)?;
        Ok(PyAssignment { inner })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn r(&self) -> u32 {
        self.inner.r()
    }

    #[getter]
    fn v0(&self) -> u64 {
        self.inner.v0().bits()
    }

    #[getter]
    fn vectors(&self) -> Vec<u64> {
        self.inner.vectors().iter().map(|v| v.bits()).collect()
    }

    fn member_upper(&self, mask: u64) -> PyResult<bool> {
        qturan_core::member_upper(&self.inner, SubsetMask(mask)).map_err(py_err)
    }

    fn member_lower(&self, mask: u64) -> PyResult<bool> {
        qturan_core::member_lower(&self.inner, SubsetMask(mask)).map_err(py_err)
    }

    fn layer_graph(&self) -> PyResult<PyLayerGraph> {
        let inner = qturan_core::build_layer_graph(&self.inner).map_err(py_err)?;
        Ok(PyLayerGraph { inner })
    }

    fn to_text(&self) -> String {
        io::assignment_to_text(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Assignment(n={}, r={})", self.inner.n(), self.inner.r())
    }
}

/// An induced subgraph of the bipartite graph between layers `r - 1` and `r`.
#[pyclass(name = "LayerGraph", module = "qturan", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLayerGraph {
    inner: LayerSubgraph,
}

#[pymethods]
impl PyLayerGraph {
    #[new]
    fn new(n: u32, r: u32, lower: Vec<u64>, upper: Vec<u64>) -> PyResult<Self> {
        let layer = LayerId::new(n, r).map_err(py_err)?;
        let lower = lower.into_iter().map(SubsetMask).collect();
        let upper = upper.into_iter().map(SubsetMask).collect();
        let inner = LayerSubgraph::new(layer, lower, upper).map_err(py_err)?;
        Ok(PyLayerGraph { inner })
    }

    #[staticmethod]
    fn full(n: u32, r: u32) -> PyResult<Self> {
        let layer = LayerId::new(n, r).map_err(py_err)?;
        let inner = LayerSubgraph::full(layer).map_err(py_err)?;
        Ok(PyLayerGraph { inner })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.layer().n()
    }

    #[getter]
    fn r(&self) -> u32 {
        self.inner.layer().r()
    }

    #[getter]
    fn lower(&self) -> Vec<u64> {
        masks(self.inner.lower())
    }

    #[getter]
    fn upper(&self) -> Vec<u64> {
        masks(self.inner.upper())
    }

    fn edge_count(&self) -> u128 {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(u64, u64)> {
        self.inner.edges().into_iter().map(|(x, y)| (x.0, y.0)).collect()
    }

    /// The 6-cycle of the first embedded subcube pattern, or `None`.
    fn find_c6(&self) -> Option<Vec<u64>> {
        detector::find_c6_structured(&self.inner).map(|p| masks(&p.cycle().vertices))
    }

    fn find_cycle(&self, length: usize) -> PyResult<Option<Vec<u64>>> {
        let w = detector::find_cycle_generic(&self.inner.to_graph(), length).map_err(py_err)?;
        Ok(w.map(|w| masks(&w.vertices)))
    }

    fn to_text(&self) -> String {
        EdgeListFile::from_layer(&self.inner).to_text()
    }

    fn __len__(&self) -> usize {
        self.inner.edge_count() as usize
    }

    fn __repr__(&self) -> String {
        let l = self.inner.layer();
        format!("LayerGraph(n={}, r={}, edges={})", l.n(), l.r(), self.inner.edge_count())
    }
}

/// Resamples until the layer graph beats c/2; returns `(assignment, graph, trials)`.
#[pyfunction]
#[pyo3(signature = (n, r, seed, max_trials = 512))]
fn find_good_assignment(n: u32, r: u32, seed: u64, max_trials: u64) -> PyResult<(PyAssignment, PyLayerGraph, u64)> {
    let good = construction::find_good_assignment(n, r, seed, max_trials).map_err(py_err)?;
    Ok((
        PyAssignment { inner: good.assignment },
        PyLayerGraph { inner: good.graph },
        good.trials,
    ))
}

/// Probability that a fixed edge of the layer survives, as a Fraction.
#[pyfunction]
fn edge_probability<'py>(py: Python<'py>, r: u32) -> PyResult<Bound<'py, PyAny>> {
    if r == 0 {
        return Err(PyValueError::new_err("r must be positive"));
    }
    fraction(py, &construction::edge_probability_closed_form(r))
}

/// Exact mean edge count of the random layer graph, by full enumeration.
#[pyfunction]
fn exact_expected_edges<'py>(py: Python<'py>, n: u32, r: u32) -> PyResult<Bound<'py, PyAny>> {
    let q = construction::exact_expected_edges(n, r).map_err(py_err)?;
    fraction(py, &q)
}

#[pyfunction]
#[pyo3(signature = (tolerance = 1e-12))]
fn constant_c(tolerance: f64) -> f64 {
    qturan_core::constant_c(tolerance)
}

/// The rational used for c / divisor (divisor in 2, 4, 12).
#[pyfunction]
fn c_threshold<'py>(py: Python<'py>, divisor: u32) -> PyResult<Bound<'py, PyAny>> {
    if ![2, 4, 12].contains(&divisor) {
        return Err(PyValueError::new_err("divisor must be 2, 4 or 12"));
    }
    fraction(py, &core_c_threshold(divisor))
}

#[pyfunction]
fn find_cycle(n: u32, edges: Vec<(u64, u64)>, length: usize) -> PyResult<Option<Vec<u64>>> {
    let g = graph_from_edges(n, edges)?;
    let w = detector::find_cycle_generic(&g, length).map_err(py_err)?;
    Ok(w.map(|w| masks(&w.vertices)))
}

#[pyfunction]
fn find_c6_minus(n: u32, edges: Vec<(u64, u64)>) -> PyResult<Option<Vec<u64>>> {
    let g = graph_from_edges(n, edges)?;
    Ok(detector::find_c6_minus(&g).map(|w| masks(&w.vertices)))
}

/// Per-layer, union and optional final reports; returns `(csv, all_pass)`.
/// `coloring` is certificate text in the `qn-coloring` format.
#[pyfunction]
#[pyo3(signature = (n, seed, max_trials = 512, coloring = None))]
fn density_report(n: u32, seed: u64, max_trials: u64, coloring: Option<&str>) -> PyResult<(String, bool)> {
    let cert = coloring.map(io::parse_coloring).transpose().map_err(py_err)?;
    let suite = qturan_core::density_report_suite(n, seed, max_trials, cert.as_ref()).map_err(py_err)?;
    Ok((suite.to_csv(), suite.all_pass()))
}

#[pymodule]
pub fn qturan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAssignment>()?;
    m.add_class::<PyLayerGraph>()?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(is_basis, m)?)?;
    m.add_function(wrap_pyfunction!(in_span, m)?)?;
    m.add_function(wrap_pyfunction!(find_good_assignment, m)?)?;
    m.add_function(wrap_pyfunction!(edge_probability, m)?)?;
    m.add_function(wrap_pyfunction!(exact_expected_edges, m)?)?;
    m.add_function(wrap_pyfunction!(constant_c, m)?)?;
    m.add_function(wrap_pyfunction!(c_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(find_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(find_c6_minus, m)?)?;
    m.add_function(wrap_pyfunction!(density_report, m)?)?;
    Ok(())
}
