//! Python bindings.
//!
//! Rationals cross the boundary as `fractions.Fraction` on the way out and as
//! anything whose `str()` is `"a/b"` or `"a"` on the way in (`Fraction`, `int`,
//! `str`). Floats are rejected so masses stay exact.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use extremal_core::arith::{format_rational, parse_rational, RatMatrix, Rational};
use extremal_core::coupling::{self as core_coupling, GraphicKind, Marginal};
use extremal_core::dyadic::{self, DyadicSpec, SampleConfig};
use extremal_core::enumeration::{self, DEFAULT_BUDGET};
use extremal_core::extremality;
use extremal_core::io::{Instance, InstanceFile};
use extremal_core::symmetry::{self, ActionGenerator, DEFAULT_GROUP_CAP};

type FractionPair<'py> = (Vec<Bound<'py, PyAny>>, Vec<Bound<'py, PyAny>>);

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = obj.str()?.to_string();
    parse_rational(&text).map_err(|e| PyValueError::new_err(format!("{text:?}: {e}")))
}

fn to_rationals(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rational>> {
    objs.iter().map(to_rational).collect()
}

fn to_matrix(rows: &[Vec<Bound<'_, PyAny>>]) -> PyResult<RatMatrix> {
    let rows = rows.iter().map(|r| to_rationals(r)).collect::<PyResult<Vec<_>>>()?;
    RatMatrix::from_rows(rows).map_err(value_err)
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((format_rational(r),))
}

fn fractions<'py>(py: Python<'py>, xs: &[Rational]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    xs.iter().map(|x| fraction(py, x)).collect()
}

fn matrix_fractions<'py>(py: Python<'py>, m: &RatMatrix) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    (0..m.rows()).map(|r| fractions(py, m.row(r))).collect()
}

fn to_generators(n1: usize, n2: usize, gens: Vec<(Vec<usize>, Vec<usize>)>) -> PyResult<Vec<ActionGenerator>> {
    gens.into_iter()
        .map(|(a, b)| {
            if a.len() != n1 || b.len() != n2 {
                return Err(PyValueError::new_err(format!(
                    "generator acts on {}/{} points, expected {n1}/{n2}",
                    a.len(),
                    b.len()
                )));
            }
            ActionGenerator::new(a, b).map_err(value_err)
        })
        .collect()
}

fn kind_name(kind: GraphicKind) -> &'static str {
    match kind {
        GraphicKind::GraphOfMapForward => "forward",
        GraphicKind::GraphOfMapBackward => "backward",
        GraphicKind::Both => "both",
        GraphicKind::Neither => "neither",
    }
}

/// Orbits of `X1`, `X2` and `X1 x X2` under a group given by generators, each
/// generator a pair `(perm1, perm2)`.
#[pyclass(frozen, from_py_object, name = "OrbitDecomposition")]
#[derive(Clone)]
struct PyOrbits {
    inner: symmetry::OrbitDecomposition,
    group_order: usize,
    generators: Vec<ActionGenerator>,
}

#[pymethods]
impl PyOrbits {
    #[new]
    #[pyo3(signature = (n1, n2, generators=Vec::new(), group_cap=DEFAULT_GROUP_CAP))]
    fn new(n1: usize, n2: usize, generators: Vec<(Vec<usize>, Vec<usize>)>, group_cap: usize) -> PyResult<Self> {
        let generators = to_generators(n1, n2, generators)?;
        let closure = symmetry::close_group(n1, n2, &generators, group_cap).map_err(value_err)?;
        let inner = symmetry::decompose_orbits(n1, n2, &closure).map_err(value_err)?;
        Ok(Self {
            inner,
            group_order: closure.size(),
            generators,
        })
    }

    #[getter]
    fn m1(&self) -> usize {
        self.inner.m1()
    }

    #[getter]
    fn m2(&self) -> usize {
        self.inner.m2()
    }

    #[getter]
    fn m12(&self) -> usize {
        self.inner.m12()
    }

    #[getter]
    fn group_order(&self) -> usize {
        self.group_order
    }

    #[getter]
    fn orbits1(&self) -> Vec<Vec<usize>> {
        self.inner.orbits1().to_vec()
    }

    #[getter]
    fn orbits2(&self) -> Vec<Vec<usize>> {
        self.inner.orbits2().to_vec()
    }

    #[getter]
    fn orbits12(&self) -> Vec<Vec<(usize, usize)>> {
        self.inner.orbits12().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "OrbitDecomposition(m1={}, m2={}, m12={}, group_order={})",
            self.m1(),
            self.m2(),
            self.m12(),
            self.group_order
        )
    }
}

/// A validated invariant coupling. `mu1`/`mu2` default to the row and column
/// sums of `omega`; `orbits` defaults to the trivial group.
#[pyclass(frozen, skip_from_py_object, name = "Coupling")]
#[derive(Clone)]
struct PyCoupling {
    inner: core_coupling::Coupling,
    orbits: PyOrbits,
}

impl PyCoupling {
    fn trivial(inner: core_coupling::Coupling) -> PyResult<Self> {
        let orbits = PyOrbits::new(inner.n1(), inner.n2(), Vec::new(), 1)?;
        Ok(Self { inner, orbits })
    }
}

#[pymethods]
impl PyCoupling {
    #[new]
    #[pyo3(signature = (omega, mu1=None, mu2=None, orbits=None))]
    fn new(
        omega: Vec<Vec<Bound<'_, PyAny>>>,
        mu1: Option<Vec<Bound<'_, PyAny>>>,
        mu2: Option<Vec<Bound<'_, PyAny>>>,
        orbits: Option<PyOrbits>,
    ) -> PyResult<Self> {
        let m = to_matrix(&omega)?;
        let mu1 = match mu1 {
            Some(xs) => to_rationals(&xs)?,
            None => m.row_sums(),
        };
        let mu2 = match mu2 {
            Some(xs) => to_rationals(&xs)?,
            None => m.col_sums(),
        };
        let mu1 = Marginal::new(mu1).map_err(value_err)?;
        let mu2 = Marginal::new(mu2).map_err(value_err)?;
        let orbits = match orbits {
            Some(o) => o,
            None => PyOrbits::new(m.rows(), m.cols(), Vec::new(), 1)?,
        };
        let inner = core_coupling::validate(m, &mu1, &mu2, &orbits.inner).map_err(value_err)?;
        Ok(Self { inner, orbits })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.n1(), self.inner.n2())
    }

    fn matrix<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        matrix_fractions(py, self.inner.matrix())
    }

    fn marginals<'py>(&self, py: Python<'py>) -> PyResult<FractionPair<'py>> {
        let (a, b) = core_coupling::marginals(&self.inner);
        Ok((fractions(py, a.masses())?, fractions(py, b.masses())?))
    }

    fn support(&self) -> Vec<(usize, usize)> {
        self.inner.support()
    }

    /// `(kind, map)` with kind one of "forward", "backward", "both", "neither".
    fn is_graphic(&self) -> (&'static str, Option<Vec<usize>>) {
        let v = core_coupling::is_graphic(&self.inner);
        (kind_name(v.kind), v.map)
    }

    fn test_extreme(&self) -> PyResult<Verdict> {
        let v = extremality::test_extreme(&self.inner, &self.orbits.inner).map_err(value_err)?;
        let verified = v
            .certificate
            .as_ref()
            .map(|c| c.verify(&self.inner, &self.orbits.inner).is_ok());
        Ok(Verdict { inner: v, verified })
    }

    /// Extension by an independent coordinate with law `nu` (trivial group).
    fn extend_with_independent(&self, nu: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let nu = Marginal::new(to_rationals(&nu)?).map_err(value_err)?;
        Self::trivial(core_coupling::extend_with_independent(&self.inner, &nu))
    }

    /// The coupling as an instance file (JSON text) with its own marginals.
    fn to_instance_json(&self) -> String {
        let mut inst = Instance::trivial_with_coupling(&self.inner);
        inst.generators = self.orbits.generators.clone();
        InstanceFile::from_instance(&inst).to_json_pretty()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let rows: Vec<Vec<String>> = (0..self.inner.n1())
            .map(|r| self.inner.matrix().row(r).iter().map(format_rational).collect())
            .collect();
        format!("Coupling({rows:?})")
    }
}

#[pyclass(frozen)]
struct Verdict {
    inner: extremality::ExtremalityVerdict,
    verified: Option<bool>,
}

#[pymethods]
impl Verdict {
    #[getter]
    fn extreme(&self) -> bool {
        self.inner.extreme
    }

    #[getter]
    fn null_dim(&self) -> usize {
        self.inner.null_dim
    }

    #[getter]
    fn support_orbits(&self) -> Vec<usize> {
        self.inner.support_orbits.clone()
    }

    /// Certificate as a dict (`zeta`, `epsilon`, `omega_plus`, `omega_minus`,
    /// `verified`), or None for an extreme point.
    #[getter]
    fn certificate<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        let Some(c) = &self.inner.certificate else {
            return Ok(None);
        };
        let d = PyDict::new(py);
        d.set_item("zeta", fractions(py, &c.zeta)?)?;
        d.set_item("epsilon", fraction(py, &c.epsilon)?)?;
        d.set_item("omega_plus", matrix_fractions(py, c.omega_plus.matrix())?)?;
        d.set_item("omega_minus", matrix_fractions(py, c.omega_minus.matrix())?)?;
        d.set_item("verified", self.verified)?;
        Ok(Some(d))
    }

    fn __repr__(&self) -> String {
        format!(
            "Verdict(extreme={}, null_dim={})",
            self.inner.extreme, self.inner.null_dim
        )
    }
}

/// All extreme points for marginals `mu1`, `mu2` under the group of `orbits`.
#[pyfunction]
#[pyo3(signature = (mu1, mu2, orbits=None, budget=DEFAULT_BUDGET))]
fn enumerate_extreme(
    mu1: Vec<Bound<'_, PyAny>>,
    mu2: Vec<Bound<'_, PyAny>>,
    orbits: Option<PyOrbits>,
    budget: u64,
) -> PyResult<Vec<PyCoupling>> {
    let mu1 = Marginal::new(to_rationals(&mu1)?).map_err(value_err)?;
    let mu2 = Marginal::new(to_rationals(&mu2)?).map_err(value_err)?;
    let orbits = match orbits {
        Some(o) => o,
        None => PyOrbits::new(mu1.len(), mu2.len(), Vec::new(), 1)?,
    };
    let vs = enumeration::enumerate_extreme(&mu1, &mu2, &orbits.inner, budget).map_err(|e| match e {
        enumeration::EnumerationError::BudgetExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        other => value_err(other),
    })?;
    Ok(vs
        .vertices
        .into_iter()
        .map(|v| PyCoupling {
            inner: v.coupling,
            orbits: orbits.clone(),
        })
        .collect())
}

/// `{"m", "count", "all_permutation_type", "passed"}` for uniform marginals on `m` points.
#[pyfunction]
#[pyo3(signature = (m, budget=DEFAULT_BUDGET))]
fn verify_birkhoff<'py>(py: Python<'py>, m: usize, budget: u64) -> PyResult<Bound<'py, PyDict>> {
    let r = enumeration::verify_birkhoff(m, budget).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("m", r.m)?;
    d.set_item("count", r.count)?;
    d.set_item("all_permutation_type", r.all_permutation_type)?;
    d.set_item("passed", r.passed())?;
    Ok(d)
}

#[pyfunction]
fn graphic_coupling(map: Vec<usize>, n2: usize, mu1: Vec<Bound<'_, PyAny>>) -> PyResult<PyCoupling> {
    let mu1 = Marginal::new(to_rationals(&mu1)?).map_err(value_err)?;
    PyCoupling::trivial(core_coupling::graphic_coupling(&map, n2, &mu1).map_err(value_err)?)
}

/// `[[0, p], [p, 1 - 2p]]` for `0 < p < 1/2`.
#[pyfunction]
fn base_coupling(p: Bound<'_, PyAny>) -> PyResult<PyCoupling> {
    PyCoupling::trivial(dyadic::base_coupling(&to_rational(&p)?).map_err(value_err)?)
}

#[pyfunction]
#[pyo3(signature = (p, depth, size_cap=dyadic::DEFAULT_SIZE_CAP))]
fn truncated_coupling(p: Bound<'_, PyAny>, depth: usize, size_cap: usize) -> PyResult<PyCoupling> {
    let spec = DyadicSpec::new(to_rational(&p)?, depth).map_err(value_err)?;
    PyCoupling::trivial(dyadic::truncated_coupling(&spec, size_cap).map_err(value_err)?)
}

#[pyfunction]
#[pyo3(signature = (p, t, tol=1e-12))]
fn eval_fp(p: f64, t: f64, tol: f64) -> PyResult<f64> {
    dyadic::eval_fp(p, t, tol).map_err(value_err)
}

/// List of `(xi_prime, eta_prime)` tuples.
#[pyfunction]
#[pyo3(signature = (p, count, seed=0, depth=40, tol=1e-12))]
fn sample_pairs(p: Bound<'_, PyAny>, count: usize, seed: u64, depth: usize, tol: f64) -> PyResult<Vec<(f64, f64)>> {
    let cfg = SampleConfig {
        count,
        seed,
        sample_depth: depth,
        tol,
    };
    let samples = dyadic::sample_transformed_pairs(&to_rational(&p)?, &cfg).map_err(value_err)?;
    Ok(samples.into_iter().map(|s| (s.xi_prime, s.eta_prime)).collect())
}

#[pymodule]
pub fn extremal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOrbits>()?;
    m.add_class::<PyCoupling>()?;
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(enumerate_extreme, m)?)?;
    m.add_function(wrap_pyfunction!(verify_birkhoff, m)?)?;
    m.add_function(wrap_pyfunction!(graphic_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(base_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(eval_fp, m)?)?;
    m.add_function(wrap_pyfunction!(sample_pairs, m)?)?;
    Ok(())
}
