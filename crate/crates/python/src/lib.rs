//! Python bindings for `tailsum`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tailsum::bounds;
use tailsum::cli::SpecFile;
use tailsum::distmodel::{self, ComponentDistribution, ContinuousFamilySpec, Family, TruncSide};
use tailsum::mcengine::{self, McConfig, SuiteId, VerifyConfig};
use tailsum::momentest::{self, QuantileSource, DEFAULT_P0};
use tailsum::orlicz;
use tailsum::rearrange::{self, IndependentSequence, SequenceFlags};
use tailsum::tailest::{self, TruncationMode};

fn err(e: tailsum::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn parse_enum<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|_| PyValueError::new_err(format!("unknown {what} '{s}'")))
}

/// A finite atomic distribution.
#[pyclass(name = "Distribution", module = "tailsum_py", frozen)]
struct PyDistribution {
    inner: ComponentDistribution,
}

#[pymethods]
impl PyDistribution {
    /// Builds a distribution from `(value, probability)` pairs.
    #[new]
    fn new(atoms: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(PyDistribution { inner: distmodel::make_atomic(atoms).map_err(err)? })
    }

    #[staticmethod]
    fn rademacher() -> Self {
        PyDistribution { inner: ComponentDistribution::rademacher() }
    }

    #[staticmethod]
    fn point(c: f64) -> PyResult<Self> {
        Ok(PyDistribution { inner: ComponentDistribution::point(c).map_err(err)? })
    }

    /// Discretizes `gaussian`, `exponential`, `pareto`, `uniform` or `weibull`.
    #[staticmethod]
    #[pyo3(signature = (family, params, eps_mass=1e-3, eps_value=0.05))]
    fn from_family(family: &str, params: Vec<f64>, eps_mass: f64, eps_value: f64) -> PyResult<Self> {
        let family: Family = parse_enum("family", family)?;
        let spec = ContinuousFamilySpec::new(family, params, eps_mass, eps_value);
        Ok(PyDistribution { inner: distmodel::discretize(&spec).map_err(err)? })
    }

    fn atoms(&self) -> Vec<(f64, f64)> {
        self.inner.atoms().iter().map(|a| (a.value, a.prob)).collect()
    }

    /// `Pr(|X| > x)`
    fn tail_at(&self, x: f64) -> f64 {
        self.inner.tail_at(x)
    }

    /// Decreasing rearrangement `X*(u)`.
    fn quantile(&self, u: f64) -> f64 {
        self.inner.quantile_at(u)
    }

    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }

    /// Keeps `|X| <= s` (`side="le"`) or `|X| > s` (`side="gt"`).
    #[pyo3(signature = (s, side="le"))]
    fn truncate(&self, s: f64, side: &str) -> PyResult<Self> {
        let side: TruncSide = parse_enum("side", side)?;
        Ok(PyDistribution { inner: self.inner.truncate(s, side) })
    }

    fn scaled(&self, c: f64) -> PyResult<Self> {
        Ok(PyDistribution { inner: self.inner.scaled(c).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Distribution({})", json(&self.inner))
    }
}

/// An ordered finite sequence of independent summands.
#[pyclass(name = "Sequence", module = "tailsum_py", frozen)]
struct PySequence {
    inner: IndependentSequence,
}

#[pymethods]
impl PySequence {
    /// Declared flags are validated; detected flags are added.
    #[new]
    #[pyo3(signature = (components, positive=false, symmetric=false, iid=false))]
    fn new(components: Vec<PyRef<'_, PyDistribution>>, positive: bool, symmetric: bool, iid: bool) -> PyResult<Self> {
        let comps: Vec<ComponentDistribution> = components.iter().map(|d| d.inner.clone()).collect();
        let declared = SequenceFlags { positive, symmetric, iid };
        IndependentSequence::new(comps.clone(), declared).map_err(err)?;
        let flags = declared.union(rearrange::detect_flags(&comps));
        Ok(PySequence { inner: IndependentSequence::new(comps, flags).map_err(err)? })
    }

    #[staticmethod]
    fn iid(d: PyRef<'_, PyDistribution>, n: usize) -> PyResult<Self> {
        Ok(PySequence { inner: IndependentSequence::iid(d.inner.clone(), n).map_err(err)? })
    }

    /// Parses a JSON spec document.
    #[staticmethod]
    fn from_spec_json(text: &str) -> PyResult<Self> {
        let spec = SpecFile::from_json(text).map_err(err)?;
        Ok(PySequence { inner: spec.to_sequence().map_err(err)? })
    }

    fn to_spec_json(&self) -> String {
        SpecFile::from_sequence(&self.inner).to_json()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `(positive, symmetric, iid)`
    fn flags(&self) -> (bool, bool, bool) {
        let f = self.inner.flags();
        (f.positive, f.symmetric, f.iid)
    }

    fn levy_constants(&self) -> Option<(f64, f64)> {
        self.inner.levy_constants().map(|l| (l.c1, l.c2))
    }

    fn ell(&self, t: f64) -> f64 {
        rearrange::ell(&self.inner, t)
    }

    fn max_star(&self, t: f64) -> f64 {
        rearrange::max_star(&self.inner, t)
    }

    fn ell_lp_norm(&self, p: f64) -> f64 {
        rearrange::ell_lp_norm(&self.inner, p)
    }

    /// `F₁(t)` (`mode="ell"`) or `F₂(t)` (`mode="mstar"`).
    #[pyo3(signature = (t, mode="ell"))]
    fn tail_estimate(&self, t: f64, mode: &str) -> PyResult<f64> {
        let mode: TruncationMode = parse_enum("mode", mode)?;
        tailest::tail_value(&self.inner, t, mode).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Sequence(len={}, flags={:?})", self.inner.len(), self.flags())
    }
}

/// Orlicz norm of `|X|` for `Φ_t(x) = (t^{-x} - 1) / (t^{-1} - 1)`.
#[pyfunction]
fn phi_norm(d: PyRef<'_, PyDistribution>, t: f64) -> PyResult<f64> {
    orlicz::phi_norm(&d.inner, t).map_err(err)
}

#[pyfunction]
fn sup_formula(d: PyRef<'_, PyDistribution>, t: f64) -> PyResult<f64> {
    orlicz::sup_formula(&d.inner, t).map_err(err)
}

#[pyfunction]
fn kn_rhs(p_u: f64, p_m: f64, k: u32) -> PyResult<f64> {
    bounds::kn_rhs(bounds::KnBoundInput { p_u, p_m, k }).map_err(err)
}

#[pyfunction]
fn vk_tail_bound(seq: PyRef<'_, PySequence>, r: f64, k: u32, t: f64) -> PyResult<f64> {
    bounds::vk_tail_bound(&seq.inner, r, k, t).map_err(err)
}

#[pyfunction]
fn large_part_lp_bound(seq: PyRef<'_, PySequence>, r: f64, p: f64) -> PyResult<f64> {
    bounds::large_part_lp_bound(&seq.inner, r, p).map_err(err)
}

/// `U*(e^{-p}/4) + ‖ℓ‖_p` with the quantile from `mc`, `enum` or `f2proxy`.
#[pyfunction]
#[pyo3(signature = (seq, p, source="enum", samples=1_000_000, seed=0))]
fn u_lp_estimate(seq: PyRef<'_, PySequence>, p: f64, source: &str, samples: usize, seed: u64) -> PyResult<f64> {
    let source: QuantileSource = parse_enum("source", source)?;
    let mc = McConfig::new(samples, seed);
    momentest::u_lp_estimate(&seq.inner, p, source, Some(&mc), DEFAULT_P0)
        .map(|e| e.estimate)
        .map_err(err)
}

/// Exact laws of `|S|`, `U`, `M` as a JSON document.
#[pyfunction]
fn enumerate_exact(seq: PyRef<'_, PySequence>) -> PyResult<String> {
    Ok(json(&mcengine::enumerate_exact(&seq.inner).map_err(err)?))
}

/// Empirical tails of `|S|`, `U`, `M` as a JSON document.
#[pyfunction]
#[pyo3(signature = (seq, n, seed=0, delta=1e-3))]
fn simulate(seq: PyRef<'_, PySequence>, n: usize, seed: u64, delta: f64) -> PyResult<String> {
    let cfg = McConfig::new(n, seed).with_delta(delta);
    Ok(json(&mcengine::simulate(&seq.inner, &cfg).map_err(err)?))
}

/// Runs one verification suite; returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (seq, suite, samples=None, seed=0))]
fn verify(seq: PyRef<'_, PySequence>, suite: &str, samples: Option<usize>, seed: u64) -> PyResult<(bool, String)> {
    let suite: SuiteId = suite.parse().map_err(err)?;
    let cfg = VerifyConfig { samples, seed, ..VerifyConfig::default() };
    let report = mcengine::verify_suite(&seq.inner, suite, &cfg).map_err(err)?;
    Ok((report.passed, json(&report)))
}

#[pymodule]
fn tailsum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", tailsum::VERSION)?;
    m.add_class::<PyDistribution>()?;
    m.add_class::<PySequence>()?;
    m.add_function(wrap_pyfunction!(phi_norm, m)?)?;
    m.add_function(wrap_pyfunction!(sup_formula, m)?)?;
    m.add_function(wrap_pyfunction!(kn_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(vk_tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(large_part_lp_bound, m)?)?;
    m.add_function(wrap_pyfunction!(u_lp_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_exact, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
