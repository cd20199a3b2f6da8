//! Python bindings: kernels, exact statistics, constant-kernel analytics,
//! pair times and the stochastic simulator.
//!
//! Build the importable module with
//! `cargo build -p cfp-py --release --features extension-module`, then make
//! the artifact visible as `cfp_py` (see `python/smoke_test.py`).

use cfp_core::exact::{self, CnkMethod};
use cfp_core::hypergeom::{self, GMethod};
use cfp_core::kernels;
use cfp_core::numeric::{parse_decimal_rational, LogFloat, Weight};
use cfp_core::partitions;
use cfp_core::simulate::{self, SimConfig};
use cfp_core::{pairtimes, Error};
use num_rational::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(err: Error) -> PyErr {
    match err {
        Error::InvalidArgument(_) | Error::Parse(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn rational_arg(a: f64) -> PyResult<BigRational> {
    if !a.is_finite() {
        return Err(PyValueError::new_err("a must be finite"));
    }
    Ok(BigRational::from_float(a).expect("finite"))
}

/// A coagulation-fragmentation kernel (a_i, C(i,j), F(i,j)).
#[pyclass(name = "Kernel", from_py_object)]
#[derive(Clone)]
struct PyKernel {
    inner: kernels::Kernel,
}

#[pymethods]
impl PyKernel {
    /// Constant weights: a_i = a, C = 1, F = a.
    #[staticmethod]
    fn constant(a: f64) -> PyResult<Self> {
        Ok(PyKernel {
            inner: kernels::Kernel::constant(rational_arg(a)?).map_err(py_err)?,
        })
    }

    /// Constant weights truncated at maximum cluster size m.
    #[staticmethod]
    fn bounded(a: f64, m: usize) -> PyResult<Self> {
        Ok(PyKernel {
            inner: kernels::Kernel::bounded(rational_arg(a)?, m).map_err(py_err)?,
        })
    }

    /// Linear weights: a_i = a·i, F = a·ij/(i+j).
    #[staticmethod]
    fn linear(a: f64) -> PyResult<Self> {
        Ok(PyKernel {
            inner: kernels::Kernel::linear(rational_arg(a)?).map_err(py_err)?,
        })
    }

    /// Build from a JSON kernel spec string.
    #[staticmethod]
    fn from_spec(json: &str) -> PyResult<Self> {
        let spec: kernels::KernelSpec =
            serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyKernel {
            inner: kernels::build_kernel(&spec).map_err(py_err)?,
        })
    }

    fn family(&self) -> String {
        format!("{:?}", self.inner.family()).to_lowercase()
    }

    fn max_size(&self) -> Option<usize> {
        self.inner.max_size()
    }

    fn weight(&self, i: usize) -> f64 {
        self.inner.weight(i)
    }

    fn coag(&self, i: usize, j: usize) -> f64 {
        self.inner.coag(i, j)
    }

    fn frag(&self, i: usize, j: usize) -> f64 {
        self.inner.frag(i, j)
    }

    /// Total dissociation rate d(n) = Σ F(i, n-i).
    fn dissociation(&self, n: usize) -> f64 {
        self.inner.dissociation(n)
    }

    /// Worst relative detailed-balance violation up to N.
    #[pyo3(signature = (n, tol=1e-12))]
    fn verify_detailed_balance<'py>(
        &self,
        py: Python<'py>,
        n: usize,
        tol: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let report = kernels::verify_detailed_balance(&self.inner, n, tol).map_err(py_err)?;
        let out = PyDict::new(py);
        out.set_item("max_violation", report.max_violation)?;
        out.set_item("worst_pair", report.worst_pair)?;
        out.set_item("passed", report.passed)?;
        out.set_item("exact_zero", report.exact_zero)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Kernel(family={})", self.family())
    }
}

/// Occupancy partitions of n as sparse [(size, count), ...] lists.
#[pyfunction]
#[pyo3(signature = (n, k=None, max_size=None))]
fn enumerate_partitions(
    n: usize,
    k: Option<usize>,
    max_size: Option<usize>,
) -> PyResult<Vec<Vec<(usize, u32)>>> {
    let index = match k {
        Some(k) => partitions::enumerate_occupancy_given_k(n, k, max_size),
        None => partitions::enumerate_occupancy(n, max_size),
    }
    .map_err(py_err)?;
    Ok(index.iter().map(|m| m.to_sparse()).collect())
}

/// Number of partitions of n (optionally with k parts / bounded sizes).
#[pyfunction]
#[pyo3(signature = (n, k=None, max_size=None))]
fn partition_count(n: usize, k: Option<usize>, max_size: Option<usize>) -> PyResult<usize> {
    Ok(enumerate_partitions(n, k, max_size)?.len())
}

struct Pipeline {
    table: exact::CnkTable<LogFloat>,
    pi: exact::ClusterCountDistribution<LogFloat>,
}

fn pipeline(kernel: &PyKernel, n: usize) -> PyResult<Pipeline> {
    let table =
        exact::compute_cnk::<LogFloat>(&kernel.inner, n, CnkMethod::Recurrence).map_err(py_err)?;
    let rates = exact::rate_schedule(&kernel.inner, &table).map_err(py_err)?;
    let pi = exact::steady_state_pi(&rates).map_err(py_err)?;
    Ok(Pipeline { table, pi })
}

/// Steady-state cluster-count distribution Π_K, K = 1..=n.
#[pyfunction]
fn steady_state_pi(kernel: &PyKernel, n: usize) -> PyResult<Vec<f64>> {
    Ok(pipeline(kernel, n)?.pi.to_f64_vec())
}

/// Marginal mean cluster counts ⟨M_i⟩, i = 1..=n.
#[pyfunction]
fn mean_counts(kernel: &PyKernel, n: usize) -> PyResult<Vec<f64>> {
    let p = pipeline(kernel, n)?;
    let report = exact::marginal_moments(&p.table, &p.pi, &[]).map_err(py_err)?;
    Ok(report.means.iter().map(Weight::to_f64).collect())
}

/// Stationary probability that two tagged particles share a cluster.
#[pyfunction]
fn p2_exact(kernel: &PyKernel, n: usize) -> PyResult<f64> {
    let p = pipeline(kernel, n)?;
    Ok(exact::p2_exact(&p.table, &p.pi).map_err(py_err)?.to_f64())
}

/// Conditional moments at fixed cluster count K.
#[pyfunction]
fn moments_given_k<'py>(
    py: Python<'py>,
    kernel: &PyKernel,
    n: usize,
    k: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let p = pipeline(kernel, n)?;
    let report = exact::moments_given_k(&p.table, k, &[]).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item(
        "means",
        report.means.iter().map(Weight::to_f64).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "second_moments",
        report
            .second_moments
            .iter()
            .map(Weight::to_f64)
            .collect::<Vec<_>>(),
    )?;
    Ok(out)
}

/// Exact a→0 limit of the bounded kernel: configurations and ⟨P₂⟩.
#[pyfunction]
fn nucleation_limit<'py>(py: Python<'py>, n: usize, m: usize) -> PyResult<Bound<'py, PyDict>> {
    let limit = exact::nucleation_limit(n, m).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("cluster_count", limit.cluster_count)?;
    let configs: Vec<(Vec<usize>, f64)> = limit
        .configs
        .iter()
        .map(|(cfg, p)| (cfg.to_sizes().parts().to_vec(), p.to_f64()))
        .collect();
    out.set_item("configs", configs)?;
    out.set_item("p2", limit.p2.as_ref().map(Weight::to_f64))?;
    Ok(out)
}

fn g_method(name: &str) -> PyResult<GMethod> {
    Ok(match name {
        "exact" => GMethod::Exact,
        "asymptotic" => GMethod::Asymptotic,
        "continued-fraction" | "continued_fraction" => GMethod::ContinuedFraction,
        "taylor" => GMethod::Taylor,
        other => return Err(PyValueError::new_err(format!("unknown method '{other}'"))),
    })
}

/// G_n(a, N) for the constant kernel.
#[pyfunction]
#[pyo3(signature = (order, a, n, method="exact"))]
fn g_n(order: usize, a: f64, n: usize, method: &str) -> PyResult<f64> {
    Ok(hypergeom::g_n(order, a, n, g_method(method)?)
        .map_err(py_err)?
        .value)
}

/// Constant-kernel Π_K via the closed ladder.
#[pyfunction]
fn pi_constant(n: usize, a: f64) -> PyResult<Vec<f64>> {
    Ok(hypergeom::pi_constant(n, a).map_err(py_err)?.to_f64_vec())
}

/// Cluster-count moment μ_order for the constant kernel.
#[pyfunction]
fn mu_n(order: usize, a: f64, n: usize) -> PyResult<f64> {
    hypergeom::mu_n(order, a, n).map_err(py_err)
}

/// Mean count of clusters of `size` for the constant kernel.
#[pyfunction]
fn mean_counts_constant(size: usize, a: f64, n: usize) -> PyResult<f64> {
    hypergeom::mean_counts_constant(size, a, n).map_err(py_err)
}

/// ⟨P₂⟩ for the constant kernel (G₁, or the large-N tail).
#[pyfunction]
#[pyo3(signature = (a, n, asymptotic=false))]
fn p2_constant(a: f64, n: usize, asymptotic: bool) -> PyResult<f64> {
    hypergeom::p2_constant(a, n, asymptotic).map_err(py_err)
}

/// Mean separation/reunion times and the renewal ratio.
#[pyfunction]
fn pair_times<'py>(py: Python<'py>, kernel: &PyKernel, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let report = pairtimes::pair_times(&kernel.inner, n).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("t_s", report.t_s)?;
    out.set_item("t_r", report.t_r)?;
    out.set_item("p2_ratio", report.p2_ratio)?;
    out.set_item("p2_exact", report.p2_exact)?;
    out.set_item("max_residual", report.max_residual)?;
    out.set_item("t_s_stationary", report.t_s_stationary)?;
    out.set_item("t_r_stationary", report.t_r_stationary)?;
    Ok(out)
}

/// Event-driven exact simulation; returns aggregated statistics.
#[pyfunction]
#[pyo3(signature = (kernel, n, t_end, seed, burn_in=0.0, replicas=1, track_pair=false))]
fn run_ssa<'py>(
    py: Python<'py>,
    kernel: &PyKernel,
    n: usize,
    t_end: f64,
    seed: u64,
    burn_in: f64,
    replicas: usize,
    track_pair: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let config = SimConfig {
        burn_in,
        replicas,
        track_pair,
        ..SimConfig::new(n, t_end, seed)
    };
    let (stats, _) = simulate::run_ssa(&kernel.inner, &config).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("pi", stats.pi.iter().map(|e| e.value).collect::<Vec<_>>())?;
    out.set_item(
        "pi_std_error",
        stats.pi.iter().map(|e| e.std_error).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "mean_counts",
        stats.mean_counts.iter().map(|e| e.value).collect::<Vec<_>>(),
    )?;
    out.set_item("mean_cluster_count", stats.mean_cluster_count.value)?;
    out.set_item("p2", stats.p2.as_ref().map(|e| e.value))?;
    out.set_item("p2_std_error", stats.p2.as_ref().map(|e| e.std_error))?;
    if let Some(ep) = &stats.episodes {
        out.set_item("t_s_hat", ep.mean_together.value)?;
        out.set_item("t_r_hat", ep.mean_apart.value)?;
        out.set_item("together_episodes", ep.together_episodes)?;
        out.set_item("apart_episodes", ep.apart_episodes)?;
    }
    out.set_item("events_total", stats.events_total)?;
    out.set_item("early_stops", stats.early_stops)?;
    out.set_item("rng_algorithm", stats.rng_algorithm)?;
    out.set_item("kernel_spec_hash", stats.kernel_spec_hash)?;
    Ok(out)
}

/// Parse a decimal/fraction string to a float via exact rational parsing.
#[pyfunction]
fn parse_rational(text: &str) -> PyResult<f64> {
    parse_decimal_rational(text)
        .map(|q| Weight::to_f64(&q))
        .ok_or_else(|| PyValueError::new_err(format!("cannot parse '{text}'")))
}

#[pymodule]
fn cfp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKernel>()?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(partition_count, m)?)?;
    m.add_function(wrap_pyfunction!(steady_state_pi, m)?)?;
    m.add_function(wrap_pyfunction!(mean_counts, m)?)?;
    m.add_function(wrap_pyfunction!(p2_exact, m)?)?;
    m.add_function(wrap_pyfunction!(moments_given_k, m)?)?;
    m.add_function(wrap_pyfunction!(nucleation_limit, m)?)?;
    m.add_function(wrap_pyfunction!(g_n, m)?)?;
    m.add_function(wrap_pyfunction!(pi_constant, m)?)?;
    m.add_function(wrap_pyfunction!(mu_n, m)?)?;
    m.add_function(wrap_pyfunction!(mean_counts_constant, m)?)?;
    m.add_function(wrap_pyfunction!(p2_constant, m)?)?;
    m.add_function(wrap_pyfunction!(pair_times, m)?)?;
    m.add_function(wrap_pyfunction!(run_ssa, m)?)?;
    m.add_function(wrap_pyfunction!(parse_rational, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
