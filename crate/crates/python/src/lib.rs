//! Python bindings for the `harmonic-descent` crate.

use harmonic_descent::chain::{self, ChainState, HittingQuery};
use harmonic_descent::composition::{self, Composition};
use harmonic_descent::numerics::{self, RngStream};
use harmonic_descent::renewal;
use harmonic_descent::verify::{self, Suite};
use harmonic_descent::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(msg) => PyValueError::new_err(msg),
        e @ Error::Convergence { .. } => PyRuntimeError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for Result<T, Error> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Reproducible random stream identified by `(seed, stream_index)`.
#[pyclass(name = "RngStream", module = "harmonic_descent")]
struct PyRngStream {
    inner: RngStream,
}

#[pymethods]
impl PyRngStream {
    #[new]
    #[pyo3(signature = (seed, stream_index = 0))]
    fn new(seed: u64, stream_index: u64) -> Self {
        Self {
            inner: RngStream::new(seed, stream_index),
        }
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[getter]
    fn stream_index(&self) -> u64 {
        self.inner.stream_index()
    }

    fn uniform(&mut self) -> f64 {
        self.inner.uniform()
    }

    fn exponential(&mut self) -> f64 {
        self.inner.exponential()
    }

    fn __repr__(&self) -> String {
        format!(
            "RngStream(seed={}, stream_index={})",
            self.inner.seed(),
            self.inner.stream_index()
        )
    }
}

#[pyfunction]
fn harmonic(n: u64) -> PyResult<f64> {
    numerics::harmonic(n).py()
}

#[pyfunction]
fn zeta_int(s: u32) -> PyResult<f64> {
    numerics::zeta_int(s).py()
}

#[pyfunction]
fn dilog(z: f64) -> PyResult<f64> {
    numerics::dilog(z).py()
}

#[pyfunction]
fn decrement_pmf(j: u64) -> PyResult<Vec<f64>> {
    chain::decrement_pmf(j).py()
}

#[pyfunction]
fn step(state: u64, rng: &mut PyRngStream) -> PyResult<u64> {
    Ok(chain::step(ChainState::new(state).py()?, &mut rng.inner).value())
}

#[pyfunction]
fn simulate(start: u64, rng: &mut PyRngStream) -> PyResult<Vec<u64>> {
    Ok(chain::simulate(ChainState::new(start).py()?, &mut rng.inner).states)
}

#[pyfunction]
fn hit_probability_exact(start: u64, target: u64) -> PyResult<f64> {
    Ok(chain::hit_probability_exact(
        HittingQuery::new(start, target).py()?,
    ))
}

/// Returns `(estimate, stderr)`.
#[pyfunction]
#[pyo3(signature = (start, target, reps, seed = 0))]
fn hit_probability_mc(
    py: Python<'_>,
    start: u64,
    target: u64,
    reps: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let q = HittingQuery::new(start, target).py()?;
    let e = py
        .detach(|| chain::hit_probability_mc(q, reps, seed))
        .py()?;
    Ok((e.estimate, e.stderr))
}

#[pyfunction]
fn limit_formula(i: u64) -> PyResult<f64> {
    chain::limit_formula(i).py()
}

/// Rows `(n, q_n, limit, gap)`.
#[pyfunction]
fn convergence_table(
    py: Python<'_>,
    i: u64,
    starts: Vec<u64>,
) -> PyResult<Vec<(u64, f64, f64, f64)>> {
    let rows = py.detach(|| chain::convergence_table(i, &starts)).py()?;
    Ok(rows
        .into_iter()
        .map(|r| (r.n, r.q, r.limit, r.gap))
        .collect())
}

#[pyfunction]
fn gp_decrement_prob(j: u64, i: u64) -> PyResult<f64> {
    composition::gp_decrement_prob(j, i).py()
}

#[pyfunction]
fn sample_composition(n: u64, rng: &mut PyRngStream) -> PyResult<Vec<u64>> {
    Ok(composition::sample_composition(n, &mut rng.inner)
        .py()?
        .blocks)
}

#[pyfunction]
fn occupancy_chain(blocks: Vec<u64>) -> PyResult<Vec<u64>> {
    let c = Composition::new(blocks).py()?;
    Ok(composition::occupancy_chain(&c).counts)
}

#[pyfunction]
#[pyo3(signature = (n, rng, epsilon = 1e-6))]
fn balls_in_boxes(n: u64, rng: &mut PyRngStream, epsilon: f64) -> PyResult<Vec<u64>> {
    Ok(composition::balls_in_boxes(n, epsilon, &mut rng.inner)
        .py()?
        .blocks)
}

/// Returns `(jump_times, jump_sizes)`.
#[pyfunction]
fn simulate_subordinator(
    epsilon: f64,
    horizon: f64,
    rng: &mut PyRngStream,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let p = composition::simulate_subordinator(epsilon, horizon, &mut rng.inner).py()?;
    Ok((p.jump_times, p.jump_sizes))
}

/// Returns `(lhs, rhs_estimate, rhs_stderr)`.
#[pyfunction]
#[pyo3(signature = (n, i, reps, seed = 0))]
fn chain_equivalence_check(
    py: Python<'_>,
    n: u64,
    i: u64,
    reps: usize,
    seed: u64,
) -> PyResult<(f64, f64, f64)> {
    let c = py
        .detach(|| composition::chain_equivalence_check(n, i, reps, seed))
        .py()?;
    Ok((c.lhs, c.rhs.estimate, c.rhs.stderr))
}

#[pyfunction]
fn nu_density(x: f64) -> PyResult<f64> {
    renewal::nu_density(x).py()
}

#[pyfunction]
fn nu_tail(x: f64) -> PyResult<f64> {
    renewal::nu_tail(x).py()
}

/// Returns `(quadrature, closed_form)`.
#[pyfunction]
fn hurwitz_moment(r: u32) -> PyResult<(f64, f64)> {
    let c = renewal::hurwitz_moment(r).py()?;
    Ok((c.quadrature, c.closed_form))
}

#[pyfunction]
fn chi_tail(y: f64) -> PyResult<f64> {
    renewal::chi_tail(y).py()
}

/// Returns `(quadrature, closed_form)`.
#[pyfunction]
fn chi_laplace(i: u64) -> PyResult<(f64, f64)> {
    let c = renewal::chi_laplace(i).py()?;
    Ok((c.quadrature, c.closed_form))
}

#[pyfunction]
fn chi_sample(rng: &mut PyRngStream) -> f64 {
    renewal::chi_sample(&mut rng.inner)
}

#[pyfunction]
#[pyo3(signature = (t, reps, epsilon = 1e-6, seed = 0))]
fn overshoot_mc(
    py: Python<'_>,
    t: f64,
    reps: usize,
    epsilon: f64,
    seed: u64,
) -> PyResult<Vec<f64>> {
    Ok(py
        .detach(|| renewal::overshoot_mc(t, epsilon, reps, seed))
        .py()?
        .samples)
}

/// Returns `(estimate, stderr)`.
#[pyfunction]
#[pyo3(signature = (n, i, reps, epsilon = 1e-6, seed = 0))]
fn hitting_via_overshoot(
    py: Python<'_>,
    n: u64,
    i: u64,
    reps: usize,
    epsilon: f64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let e = py
        .detach(|| renewal::hitting_via_overshoot(n, i, epsilon, reps, seed))
        .py()?;
    Ok((e.estimate, e.stderr))
}

/// Runs an invariant suite ("kernel", "renewal" or "composition");
/// returns `(passed, report)`.
#[pyfunction]
fn run_verification(suite: &str) -> PyResult<(bool, String)> {
    let suite = match suite {
        "kernel" => Suite::Kernel,
        "renewal" => Suite::Renewal,
        "composition" => Suite::Composition,
        other => return Err(PyValueError::new_err(format!("unknown suite {other:?}"))),
    };
    let report = verify::run(suite, 1.0).py()?;
    Ok((report.passed(), report.to_string()))
}

#[pymodule(name = "harmonic_descent")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRngStream>()?;
    m.add_function(wrap_pyfunction!(harmonic, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_int, m)?)?;
    m.add_function(wrap_pyfunction!(dilog, m)?)?;
    m.add_function(wrap_pyfunction!(decrement_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(hit_probability_exact, m)?)?;
    m.add_function(wrap_pyfunction!(hit_probability_mc, m)?)?;
    m.add_function(wrap_pyfunction!(limit_formula, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_table, m)?)?;
    m.add_function(wrap_pyfunction!(gp_decrement_prob, m)?)?;
    m.add_function(wrap_pyfunction!(sample_composition, m)?)?;
    m.add_function(wrap_pyfunction!(occupancy_chain, m)?)?;
    m.add_function(wrap_pyfunction!(balls_in_boxes, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_subordinator, m)?)?;
    m.add_function(wrap_pyfunction!(chain_equivalence_check, m)?)?;
    m.add_function(wrap_pyfunction!(nu_density, m)?)?;
    m.add_function(wrap_pyfunction!(nu_tail, m)?)?;
    m.add_function(wrap_pyfunction!(hurwitz_moment, m)?)?;
    m.add_function(wrap_pyfunction!(chi_tail, m)?)?;
    m.add_function(wrap_pyfunction!(chi_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(chi_sample, m)?)?;
    m.add_function(wrap_pyfunction!(overshoot_mc, m)?)?;
    m.add_function(wrap_pyfunction!(hitting_via_overshoot, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}
