//! Python bindings for `qss-core`.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qss_core::analysis;
use qss_core::modmath::{self, Share, SharePolynomial};
use qss_core::protocol::{self, DEFAULT_SEED};
use qss_core::qudit_sim;
use qss_core::Error;

create_exception!(qss, NotInvertibleError, PyValueError);
create_exception!(qss, ReproductionError, PyRuntimeError);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::NotInvertible { .. } => NotInvertibleError::new_err(err.to_string()),
        Error::Reproduction(_) => ReproductionError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn shares_from(pairs: Vec<(u64, u64)>) -> Vec<Share> {
    pairs.into_iter().map(|(x, y)| Share { x, y }).collect()
}

#[pyfunction]
fn mod_inverse(a: u64, d: u64) -> PyResult<u64> {
    modmath::mod_inverse(a, d).map_err(to_py)
}

#[pyfunction]
fn eval_poly(d: u64, coeffs: Vec<u64>, x: u64) -> PyResult<u64> {
    let p = SharePolynomial::new(d, coeffs).map_err(to_py)?;
    Ok(modmath::eval_poly(&p, x))
}

/// Shares `[(x, f(x)), ...]` of the polynomial with the given coefficients.
#[pyfunction]
fn gen_shares(d: u64, coeffs: Vec<u64>, xs: Vec<u64>) -> PyResult<Vec<(u64, u64)>> {
    let p = SharePolynomial::new(d, coeffs).map_err(to_py)?;
    let shares = modmath::gen_shares(&p, &xs).map_err(to_py)?;
    Ok(shares.into_iter().map(|s| (s.x, s.y)).collect())
}

#[pyfunction]
fn lagrange_term(shares: Vec<(u64, u64)>, r: usize, d: u64) -> PyResult<u64> {
    Ok(modmath::lagrange_term(&shares_from(shares), r, d).map_err(to_py)?.s)
}

#[pyfunction]
fn reconstruct_classical(shares: Vec<(u64, u64)>, d: u64) -> PyResult<u64> {
    modmath::reconstruct_classical(&shares_from(shares), d).map_err(to_py)
}

#[pyclass(name = "LocalUnitary", module = "qss", frozen, from_py_object)]
#[derive(Clone)]
struct PyLocalUnitary {
    inner: qudit_sim::LocalUnitary,
}

#[pymethods]
impl PyLocalUnitary {
    #[staticmethod]
    fn phase_gate(d: usize, s: u64) -> Self {
        Self { inner: qudit_sim::phase_gate(d, s) }
    }

    #[staticmethod]
    fn qft_inv(d: usize) -> Self {
        Self { inner: qudit_sim::qft_inv(d) }
    }

    #[staticmethod]
    fn qft(d: usize) -> Self {
        Self { inner: qudit_sim::qft(d) }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Row-major matrix as a list of rows.
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let d = self.inner.dim();
        (0..d).map(|i| (0..d).map(|j| self.inner.entry(i, j)).collect()).collect()
    }

    fn is_unitary(&self, tol: f64) -> bool {
        self.inner.is_unitary(tol)
    }
}

#[pyclass(name = "QuditRegister", module = "qss", frozen, from_py_object)]
#[derive(Clone)]
struct PyQuditRegister {
    inner: qudit_sim::QuditRegister,
}

#[pymethods]
impl PyQuditRegister {
    #[new]
    fn new(d: usize, t: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let inner = qudit_sim::QuditRegister::from_amplitudes(d, t, amplitudes).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn ghz(d: usize, t: usize) -> PyResult<Self> {
        Ok(Self { inner: qudit_sim::make_ghz(d, t).map_err(to_py)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn qudits(&self) -> usize {
        self.inner.qudits()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn apply_local(&self, q: usize, u: &PyLocalUnitary) -> PyResult<Self> {
        Ok(Self { inner: qudit_sim::apply_local(&self.inner, q, &u.inner).map_err(to_py)? })
    }

    fn marginal(&self, q: usize) -> PyResult<Vec<f64>> {
        Ok(qudit_sim::marginal(&self.inner, q).map_err(to_py)?.probs)
    }

    /// Measures qudit `q` with a fresh RNG seeded by `seed`.
    fn measure(&self, q: usize, seed: u64) -> PyResult<(usize, Self)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (v, post) = qudit_sim::measure(&self.inner, q, &mut rng).map_err(to_py)?;
        Ok((v, Self { inner: post }))
    }

    fn joint_distribution(&self) -> HashMap<Vec<usize>, f64> {
        qudit_sim::joint_distribution(&self.inner).entries.into_iter().collect()
    }

    fn amplitude_table(&self) -> String {
        analysis::amplitude_table(&self.inner).render_text()
    }

    fn __repr__(&self) -> String {
        format!("QuditRegister(d={}, t={})", self.inner.dim(), self.inner.qudits())
    }
}

#[pyclass(name = "ProtocolParams", module = "qss", frozen, from_py_object)]
#[derive(Clone)]
struct PyProtocolParams {
    inner: protocol::ProtocolParams,
}

#[pymethods]
impl PyProtocolParams {
    /// Lagrange terms given directly; the secret is their sum mod d.
    #[staticmethod]
    #[pyo3(signature = (d, s, seed = DEFAULT_SEED))]
    fn direct(d: u64, s: Vec<u64>, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: protocol::ProtocolParams::direct(d, s, seed).map_err(to_py)? })
    }

    #[staticmethod]
    #[pyo3(signature = (d, coeffs, xs, seed = DEFAULT_SEED))]
    fn shamir(d: u64, coeffs: Vec<u64>, xs: Vec<u64>, seed: u64) -> PyResult<Self> {
        let poly = SharePolynomial::new(d, coeffs).map_err(to_py)?;
        Ok(Self { inner: protocol::ProtocolParams::shamir(poly, xs, seed).map_err(to_py)? })
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self { inner: self.inner.clone().with_seed(seed) }
    }

    #[getter]
    fn d(&self) -> u64 {
        self.inner.d
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    /// The per-agent Lagrange terms `[s_1, ..., s_t]`.
    fn terms(&self) -> PyResult<Vec<u64>> {
        Ok(self.inner.resolve().map_err(to_py)?.terms.iter().map(|t| t.s).collect())
    }

    fn expected_secret(&self) -> PyResult<u64> {
        Ok(self.inner.resolve().map_err(to_py)?.expected_secret)
    }
}

#[pyclass(name = "Transcript", module = "qss", frozen)]
struct PyTranscript {
    inner: protocol::Transcript,
}

#[pymethods]
impl PyTranscript {
    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.variant.as_str()
    }

    #[getter]
    fn final_outcome(&self) -> u64 {
        self.inner.final_outcome
    }

    #[getter]
    fn expected_secret(&self) -> u64 {
        self.inner.expected_secret
    }

    fn succeeded(&self) -> bool {
        self.inner.succeeded()
    }

    fn log(&self) -> String {
        self.inner.render_log()
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("transcript serializes")
    }

    fn __len__(&self) -> usize {
        self.inner.events.len()
    }
}

#[pyfunction]
fn run_song_original(params: &PyProtocolParams) -> PyResult<PyTranscript> {
    Ok(PyTranscript { inner: protocol::run_song_original(&params.inner).map_err(to_py)? })
}

#[pyfunction]
fn run_repaired_all_measure(params: &PyProtocolParams) -> PyResult<PyTranscript> {
    Ok(PyTranscript { inner: protocol::run_repaired_all_measure(&params.inner).map_err(to_py)? })
}

#[pyfunction]
fn run_product_counterfactual(s: u64, d: u64) -> PyResult<u64> {
    protocol::run_product_counterfactual(s, d).map_err(to_py)
}

#[pyfunction]
fn post_encoding_state(params: &PyProtocolParams) -> PyResult<PyQuditRegister> {
    Ok(PyQuditRegister { inner: protocol::post_encoding_state(&params.inner).map_err(to_py)? })
}

#[pyfunction]
fn success_probability_exact(params: &PyProtocolParams) -> PyResult<f64> {
    analysis::success_probability_exact(&params.inner).map_err(to_py)
}

/// `(estimate, stderr)` over `trials` seeded runs.
#[pyfunction]
#[pyo3(signature = (params, trials, seed = DEFAULT_SEED))]
fn success_probability_mc(params: &PyProtocolParams, trials: u64, seed: u64) -> PyResult<(f64, f64)> {
    let est = analysis::success_probability_mc(&params.inner, trials, seed).map_err(to_py)?;
    Ok((est.estimate, est.stderr))
}

#[pyclass(name = "ExampleReport", module = "qss", frozen)]
struct PyExampleReport {
    inner: analysis::ExampleReport,
}

#[pymethods]
impl PyExampleReport {
    #[getter]
    fn exact_p(&self) -> f64 {
        self.inner.exact_p
    }

    #[getter]
    fn marginal(&self) -> Vec<f64> {
        self.inner.marginal.clone()
    }

    #[getter]
    fn verdict(&self) -> String {
        self.inner.verdict.clone()
    }

    #[getter]
    fn mc_estimate(&self) -> (f64, f64) {
        (self.inner.mc.estimate, self.inner.mc.stderr)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn render_text(&self) -> String {
        self.inner.render_text()
    }
}

#[pyfunction]
#[pyo3(signature = (trials = analysis::DEFAULT_TRIALS, seed = DEFAULT_SEED, split = None))]
fn reproduce_example_d4(trials: u64, seed: u64, split: Option<Vec<u64>>) -> PyResult<PyExampleReport> {
    let config = analysis::ExampleConfig {
        split: split.unwrap_or_else(|| analysis::EXAMPLE_SPLIT.to_vec()),
        trials,
        seed,
    };
    Ok(PyExampleReport { inner: analysis::reproduce_example_with(&config).map_err(to_py)? })
}

#[pymodule]
fn qss(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NotInvertibleError", m.py().get_type::<NotInvertibleError>())?;
    m.add("ReproductionError", m.py().get_type::<ReproductionError>())?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add_class::<PyLocalUnitary>()?;
    m.add_class::<PyQuditRegister>()?;
    m.add_class::<PyProtocolParams>()?;
    m.add_class::<PyTranscript>()?;
    m.add_class::<PyExampleReport>()?;
    m.add_function(wrap_pyfunction!(mod_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(eval_poly, m)?)?;
    m.add_function(wrap_pyfunction!(gen_shares, m)?)?;
    m.add_function(wrap_pyfunction!(lagrange_term, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_classical, m)?)?;
    m.add_function(wrap_pyfunction!(run_song_original, m)?)?;
    m.add_function(wrap_pyfunction!(run_repaired_all_measure, m)?)?;
    m.add_function(wrap_pyfunction!(run_product_counterfactual, m)?)?;
    m.add_function(wrap_pyfunction!(post_encoding_state, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability_exact, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability_mc, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_example_d4, m)?)?;
    Ok(())
}
