//! Python bindings. Signals are wrapped in `Signal`; reports come back as
//! plain dicts decoded from the library's JSON form.

use almost_conv::cyclic::{self, CyclicFunction, DEFAULT_TOL};
use almost_conv::io::{read_signal_file, signal_csv_string};
use almost_conv::spectral::default_delta_schedule;
use almost_conv::tauberian::{self, ChainConfig};
use almost_conv::{
    ac_verdict, cesaro_sweep, default_schedule, dft_spectrum, highpass_project, render_continuous, render_discrete,
    spectral_ac_verdict, AnySignal, Complex64, ContinuousSignal, DiscreteSignal, Error, GeneratorSpec, Lattice,
    Sampled, Sidedness, Taper, WindowSchedule,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyString};
use serde::Serialize;

create_exception!(pyalmostconv, HypothesisViolated, PyException);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::HypothesisViolated(m) => HypothesisViolated::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for almost_conv::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Serialize through JSON so every report reaches Python as nested dicts.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Accept a generator as a JSON string or as a dict.
fn spec_from(py: Python<'_>, spec: &Bound<'_, PyAny>) -> PyResult<GeneratorSpec> {
    let text: String = if spec.is_instance_of::<PyString>() {
        spec.extract()?
    } else {
        py.import("json")?.call_method1("dumps", (spec,))?.extract()?
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(format!("bad generator: {e}")))
}

fn sidedness(name: &str) -> PyResult<Sidedness> {
    match name {
        "one_sided" => Ok(Sidedness::OneSided),
        "two_sided" => Ok(Sidedness::TwoSided),
        _ => Err(PyValueError::new_err(format!("sidedness must be one_sided or two_sided, got {name:?}"))),
    }
}

fn cyclic_fn(values: Vec<Complex64>) -> PyResult<CyclicFunction> {
    CyclicFunction::new(values).py()
}

/// Dispatch on the concrete signal type.
macro_rules! with_signal {
    ($sig:expr, $s:ident => $body:expr) => {
        match $sig {
            AnySignal::Discrete($s) => $body,
            AnySignal::Continuous($s) => $body,
        }
    };
}

/// A sampled signal: integers `n_min..` or a grid `x0 + j * step`.
#[pyclass(name = "Signal", module = "pyalmostconv", frozen)]
struct PySignal {
    inner: AnySignal,
}

#[pymethods]
impl PySignal {
    #[staticmethod]
    #[pyo3(signature = (values, n_min = 0))]
    fn discrete(values: Vec<Complex64>, n_min: i64) -> PyResult<Self> {
        Ok(PySignal { inner: DiscreteSignal::new(n_min, values).py()?.into() })
    }

    #[staticmethod]
    #[pyo3(signature = (values, step, x0 = 0.0))]
    fn grid(values: Vec<Complex64>, step: f64, x0: f64) -> PyResult<Self> {
        Ok(PySignal { inner: ContinuousSignal::new(x0, step, values).py()?.into() })
    }

    /// Render a generator on the integers `n_min..=n_max`.
    #[staticmethod]
    fn render(py: Python<'_>, spec: &Bound<'_, PyAny>, n_min: i64, n_max: i64) -> PyResult<Self> {
        let spec = spec_from(py, spec)?;
        Ok(PySignal { inner: render_discrete(&spec, n_min, n_max).py()?.into() })
    }

    /// Render a generator on `count` grid points from `x0`.
    #[staticmethod]
    fn render_grid(py: Python<'_>, spec: &Bound<'_, PyAny>, x0: f64, step: f64, count: usize) -> PyResult<Self> {
        let spec = spec_from(py, spec)?;
        Ok(PySignal { inner: render_continuous(&spec, x0, step, count).py()?.into() })
    }

    #[staticmethod]
    fn read_csv(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(PySignal { inner: read_signal_file(&path).py()? })
    }

    fn to_csv(&self) -> PyResult<String> {
        signal_csv_string(&self.inner).py()
    }

    fn values(&self) -> Vec<Complex64> {
        self.inner.values().to_vec()
    }

    fn positions(&self) -> Vec<f64> {
        let lattice = self.inner.lattice();
        (0..self.inner.values().len()).map(|j| lattice.position(j)).collect()
    }

    #[getter]
    fn is_discrete(&self) -> bool {
        matches!(self.inner, AnySignal::Discrete(_))
    }

    #[getter]
    fn step(&self) -> f64 {
        self.inner.lattice().step()
    }

    #[getter]
    fn bound(&self) -> f64 {
        with_signal!(&self.inner, s => s.bound())
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }

    fn __repr__(&self) -> String {
        match self.inner.lattice() {
            Lattice::Integers { n_min } => format!("Signal(discrete, n_min={n_min}, len={})", self.__len__()),
            l => format!("Signal(grid, x0={}, step={}, len={})", l.position(0), l.step(), self.__len__()),
        }
    }
}

fn schedule_for<S: Sampled>(
    s: &S,
    k_min: Option<f64>,
    k_max: Option<f64>,
    growth: f64,
    side: Option<&str>,
) -> PyResult<WindowSchedule> {
    match (k_min, k_max) {
        (Some(lo), Some(hi)) => {
            let side = side.map(sidedness).transpose()?.unwrap_or_default();
            WindowSchedule::geometric(lo, hi, growth, side, s.lattice().is_discrete()).py()
        }
        (None, None) => default_schedule(s).py(),
        _ => Err(PyValueError::new_err("give both k_min and k_max, or neither")),
    }
}

/// Sliding Cesàro sweep and its verdict: `{"verdict": ..., "sweep": ...}`.
#[pyfunction]
#[pyo3(signature = (signal, k_min = None, k_max = None, growth = 2.0, sidedness = None, tol = 1e-2))]
fn cesaro<'py>(
    py: Python<'py>,
    signal: &PySignal,
    k_min: Option<f64>,
    k_max: Option<f64>,
    growth: f64,
    sidedness: Option<&str>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let (verdict, sweep) = with_signal!(&signal.inner, s => {
        let schedule = schedule_for(s, k_min, k_max, growth, sidedness)?;
        let sweep = cesaro_sweep(s, &schedule, s.lattice().step()).py()?;
        (ac_verdict(&sweep, tol), sweep)
    });
    to_py(py, &serde_json::json!({ "verdict": verdict, "sweep": sweep }))
}

/// Spectral-gap verdict over decreasing gap half-widths.
#[pyfunction]
#[pyo3(signature = (signal, deltas = None, tol = 1e-2))]
fn spectral<'py>(py: Python<'py>, signal: &PySignal, deltas: Option<Vec<f64>>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let verdict = with_signal!(&signal.inner, s => {
        let deltas = deltas.unwrap_or_else(|| default_delta_schedule(s));
        spectral_ac_verdict(s, &deltas, tol).py()?
    });
    to_py(py, &verdict)
}

/// Tapered DFT magnitudes with centred frequencies.
#[pyfunction]
#[pyo3(signature = (signal, taper = "hann", mask_threshold = None))]
fn spectrum<'py>(py: Python<'py>, signal: &PySignal, taper: &str, mask_threshold: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let taper = match taper {
        "hann" => Taper::Hann,
        "rectangular" => Taper::Rectangular,
        _ => return Err(PyValueError::new_err("taper must be hann or rectangular")),
    };
    let est = with_signal!(&signal.inner, s => dft_spectrum(s, taper, mask_threshold).py()?);
    to_py(py, &est)
}

/// Remove spectral content in `(-delta, delta)`; returns `(signal, residual)`.
#[pyfunction]
fn highpass(signal: &PySignal, delta: f64) -> PyResult<(PySignal, f64)> {
    Ok(match &signal.inner {
        AnySignal::Discrete(s) => {
            let h = highpass_project(s, delta).py()?;
            (PySignal { inner: h.filtered.into() }, h.residual)
        }
        AnySignal::Continuous(s) => {
            let h = highpass_project(s, delta).py()?;
            (PySignal { inner: h.filtered.into() }, h.residual)
        }
    })
}

/// Ordinary, weak* and Cesàro verdicts with their consistency check.
#[pyfunction]
#[pyo3(signature = (signal, tol = 1e-2))]
fn chain<'py>(py: Python<'py>, signal: &PySignal, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let config = ChainConfig { tol, ..ChainConfig::default() };
    let report = with_signal!(&signal.inner, s => tauberian::chain_report(s, &config).py()?);
    to_py(py, &report)
}

fn abel_radii(len: usize, bound: f64, eps_tail: f64, xs: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
    match xs {
        Some(xs) => Ok(xs),
        None => tauberian::default_abel_schedule(len, bound, eps_tail).py(),
    }
}

fn stream_bound(coeffs: &[Complex64], bound: Option<f64>) -> f64 {
    bound.unwrap_or_else(|| coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max))
}

/// Abel means `(1 - x) sum a_n x^n` along radii increasing to 1.
#[pyfunction]
#[pyo3(signature = (coeffs, xs = None, bound = None, eps_tail = 1e-12))]
fn abel_sweep<'py>(
    py: Python<'py>,
    coeffs: Vec<Complex64>,
    xs: Option<Vec<f64>>,
    bound: Option<f64>,
    eps_tail: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let bound = stream_bound(&coeffs, bound);
    let xs = abel_radii(coeffs.len(), bound, eps_tail, xs)?;
    to_py(py, &tauberian::abel_sweep(&coeffs, bound, &xs, eps_tail).py()?)
}

/// Laplace means `x int_0^T f(t) e^{-xt} dt` along abscissas decreasing to 0.
#[pyfunction]
#[pyo3(signature = (signal, xs = None, tail_tol = 1e-6))]
fn laplace_sweep<'py>(py: Python<'py>, signal: &PySignal, xs: Option<Vec<f64>>, tail_tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let AnySignal::Continuous(s) = &signal.inner else {
        return Err(PyValueError::new_err("Laplace sweeps need a grid signal"));
    };
    let xs = match xs {
        Some(xs) => xs,
        None => tauberian::default_laplace_schedule(s, tail_tol).py()?,
    };
    to_py(py, &tauberian::laplace_sweep(s, &xs, tail_tol).py()?)
}

/// Abel limit against the one-sided Cesàro limit for a stream bounded below
/// by `-lower`; raises `HypothesisViolated` otherwise.
#[pyfunction]
#[pyo3(signature = (coeffs, lower, xs = None, bound = None, eps_tail = 1e-12, tol = 1e-2))]
fn hardy_littlewood<'py>(
    py: Python<'py>,
    coeffs: Vec<Complex64>,
    lower: f64,
    xs: Option<Vec<f64>>,
    bound: Option<f64>,
    eps_tail: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let bound = stream_bound(&coeffs, bound);
    let xs = abel_radii(coeffs.len(), bound, eps_tail, xs)?;
    let report = tauberian::hardy_littlewood_discrete(&coeffs, bound, lower, &xs, eps_tail, tol).py()?;
    to_py(py, &report)
}

#[pyfunction]
fn zn_fourier(values: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(cyclic::zn_fourier(&cyclic_fn(values)?).values)
}

#[pyfunction]
fn zn_inverse(values: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(cyclic::zn_inverse(&cyclic_fn(values)?).values)
}

#[pyfunction]
fn circular_convolve(f: Vec<Complex64>, g: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(cyclic::circular_convolve(&cyclic_fn(f)?, &cyclic_fn(g)?).py()?.values)
}

/// `<f, psi> = sum_t f(-t) psi(t)`.
#[pyfunction]
fn pairing(f: Vec<Complex64>, psi: Vec<Complex64>) -> PyResult<Complex64> {
    cyclic::pairing(&cyclic_fn(f)?, &cyclic_fn(psi)?).py()
}

#[pyfunction]
#[pyo3(signature = (psi, tol = DEFAULT_TOL))]
fn spectrum_of(psi: Vec<Complex64>, tol: f64) -> PyResult<Vec<usize>> {
    Ok(cyclic::spectrum_of(&cyclic_fn(psi)?, tol))
}

/// Basis of the ideal of functions whose transform vanishes on `zero_set`.
#[pyfunction]
fn ideal_for(zero_set: Vec<usize>, n: usize) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(cyclic::ideal_for(&zero_set, n).py()?.basis.into_iter().map(|f| f.values).collect())
}

/// `{"basis": [[complex, ...], ...], "input_rank": r, "rank_deficient": bool}`.
#[pyfunction]
fn annihilator<'py>(py: Python<'py>, basis: Vec<Vec<Complex64>>, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let basis = basis.into_iter().map(cyclic_fn).collect::<PyResult<Vec<_>>>()?;
    let ann = cyclic::annihilator(&basis, n).py()?;
    let out = PyDict::new(py);
    out.set_item("basis", ann.basis.into_iter().map(|f| f.values).collect::<Vec<_>>())?;
    out.set_item("input_rank", ann.input_rank)?;
    out.set_item("rank_deficient", ann.rank_deficient)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (weights, tol = DEFAULT_TOL))]
fn invariant_mean_check<'py>(py: Python<'py>, weights: Vec<Complex64>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &cyclic::invariant_mean_check(&cyclic_fn(weights)?, tol).py()?)
}

#[pyfunction]
#[pyo3(signature = (psi, tol = DEFAULT_TOL))]
fn mean_annihilator_check<'py>(py: Python<'py>, psi: Vec<Complex64>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &cyclic::mean_annihilator_check(&cyclic_fn(psi)?, tol))
}

/// Seeded randomized identity checks on `Z_n`.
#[pyfunction]
#[pyo3(signature = (n, cases = 100, seed = 0, tol = DEFAULT_TOL))]
fn cyclic_suite<'py>(py: Python<'py>, n: usize, cases: usize, seed: u64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| cyclic::cyclic_suite(n, cases, seed, tol)).py()?;
    to_py(py, &report)
}

#[pymodule]
fn pyalmostconv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HypothesisViolated", m.py().get_type::<HypothesisViolated>())?;
    m.add_class::<PySignal>()?;
    m.add_function(wrap_pyfunction!(cesaro, m)?)?;
    m.add_function(wrap_pyfunction!(spectral, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(highpass, m)?)?;
    m.add_function(wrap_pyfunction!(chain, m)?)?;
    m.add_function(wrap_pyfunction!(abel_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_littlewood, m)?)?;
    m.add_function(wrap_pyfunction!(zn_fourier, m)?)?;
    m.add_function(wrap_pyfunction!(zn_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(circular_convolve, m)?)?;
    m.add_function(wrap_pyfunction!(pairing, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_of, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_for, m)?)?;
    m.add_function(wrap_pyfunction!(annihilator, m)?)?;
    m.add_function(wrap_pyfunction!(invariant_mean_check, m)?)?;
    m.add_function(wrap_pyfunction!(mean_annihilator_check, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_suite, m)?)?;
    Ok(())
}
