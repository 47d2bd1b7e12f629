//! Python bindings. Exact inputs (coefficients, couplings, seeds) are passed
//! as decimal or `p/q` strings; high-precision outputs come back as decimal
//! strings so no digits are lost to `float`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict, PyList, PyString};

use riccati_pade::hankel::{hankel_value, HankelIndex, HankelMethod};
use riccati_pade::models::{self, QesLabel};
use riccati_pade::potential::{parse_rational, Parity, PolynomialPotential};
use riccati_pade::precision::PrecisionPolicy;
use riccati_pade::scan::{scan_three_well as scan, ScanSettings};
use riccati_pade::series::series_coefficients;
use riccati_pade::solver::{self, converged_eigenvalue, RootSequence, Tracker};
use riccati_pade::symbolic::{symbolic_report as report, ReportFormat};
use riccati_pade::text::{complex_parts, decimal_string, parse_complex, parse_grid, rational_string, shown_digits};
use riccati_pade::Error;

create_exception!(riccati_pade, ConvergenceError, PyRuntimeError);
create_exception!(riccati_pade, PrecisionError, PyRuntimeError);

fn py_err(err: Error) -> PyErr {
    let msg = err.to_string();
    match err.root_cause() {
        Error::NoConvergence { .. } | Error::NotConverged { .. } | Error::DegenerateFit(_) => ConvergenceError::new_err(msg),
        Error::PrecisionExhausted { .. } => PrecisionError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn parity(name: &str) -> PyResult<Parity> {
    name.parse().map_err(py_err)
}

fn policy(digits: u32, max_bits: Option<u32>) -> PyResult<PrecisionPolicy> {
    let mut policy = PrecisionPolicy::for_digits(digits);
    if let Some(bits) = max_bits {
        policy = policy.with_max_bits(bits);
    }
    policy.validate().map_err(py_err)?;
    Ok(policy)
}

fn bits_digits(bits: u32) -> usize {
    (f64::from(bits) * std::f64::consts::LOG10_2).floor() as usize
}

/// Even polynomial potential `V(x) = sum_j v_j x^(2j)`, built from
/// `"v1,v2,..."` or a list of numbers.
#[pyclass(name = "Potential", frozen)]
struct PyPotential {
    inner: PolynomialPotential,
}

#[pymethods]
impl PyPotential {
    #[new]
    fn new(coeffs: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = if let Ok(text) = coeffs.cast::<PyString>() {
            PolynomialPotential::parse(text.to_str()?)
        } else {
            let mut values = Vec::new();
            for item in coeffs.try_iter()? {
                values.push(parse_rational(&item?.str()?.to_string()).map_err(py_err)?);
            }
            PolynomialPotential::new(values)
        };
        Ok(PyPotential { inner: inner.map_err(py_err)? })
    }

    /// `x^2 + lam x^4`.
    #[staticmethod]
    fn quartic(lam: &str) -> PyResult<Self> {
        let lam = parse_rational(lam).map_err(py_err)?;
        Ok(PyPotential { inner: models::quartic(&lam).map_err(py_err)? })
    }

    #[staticmethod]
    fn pure_quartic() -> Self {
        PyPotential { inner: models::pure_quartic() }
    }

    /// `x^2 (1 - (g x)^(2k))^2`.
    #[staticmethod]
    #[pyo3(signature = (g, k = 1))]
    fn three_well(g: &str, k: u32) -> PyResult<Self> {
        let g = parse_rational(g).map_err(py_err)?;
        Ok(PyPotential { inner: models::three_well(&g, k).map_err(py_err)?.potential })
    }

    /// Potential of a catalogued exactly solvable model (`"V1"`..`"V4"`).
    #[staticmethod]
    fn qes(label: &str) -> PyResult<Self> {
        let label: QesLabel = label.parse().map_err(py_err)?;
        Ok(PyPotential { inner: models::qes_model(label).potential })
    }

    /// Coefficients `v_1, v_2, ...` as exact strings.
    fn coefficients(&self) -> Vec<String> {
        self.inner.coefficients().iter().map(rational_string).collect()
    }

    /// `V(x)` exactly.
    fn eval(&self, x: &str) -> PyResult<String> {
        Ok(rational_string(&self.inner.eval(&parse_rational(x).map_err(py_err)?)))
    }

    #[getter]
    fn is_confining(&self) -> bool {
        self.inner.is_confining()
    }

    fn __repr__(&self) -> String {
        format!("Potential('{}')", self.inner.to_list_string())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Converged root with its certification.
#[pyclass(name = "Eigenvalue", frozen, get_all)]
struct PyEigenvalue {
    real: String,
    imag: String,
    certified_digits: u32,
    dimension: usize,
    working_bits: u32,
    diffs: Vec<String>,
}

#[pymethods]
impl PyEigenvalue {
    fn __complex__<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyComplex>> {
        let part = |s: &str| s.parse::<f64>().map_err(|e| PyValueError::new_err(e.to_string()));
        Ok(PyComplex::from_doubles(py, part(&self.real)?, part(&self.imag)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Eigenvalue(real='{}', imag='{}', certified_digits={}, dimension={})",
            self.real, self.imag, self.certified_digits, self.dimension
        )
    }
}

fn eigenvalue(sequence: &RootSequence, target: u32) -> PyResult<PyEigenvalue> {
    let (last, certified) = converged_eigenvalue(sequence, target).map_err(py_err)?;
    let (real, imag) = complex_parts(&last.value, shown_digits(certified));
    Ok(PyEigenvalue {
        real,
        imag,
        certified_digits: certified,
        dimension: last.index.dimension,
        working_bits: last.working_bits,
        diffs: sequence.diffs.iter().map(|d| decimal_string(d, 6)).collect(),
    })
}

/// Track the root nearest `seed` over increasing dimension until `digits`
/// digits are certified.
#[pyfunction]
#[pyo3(signature = (potential, seed, parity = "even", digits = 20, d_min = 2, d_max = 120, offset = 0, max_bits = None))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    potential: &PyPotential,
    seed: &str,
    parity: &str,
    digits: u32,
    d_min: usize,
    d_max: usize,
    offset: usize,
    max_bits: Option<u32>,
) -> PyResult<PyEigenvalue> {
    let parity = self::parity(parity)?;
    let policy = policy(digits, max_bits)?;
    let seed = parse_complex(seed, policy.working_bits).map_err(py_err)?;
    let v = &potential.inner;
    let sequence = py
        .detach(|| Tracker::new(offset, d_min, d_max).run(v, parity, &seed, &policy))
        .map_err(py_err)?;
    eigenvalue(&sequence, digits)
}

/// `H_D^d(E)` as `(re, im)` decimal strings.
#[pyfunction]
#[pyo3(signature = (potential, energy, dimension, offset = 0, parity = "even", bits = 256, method = "condensation"))]
fn hankel_determinant(
    potential: &PyPotential,
    energy: &str,
    dimension: usize,
    offset: usize,
    parity: &str,
    bits: u32,
    method: &str,
) -> PyResult<(String, String)> {
    let method = match method {
        "condensation" => HankelMethod::Condensation,
        "direct" => HankelMethod::Direct,
        "symbolic" => HankelMethod::SymbolicEvaluated,
        other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
    };
    let policy = PrecisionPolicy::for_digits(0).with_working_bits(bits);
    let energy = parse_complex(energy, bits).map_err(py_err)?;
    let index = HankelIndex::new(dimension, offset).map_err(py_err)?;
    let h = hankel_value(&potential.inner, self::parity(parity)?, &energy, index, method, &policy).map_err(py_err)?;
    let digits = bits_digits(bits);
    Ok((decimal_string(h.value.real(), digits), decimal_string(h.value.imag(), digits)))
}

/// Taylor coefficients `f_0..f_n` of the regularized logarithmic derivative.
#[pyfunction]
#[pyo3(signature = (potential, energy, n, parity = "even", bits = 256))]
fn series(potential: &PyPotential, energy: &str, n: usize, parity: &str, bits: u32) -> PyResult<Vec<(String, String)>> {
    let policy = PrecisionPolicy::for_digits(0).with_working_bits(bits);
    let energy = parse_complex(energy, bits).map_err(py_err)?;
    let coeffs = series_coefficients(&potential.inner, self::parity(parity)?, &energy, n, &policy).map_err(py_err)?;
    let digits = bits_digits(bits);
    Ok(coeffs
        .values
        .iter()
        .map(|f| (decimal_string(f.real(), digits), decimal_string(f.imag(), digits)))
        .collect())
}

/// Real parts of the `d = 0` and `d = 1` roots at dimension `D`, which
/// bracket the ground state of quartic oscillators.
#[pyfunction]
#[pyo3(signature = (potential, dimension, parity = "even", digits = 20))]
fn bound_pair(py: Python<'_>, potential: &PyPotential, dimension: usize, parity: &str, digits: u32) -> PyResult<(String, String)> {
    let parity = self::parity(parity)?;
    let policy = policy(digits, None)?;
    let v = &potential.inner;
    let (lo, hi) = py.detach(|| solver::bound_pair(v, parity, dimension, &policy)).map_err(py_err)?;
    let shown = shown_digits(digits);
    Ok((decimal_string(lo.re(), shown), decimal_string(hi.re(), shown)))
}

/// Least-squares fit `log10 |E^[D] - E^[D-1]| = a + b D` over the trailing
/// `fit_fraction` of the sequence.
#[pyfunction]
#[pyo3(signature = (potential, seed, parity = "even", d_min = 10, d_max = 40, offset = 0, fit_fraction = 0.5))]
#[allow(clippy::too_many_arguments)]
fn slope<'py>(
    py: Python<'py>,
    potential: &PyPotential,
    seed: &str,
    parity: &str,
    d_min: usize,
    d_max: usize,
    offset: usize,
    fit_fraction: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let parity = self::parity(parity)?;
    let policy = policy(0, None)?;
    let seed = parse_complex(seed, policy.working_bits).map_err(py_err)?;
    let v = &potential.inner;
    let fit = py
        .detach(|| {
            let sequence = Tracker::new(offset, d_min, d_max).run_to_end().run(v, parity, &seed, &policy)?;
            solver::convergence_slope(&sequence, fit_fraction)
        })
        .map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("a", fit.intercept)?;
    out.set_item("b", fit.slope)?;
    out.set_item("fit_range", fit.fit_range)?;
    out.set_item("slope_error", fit.slope_error)?;
    out.set_item("rms_residual", fit.rms_residual)?;
    out.set_item("points", fit.points)?;
    Ok(out)
}

/// Bound state and even resonance of the three-well family for each coupling
/// in `couplings` (`"0.15,0.2"`, `"0.1:0.3:0.05"` or a list). A coupling that
/// fails yields a row with an `error` entry.
#[pyfunction]
#[pyo3(signature = (couplings, k = 1, digits = 12))]
fn scan_three_well<'py>(py: Python<'py>, couplings: &Bound<'py, PyAny>, k: u32, digits: u32) -> PyResult<Bound<'py, PyList>> {
    let grid = if let Ok(text) = couplings.cast::<PyString>() {
        parse_grid(text.to_str()?).map_err(py_err)?
    } else {
        let mut grid = Vec::new();
        for item in couplings.try_iter()? {
            grid.push(parse_rational(&item?.str()?.to_string()).map_err(py_err)?);
        }
        grid
    };
    let settings = ScanSettings::new(k, policy(digits, None)?);
    let rows = py.detach(|| scan(&grid, &settings));
    let out = PyList::empty(py);
    for (g, row) in grid.iter().zip(rows) {
        let dict = PyDict::new(py);
        dict.set_item("g", rational_string(g))?;
        match row {
            Ok(p) => {
                let shown = shown_digits(digits);
                let (re, im) = complex_parts(&p.resonance, shown);
                dict.set_item("E_bs", decimal_string(p.bound.re(), shown))?;
                dict.set_item("ReE_res", re)?;
                dict.set_item("ImE_res_abs", im.trim_start_matches('-'))?;
                dict.set_item("scaled_width", decimal_string(&p.scaled_width, digits as usize))?;
                dict.set_item("gap", decimal_string(&p.gap, digits as usize))?;
            }
            Err(err) => dict.set_item("error", err.to_string())?,
        }
        out.append(dict)?;
    }
    Ok(out)
}

/// Exact `H_D^d(E)` for a catalogued model (`model="V1"`) or a potential,
/// rendered as `"json"` or `"text"`. For a catalogued model the exact energy
/// is deflated unless `root` is given; `root="none"` skips deflation.
#[pyfunction]
#[pyo3(signature = (dimension, model = None, potential = None, offset = 0, parity = "even", root = None, format = "json"))]
#[allow(clippy::too_many_arguments)]
fn symbolic(
    dimension: usize,
    model: Option<&str>,
    potential: Option<&PyPotential>,
    offset: usize,
    parity: &str,
    root: Option<&str>,
    format: &str,
) -> PyResult<String> {
    let format: ReportFormat = format.parse().map_err(py_err)?;
    // outer None: not given; Some(None): explicitly no deflation
    let root = match root {
        None => None,
        Some("none") => Some(None),
        Some(r) => Some(Some(parse_rational(r).map_err(py_err)?)),
    };
    let index = HankelIndex::new(dimension, offset).map_err(py_err)?;
    let rendered = match (model, potential) {
        (Some(label), None) => {
            let m = models::qes_model(label.parse().map_err(py_err)?);
            let root = root.unwrap_or(Some(m.exact_energy.clone()));
            report(m.label.name(), &m.potential, m.parity, index, root.as_ref())
        }
        (None, Some(p)) => report(&p.inner.to_string(), &p.inner, self::parity(parity)?, index, root.flatten().as_ref()),
        _ => return Err(PyValueError::new_err("give exactly one of `model` and `potential`")),
    }
    .map_err(py_err)?;
    Ok(rendered.render(format))
}

/// Labels of the catalogued exactly solvable models.
#[pyfunction]
fn qes_models() -> Vec<&'static str> {
    QesLabel::ALL.iter().map(|l| l.name()).collect()
}

#[pymodule]
#[pyo3(name = "riccati_pade")]
fn bindings(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotential>()?;
    m.add_class::<PyEigenvalue>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_determinant, m)?)?;
    m.add_function(wrap_pyfunction!(series, m)?)?;
    m.add_function(wrap_pyfunction!(bound_pair, m)?)?;
    m.add_function(wrap_pyfunction!(slope, m)?)?;
    m.add_function(wrap_pyfunction!(scan_three_well, m)?)?;
    m.add_function(wrap_pyfunction!(symbolic, m)?)?;
    m.add_function(wrap_pyfunction!(qes_models, m)?)?;
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add("PrecisionError", m.py().get_type::<PrecisionError>())?;
    Ok(())
}
