//! Python module `ptgup`.

use num_complex::Complex64;
use ptgup::model::{self, DerivedModes, ModelError, ModelParams, StateIndex};
use ptgup::oracle::{self, OracleError};
use ptgup::perturbation::{self, PerturbationError};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(ptgup, ModesUnavailableError, PyException);
create_exception!(ptgup, DegeneracyError, PyException);
create_exception!(ptgup, NumericalError, PyException);

fn model_err(e: ModelError) -> PyErr {
    match e {
        ModelError::InvalidParams(_) => PyValueError::new_err(e.to_string()),
        ModelError::ModesUnavailable => ModesUnavailableError::new_err(e.to_string()),
    }
}

fn perturbation_err(e: PerturbationError) -> PyErr {
    match e {
        PerturbationError::Model(m) => model_err(m),
        PerturbationError::Degeneracy { .. } => DegeneracyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn oracle_err(e: OracleError) -> PyErr {
    match e {
        OracleError::Model(m) => model_err(m),
        OracleError::Perturbation(p) => perturbation_err(p),
        OracleError::Convergence(_) | OracleError::TrackingAmbiguous { .. } => {
            NumericalError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn state((n1, n2): (usize, usize)) -> StateIndex {
    StateIndex::new(n1, n2)
}

/// Mass, trap frequencies, imaginary coupling `lam` and deformation `beta`.
#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyModelParams(ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (mass = 1.0, omega_x = 1.0, omega_y = 2.0, lam = 0.0, beta = 0.0))]
    fn new(mass: f64, omega_x: f64, omega_y: f64, lam: f64, beta: f64) -> PyResult<Self> {
        ModelParams::new(mass, omega_x, omega_y, lam, beta)
            .map(Self)
            .map_err(model_err)
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    #[getter]
    fn omega_x(&self) -> f64 {
        self.0.omega_x
    }

    #[getter]
    fn omega_y(&self) -> f64 {
        self.0.omega_y
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta
    }

    #[getter]
    fn lambda_crit(&self) -> f64 {
        self.0.lambda_crit()
    }

    #[getter]
    fn phase(&self) -> &'static str {
        model::classify_phase(&self.0).label()
    }

    fn with_lambda(&self, lam: f64) -> Self {
        Self(self.0.with_lambda(lam))
    }

    fn with_beta(&self, beta: f64) -> Self {
        Self(self.0.with_beta(beta))
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "ModelParams(mass={:?}, omega_x={:?}, omega_y={:?}, lam={:?}, beta={:?})",
            p.mass, p.omega_x, p.omega_y, p.lambda, p.beta
        )
    }
}

/// Normal-mode data derived from a parameter set.
#[pyclass(name = "NormalModes", frozen)]
struct PyNormalModes(DerivedModes);

#[pymethods]
impl PyNormalModes {
    #[getter]
    fn phase(&self) -> &'static str {
        self.0.phase.label()
    }

    #[getter]
    fn lambda_crit(&self) -> f64 {
        self.0.lambda_crit
    }

    #[getter]
    fn k_inv(&self) -> Option<Complex64> {
        self.0.k_inv
    }

    #[getter]
    fn c1(&self) -> PyResult<Complex64> {
        self.0.c1().map_err(model_err)
    }

    #[getter]
    fn c2(&self) -> PyResult<Complex64> {
        self.0.c2().map_err(model_err)
    }

    #[getter]
    fn alpha1_sq(&self) -> PyResult<Complex64> {
        self.0.alpha1_sq().map_err(model_err)
    }

    #[getter]
    fn alpha2_sq(&self) -> PyResult<Complex64> {
        self.0.alpha2_sq().map_err(model_err)
    }

    /// Rows of the complex orthogonal map `(x, y) → (X, Y)`.
    #[getter]
    fn rotation(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let r = self.0.rotation().map_err(model_err)?;
        Ok(r.matrix.iter().map(|row| row.to_vec()).collect())
    }

    fn energy(&self, state: (usize, usize)) -> PyResult<Complex64> {
        model::energy(&self.0, self::state(state)).map_err(model_err)
    }
}

#[pyfunction]
fn derive_modes(params: PyModelParams) -> PyResult<PyNormalModes> {
    model::derive_modes(&params.0).map(PyNormalModes).map_err(model_err)
}

#[pyfunction]
fn energy(params: PyModelParams, state: (usize, usize)) -> PyResult<Complex64> {
    let modes = model::derive_modes(&params.0).map_err(model_err)?;
    model::energy(&modes, self::state(state)).map_err(model_err)
}

/// First-order shift of `state` from the minimal-length deformation.
#[pyfunction]
fn delta_energy(params: PyModelParams, state: (usize, usize)) -> PyResult<Complex64> {
    let modes = model::derive_modes(&params.0).map_err(model_err)?;
    perturbation::delta_energy(&modes, self::state(state), &params.0).map_err(perturbation_err)
}

/// `⟨bra|H_I|ket⟩` in the normal-mode basis.
#[pyfunction]
fn matrix_element(params: PyModelParams, bra: (usize, usize), ket: (usize, usize)) -> PyResult<Complex64> {
    let modes = model::derive_modes(&params.0).map_err(model_err)?;
    perturbation::h_int_matrix_element(&modes, state(bra), state(ket), &params.0)
        .map_err(perturbation_err)
}

/// `{"delta_e", "pt_preserved", "terms": {(m1, m2): (element, M)}}`.
#[pyfunction]
fn correction<'py>(
    py: Python<'py>,
    params: PyModelParams,
    state: (usize, usize),
) -> PyResult<Bound<'py, PyDict>> {
    let modes = model::derive_modes(&params.0).map_err(model_err)?;
    let report = perturbation::wavefunction_correction(&modes, self::state(state), &params.0)
        .map_err(perturbation_err)?;
    let terms = PyDict::new(py);
    for (m, c) in &report.m_coefficients {
        terms.set_item((m.n1, m.n2), (report.matrix_elements[m], *c))?;
    }
    let out = PyDict::new(py);
    out.set_item("delta_e", report.delta_e)?;
    out.set_item("pt_preserved", report.pt_preserved)?;
    out.set_item("terms", terms)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (params, state, x, y, corrected = false))]
fn wavefunction(
    params: PyModelParams,
    state: (usize, usize),
    x: f64,
    y: f64,
    corrected: bool,
) -> PyResult<Complex64> {
    let modes = model::derive_modes(&params.0).map_err(model_err)?;
    perturbation::evaluate_wavefunction(&modes, self::state(state), x, y, corrected, &params.0)
        .map_err(perturbation_err)
}

/// `[(n1, n2, E, dE)]` for all states with `n1 + n2 <= nmax`.
#[pyfunction]
#[pyo3(signature = (params, nmax = 4))]
fn spectrum(params: PyModelParams, nmax: usize) -> PyResult<Vec<(usize, usize, Complex64, Complex64)>> {
    let modes = model::derive_modes(&params.0).map_err(model_err)?;
    StateIndex::up_to_total(nmax)
        .into_iter()
        .map(|s| {
            let e = model::energy(&modes, s).map_err(model_err)?;
            let de = perturbation::delta_energy(&modes, s, &params.0).map_err(perturbation_err)?;
            Ok((s.n1, s.n2, e, de))
        })
        .collect()
}

/// Eigenvalues of the truncated-basis Hamiltonian, sorted by (Re, Im).
#[pyfunction]
#[pyo3(signature = (params, cutoff = oracle::DEFAULT_CUTOFF))]
fn numeric_spectrum(py: Python<'_>, params: PyModelParams, cutoff: usize) -> PyResult<Vec<Complex64>> {
    py.detach(|| {
        let h = oracle::build_hamiltonian(&params.0, cutoff)?;
        oracle::diagonalize(&h)
    })
    .map_err(oracle_err)
}

/// Largest deviation between closed-form and numeric levels.
#[pyfunction]
#[pyo3(signature = (params, cutoff = oracle::DEFAULT_CUTOFF, nmax = 4))]
fn compare_spectrum<'py>(
    py: Python<'py>,
    params: PyModelParams,
    cutoff: usize,
    nmax: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cmp = py
        .detach(|| oracle::compare_spectrum(&params.0, cutoff, nmax))
        .map_err(oracle_err)?;
    let out = PyDict::new(py);
    out.set_item("max_abs_deviation", cmp.max_abs_deviation)?;
    out.set_item("max_rel_deviation", cmp.max_rel_deviation)?;
    out.set_item("compared", cmp.compared)?;
    let pairs: Vec<_> = cmp
        .pairs
        .iter()
        .map(|p| ((p.state.n1, p.state.n2), p.analytic, p.numeric))
        .collect();
    out.set_item("pairs", pairs)?;
    Ok(out)
}

/// Finite-difference `dE/dβ` of the tracked level at β = 0.
#[pyfunction]
#[pyo3(signature = (params, state, cutoff = oracle::DEFAULT_CUTOFF, step = 1e-5))]
fn beta_slope(
    py: Python<'_>,
    params: PyModelParams,
    state: (usize, usize),
    cutoff: usize,
    step: f64,
) -> PyResult<Complex64> {
    py.detach(|| oracle::beta_slope(&params.0, self::state(state), cutoff, step))
        .map_err(oracle_err)
}

#[pymodule]
#[pyo3(name = "ptgup")]
fn ptgup_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyNormalModes>()?;
    m.add("ModesUnavailableError", m.py().get_type::<ModesUnavailableError>())?;
    m.add("DegeneracyError", m.py().get_type::<DegeneracyError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(derive_modes, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(delta_energy, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_element, m)?)?;
    m.add_function(wrap_pyfunction!(correction, m)?)?;
    m.add_function(wrap_pyfunction!(wavefunction, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(numeric_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(compare_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(beta_slope, m)?)?;
    Ok(())
}
