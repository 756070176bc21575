//! Python bindings: fitting, model evaluation, pole reports, Laurent
//! coefficients and the PDE singularity tracker.

use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use polefit_core::activation::PhiKind;
use polefit_core::error::Error;
use polefit_core::laurent::{self, ContourSamples};
use polefit_core::network::{ComponentSign, Rect};
use polefit_core::pdelab::{self, CoefficientSource, PdeConfig};
use polefit_core::pipeline::{self, FitConfig};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Validation(_) | Error::EmptySamples | Error::DimensionMismatch(_)
        | Error::Schema { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// A fitted rational-activation network model.
#[pyclass]
struct Model {
    inner: pipeline::Model,
}

#[pymethods]
impl Model {
    /// Evaluate the network at a complex point.
    fn eval(&self, z: C64) -> PyResult<C64> {
        self.inner.eval(z).map_err(to_py_err)
    }

    /// Evaluate the underlying rational form p/q.
    fn eval_rational(&self, z: C64) -> PyResult<C64> {
        self.inner.eval_rational(z).map_err(to_py_err)
    }

    /// Per-neuron pole estimates as (sign, neuron_index, location) tuples.
    fn poles(&self) -> Vec<(String, usize, C64)> {
        self.inner
            .pole_report
            .iter()
            .filter(|p| !p.at_infinity)
            .map(|p| {
                (
                    match p.component_sign {
                        ComponentSign::Plus => "plus".to_string(),
                        ComponentSign::Minus => "minus".to_string(),
                    },
                    p.neuron_index,
                    p.location,
                )
            })
            .collect()
    }

    /// Single-linkage clusters of the pole estimates: (centroid, multiplicity).
    #[pyo3(signature = (radius = 1e-6))]
    fn clustered_poles(&self, radius: f64) -> PyResult<Vec<(C64, usize)>> {
        self.inner.clustered_poles(radius).map_err(to_py_err)
    }

    /// Detected degrees as ((N_plus, M_plus), (N_minus, M_minus)); absent
    /// components report None.
    fn degrees(&self) -> (Option<(usize, usize)>, Option<(usize, usize)>) {
        let d = |c: &Option<polefit_core::network::NetworkComponent>| {
            c.as_ref().map(|cc| (cc.degrees.n_deg, cc.degrees.m_deg))
        };
        (d(&self.inner.plus), d(&self.inner.minus))
    }

    fn save(&self, path: &str) -> PyResult<()> {
        pipeline::save_model(&self.inner, std::path::Path::new(path)).map_err(to_py_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Model> {
        pipeline::load_model(std::path::Path::new(path))
            .map(|inner| Model { inner })
            .map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        let fmt = |c: &Option<polefit_core::network::NetworkComponent>| match c {
            Some(cc) => format!("({}, {})", cc.degrees.n_deg, cc.degrees.m_deg),
            None => "absent".to_string(),
        };
        format!(
            "Model(plus: {}, minus: {}, poles: {})",
            fmt(&self.inner.plus),
            fmt(&self.inner.minus),
            self.inner.pole_report.len()
        )
    }
}

fn make_config(
    rho: f64,
    n1: usize,
    m1: usize,
    tol: f64,
    seed: u64,
    z0: C64,
    phi: &str,
    rect: (f64, f64, f64, f64),
) -> PyResult<FitConfig> {
    let mut cfg = FitConfig::new(rho, n1, m1);
    cfg.tol = tol;
    cfg.seed = seed;
    cfg.z0 = z0;
    cfg.phi = match phi {
        "cos" => PhiKind::Cos,
        "one" => PhiKind::One,
        other => return Err(PyValueError::new_err(format!("unknown phi '{other}'"))),
    };
    cfg.rect = Rect { a: rect.0, b: rect.1, c: rect.2, d: rect.3 };
    Ok(cfg)
}

/// Fit a model from function values at 2n equispaced points on |z| = rho.
#[pyfunction]
#[pyo3(signature = (values, rho, n1, m1, tol = 1e-14, seed = 0, z0 = None, phi = "cos",
                    rect = (-1.0, -0.5, 0.5, 1.0)))]
#[allow(clippy::too_many_arguments)]
fn fit(
    values: Vec<C64>,
    rho: f64,
    n1: usize,
    m1: usize,
    tol: f64,
    seed: u64,
    z0: Option<C64>,
    phi: &str,
    rect: (f64, f64, f64, f64),
) -> PyResult<Model> {
    let samples = ContourSamples::new(rho, values).map_err(to_py_err)?;
    let cfg = make_config(rho, n1, m1, tol, seed, z0.unwrap_or(C64::new(-1.2, 0.0)), phi, rect)?;
    pipeline::fit(&samples, &cfg)
        .map(|inner| Model { inner })
        .map_err(to_py_err)
}

/// The contour points rho * exp(2 pi i j / (2 n)), j = 0..2n-1, at which
/// `fit` and `laurent_coefficients` expect samples.
#[pyfunction]
fn contour_points(rho: f64, n: usize) -> Vec<C64> {
    (0..2 * n)
        .map(|j| C64::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / (2 * n) as f64))
        .collect()
}

/// Laurent coefficients c_k, k = -n..n, as a list ordered by k (offset n).
#[pyfunction]
fn laurent_coefficients(values: Vec<C64>, rho: f64) -> PyResult<Vec<C64>> {
    let samples = ContourSamples::new(rho, values).map_err(to_py_err)?;
    let w = laurent::compute_coefficients(&samples).map_err(to_py_err)?;
    Ok(w.coeffs().to_vec())
}

/// The extended blow-up solution u(z, t) of the spectral-lab PDE.
#[pyfunction]
#[pyo3(signature = (z, t, eta = 1.0, nu = 0.1, beta_exp = -0.25))]
fn pde_exact_solution(z: C64, t: f64, eta: f64, nu: f64, beta_exp: f64) -> C64 {
    let cfg = PdeConfig { eta, nu, beta: beta_exp.exp(), ..PdeConfig::default() };
    pdelab::exact_solution(&cfg, z, t)
}

/// Track the PDE solution's complex singularities at the given times.
/// Returns rows (t, w11, b11, [(sign, s, error), ...]).
#[pyfunction]
#[pyo3(signature = (times, eta = 1.0, nu = 0.1, beta_exp = -0.25, n = 40, tol = 1e-3,
                    z0 = None, seed = 42, source = "exact"))]
#[allow(clippy::too_many_arguments)]
fn pde_track(
    times: Vec<f64>,
    eta: f64,
    nu: f64,
    beta_exp: f64,
    n: usize,
    tol: f64,
    z0: Option<C64>,
    seed: u64,
    source: &str,
) -> PyResult<Vec<(f64, Option<C64>, Option<C64>, Vec<(String, C64, f64)>)>> {
    let cfg = PdeConfig {
        eta,
        nu,
        beta: beta_exp.exp(),
        n,
        times,
        ..PdeConfig::default()
    };
    let mut fit_cfg = FitConfig::new(1.0, 10, 10);
    fit_cfg.tol = tol;
    fit_cfg.z0 = z0.unwrap_or(C64::new(-1.2, 0.0));
    fit_cfg.seed = seed;
    let src = match source {
        "exact" => CoefficientSource::Exact,
        "ode" => CoefficientSource::Ode,
        other => return Err(PyValueError::new_err(format!("unknown source '{other}'"))),
    };
    let rep = pdelab::trajectory_report(&cfg, &fit_cfg, src).map_err(to_py_err)?;
    Ok(rep
        .rows
        .into_iter()
        .map(|r| {
            let tracks = r
                .track
                .estimates
                .iter()
                .map(|e| {
                    (
                        match e.sign {
                            ComponentSign::Plus => "plus".to_string(),
                            ComponentSign::Minus => "minus".to_string(),
                        },
                        e.s,
                        e.error,
                    )
                })
                .collect();
            (r.t, r.w11_plus, r.b11_plus, tracks)
        })
        .collect())
}

/// The 40-pole benchmark function used by the demo.
#[pyfunction]
fn benchmark_function(z: C64) -> C64 {
    polefit_core::funcs::benchmark_function(z)
}

#[pymodule]
fn polefit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(contour_points, m)?)?;
    m.add_function(wrap_pyfunction!(laurent_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(pde_exact_solution, m)?)?;
    m.add_function(wrap_pyfunction!(pde_track, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark_function, m)?)?;
    Ok(())
}
