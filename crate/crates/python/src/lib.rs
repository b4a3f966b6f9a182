//! Python bindings for `ed3`.
//!
//! Vectors cross the boundary as `(t, x, y)` tuples and field strengths as
//! `(e1, e2, h)` tuples. Library errors become `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ed3::dynamics::{fit_effective_acceleration, simulate_partial, ExternalField, SimConfig};
use ed3::field::{field, FieldQuery};
use ed3::helium::{vorticity_to_charge, FilmParameters};
use ed3::selfforce::{self_force, PrehistoryPolicy};
use ed3::validation::run_suite;
use ed3::worldline::{CircularWorldline, Direction, HyperbolicWorldline, StaticWorldline, UniformWorldline, Worldline};
use ed3::{FieldStrength, MVec3};

type Vec3 = (f64, f64, f64);

fn err(e: ed3::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vec3(v: MVec3) -> Vec3 {
    (v.t, v.x, v.y)
}

fn make_worldline(kind: &str, params: &[f64]) -> PyResult<Box<dyn Worldline>> {
    let arity = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("worldline {kind} takes {n} parameters, got {}", params.len())))
        }
    };
    Ok(match kind {
        "static" => {
            arity(0)?;
            Box::new(StaticWorldline::new(MVec3::ZERO))
        }
        "uniform" => {
            arity(2)?;
            let (vx, vy) = (params[0], params[1]);
            let v2 = vx * vx + vy * vy;
            if v2.is_nan() || v2 >= 1.0 {
                return Err(PyValueError::new_err("uniform worldline needs |v| < 1"));
            }
            let g = 1.0 / (1.0 - v2).sqrt();
            Box::new(UniformWorldline::new(MVec3::ZERO, MVec3::new(g, g * vx, g * vy)).map_err(err)?)
        }
        "hyperbolic" => {
            arity(1)?;
            Box::new(HyperbolicWorldline::new(params[0]).map_err(err)?)
        }
        "circular" => {
            arity(2)?;
            Box::new(CircularWorldline::new(params[0], params[1], 0.0).map_err(err)?)
        }
        other => return Err(PyValueError::new_err(format!("unknown worldline {other:?}"))),
    })
}

/// Field strength `(e1, e2, h)` of a charge on a standard worldline at `x = (t, x, y)`.
///
/// `kind` is static, uniform `[vx, vy]`, hyperbolic `[accel]` or circular `[radius, omega]`.
#[pyfunction]
#[pyo3(signature = (kind, params, x, charge = 1.0, advanced = false, quad_tol = 1e-10))]
fn field_at(kind: &str, params: Vec<f64>, x: Vec3, charge: f64, advanced: bool, quad_tol: f64) -> PyResult<Vec3> {
    let w = make_worldline(kind, &params)?;
    let direction = if advanced { Direction::Advanced } else { Direction::Retarded };
    let q = FieldQuery { x: MVec3::new(x.0, x.1, x.2), charge, direction, quad_tol };
    let f = field(w.as_ref(), &q).map_err(err)?.field;
    Ok((f.e1, f.e2, f.h))
}

/// Self-force and mass rate on a standard worldline at proper time `tau`,
/// with the history before `tau_start` dropped.
#[pyfunction]
#[pyo3(signature = (kind, params, tau, charge = 1.0, tau_start = 0.0))]
fn self_force_at(kind: &str, params: Vec<f64>, tau: f64, charge: f64, tau_start: f64) -> PyResult<(Vec3, f64)> {
    let w = make_worldline(kind, &params)?;
    let r = self_force(w.as_ref(), tau, charge, PrehistoryPolicy::TruncateAt(tau_start)).map_err(err)?;
    Ok((vec3(r.force), r.mass_rate))
}

/// Integrate a charge starting at rest in a constant electric field along x
/// that is on for `tau_on <= tau < tau_off`.
///
/// Returns a dict of per-node lists. A numerical failure keeps the partial
/// trace and sets `error`.
#[pyfunction]
#[pyo3(signature = (charge, mass, e_field, h, tau_end, tau_on = 0.0, tau_off = f64::INFINITY, selfforce = true))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    charge: f64,
    mass: f64,
    e_field: f64,
    h: f64,
    tau_end: f64,
    tau_on: f64,
    tau_off: f64,
    selfforce: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let ext = ExternalField::new(FieldStrength::new(e_field, 0.0, 0.0), tau_on, tau_off).map_err(err)?;
    let mut cfg = SimConfig::new(charge, mass, Some(ext), h, tau_end);
    cfg.self_force = selfforce;
    cfg.validate().map_err(err)?;
    let (trace, failure) = py.detach(|| simulate_partial(&cfg));
    let out = PyDict::new(py);
    out.set_item("tau", trace.states.iter().map(|s| s.tau).collect::<Vec<_>>())?;
    out.set_item("z", trace.states.iter().map(|s| vec3(s.z)).collect::<Vec<_>>())?;
    out.set_item("u", trace.states.iter().map(|s| vec3(s.u)).collect::<Vec<_>>())?;
    out.set_item("m", trace.states.iter().map(|s| s.m).collect::<Vec<_>>())?;
    out.set_item("self_force", trace.diagnostics.iter().map(|d| vec3(d.self_force)).collect::<Vec<_>>())?;
    out.set_item("acceleration", trace.proper_acceleration())?;
    out.set_item("error", failure.map(|e| e.to_string()))?;
    Ok(out)
}

/// Least-squares acceleration fit `(mean, slope, max_deviation)` of a fresh
/// simulation over `window`.
#[pyfunction]
#[pyo3(signature = (charge, mass, e_field, h, tau_end, window))]
fn fitted_acceleration(py: Python<'_>, charge: f64, mass: f64, e_field: f64, h: f64, tau_end: f64, window: (f64, f64)) -> PyResult<Vec3> {
    let cfg = SimConfig::new(charge, mass, Some(ExternalField::electric_x(e_field)), h, tau_end);
    let fit = py
        .detach(|| ed3::dynamics::simulate(&cfg).and_then(|t| fit_effective_acceleration(&t, window)))
        .map_err(err)?;
    Ok((fit.mean, fit.slope, fit.max_deviation))
}

/// Run a validation suite; returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (suite = "all"))]
fn validate(py: Python<'_>, suite: &str) -> PyResult<(bool, String)> {
    let suite = suite.parse().map_err(err)?;
    let report = py.detach(|| run_suite(suite));
    let json = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((report.passed, json))
}

/// Effective charge of a film vortex with winding `q_v`.
#[pyfunction]
fn vortex_charge(q_v: i32, kappa: f64, m_atom: f64, rho_bar: f64, hbar: f64) -> PyResult<f64> {
    let p = FilmParameters::new(kappa, m_atom, rho_bar, hbar).map_err(err)?;
    Ok(vorticity_to_charge(q_v, &p))
}

#[pymodule]
pub fn ed3py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(field_at, m)?)?;
    m.add_function(wrap_pyfunction!(self_force_at, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(fitted_acceleration, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(vortex_charge, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
