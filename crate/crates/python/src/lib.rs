//! Python bindings for the valdist numerical core.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use valdist_core as core;
use valdist_core::appell::{self, MatchPoints};
use valdist_core::herglotz::{self as hg, IntervalUnion, Meromorphic, RationalHerglotz};
use valdist_core::value_distribution::{self as vd, BandSpec, LambdaFn, Target};
use valdist_core::{IntegratorConfig, Interpolation, PotentialTable};

create_exception!(
    valdist,
    NumericalError,
    PyRuntimeError,
    "A numerical routine failed to converge or match."
);

fn to_py(e: core::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn integrator(rel_tol: f64, abs_tol: f64) -> PyResult<IntegratorConfig> {
    let cfg = IntegratorConfig::with_tolerances(rel_tol, abs_tol);
    cfg.validate().py()?;
    Ok(cfg)
}

fn union(intervals: Vec<(Option<f64>, Option<f64>)>) -> PyResult<IntervalUnion> {
    IntervalUnion::new(
        intervals
            .into_iter()
            .map(|(lo, hi)| (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))),
    )
    .py()
}

fn rows(table: Vec<vd::TableRow>) -> Vec<(f64, f64, f64, f64)> {
    table
        .into_iter()
        .map(|r| (r.x, r.empirical, r.limit, r.error))
        .collect()
}

/// A potential q on [a, inf).
#[pyclass(frozen, module = "valdist")]
struct Potential(core::Potential);

#[pymethods]
impl Potential {
    #[staticmethod]
    #[pyo3(signature = (a = 0.0))]
    fn zero(a: f64) -> PyResult<Self> {
        Ok(Self(
            core::Potential::new(core::PotentialKind::Zero, a).py()?,
        ))
    }

    /// q(x) = (nu^2 - 1/4) / x^2.
    #[staticmethod]
    #[pyo3(signature = (nu, a = 1.0))]
    fn inverse_square(nu: f64, a: f64) -> PyResult<Self> {
        Ok(Self(core::Potential::inverse_square(nu, a).py()?))
    }

    /// Interpolated table; `interpolation` is "linear" or "monotone_cubic".
    #[staticmethod]
    #[pyo3(signature = (x, q, a = None, interpolation = "monotone_cubic"))]
    fn tabulated(x: Vec<f64>, q: Vec<f64>, a: Option<f64>, interpolation: &str) -> PyResult<Self> {
        let interp = match interpolation {
            "linear" => Interpolation::Linear,
            "monotone_cubic" => Interpolation::MonotoneCubic,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown interpolation {other:?}"
                )))
            }
        };
        let a = a.or_else(|| x.first().copied()).unwrap_or(0.0);
        let table = PotentialTable::new(x, q, interp).py()?;
        Ok(Self(core::Potential::tabulated(table, a).py()?))
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    fn q(&self, x: f64) -> f64 {
        self.0.q(x)
    }

    fn __repr__(&self) -> String {
        format!("Potential({:?}, a={})", self.0.kind(), self.0.a())
    }
}

/// A model of the boundary value m+(lambda) = A + iB.
#[pyclass(frozen, module = "valdist")]
struct BoundaryModel(hg::BoundaryM);

#[pymethods]
impl BoundaryModel {
    #[staticmethod]
    fn free() -> Self {
        Self(hg::BoundaryM::free())
    }

    #[staticmethod]
    fn constant(re: f64, im: f64) -> PyResult<Self> {
        Ok(Self(hg::BoundaryM::constant(re, im).py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (nu, a = 1.0))]
    fn bessel(nu: f64, a: f64) -> PyResult<Self> {
        Ok(Self(hg::BoundaryM::bessel(nu, a).py()?))
    }

    /// Derived numerically from connection coefficients of `potential`.
    #[staticmethod]
    #[pyo3(signature = (potential, rel_tol = 1e-10, abs_tol = 1e-12))]
    fn appell(potential: &Potential, rel_tol: f64, abs_tol: f64) -> PyResult<Self> {
        Ok(Self(hg::BoundaryM::appell(
            potential.0.clone(),
            integrator(rel_tol, abs_tol)?,
        )))
    }

    /// (A, B) at lambda.
    fn eval(&self, py: Python<'_>, lam: f64) -> PyResult<(f64, f64)> {
        py.detach(|| self.0.eval(lam)).py()
    }
}

#[pyfunction]
fn bessel_eval(nu: f64, x: f64) -> PyResult<(f64, f64, f64, f64)> {
    let b = core::bessel::bessel_eval(nu, x).py()?;
    Ok((b.j, b.y, b.jprime, b.yprime))
}

#[pyfunction]
fn bessel_density(nu: f64, a: f64, lam: f64) -> PyResult<f64> {
    core::bessel::bessel_density(nu, a, lam).py()
}

/// (a, b, c) of the form |u + m v|^2 / Im m for m = A + iB.
#[pyfunction]
fn r0_coefficients(m_re: f64, m_im: f64) -> PyResult<(f64, f64, f64)> {
    let c = appell::r0_coefficients(m_re, m_im).py()?;
    Ok((c.a, c.b, c.c))
}

/// Connection coefficients as a dict with keys a, b, c, match_points,
/// error_estimate, low_confidence.
#[pyfunction]
#[pyo3(signature = (potential, lam, match_points = None, rel_tol = 1e-10, abs_tol = 1e-12))]
fn connection_coefficients<'py>(
    py: Python<'py>,
    potential: &Potential,
    lam: f64,
    match_points: Option<Vec<f64>>,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let cfg = integrator(rel_tol, abs_tol)?;
    let points = match match_points {
        Some(xs) => MatchPoints::Explicit(xs),
        None => MatchPoints::Auto,
    };
    let r = py
        .detach(|| appell::connection_coefficients(&potential.0, lam, &points, &cfg))
        .py()?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("a", r.coeffs.a)?;
    d.set_item("b", r.coeffs.b)?;
    d.set_item("c", r.coeffs.c)?;
    d.set_item("match_points", r.match_points)?;
    d.set_item("error_estimate", r.error_estimate)?;
    d.set_item("low_confidence", r.low_confidence)?;
    Ok(d)
}

/// f(lambda) = 1 / (pi a~) with its error estimate.
#[pyfunction]
#[pyo3(signature = (potential, lam, rel_tol = 1e-10, abs_tol = 1e-12))]
fn spectral_density(
    py: Python<'_>,
    potential: &Potential,
    lam: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<(f64, f64)> {
    let cfg = integrator(rel_tol, abs_tol)?;
    let d = py
        .detach(|| appell::spectral_density(&potential.0, lam, &cfg))
        .py()?;
    Ok((d.f, d.error_estimate))
}

/// Angle subtended by a union of intervals at z; None endpoints are infinite.
#[pyfunction]
fn angle(intervals: Vec<(Option<f64>, Option<f64>)>, z: Complex64) -> PyResult<f64> {
    hg::angle(&union(intervals)?, z).py()
}

/// F(x, lambda) = -u/v, or None at a pole.
#[pyfunction]
#[pyo3(signature = (potential, x, lam, rel_tol = 1e-10, abs_tol = 1e-12))]
fn big_f(
    potential: &Potential,
    x: f64,
    lam: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<Option<f64>> {
    Ok(
        vd::big_f(&potential.0, x, lam, &integrator(rel_tol, abs_tol)?)
            .py()?
            .finite(),
    )
}

/// Truncated Weyl function m_b(z), or None at a pole.
#[pyfunction]
#[pyo3(signature = (potential, b, z, rel_tol = 1e-10, abs_tol = 1e-12))]
fn m_truncated(
    potential: &Potential,
    b: f64,
    z: Complex64,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<Option<Complex64>> {
    let m = vd::m_truncated(&potential.0, b, z, &integrator(rel_tol, abs_tol)?).py()?;
    Ok(match m {
        Meromorphic::Finite(v) => Some(v),
        Meromorphic::Pole => None,
    })
}

/// theta~0(x, lambda) reduced mod pi at each x.
#[pyfunction]
#[pyo3(signature = (potential, lam, model, xs, rel_tol = 1e-10, abs_tol = 1e-12))]
fn theta0_mod_pi(
    py: Python<'_>,
    potential: &Potential,
    lam: f64,
    model: &BoundaryModel,
    xs: Vec<f64>,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<Vec<f64>> {
    let cfg = integrator(rel_tol, abs_tol)?;
    py.detach(|| vd::theta0_mod_pi_many(&potential.0, lam, &model.0, &xs, &cfg))
        .py()
}

/// Rows (x, empirical, limit, abs_error) for a constant band (c, d).
#[pyfunction]
#[pyo3(signature = (potential, model, lam, band, x_list, grid_n, rel_tol = 1e-10, abs_tol = 1e-12))]
#[allow(clippy::too_many_arguments)]
fn uad_check(
    py: Python<'_>,
    potential: &Potential,
    model: &BoundaryModel,
    lam: (f64, f64),
    band: (f64, f64),
    x_list: Vec<f64>,
    grid_n: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let cfg = integrator(rel_tol, abs_tol)?;
    let band = BandSpec {
        c: LambdaFn::Constant(band.0),
        d: LambdaFn::Constant(band.1),
    };
    let t = py
        .detach(|| vd::uad_check(&potential.0, &model.0, lam, &band, &x_list, grid_n, &cfg))
        .py()?;
    Ok(rows(t))
}

/// Rows (x, empirical, limit, abs_error) for the preimage measure of a target set.
#[pyfunction]
#[pyo3(signature = (potential, model, target, lam, x_list, grid_n, rel_tol = 1e-10, abs_tol = 1e-12))]
#[allow(clippy::too_many_arguments)]
fn theorem2_table(
    py: Python<'_>,
    potential: &Potential,
    model: &BoundaryModel,
    target: Vec<(Option<f64>, Option<f64>)>,
    lam: (f64, f64),
    x_list: Vec<f64>,
    grid_n: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let cfg = integrator(rel_tol, abs_tol)?;
    let target = Target::Fixed(union(target)?);
    let t = py
        .detach(|| vd::theorem2_table(&potential.0, &model.0, &target, lam, &x_list, grid_n, &cfg))
        .py()?;
    Ok(rows(t))
}

/// (lhs, rhs) of the smoothing gap bound for a rational Herglotz function
/// slope*z + offset + i*imag_offset + sum w/(p - z).
#[pyfunction]
#[pyo3(signature = (poles, target, lam, eps, grid_n, slope = 0.0, offset = 0.0, imag_offset = 0.0))]
#[allow(clippy::too_many_arguments)]
fn theorem1_gap(
    py: Python<'_>,
    poles: Vec<(f64, f64)>,
    target: Vec<(Option<f64>, Option<f64>)>,
    lam: (f64, f64),
    eps: f64,
    grid_n: usize,
    slope: f64,
    offset: f64,
    imag_offset: f64,
) -> PyResult<(f64, f64)> {
    let f = RationalHerglotz::new(poles, slope, offset, imag_offset).py()?;
    let s = union(target)?;
    let g = py
        .detach(|| hg::theorem1_gap(&f, &s, lam, eps, grid_n))
        .py()?;
    Ok((g.lhs, g.rhs))
}

/// Condition A ratio at each N.
#[pyfunction]
#[pyo3(signature = (potential, lam, m, ns, rel_tol = 1e-10, abs_tol = 1e-12))]
fn condition_a_ratios(
    py: Python<'_>,
    potential: &Potential,
    lam: f64,
    m: Complex64,
    ns: Vec<f64>,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<Vec<Complex64>> {
    let cfg = integrator(rel_tol, abs_tol)?;
    py.detach(|| vd::condition_a_ratios(&potential.0, lam, m, &ns, &cfg))
        .py()
}

#[pymodule]
fn valdist(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<Potential>()?;
    m.add_class::<BoundaryModel>()?;
    m.add_function(wrap_pyfunction!(bessel_eval, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_density, m)?)?;
    m.add_function(wrap_pyfunction!(r0_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(connection_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_density, m)?)?;
    m.add_function(wrap_pyfunction!(angle, m)?)?;
    m.add_function(wrap_pyfunction!(big_f, m)?)?;
    m.add_function(wrap_pyfunction!(m_truncated, m)?)?;
    m.add_function(wrap_pyfunction!(theta0_mod_pi, m)?)?;
    m.add_function(wrap_pyfunction!(uad_check, m)?)?;
    m.add_function(wrap_pyfunction!(theorem2_table, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_gap, m)?)?;
    m.add_function(wrap_pyfunction!(condition_a_ratios, m)?)?;
    Ok(())
}
