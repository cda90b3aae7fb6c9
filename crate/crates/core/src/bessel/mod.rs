//! Bessel functions of real order and the closed-form solutions of the
//! inverse-square (Bessel) potential q(x) = (ν² − 1/4)/x² on [a, ∞).
//!
//! [`bessel_eval`] is the production evaluator. The ascending series and
//! Hankel's expansion are exposed as independent branches for cross-checks.

mod asymptotic;
mod series;
mod steed;

use std::f64::consts::PI;

pub use asymptotic::jy_hankel;
pub use series::jy_series;

use crate::appell::FormCoefficients;
use crate::error::{invalid, Result};
use crate::ode::SchrodingerState;

/// Largest supported order.
pub const MAX_ORDER: f64 = 5.0;

/// J_ν, Y_ν and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub nu: f64,
    pub x: f64,
    pub j: f64,
    pub y: f64,
    pub jprime: f64,
    pub yprime: f64,
}

impl BesselEval {
    /// J Y′ − J′ Y, which equals 2/(πx).
    pub fn wronskian(&self) -> f64 {
        self.j * self.yprime - self.jprime * self.y
    }

    /// Relative deviation of the Wronskian from 2/(πx).
    pub fn wronskian_error(&self) -> f64 {
        let exact = 2.0 / (PI * self.x);
        ((self.wronskian() - exact) / exact).abs()
    }

    /// J² + Y², the squared Hankel modulus.
    pub fn modulus_sq(&self) -> f64 {
        self.j * self.j + self.y * self.y
    }

    /// J J′ + Y Y′.
    fn cross(&self) -> f64 {
        self.j * self.jprime + self.y * self.yprime
    }
}

/// Above this argument the asymptotic expansion is used; its smallest term is ~e^{−2x}.
const HANKEL_FROM: f64 = 25.0;

fn check_order(nu: f64) -> Result<()> {
    if !(0.0..=MAX_ORDER).contains(&nu) {
        return invalid(format!(
            "order nu = {nu} outside the supported range [0, {MAX_ORDER}]"
        ));
    }
    Ok(())
}

pub fn bessel_eval(nu: f64, x: f64) -> Result<BesselEval> {
    check_order(nu)?;
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!(
            "Bessel argument must be positive and finite, got {x}"
        ));
    }
    let (j, y, jprime, yprime) = if x >= HANKEL_FROM {
        asymptotic::jy_hankel(nu, x)
    } else {
        steed::jy(nu, x)?
    };
    Ok(BesselEval {
        nu,
        x,
        j,
        y,
        jprime,
        yprime,
    })
}

fn check_problem(a: f64, lambda: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return invalid(format!("left endpoint must be positive, got {a}"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid(format!("lambda must be positive, got {lambda}"));
    }
    Ok(())
}

/// Closed-form fundamental system (u, v) of −y″ + (ν²−1/4)/x² y = λ y with
/// u(a)=1, u′(a)=0, v(a)=0, v′(a)=1, from √x J_ν(x√λ) and √x Y_ν(x√λ).
pub fn bessel_fundamental(nu: f64, a: f64, lambda: f64, x: f64) -> Result<SchrodingerState<f64>> {
    check_problem(a, lambda)?;
    if x < a {
        return Err(crate::Error::BeforeEndpoint { x_target: x, a });
    }
    let k = lambda.sqrt();
    let at_a = bessel_eval(nu, a * k)?;
    let sa = a.sqrt();
    // coefficients of the Dirichlet solution v
    let d1 = -0.5 * PI * sa * at_a.y;
    let d2 = 0.5 * PI * sa * at_a.j;
    // coefficients of the Neumann-type solution u
    let d3 = 0.25 * PI / sa * at_a.y + 0.5 * PI * sa * k * at_a.yprime;
    let d4 = -0.25 * PI / sa * at_a.j - 0.5 * PI * sa * k * at_a.jprime;

    let at_x = bessel_eval(nu, x * k)?;
    let sx = x.sqrt();
    let (sj, sy) = (sx * at_x.j, sx * at_x.y);
    let dsj = at_x.j / (2.0 * sx) + sx * k * at_x.jprime;
    let dsy = at_x.y / (2.0 * sx) + sx * k * at_x.yprime;
    Ok(SchrodingerState {
        x,
        u: d3 * sj + d4 * sy,
        uprime: d3 * dsj + d4 * dsy,
        v: d1 * sj + d2 * sy,
        vprime: d1 * dsj + d2 * dsy,
    })
}

/// Closed-form connection coefficients (ã, b̃, c̃) for the Bessel potential.
pub fn bessel_connection(nu: f64, a: f64, lambda: f64) -> Result<FormCoefficients> {
    check_problem(a, lambda)?;
    let k = lambda.sqrt();
    let e = bessel_eval(nu, a * k)?;
    let m2 = e.modulus_sq();
    let cross = e.cross();
    let dmod2 = e.jprime * e.jprime + e.yprime * e.yprime;
    Ok(FormCoefficients {
        a: 0.5 * PI * a * m2,
        b: 0.5 * PI * m2 + PI * a * k * cross,
        c: PI / (8.0 * a) * m2 + 0.5 * PI * a * lambda * dmod2 + 0.5 * PI * k * cross,
    })
}

/// Spectral density f(λ) = 2 / (π² a (J_ν² + Y_ν²)(a√λ)).
pub fn bessel_density(nu: f64, a: f64, lambda: f64) -> Result<f64> {
    check_problem(a, lambda)?;
    let e = bessel_eval(nu, a * lambda.sqrt())?;
    Ok(2.0 / (PI * PI * a * e.modulus_sq()))
}

/// Boundary value m⁺(λ) = A + iB = b̃/(2ã) + i/ã for the Bessel potential.
pub fn bessel_boundary_m(nu: f64, a: f64, lambda: f64) -> Result<(f64, f64)> {
    let c = bessel_connection(nu, a, lambda)?;
    Ok((c.b / (2.0 * c.a), 1.0 / c.a))
}
