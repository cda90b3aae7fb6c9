//! Integration of the Schrödinger equation −y″ + q y = λ y and its Appell
//! companion system from the regular endpoint.

mod dense;
mod dop853;
mod dopri;
pub(crate) mod engine;

pub use dense::Trajectory;
pub use engine::*;

use crate::error::{invalid, Result};

/// Embedded Runge–Kutta pair used by the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Dormand–Prince 8(5,3).
    #[default]
    Dop853,
    /// Dormand–Prince 5(4).
    Dopri5,
}

/// Tolerances and step limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Keep the continuous extension of every accepted step.
    pub dense_output: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Dop853,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            dense_output: false,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return invalid("tolerances must be positive");
        }
        if !(self.max_step > 0.0) {
            return invalid("max_step must be positive");
        }
        Ok(())
    }
}

pub(crate) enum Solver<F, const N: usize> {
    Dop853(dop853::Dop853<F, N>),
    Dopri5(dopri::Dopri5<F, N>),
}

impl<F, const N: usize> Solver<F, N>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    pub(crate) fn new(rhs: F, x0: f64, y0: [f64; N], cfg: &IntegratorConfig) -> Self {
        match cfg.method {
            Method::Dop853 => Solver::Dop853(dop853::Dop853::new(rhs, x0, y0, cfg)),
            Method::Dopri5 => Solver::Dopri5(dopri::Dopri5::new(rhs, x0, y0, cfg)),
        }
    }

    pub(crate) fn advance_to(&mut self, x_end: f64) -> Result<()> {
        match self {
            Solver::Dop853(s) => s.advance_to(x_end),
            Solver::Dopri5(s) => s.advance_to(x_end),
        }
    }

    pub(crate) fn x(&self) -> f64 {
        match self {
            Solver::Dop853(s) => s.x(),
            Solver::Dopri5(s) => s.x(),
        }
    }

    pub(crate) fn y(&self) -> &[f64; N] {
        match self {
            Solver::Dop853(s) => s.y(),
            Solver::Dopri5(s) => s.y(),
        }
    }

    pub(crate) fn into_trajectory(self) -> Option<Trajectory<N>> {
        let segments = match self {
            Solver::Dop853(s) => s.into_segments(),
            Solver::Dopri5(s) => s.into_segments(),
        }?;
        Some(Trajectory { segments })
    }
}
