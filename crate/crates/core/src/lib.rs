//! Numerical value-distribution theory for half-line Schrödinger operators
//! −y″ + q(x) y = λ y on [a, ∞) with a Dirichlet condition at x = a.
//!
//! The crate computes Herglotz subtended angles, truncated Weyl functions
//! F(x, λ) = −u/v and their preimage measures, the monotone phase θ₀ reduced
//! modulo π, connection coefficients of the Appell companion system, and the
//! spectral density f(λ) = 1/(π ã(λ)). Closed-form Bessel solutions serve as an
//! independent oracle for the inverse-square potential class.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::needless_range_loop)]

pub mod appell;
pub mod bessel;
pub mod error;
pub mod grid;
pub mod herglotz;
pub mod ode;
pub mod potential;
pub mod special;
pub mod value_distribution;

pub use error::{Error, Result};
pub use ode::{IntegratorConfig, Method};
pub use potential::{Interpolation, Potential, PotentialKind, PotentialTable};
