//! Steady Fanno flows and time-periodic supersonic transients for the
//! one-dimensional isentropic Euler equations with the source term
//! `beta * rho * |u|^alpha * u` and pressure law `p = rho^gamma`.
//!
//! * [`gas`]: state conversions, eigenstructure, Riemann invariants.
//! * [`fanno`]: steady profiles, sonic speed, maximal duct length, regimes.
//! * [`signal`]: periodic inflow data and corner compatibility checks.
//! * [`transient`]: upwind integrator for the diagonal Riemann-invariant system.
//! * [`diagnostics`]: flushing time, periodicity residuals, perturbation
//!   norms and wave components.
//! * [`config`] and [`cli`]: scenario files and the `fanno` command line.
//! * [`roots`] and [`output`]: bracketed root finding and number formatting.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fanno;
pub mod gas;
pub mod output;
pub mod roots;
pub mod signal;
pub mod transient;

pub use error::{FannoError, Result};
