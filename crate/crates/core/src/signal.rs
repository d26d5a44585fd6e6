//! Time-periodic inflow data at `x = 0` and the corner compatibility
//! conditions linking it to the initial data.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{FannoError, Result};
use crate::fanno::{SteadyProfile, UpstreamState};
use crate::gas::{self, FlowState, GasParams, RiemannState};

/// Perturbation shape over one period, as a function of the phase `tau` in `[0, 1)`.
///
/// Every shape is C^1 and 1-periodic with zero value and zero slope at
/// `tau = 0`, so a perturbed inflow always starts from the steady corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// `sin^2(pi tau)`: density raised, velocity lowered by the same amount.
    Bump,
    /// `sin(2 pi tau) sin^2(pi tau)`: one sine cycle under a `sin^2` envelope,
    /// density and velocity in antiphase.
    SineRamp,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Bump => "bump",
            Shape::SineRamp => "sine-ramp",
        }
    }

    /// `(phi(tau), phi'(tau))` for the density perturbation.
    fn density_profile(self, tau: f64) -> (f64, f64) {
        let (s1, c1) = (PI * tau).sin_cos();
        match self {
            Shape::Bump => (s1 * s1, 2.0 * PI * s1 * c1),
            Shape::SineRamp => {
                let (s2, c2) = (2.0 * PI * tau).sin_cos();
                let env = s1 * s1;
                let denv = 2.0 * PI * s1 * c1;
                (s2 * env, 2.0 * PI * c2 * env + s2 * denv)
            }
        }
    }

    /// `(psi(tau), psi'(tau))` for the velocity perturbation.
    fn velocity_profile(self, tau: f64) -> (f64, f64) {
        let (v, dv) = self.density_profile(tau);
        (-v, -dv)
    }
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "bump" => Ok(Shape::Bump),
            "sine-ramp" | "sine_ramp" => Ok(Shape::SineRamp),
            other => Err(format!("unknown shape `{other}` (expected bump or sine-ramp)")),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Phases are snapped to multiples of 2^-32 so that `t` and `t + P` map to
/// the same phase despite rounding in `t / P`.
const PHASE_QUANTUM: f64 = 4_294_967_296.0;

/// Phase of `t` within the period, in `[0, 1)`.
pub fn phase(t: f64, period: f64) -> f64 {
    let cycles = t / period;
    let frac = cycles - cycles.floor();
    let snapped = (frac * PHASE_QUANTUM).round() / PHASE_QUANTUM;
    if snapped >= 1.0 {
        0.0
    } else {
        snapped
    }
}

/// Periodic inflow `rho_l(t) = rho_minus + eps phi(t/P)`,
/// `u_l(t) = u_minus + eps psi(t/P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySignal {
    period: f64,
    epsilon: f64,
    shape: Shape,
    base: UpstreamState,
    rho_minus: f64,
    params: GasParams,
}

/// Phases sampled when screening a signal for inlet supersonicity.
const SCREEN_SAMPLES: usize = 4096;

pub fn make_boundary_signal(
    base: &UpstreamState,
    params: &GasParams,
    period: f64,
    epsilon: f64,
    shape: Shape,
) -> Result<BoundarySignal> {
    if !period.is_finite() || period <= 0.0 {
        return Err(FannoError::InvalidParameter {
            name: "period",
            reason: format!("period must be positive (got {period})"),
        });
    }
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(FannoError::InvalidParameter {
            name: "epsilon",
            reason: format!("epsilon must be non-negative (got {epsilon})"),
        });
    }
    let signal = BoundarySignal {
        period,
        epsilon,
        shape,
        base: *base,
        rho_minus: base.rho_minus(params)?,
        params: *params,
    };
    // Screen one period, including the midpoint where the bump peaks.
    let phases = (0..SCREEN_SAMPLES)
        .map(|k| k as f64 / SCREEN_SAMPLES as f64)
        .chain(std::iter::once(0.5));
    for tau in phases {
        let t = tau * period;
        let rho = signal.rho_at_phase(tau).0;
        let u = signal.u_at_phase(tau).0;
        let supersonic = match gas::sound_speed(params, rho) {
            Ok(c) => u > c,
            Err(_) => false,
        };
        if !supersonic {
            return Err(FannoError::EpsilonTooLarge { epsilon, t });
        }
    }
    Ok(signal)
}

impl BoundarySignal {
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn base(&self) -> &UpstreamState {
        &self.base
    }

    pub fn rho_minus(&self) -> f64 {
        self.rho_minus
    }

    fn rho_at_phase(&self, tau: f64) -> (f64, f64) {
        let (v, dv) = self.shape.density_profile(tau);
        (self.rho_minus + self.epsilon * v, self.epsilon * dv / self.period)
    }

    fn u_at_phase(&self, tau: f64) -> (f64, f64) {
        let (v, dv) = self.shape.velocity_profile(tau);
        (self.base.u_minus() + self.epsilon * v, self.epsilon * dv / self.period)
    }

    pub fn rho_l(&self, t: f64) -> f64 {
        self.rho_at_phase(phase(t, self.period)).0
    }

    pub fn u_l(&self, t: f64) -> f64 {
        self.u_at_phase(phase(t, self.period)).0
    }

    /// Time derivative of `rho_l`.
    pub fn drho_l(&self, t: f64) -> f64 {
        self.rho_at_phase(phase(t, self.period)).1
    }

    /// Time derivative of `u_l`.
    pub fn du_l(&self, t: f64) -> f64 {
        self.u_at_phase(phase(t, self.period)).1
    }

    pub fn state(&self, t: f64) -> Result<FlowState> {
        FlowState::new(self.rho_l(t), self.u_l(t))
    }

    pub fn riemann(&self, t: f64) -> Result<RiemannState> {
        gas::to_riemann(&self.params, &self.state(t)?)
    }
}

/// Initial data and its one-sided x-derivatives at the corner `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerData {
    pub rho: f64,
    pub u: f64,
    pub drho: f64,
    pub du: f64,
}

impl CornerData {
    /// Corner data of a steady profile, with slopes taken from the steady ODE.
    pub fn from_profile(profile: &SteadyProfile) -> Self {
        let (drho, du) = profile.slopes(0);
        Self {
            rho: profile.rho_tilde[0],
            u: profile.u_tilde[0],
            drho,
            du,
        }
    }

    /// Corner data of sampled `(rho, u)` with second-order one-sided differences.
    pub fn from_samples(rho: &[f64], u: &[f64], dx: f64) -> Self {
        let one_sided = |v: &[f64]| (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
        Self {
            rho: rho[0],
            u: u[0],
            drho: one_sided(rho),
            du: one_sided(u),
        }
    }
}

/// Residuals of the three corner conditions at `(t, x) = (0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatibilityReport {
    /// Mass balance: `rho_l' + (rho0 u0)'`.
    pub mass: f64,
    /// Momentum balance including pressure and source.
    pub momentum: f64,
    /// `rho0(0) - rho_l(0)`.
    pub rho_mismatch: f64,
    /// `u0(0) - u_l(0)`.
    pub u_mismatch: f64,
    pub tolerance: f64,
}

impl CompatibilityReport {
    pub fn max_residual(&self) -> f64 {
        self.mass
            .abs()
            .max(self.momentum.abs())
            .max(self.rho_mismatch.abs())
            .max(self.u_mismatch.abs())
    }

    pub fn passes(&self) -> bool {
        self.max_residual() <= self.tolerance
    }
}

pub fn check_compatibility(
    params: &GasParams,
    init: &CornerData,
    signal: &BoundarySignal,
    tolerance: f64,
) -> CompatibilityReport {
    let g = params.gamma();
    let (rho_l, drho_l) = signal.rho_at_phase(0.0);
    let (u_l, du_l) = signal.u_at_phase(0.0);
    let CornerData { rho, u, drho, du } = *init;
    let dp = g * rho.powf(g - 1.0) * drho;
    let source = params.beta() * rho * u.abs().powf(params.alpha()) * u;
    CompatibilityReport {
        mass: drho_l + drho * u + rho * du,
        momentum: drho_l * u_l + rho_l * du_l + drho * u * u + 2.0 * rho * u * du + dp - source,
        rho_mismatch: rho - rho_l,
        u_mismatch: u - u_l,
        tolerance,
    }
}
