//! Oracles shared by the integration tests. They integrate the steady
//! equations in primitive form, `m u' (1 - c^2/u^2) = beta m u^alpha` with
//! `rho = m/u` and `c^2 = gamma rho^(gamma-1)`, so they share no code or
//! closed forms with the library.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

#[derive(Debug, Clone, Copy)]
pub struct Case {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c_minus: f64,
    pub u_minus: f64,
}

impl Case {
    pub fn mass_flux(&self) -> f64 {
        let rho = (self.c_minus * self.c_minus / self.gamma).powf(1.0 / (self.gamma - 1.0));
        rho * self.u_minus
    }

    pub fn sound_speed_at(&self, u: f64) -> f64 {
        let rho = self.mass_flux() / u;
        (self.gamma * rho.powf(self.gamma - 1.0)).sqrt()
    }

    /// `u'(x)` of the steady flow at speed `u`.
    pub fn slope(&self, u: f64) -> f64 {
        let c = self.sound_speed_at(u);
        self.beta * u.powf(self.alpha + 2.0) / (u * u - c * c)
    }
}

fn rk4_step(case: &Case, u: f64, h: f64) -> f64 {
    let k1 = case.slope(u);
    let k2 = case.slope(u + 0.5 * h * k1);
    let k3 = case.slope(u + 0.5 * h * k2);
    let k4 = case.slope(u + h * k3);
    u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Fixed-step RK4 on `[0, length]` with `steps` steps; returns `u` at every
/// `stride`-th step (so `steps / stride + 1` samples including both ends).
pub fn rk4_profile(case: &Case, length: f64, steps: usize, stride: usize) -> Vec<f64> {
    assert_eq!(steps % stride, 0);
    let h = length / steps as f64;
    let mut u = case.u_minus;
    let mut out = vec![u];
    for k in 1..=steps {
        u = rk4_step(case, u, h);
        if k % stride == 0 {
            out.push(u);
        }
    }
    out
}

/// Location where `|u'|` exceeds `slope_cap`, marching with
/// `dx = min(dx_max, kappa |u - s| / |u'|)` where `s` is the sonic speed
/// (`u = c`), so steps shrink geometrically into the singularity.
pub fn blowup_location(case: &Case, dx_max: f64, kappa: f64, slope_cap: f64) -> f64 {
    let g = case.gamma;
    let m = case.mass_flux();
    // u = c  <=>  u^2 = gamma (m/u)^(gamma-1)
    let sonic = (g * m.powf(g - 1.0)).powf(1.0 / (g + 1.0));
    let mut x = 0.0;
    let mut u = case.u_minus;
    loop {
        let du = case.slope(u);
        if !du.is_finite() || du.abs() > slope_cap {
            return x;
        }
        let h = dx_max.min(kappa * (u - sonic).abs() / du.abs());
        let next = rk4_step(case, u, h);
        if !next.is_finite() || (next - sonic) * (u - sonic) <= 0.0 {
            return x + h;
        }
        u = next;
        x += h;
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn reference_case() -> Case {
    Case { gamma: 2.0, alpha: 0.0, beta: -1.0, c_minus: 1.0, u_minus: 2.0 }
}
