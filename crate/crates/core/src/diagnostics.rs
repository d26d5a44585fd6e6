//! Measurements on simulation output: flushing time, time-periodicity
//! residuals, perturbation norms around the steady background and the
//! characteristic wave components of the perturbation.

use std::io::{self, Write};

use crate::error::{FannoError, Result};
use crate::fanno::SteadyProfile;
use crate::gas::{self, GasParams};
use crate::output::{fmt_num, KeyValues};
use crate::transient::{Field, RunRecord};

/// Safety factor applied to the flushing time before periodicity checks.
/// The flushing time is defined through the eigenvalues of the evolving
/// solution, which are only known after the run.
pub const FLUSH_INFLATION: f64 = 1.05;

/// `L / min lambda1`, given the smallest observed `lambda1`.
pub fn flushing_time(length: f64, min_lambda1: f64) -> Result<f64> {
    if !(min_lambda1 > 0.0) {
        return Err(FannoError::SupersonicityLost { t: f64::NAN, x: f64::NAN });
    }
    Ok(length / min_lambda1)
}

/// Flushing time of a steady background (minimum of `lambda1` over the grid).
pub fn flushing_time_profile(profile: &SteadyProfile) -> Result<f64> {
    let mut min1 = f64::INFINITY;
    let mut at = 0.0;
    for i in 0..profile.len() {
        let l1 = profile.u_tilde[i] - profile.c_tilde[i];
        if !(l1 > 0.0) {
            return Err(FannoError::SupersonicityLost { t: 0.0, x: profile.xs[i] });
        }
        if l1 < min1 {
            min1 = l1;
            at = profile.xs[i];
        }
    }
    log::debug!("profile flushing: min lambda1 = {min1} at x = {at}");
    flushing_time(profile.length(), min1)
}

/// Flushing time from the eigenvalues observed over a run.
pub fn flushing_time_record(record: &RunRecord) -> Result<f64> {
    flushing_time(record.grid.length(), record.min_lambda1)
}

/// First time at which periodicity is checked: the inflated flushing time.
pub fn periodicity_start(flushing: f64) -> f64 {
    FLUSH_INFLATION * flushing
}

/// Central differences inside, second-order one-sided differences at both ends.
pub fn derivative(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 3, "derivative needs at least three samples");
    let mut d = Vec::with_capacity(n);
    d.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dx));
    for i in 1..n - 1 {
        d.push((values[i + 1] - values[i - 1]) / (2.0 * dx));
    }
    d.push((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dx));
    d
}

/// Observed convergence order between two errors at resolutions differing by `ratio`.
pub fn observed_order(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (coarse / fine).ln() / ratio.ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicityReport {
    /// Time of the first compared sample, `t` in `W(t + P) - W(t)`.
    pub t_check: f64,
    pub period: f64,
    /// Max over the window and the grid of `|r(t+P) - r(t)|` and `|s(t+P) - s(t)|`.
    pub residual_max: f64,
    /// Max over the window of the trapezoidal L2 norm in x of the difference.
    pub residual_l2: f64,
    /// Max over the window of the difference at the inflow point.
    pub boundary_max: f64,
    pub grid_resolution: usize,
    /// `(t, residual_max, residual_l2)` per compared sample.
    pub series: Vec<(f64, f64, f64)>,
}

impl PeriodicityReport {
    pub fn summary(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.push_num("t_check", self.t_check)
            .push_num("period", self.period)
            .push_num("residual_max", self.residual_max)
            .push_num("residual_l2", self.residual_l2)
            .push_num("boundary_max", self.boundary_max)
            .push("grid_resolution", self.grid_resolution)
            .push("samples", self.series.len());
        kv
    }

    pub fn write_series_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,residual_max,residual_l2")?;
        for &(t, m, l2) in &self.series {
            writeln!(out, "{},{},{}", fmt_num(t), fmt_num(m), fmt_num(l2))?;
        }
        Ok(())
    }
}

/// Compares `W(t + P, .)` with `W(t, .)` for the samples `t` in
/// `[t_check, t_check + P]`, where `t_check` is rounded up to the sample grid.
pub fn periodicity_residual(record: &RunRecord, period: f64, t_check: f64) -> Result<PeriodicityReport> {
    let h = record.snapshot_every;
    let shift_f = (period / h).round();
    if shift_f < 1.0 || (shift_f * h - period).abs() > 1e-9 * period {
        return Err(FannoError::InsufficientSnapshots(format!(
            "period {period} is not a whole number of snapshot intervals ({h})"
        )));
    }
    let shift = shift_f as u64;
    let k0 = (((t_check - record.t0) / h) - 1e-9).ceil().max(0.0) as u64;
    let dx = record.grid.dx();

    let mut series = Vec::with_capacity(shift as usize + 1);
    let mut residual_max = 0.0f64;
    let mut residual_l2 = 0.0f64;
    let mut boundary_max = 0.0f64;
    for k in k0..=k0 + shift {
        let (a, b) = match (record.snapshot_at(k), record.snapshot_at(k + shift)) {
            (Some(a), Some(b)) => (&a.field, &b.field),
            _ => {
                return Err(FannoError::InsufficientSnapshots(format!(
                    "need samples {k} and {} (t = {} and {}), record ends at t = {}",
                    k + shift,
                    record.sample_time(k),
                    record.sample_time(k + shift),
                    record.last().time
                )))
            }
        };
        let n = a.len();
        let mut max = 0.0f64;
        let mut sum = 0.0;
        for i in 0..n {
            let dr = b.r[i] - a.r[i];
            let ds = b.s[i] - a.s[i];
            max = max.max(dr.abs()).max(ds.abs());
            let w = if i == 0 || i + 1 == n { 0.5 * dx } else { dx };
            sum += w * (dr * dr + ds * ds);
        }
        let l2 = sum.sqrt();
        boundary_max = boundary_max.max((b.r[0] - a.r[0]).abs()).max((b.s[0] - a.s[0]).abs());
        residual_max = residual_max.max(max);
        residual_l2 = residual_l2.max(l2);
        series.push((record.sample_time(k), max, l2));
    }
    Ok(PeriodicityReport {
        t_check: record.sample_time(k0),
        period,
        residual_max,
        residual_l2,
        boundary_max,
        grid_resolution: record.grid.nx(),
        series,
    })
}

/// Sup over snapshots of the perturbation `(rho - rho~, u - u~)` and of its
/// discrete x-derivative: a C^1-norm surrogate without time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationNorms {
    pub value_max: f64,
    pub derivative_max: f64,
}

impl PerturbationNorms {
    pub fn c1(&self) -> f64 {
        self.value_max + self.derivative_max
    }
}

/// Background `(rho~, u~)` passed through the same Riemann-invariant round
/// trip as the simulated fields, so that the identity case compares exactly.
fn background_primitives(profile: &SteadyProfile) -> Result<(Vec<f64>, Vec<f64>)> {
    Field::from_profile(profile)?.primitives(&profile.params)
}

fn accumulate(
    norms: &mut PerturbationNorms,
    rho: &[f64],
    u: &[f64],
    rho_bg: &[f64],
    u_bg: &[f64],
    dx: f64,
) {
    let drho: Vec<f64> = rho.iter().zip(rho_bg).map(|(a, b)| a - b).collect();
    let du: Vec<f64> = u.iter().zip(u_bg).map(|(a, b)| a - b).collect();
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    norms.value_max = norms.value_max.max(sup(&drho)).max(sup(&du));
    norms.derivative_max = norms
        .derivative_max
        .max(sup(&derivative(&drho, dx)))
        .max(sup(&derivative(&du, dx)));
}

pub fn perturbation_norms(record: &RunRecord, profile: &SteadyProfile) -> Result<PerturbationNorms> {
    if profile.len() != record.grid.nx() {
        return Err(FannoError::GridMismatch(format!(
            "profile has {} points, record grid has {}",
            profile.len(),
            record.grid.nx()
        )));
    }
    let (rho_bg, u_bg) = background_primitives(profile)?;
    let mut norms = PerturbationNorms { value_max: 0.0, derivative_max: 0.0 };
    for snap in &record.snapshots {
        let (rho, u) = snap.field.primitives(&record.params)?;
        accumulate(&mut norms, &rho, &u, &rho_bg, &u_bg, record.grid.dx());
    }
    Ok(norms)
}

/// Perturbation norms against another run on the same grid and sample
/// schedule (typically the unperturbed run), pairing snapshots by index.
/// This removes the scheme's steady truncation error from the measurement.
pub fn perturbation_norms_against(record: &RunRecord, baseline: &RunRecord) -> Result<PerturbationNorms> {
    if record.grid != baseline.grid {
        return Err(FannoError::GridMismatch("record and baseline grids differ".into()));
    }
    #[allow(clippy::float_cmp)]
    if record.snapshot_every != baseline.snapshot_every || record.t0 != baseline.t0 {
        return Err(FannoError::GridMismatch("record and baseline sample schedules differ".into()));
    }
    let mut norms = PerturbationNorms { value_max: 0.0, derivative_max: 0.0 };
    let mut paired = 0;
    for snap in &record.snapshots {
        let Some(k) = snap.index else { continue };
        let Some(base) = baseline.snapshot_at(k) else { continue };
        let (rho, u) = snap.field.primitives(&record.params)?;
        let (rho_bg, u_bg) = base.field.primitives(&baseline.params)?;
        accumulate(&mut norms, &rho, &u, &rho_bg, &u_bg, record.grid.dx());
        paired += 1;
    }
    if paired == 0 {
        return Err(FannoError::InsufficientSnapshots("no common samples with the baseline".into()));
    }
    Ok(norms)
}

/// Coefficients of the perturbation and its x-derivative in the right
/// eigenvector basis of the local state.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveComponents {
    pub m: Vec<[f64; 2]>,
    pub n: Vec<[f64; 2]>,
    right: Vec<[[f64; 2]; 2]>,
}

impl WaveComponents {
    fn resum(&self, coeffs: &[[f64; 2]]) -> Vec<[f64; 2]> {
        coeffs
            .iter()
            .zip(&self.right)
            .map(|(c, r)| {
                [
                    c[0] * r[0][0] + c[1] * r[1][0],
                    c[0] * r[0][1] + c[1] * r[1][1],
                ]
            })
            .collect()
    }

    /// `sum_k m_k r_k(V)`, which equals the perturbation `V - V~`.
    pub fn reconstruct(&self) -> Vec<[f64; 2]> {
        self.resum(&self.m)
    }

    /// `sum_k n_k r_k(V)`, which equals the x-derivative of the perturbation.
    pub fn reconstruct_derivative(&self) -> Vec<[f64; 2]> {
        self.resum(&self.n)
    }

    pub fn max_m(&self) -> f64 {
        self.m.iter().fold(0.0f64, |a, v| a.max(v[0].abs()).max(v[1].abs()))
    }

    pub fn max_n(&self) -> f64 {
        self.n.iter().fold(0.0f64, |a, v| a.max(v[0].abs()).max(v[1].abs()))
    }
}

pub fn wave_components(params: &GasParams, field: &Field, profile: &SteadyProfile) -> Result<WaveComponents> {
    if field.len() != profile.len() {
        return Err(FannoError::GridMismatch(format!(
            "field has {} points, profile has {}",
            field.len(),
            profile.len()
        )));
    }
    let (rho, u) = field.primitives(params)?;
    let (rho_bg, u_bg) = background_primitives(profile)?;
    let bar_rho: Vec<f64> = rho.iter().zip(&rho_bg).map(|(a, b)| a - b).collect();
    let bar_u: Vec<f64> = u.iter().zip(&u_bg).map(|(a, b)| a - b).collect();
    let dx = profile.length() / (profile.len() - 1) as f64;
    let dbar_rho = derivative(&bar_rho, dx);
    let dbar_u = derivative(&bar_u, dx);

    let mut m = Vec::with_capacity(rho.len());
    let mut n = Vec::with_capacity(rho.len());
    let mut right = Vec::with_capacity(rho.len());
    for i in 0..rho.len() {
        let ev = gas::eigenvectors(params, &field.state(params, i)?)?;
        let dot = |l: [f64; 2], a: f64, b: f64| l[0] * a + l[1] * b;
        m.push([dot(ev.l1, bar_rho[i], bar_u[i]), dot(ev.l2, bar_rho[i], bar_u[i])]);
        n.push([dot(ev.l1, dbar_rho[i], dbar_u[i]), dot(ev.l2, dbar_rho[i], dbar_u[i])]);
        right.push([ev.r1, ev.r2]);
    }
    Ok(WaveComponents { m, n, right })
}
