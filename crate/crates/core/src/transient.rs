//! Time integration of the diagonal system
//!
//! ```text
//! r_t + lambda1(r, s) r_x = beta (r + s)^(alpha + 1) / 2
//! s_t + lambda2(r, s) s_x = beta (r + s)^(alpha + 1) / 2
//! ```
//!
//! in the supersonic regime, where both characteristic families enter at
//! `x = 0` and leave at `x = L`. Transport is first-order upwind (left-biased),
//! the semi-discrete system is advanced with Heun's method, the inflow values
//! come from a [`BoundarySignal`] and the outflow needs no boundary data.

use std::io::{self, Write};

use crate::error::{FannoError, Result};
use crate::fanno::{uniform_grid, SteadyProfile};
use crate::gas::{self, FlowState, GasParams, RiemannState};
use crate::output::{fmt_num, KeyValues};
use crate::signal::BoundarySignal;

pub const DEFAULT_CFL: f64 = 0.9;
pub const DEFAULT_NX: usize = 401;
pub const MIN_NX: usize = 8;

/// Uniform grid of `nx` points over `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    length: f64,
    nx: usize,
    dx: f64,
    cfl: f64,
}

impl Grid1D {
    pub fn new(length: f64, nx: usize, cfl: f64) -> Result<Self> {
        if !length.is_finite() || length <= 0.0 {
            return Err(FannoError::InvalidParameter {
                name: "length",
                reason: format!("duct length must be positive (got {length})"),
            });
        }
        if nx < MIN_NX {
            return Err(FannoError::InvalidParameter {
                name: "nx",
                reason: format!("need at least {MIN_NX} grid points (got {nx})"),
            });
        }
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(FannoError::InvalidParameter {
                name: "cfl",
                reason: format!("cfl must lie in (0, 1] (got {cfl})"),
            });
        }
        Ok(Self {
            length,
            nx,
            dx: length / (nx - 1) as f64,
            cfl,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn cfl(&self) -> f64 {
        self.cfl
    }

    pub fn xs(&self) -> Vec<f64> {
        uniform_grid(self.length, self.nx)
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.length
        } else {
            self.length * (i as f64 / (self.nx - 1) as f64)
        }
    }
}

/// Riemann invariants on the grid at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub time: f64,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
}

impl Field {
    pub fn from_states(params: &GasParams, time: f64, states: &[FlowState]) -> Result<Self> {
        let mut r = Vec::with_capacity(states.len());
        let mut s = Vec::with_capacity(states.len());
        for st in states {
            let rs = gas::to_riemann(params, st)?;
            r.push(rs.r);
            s.push(rs.s);
        }
        Ok(Self { time, r, s })
    }

    /// The steady background as a field at `t = 0`.
    pub fn from_profile(profile: &SteadyProfile) -> Result<Self> {
        let states = profile
            .rho_tilde
            .iter()
            .zip(&profile.u_tilde)
            .map(|(&rho, &u)| FlowState::new(rho, u))
            .collect::<Result<Vec<_>>>()?;
        Self::from_states(&profile.params, 0.0, &states)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn riemann(&self, i: usize) -> RiemannState {
        RiemannState { r: self.r[i], s: self.s[i] }
    }

    pub fn state(&self, params: &GasParams, i: usize) -> Result<FlowState> {
        gas::from_riemann(params, &self.riemann(i))
    }

    /// `(rho, u)` columns.
    pub fn primitives(&self, params: &GasParams) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut rho = Vec::with_capacity(self.len());
        let mut u = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let st = self.state(params, i)?;
            rho.push(st.rho);
            u.push(st.u);
        }
        Ok((rho, u))
    }

    /// Smallest `lambda1` and largest `lambda2` over the grid.
    pub fn eigen_range(&self, params: &GasParams) -> (f64, f64) {
        let mut min1 = f64::INFINITY;
        let mut max2 = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let (l1, l2) = self.riemann(i).eigenvalues(params);
            min1 = min1.min(l1);
            max2 = max2.max(l2);
        }
        (min1, max2)
    }
}

/// `dt = cfl * dx / max(lambda2)`.
pub fn cfl_time_step(cfl: f64, dx: f64, max_lambda2: f64) -> f64 {
    cfl * dx / max_lambda2
}

/// Fails at the first grid point where the sound speed is not positive
/// (`s <= r`) or the flow is not strictly supersonic (`lambda1 <= 0`).
fn check_field(params: &GasParams, grid: &Grid1D, r: &[f64], s: &[f64], t: f64) -> Result<()> {
    for i in 0..r.len() {
        let rs = RiemannState { r: r[i], s: s[i] };
        if !(rs.s - rs.r > 0.0) {
            return Err(FannoError::VacuumFormed { t, x: grid.x(i) });
        }
        let (l1, _) = rs.eigenvalues(params);
        if !(l1 > 0.0) || !l1.is_finite() {
            return Err(FannoError::SupersonicityLost { t, x: grid.x(i) });
        }
    }
    Ok(())
}

/// Upwind transport plus source, written into `dr`, `ds` for points `1..nx`.
fn rhs(params: &GasParams, dx: f64, r: &[f64], s: &[f64], dr: &mut [f64], ds: &mut [f64]) {
    let half_beta = 0.5 * params.beta();
    let exponent = params.alpha() + 1.0;
    let inv_dx = 1.0 / dx;
    for i in 1..r.len() {
        let rs = RiemannState { r: r[i], s: s[i] };
        let (l1, l2) = rs.eigenvalues(params);
        // u > 0 in the supersonic regime, so |u|^alpha u = u^(alpha + 1).
        let source = half_beta * rs.velocity().powf(exponent);
        dr[i] = -l1 * (r[i] - r[i - 1]) * inv_dx + source;
        ds[i] = -l2 * (s[i] - s[i - 1]) * inv_dx + source;
    }
}

/// Largest stable step for `field` on `grid`.
pub fn stable_dt(params: &GasParams, grid: &Grid1D, field: &Field) -> Result<f64> {
    check_field(params, grid, &field.r, &field.s, field.time)?;
    let (_, max2) = field.eigen_range(params);
    Ok(cfl_time_step(grid.cfl, grid.dx, max2))
}

/// Advances one CFL-limited step.
pub fn step(params: &GasParams, grid: &Grid1D, field: &Field, signal: &BoundarySignal) -> Result<Field> {
    let dt = stable_dt(params, grid, field)?;
    step_by(params, grid, field, signal, dt)
}

/// Advances by `dt`, which must not exceed [`stable_dt`].
pub fn step_by(
    params: &GasParams,
    grid: &Grid1D,
    field: &Field,
    signal: &BoundarySignal,
    dt: f64,
) -> Result<Field> {
    let n = grid.nx;
    if field.len() != n {
        return Err(FannoError::GridMismatch(format!(
            "field has {} points, grid has {n}",
            field.len()
        )));
    }
    check_field(params, grid, &field.r, &field.s, field.time)?;
    let t_new = field.time + dt;
    let inflow = signal
        .riemann(t_new)
        .map_err(|_| FannoError::SupersonicityLost { t: t_new, x: 0.0 })?;

    let mut k_r = vec![0.0; n];
    let mut k_s = vec![0.0; n];
    rhs(params, grid.dx, &field.r, &field.s, &mut k_r, &mut k_s);

    let mut r1 = vec![0.0; n];
    let mut s1 = vec![0.0; n];
    r1[0] = inflow.r;
    s1[0] = inflow.s;
    for i in 1..n {
        r1[i] = field.r[i] + dt * k_r[i];
        s1[i] = field.s[i] + dt * k_s[i];
    }
    check_field(params, grid, &r1, &s1, t_new)?;

    let mut k1_r = vec![0.0; n];
    let mut k1_s = vec![0.0; n];
    rhs(params, grid.dx, &r1, &s1, &mut k1_r, &mut k1_s);

    let mut r = vec![0.0; n];
    let mut s = vec![0.0; n];
    r[0] = inflow.r;
    s[0] = inflow.s;
    for i in 1..n {
        r[i] = field.r[i] + 0.5 * dt * (k_r[i] + k1_r[i]);
        s[i] = field.s[i] + 0.5 * dt * (k_s[i] + k1_s[i]);
    }
    check_field(params, grid, &r, &s, t_new)?;
    Ok(Field { time: t_new, r, s })
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions<'a> {
    pub t_end: f64,
    /// Snapshots are taken at `t0 + k * snapshot_every` exactly.
    pub snapshot_every: f64,
    /// Background for the per-step perturbation norm `max |V - V~|`.
    pub background: Option<&'a SteadyProfile>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// `Some(k)` for the sample at `t0 + k * snapshot_every`; `None` for the
    /// final state at `t_end` when it falls between samples.
    pub index: Option<u64>,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub t: f64,
    pub x: f64,
    pub error: FannoError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub params: GasParams,
    pub grid: Grid1D,
    pub t0: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
    pub snapshots: Vec<Snapshot>,
    /// `(t, max_x |V - V~|)` after every accepted step, when a background was given.
    pub perturbation: Vec<(f64, f64)>,
    pub steps: usize,
    /// Extremes of `lambda1` / `lambda2` over all accepted time levels.
    pub min_lambda1: f64,
    pub max_lambda2: f64,
    pub failure: Option<RunFailure>,
}

impl RunRecord {
    pub fn last(&self) -> &Field {
        &self.snapshots.last().expect("record holds the initial snapshot").field
    }

    pub fn snapshot_at(&self, index: u64) -> Option<&Snapshot> {
        self.snapshots
            .binary_search_by_key(&Some(index), |s| s.index)
            .ok()
            .map(|pos| &self.snapshots[pos])
    }

    pub fn sample_time(&self, index: u64) -> f64 {
        self.t0 + index as f64 * self.snapshot_every
    }

    pub fn max_perturbation(&self) -> Option<f64> {
        self.perturbation.iter().map(|&(_, p)| p).reduce(f64::max)
    }

    pub fn into_result(self) -> Result<Self> {
        match &self.failure {
            Some(f) => Err(f.error.clone()),
            None => Ok(self),
        }
    }

    pub fn summary(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.push("status", if self.failure.is_some() { "supersonicity_lost" } else { "ok" })
            .push_num("t_end", self.t_end)
            .push("nx", self.grid.nx)
            .push_num("dx", self.grid.dx)
            .push_num("cfl", self.grid.cfl)
            .push("steps", self.steps)
            .push("snapshots", self.snapshots.len())
            .push_num("t_last", self.last().time)
            .push_num("min_lambda1", self.min_lambda1)
            .push_num("max_lambda2", self.max_lambda2);
        if let Some(p) = self.max_perturbation() {
            kv.push_num("max_perturbation", p);
        }
        if let Some(f) = &self.failure {
            kv.push_num("failure_t", f.t).push_num("failure_x", f.x).push("failure", &f.error);
        }
        kv
    }

    /// Snapshot table with header `t,x,rho,u,c,mach,r,s`.
    pub fn write_snapshots_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x,rho,u,c,mach,r,s")?;
        let xs = self.grid.xs();
        for snap in &self.snapshots {
            let f = &snap.field;
            for (i, x) in xs.iter().enumerate() {
                let rs = f.riemann(i);
                let st = gas::from_riemann(&self.params, &rs)
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
                let c = rs.sound_speed(&self.params);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    fmt_num(f.time),
                    fmt_num(*x),
                    fmt_num(st.rho),
                    fmt_num(st.u),
                    fmt_num(c),
                    fmt_num(st.u / c),
                    fmt_num(rs.r),
                    fmt_num(rs.s),
                )?;
            }
        }
        Ok(())
    }
}

fn perturbation_max(params: &GasParams, field: &Field, bg: &SteadyProfile) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..field.len() {
        match field.state(params, i) {
            Ok(st) => {
                worst = worst
                    .max((st.rho - bg.rho_tilde[i]).abs())
                    .max((st.u - bg.u_tilde[i]).abs());
            }
            Err(_) => return f64::INFINITY,
        }
    }
    worst
}

/// Integrates from `init` until `t_end`, sampling snapshots on the exact
/// grid `t0 + k * snapshot_every`.
///
/// A step failure does not produce `Err`: the record keeps everything up to
/// the last accepted level and the failure location in `failure`.
pub fn run(
    params: &GasParams,
    grid: &Grid1D,
    init: Field,
    signal: &BoundarySignal,
    opts: &RunOptions<'_>,
    mut observer: Option<&mut dyn FnMut(&Snapshot)>,
) -> Result<RunRecord> {
    if !(opts.t_end >= 0.0) || !opts.t_end.is_finite() {
        return Err(FannoError::InvalidParameter {
            name: "t_end",
            reason: format!("t_end must be non-negative (got {})", opts.t_end),
        });
    }
    if !(opts.snapshot_every > 0.0) || !opts.snapshot_every.is_finite() {
        return Err(FannoError::InvalidParameter {
            name: "snapshot_every",
            reason: format!("snapshot cadence must be positive (got {})", opts.snapshot_every),
        });
    }
    if init.len() != grid.nx {
        return Err(FannoError::GridMismatch(format!(
            "initial field has {} points, grid has {}",
            init.len(),
            grid.nx
        )));
    }
    if let Some(bg) = opts.background {
        if bg.len() != grid.nx {
            return Err(FannoError::GridMismatch(format!(
                "background has {} points, grid has {}",
                bg.len(),
                grid.nx
            )));
        }
    }

    let t0 = init.time;
    let t_end = t0 + opts.t_end;
    let h = opts.snapshot_every;
    let sample_time = |k: u64| t0 + k as f64 * h;

    let (min1, max2) = init.eigen_range(params);
    let mut record = RunRecord {
        params: *params,
        grid: *grid,
        t0,
        t_end,
        snapshot_every: h,
        snapshots: Vec::new(),
        perturbation: Vec::new(),
        steps: 0,
        min_lambda1: min1,
        max_lambda2: max2,
        failure: None,
    };
    if let Some(bg) = opts.background {
        record.perturbation.push((t0, perturbation_max(params, &init, bg)));
    }

    let first = Snapshot { index: Some(0), field: init };
    if let Some(obs) = observer.as_mut() {
        obs(&first);
    }
    record.snapshots.push(first);

    let mut field = record.snapshots[0].field.clone();
    if let Err(e) = check_field(params, grid, &field.r, &field.s, t0) {
        record.failure = Some(failure_from(e, t0));
        return Ok(record);
    }

    let mut k: u64 = 0;
    while field.time < t_end {
        let next_sample = sample_time(k + 1);
        let (target, sample) = if next_sample <= t_end { (next_sample, true) } else { (t_end, false) };

        let result = stable_dt(params, grid, &field).and_then(|dt_max| {
            let remaining = target - field.time;
            // Split the last two steps evenly so no sliver step precedes the target.
            let (dt, hit) = if remaining <= dt_max * (1.0 + 1e-9) {
                (remaining, true)
            } else if remaining < 2.0 * dt_max {
                (0.5 * remaining, false)
            } else {
                (dt_max, false)
            };
            step_by(params, grid, &field, signal, dt).map(|mut f| {
                if hit {
                    f.time = target;
                }
                (f, hit)
            })
        });

        match result {
            Ok((next, hit)) => {
                field = next;
                record.steps += 1;
                let (min1, max2) = field.eigen_range(params);
                record.min_lambda1 = record.min_lambda1.min(min1);
                record.max_lambda2 = record.max_lambda2.max(max2);
                if let Some(bg) = opts.background {
                    record.perturbation.push((field.time, perturbation_max(params, &field, bg)));
                }
                if hit {
                    let snap = Snapshot { index: if sample { Some(k + 1) } else { None }, field: field.clone() };
                    if sample {
                        k += 1;
                    }
                    if let Some(obs) = observer.as_mut() {
                        obs(&snap);
                    }
                    record.snapshots.push(snap);
                }
            }
            Err(e) => {
                log::info!("run stopped: {e}");
                record.failure = Some(failure_from(e, field.time));
                break;
            }
        }
    }
    Ok(record)
}

fn failure_from(error: FannoError, t_fallback: f64) -> RunFailure {
    match error {
        FannoError::SupersonicityLost { t, x } | FannoError::VacuumFormed { t, x } => {
            RunFailure { t, x, error }
        }
        other => RunFailure { t: t_fallback, x: f64::NAN, error: other },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fanno::{solve_profile, UpstreamState};
    use crate::signal::{make_boundary_signal, Shape};

    fn reference() -> (GasParams, UpstreamState) {
        (GasParams::new(2.0, 0.0, -1.0).unwrap(), UpstreamState::new(1.0, 2.0).unwrap())
    }

    #[test]
    fn grid_spacing_and_validation() {
        let g = Grid1D::new(0.35, 401, 0.9).unwrap();
        assert!((g.dx() * 400.0 - 0.35).abs() <= 1e-14 * 0.35);
        assert_eq!(g.x(400), 0.35);
        assert_eq!(g.xs().len(), 401);
        assert!(Grid1D::new(0.35, 7, 0.9).is_err());
        assert!(Grid1D::new(0.35, 401, 0.0).is_err());
        assert!(Grid1D::new(0.35, 401, 1.01).is_err());
        assert!(Grid1D::new(-1.0, 401, 0.9).is_err());
        assert!(Grid1D::new(1.0, 8, 1.0).is_ok());
    }

    #[test]
    fn cfl_step_arithmetic() {
        assert!((cfl_time_step(0.9, 0.01, 5.0) - 0.0018).abs() < 1e-18);
    }

    fn constant_setup(beta: f64) -> (GasParams, Grid1D, Field, BoundarySignal) {
        let params = GasParams::new(1.4, 0.0, beta).unwrap();
        let up = UpstreamState::new(1.0, 2.5).unwrap();
        let grid = Grid1D::new(1.0, 50, 0.9).unwrap();
        let rho = up.rho_minus(&params).unwrap();
        let st = FlowState::new(rho, 2.5).unwrap();
        let field = Field::from_states(&params, 0.0, &vec![st; 50]).unwrap();
        let signal = make_boundary_signal(&up, &params, 1.0, 0.0, Shape::Bump).unwrap();
        (params, grid, field, signal)
    }

    #[test]
    fn constant_state_is_a_fixed_point() {
        let (params, grid, mut field, signal) = constant_setup(0.0);
        let r0 = field.r[0];
        let s0 = field.s[0];
        for _ in 0..100 {
            field = step(&params, &grid, &field, &signal).unwrap();
        }
        assert!(field.r.iter().all(|&r| (r - r0).abs() <= 4.0 * f64::EPSILON * r0.abs()));
        assert!(field.s.iter().all(|&s| (s - s0).abs() <= 4.0 * f64::EPSILON * s0.abs()));
        assert!(field.time > 0.0);
    }

    #[test]
    fn transport_creates_no_new_extrema() {
        let (params, grid, mut field, _) = constant_setup(0.0);
        let up = UpstreamState::new(1.0, 2.5).unwrap();
        let signal = make_boundary_signal(&up, &params, 0.2, 0.05, Shape::SineRamp).unwrap();
        // Seed a localized bump in the interior.
        for i in 20..30 {
            field.s[i] += 0.02;
            field.r[i] -= 0.01;
        }
        let bound = |f: &Field| {
            let lo_r = f.r.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi_r = f.r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo_s = f.s.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi_s = f.s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (lo_r, hi_r, lo_s, hi_s)
        };
        // Include the inflow range over one period.
        let (mut lo_r, mut hi_r, mut lo_s, mut hi_s) = bound(&field);
        for k in 0..2000 {
            let rs = signal.riemann(k as f64 * 1e-4).unwrap();
            lo_r = lo_r.min(rs.r);
            hi_r = hi_r.max(rs.r);
            lo_s = lo_s.min(rs.s);
            hi_s = hi_s.max(rs.s);
        }
        for _ in 0..200 {
            field = step(&params, &grid, &field, &signal).unwrap();
            let (a, b, c, d) = bound(&field);
            let tol = 1e-12;
            assert!(a >= lo_r - tol && b <= hi_r + tol && c >= lo_s - tol && d <= hi_s + tol);
        }
    }

    #[test]
    fn steady_profile_step_change_is_first_order() {
        let (params, up) = reference();
        let signal = make_boundary_signal(&up, &params, 1.0, 0.0, Shape::Bump).unwrap();
        let mut changes = Vec::new();
        for nx in [101, 201, 401] {
            let profile = solve_profile(&params, &up, 0.3, nx).unwrap();
            let grid = Grid1D::new(0.3, nx, 0.9).unwrap();
            let field = Field::from_profile(&profile).unwrap();
            let dt = stable_dt(&params, &grid, &field).unwrap();
            let next = step(&params, &grid, &field, &signal).unwrap();
            // Rate of change per unit time is the scheme's steady residual.
            let change = field
                .r
                .iter()
                .zip(&next.r)
                .chain(field.s.iter().zip(&next.s))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / dt;
            changes.push(change);
        }
        for w in changes.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 0.8, "{changes:?}");
        }
    }

    #[test]
    fn subsonic_field_is_rejected_with_location() {
        let params = GasParams::new(1.4, 0.0, 0.0).unwrap();
        let up = UpstreamState::new(1.0, 2.5).unwrap();
        let grid = Grid1D::new(1.0, 10, 0.9).unwrap();
        let rho = up.rho_minus(&params).unwrap();
        let mut states = vec![FlowState::new(rho, 2.5).unwrap(); 10];
        states[6].u = 0.5;
        let field = Field::from_states(&params, 0.0, &states).unwrap();
        let signal = make_boundary_signal(&up, &params, 1.0, 0.0, Shape::Bump).unwrap();
        match step(&params, &grid, &field, &signal) {
            Err(FannoError::SupersonicityLost { t, x }) => {
                assert_eq!(t, 0.0);
                assert_eq!(x, grid.x(6));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn run_with_zero_end_time_keeps_initial_snapshot_only() {
        let (params, grid, field, signal) = constant_setup(0.0);
        let opts = RunOptions { t_end: 0.0, snapshot_every: 0.1, background: None };
        let rec = run(&params, &grid, field.clone(), &signal, &opts, None).unwrap();
        assert_eq!(rec.snapshots.len(), 1);
        assert_eq!(rec.snapshots[0].field, field);
        assert_eq!(rec.steps, 0);
        assert!(rec.failure.is_none());
    }

    #[test]
    fn run_hits_sample_times_exactly() {
        let (params, grid, field, signal) = constant_setup(-0.1);
        let opts = RunOptions { t_end: 0.55, snapshot_every: 0.1, background: None };
        let mut seen = Vec::new();
        let mut obs = |s: &Snapshot| seen.push((s.index, s.field.time));
        let rec = run(&params, &grid, field, &signal, &opts, Some(&mut obs)).unwrap();
        assert_eq!(rec.snapshots.len(), 7);
        for (k, snap) in rec.snapshots.iter().take(6).enumerate() {
            assert_eq!(snap.index, Some(k as u64));
            assert_eq!(snap.field.time, k as f64 * 0.1);
        }
        let last = rec.snapshots.last().unwrap();
        assert_eq!(last.index, None);
        assert_eq!(last.field.time, 0.55);
        assert_eq!(seen.len(), 7);
        assert!(rec.snapshot_at(3).is_some());
        assert!(rec.snapshot_at(9).is_none());
    }

    #[test]
    fn run_records_failure_instead_of_nan() {
        let (params, up) = reference();
        let profile = solve_profile(&params, &up, 0.35, 101).unwrap();
        let grid = Grid1D::new(0.35, 101, 0.9).unwrap();
        // Admissible at the inlet, but enough to choke the slow end of the duct.
        let signal = make_boundary_signal(&up, &params, 1.0, 0.2, Shape::Bump).unwrap();
        let opts = RunOptions { t_end: 5.0, snapshot_every: 1.0 / 64.0, background: Some(&profile) };
        let rec = run(&params, &grid, Field::from_profile(&profile).unwrap(), &signal, &opts, None).unwrap();
        let failure = rec.failure.clone().expect("expected supersonicity loss");
        assert!(failure.t > 0.0 && failure.t < 5.0);
        assert!(failure.x > 0.0 && failure.x <= 0.35);
        for snap in &rec.snapshots {
            assert!(snap.field.r.iter().chain(&snap.field.s).all(|v| v.is_finite()));
        }
        assert!(matches!(rec.into_result(), Err(FannoError::SupersonicityLost { .. })));
    }

    #[test]
    fn snapshot_csv_header_and_row_count() {
        let (params, grid, field, signal) = constant_setup(0.0);
        let opts = RunOptions { t_end: 0.1, snapshot_every: 0.05, background: None };
        let rec = run(&params, &grid, field, &signal, &opts, None).unwrap();
        let mut buf = Vec::new();
        rec.write_snapshots_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,x,rho,u,c,mach,r,s\n"));
        assert_eq!(text.lines().count(), 1 + rec.snapshots.len() * 50);
    }
}
