//! C interface to `fanno-core`.
//!
//! Objects are opaque handles created by `*_new`/`*_solve`/`*_parse`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`FannoStatus`]; on failure, [`fanno_last_error`] describes the
//! problem for the calling thread. Outputs are written through pointers only
//! on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fanno_core::cli::{simulate, SimulationOutcome};
use fanno_core::config::{parse_config, ConfigError, ScenarioConfig};
use fanno_core::fanno::{self, MaxLength, Regime, SteadyProfile, UpstreamState};
use fanno_core::gas::GasParams;
use fanno_core::FannoError;

/// Status codes; the nonzero values 1 to 4 match the `fanno` exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FannoStatus {
    Ok = 0,
    Internal = 1,
    /// Duct longer than the maximal length, or no steady solution over it.
    Choked = 2,
    SupersonicityLost = 3,
    Config = 4,
    NullPointer = 5,
    /// Index or buffer length out of range.
    OutOfRange = 6,
    /// Requested quantity does not exist for this object.
    Unavailable = 7,
}

/// Gas parameters `gamma`, `alpha`, `beta`.
pub struct FannoGas {
    inner: GasParams,
}

/// Steady profile sampled on a uniform grid.
pub struct FannoProfile {
    inner: SteadyProfile,
}

/// Validated scenario.
pub struct FannoConfig {
    inner: ScenarioConfig,
}

/// Finished transient run with its diagnostics.
pub struct FannoRun {
    inner: SimulationOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &FannoError) -> FannoStatus {
    match err.exit_code() {
        2 => FannoStatus::Choked,
        3 => FannoStatus::SupersonicityLost,
        4 => FannoStatus::Config,
        _ => FannoStatus::Internal,
    }
}

fn fail(err: FannoError) -> FannoStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn fail_config(err: ConfigError) -> FannoStatus {
    set_error(err.to_string());
    FannoStatus::Config
}

fn null(what: &str) -> FannoStatus {
    set_error(format!("null pointer passed for `{what}`"));
    FannoStatus::NullPointer
}

/// Runs `body`, converting panics into `Internal`.
fn guard(body: impl FnOnce() -> FannoStatus) -> FannoStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal error (panic)");
            FannoStatus::Internal
        }
    }
}

fn upstream(c_minus: f64, u_minus: f64) -> Result<UpstreamState, FannoStatus> {
    UpstreamState::new(c_minus, u_minus).map_err(fail)
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn fanno_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fanno_gas_new(gamma: f64, alpha: f64, beta: f64, out: *mut *mut FannoGas) -> FannoStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match GasParams::new(gamma, alpha, beta) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FannoGas { inner }));
                FannoStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `gas` must be NULL or a handle from [`fanno_gas_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fanno_gas_free(gas: *mut FannoGas) {
    if !gas.is_null() {
        drop(Box::from_raw(gas));
    }
}

/// Sonic speed `s_c` reached at the end of a maximal-length duct.
///
/// # Safety
/// `gas` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanno_critical_speed(
    gas: *const FannoGas,
    c_minus: f64,
    u_minus: f64,
    out: *mut f64,
) -> FannoStatus {
    guard(|| {
        let (Some(gas), false) = (gas.as_ref(), out.is_null()) else {
            return null("gas/out");
        };
        match upstream(c_minus, u_minus) {
            Ok(up) => {
                *out = fanno::critical_speed(&up, &gas.inner);
                FannoStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Maximal duct length. `*unbounded` is set to 1 (and `*out` to infinity)
/// when no finite limit exists.
///
/// # Safety
/// `gas` must be a live handle; `out` and `unbounded` writable.
#[no_mangle]
pub unsafe extern "C" fn fanno_max_duct_length(
    gas: *const FannoGas,
    c_minus: f64,
    u_minus: f64,
    out: *mut f64,
    unbounded: *mut i32,
) -> FannoStatus {
    guard(|| {
        let Some(gas) = gas.as_ref() else { return null("gas") };
        if out.is_null() || unbounded.is_null() {
            return null("out/unbounded");
        }
        let up = match upstream(c_minus, u_minus) {
            Ok(u) => u,
            Err(s) => return s,
        };
        match fanno::max_duct_length(&gas.inner, &up) {
            Ok(MaxLength::Finite(l)) => {
                *out = l;
                *unbounded = 0;
                FannoStatus::Ok
            }
            Ok(MaxLength::Unbounded) => {
                *out = f64::INFINITY;
                *unbounded = 1;
                FannoStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Solves the steady profile on `n_points` uniform points of `[0, length]`.
///
/// # Safety
/// `gas` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanno_profile_solve(
    gas: *const FannoGas,
    c_minus: f64,
    u_minus: f64,
    length: f64,
    n_points: usize,
    out: *mut *mut FannoProfile,
) -> FannoStatus {
    guard(|| {
        let Some(gas) = gas.as_ref() else { return null("gas") };
        if out.is_null() {
            return null("out");
        }
        let up = match upstream(c_minus, u_minus) {
            Ok(u) => u,
            Err(s) => return s,
        };
        match fanno::solve_profile(&gas.inner, &up, length, n_points) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FannoProfile { inner }));
                FannoStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of grid points, or 0 for NULL.
///
/// # Safety
/// `profile` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fanno_profile_len(profile: *const FannoProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.inner.len())
}

/// Regime code: 1 forced subsonic, 2 forced supersonic, 3 friction
/// subsonic, 4 friction supersonic, 0 uniform (`beta = 0`).
///
/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanno_profile_regime(profile: *const FannoProfile, out: *mut i32) -> FannoStatus {
    guard(|| {
        let (Some(p), false) = (profile.as_ref(), out.is_null()) else {
            return null("profile/out");
        };
        *out = match p.inner.regime {
            Regime::Uniform => 0,
            r => r.case_number().map_or(0, i32::from),
        };
        FannoStatus::Ok
    })
}

/// Copies the profile into caller buffers of length `len`, which must equal
/// [`fanno_profile_len`]. Any of the four buffers may be NULL to skip it.
///
/// # Safety
/// Non-NULL buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fanno_profile_copy(
    profile: *const FannoProfile,
    x: *mut f64,
    u: *mut f64,
    c: *mut f64,
    rho: *mut f64,
    len: usize,
) -> FannoStatus {
    guard(|| {
        let Some(p) = profile.as_ref() else { return null("profile") };
        let p = &p.inner;
        if len != p.len() {
            set_error(format!("buffer length {len} does not match profile length {}", p.len()));
            return FannoStatus::OutOfRange;
        }
        for (dst, src) in [(x, &p.xs), (u, &p.u_tilde), (c, &p.c_tilde), (rho, &p.rho_tilde)] {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(src.as_ptr(), dst, len);
            }
        }
        FannoStatus::Ok
    })
}

/// # Safety
/// `profile` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fanno_profile_free(profile: *mut FannoProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Parses a scenario in the `section.key = value` format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanno_config_parse(text: *const c_char, out: *mut *mut FannoConfig) -> FannoStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return null("text/out");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            set_error("config text is not valid UTF-8");
            return FannoStatus::Config;
        };
        match parse_config(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FannoConfig { inner }));
                FannoStatus::Ok
            }
            Err(e) => fail_config(e),
        }
    })
}

/// # Safety
/// `config` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fanno_config_free(config: *mut FannoConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the scenario. When supersonicity is lost during the run, the
/// handle is still produced (for [`fanno_run_failure`]) and the status is
/// `SupersonicityLost`. Failures before the run starts produce no handle.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanno_simulate(config: *const FannoConfig, out: *mut *mut FannoRun) -> FannoStatus {
    guard(|| {
        let Some(cfg) = config.as_ref() else { return null("config") };
        if out.is_null() {
            return null("out");
        }
        match simulate(&cfg.inner) {
            Ok(inner) => {
                let status = match &inner.record.failure {
                    Some(f) => {
                        set_error(format!("{} (first failure at t = {}, x = {})", f.error, f.t, f.x));
                        FannoStatus::SupersonicityLost
                    }
                    None => FannoStatus::Ok,
                };
                *out = Box::into_raw(Box::new(FannoRun { inner }));
                status
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes the first-failure coordinates and returns 1 if the run lost
/// supersonicity, returns 0 otherwise (or for NULL arguments).
///
/// # Safety
/// `run` must be NULL or a live handle; `t` and `x` writable if non-NULL.
#[no_mangle]
pub unsafe extern "C" fn fanno_run_failure(run: *const FannoRun, t: *mut f64, x: *mut f64) -> i32 {
    let Some(f) = run.as_ref().and_then(|r| r.inner.record.failure.as_ref()) else {
        return 0;
    };
    if !t.is_null() {
        *t = f.t;
    }
    if !x.is_null() {
        *x = f.x;
    }
    1
}

/// Max periodicity residual over one period after flushing.
///
/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanno_run_residual_max(run: *const FannoRun, out: *mut f64) -> FannoStatus {
    guard(|| {
        let (Some(r), false) = (run.as_ref(), out.is_null()) else {
            return null("run/out");
        };
        match &r.inner.periodicity {
            Some(p) => {
                *out = p.residual_max;
                FannoStatus::Ok
            }
            None => {
                set_error("periodicity residual unavailable (run failed or too short)");
                FannoStatus::Unavailable
            }
        }
    })
}

/// Sup-norm of the perturbation from the steady profile and of its
/// x-derivative, over all snapshots.
///
/// # Safety
/// `run` must be a live handle; `value` and `derivative` writable.
#[no_mangle]
pub unsafe extern "C" fn fanno_run_perturbation_norms(
    run: *const FannoRun,
    value: *mut f64,
    derivative: *mut f64,
) -> FannoStatus {
    guard(|| {
        let Some(r) = run.as_ref() else { return null("run") };
        if value.is_null() || derivative.is_null() {
            return null("value/derivative");
        }
        match &r.inner.norms {
            Some(n) => {
                *value = n.value_max;
                *derivative = n.derivative_max;
                FannoStatus::Ok
            }
            None => {
                set_error("perturbation norms unavailable");
                FannoStatus::Unavailable
            }
        }
    })
}

/// Number of stored snapshots, or 0 for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fanno_run_snapshot_count(run: *const FannoRun) -> usize {
    run.as_ref().map_or(0, |r| r.inner.record.snapshots.len())
}

/// Copies snapshot `index` as primitive variables into buffers of length
/// `len` (the grid size). `*time` receives the snapshot time.
///
/// # Safety
/// `run` must be a live handle; `time` writable; `rho` and `u` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fanno_run_snapshot(
    run: *const FannoRun,
    index: usize,
    time: *mut f64,
    rho: *mut f64,
    u: *mut f64,
    len: usize,
) -> FannoStatus {
    guard(|| {
        let Some(r) = run.as_ref() else { return null("run") };
        if time.is_null() || rho.is_null() || u.is_null() {
            return null("time/rho/u");
        }
        let rec = &r.inner.record;
        let Some(snap) = rec.snapshots.get(index) else {
            set_error(format!("snapshot {index} out of range ({} stored)", rec.snapshots.len()));
            return FannoStatus::OutOfRange;
        };
        if len != snap.field.len() {
            set_error(format!("buffer length {len} does not match grid size {}", snap.field.len()));
            return FannoStatus::OutOfRange;
        }
        match snap.field.primitives(&rec.params) {
            Ok((r_vals, u_vals)) => {
                *time = snap.field.time;
                ptr::copy_nonoverlapping(r_vals.as_ptr(), rho, len);
                ptr::copy_nonoverlapping(u_vals.as_ptr(), u, len);
                FannoStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fanno_run_free(run: *mut FannoRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
