use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use fanno_ffi::*;

const REFERENCE: &str = "gas.gamma = 2\ngas.alpha = 0\ngas.beta = -1\nupstream.c_minus = 1\n\
upstream.u_minus = 2\nduct.length = 0.35\ngrid.nx = 101\n";

fn last_error() -> String {
    let p = fanno_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn gas(gamma: f64, alpha: f64, beta: f64) -> *mut FannoGas {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { fanno_gas_new(gamma, alpha, beta, &mut g) }, FannoStatus::Ok);
    g
}

#[test]
fn gas_validation_and_lengths() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { fanno_gas_new(1.0, 0.0, -1.0, &mut g) }, FannoStatus::Config);
    assert!(g.is_null());
    assert!(last_error().contains("gamma must exceed 1"));

    let g = gas(2.0, 0.0, -1.0);
    let (mut l, mut unbounded) = (0.0, -1);
    assert_eq!(unsafe { fanno_max_duct_length(g, 1.0, 2.0, &mut l, &mut unbounded) }, FannoStatus::Ok);
    assert_eq!(unbounded, 0);
    assert!((l - 0.3601184251576903).abs() < 1e-14);
    assert!(fanno_last_error().is_null());
    let mut sc = 0.0;
    assert_eq!(unsafe { fanno_critical_speed(g, 1.0, 2.0, &mut sc) }, FannoStatus::Ok);
    assert!((sc - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
    assert_eq!(unsafe { fanno_max_duct_length(g, 1.0, 1.0, &mut l, &mut unbounded) }, FannoStatus::Choked);
    assert_eq!(unsafe { fanno_max_duct_length(g, 1.0, 2.0, ptr::null_mut(), &mut unbounded) }, FannoStatus::NullPointer);
    unsafe { fanno_gas_free(g) };

    let g = gas(2.0, 0.0, 1.0);
    assert_eq!(unsafe { fanno_max_duct_length(g, 1.0, 2.0, &mut l, &mut unbounded) }, FannoStatus::Ok);
    assert_eq!(unbounded, 1);
    assert!(l.is_infinite());
    unsafe { fanno_gas_free(g) };
    unsafe { fanno_gas_free(ptr::null_mut()) };
}

#[test]
fn profile_round_trip() {
    let g = gas(2.0, 0.0, -1.0);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { fanno_profile_solve(g, 1.0, 2.0, 0.4, 21, &mut p) }, FannoStatus::Choked);
    assert!(last_error().contains("L_m"));
    assert_eq!(unsafe { fanno_profile_solve(g, 1.0, 2.0, 0.35, 21, &mut p) }, FannoStatus::Ok);
    let n = unsafe { fanno_profile_len(p) };
    assert_eq!(n, 21);
    let (mut x, mut u, mut c, mut rho) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let status =
        unsafe { fanno_profile_copy(p, x.as_mut_ptr(), u.as_mut_ptr(), c.as_mut_ptr(), rho.as_mut_ptr(), n) };
    assert_eq!(status, FannoStatus::Ok);
    assert_eq!((x[0], x[n - 1], u[0], c[0]), (0.0, 0.35, 2.0, 1.0));
    for i in 0..n {
        assert!((c[i] - (2.0 * rho[i]).sqrt()).abs() < 1e-14);
        assert!(c[i] < u[i]);
    }
    assert_eq!(unsafe { fanno_profile_copy(p, x.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), 3) }, FannoStatus::OutOfRange);
    let mut regime = 0;
    assert_eq!(unsafe { fanno_profile_regime(p, &mut regime) }, FannoStatus::Ok);
    assert_eq!(regime, 4);
    unsafe {
        fanno_profile_free(p);
        fanno_gas_free(g);
    }
}

#[test]
fn config_and_simulation() {
    let bad = CString::new("gas.gamma = 2\ngas.gamma = 3\n").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { fanno_config_parse(bad.as_ptr(), &mut cfg) }, FannoStatus::Config);
    assert!(last_error().contains("duplicate"));

    let text = CString::new(format!("{REFERENCE}boundary.epsilon = 1e-3\n")).unwrap();
    assert_eq!(unsafe { fanno_config_parse(text.as_ptr(), &mut cfg) }, FannoStatus::Ok);
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { fanno_simulate(cfg, &mut run) }, FannoStatus::Ok);
    let mut res = -1.0;
    assert_eq!(unsafe { fanno_run_residual_max(run, &mut res) }, FannoStatus::Ok);
    assert!((0.0..1e-3).contains(&res));
    let (mut v, mut d) = (0.0, 0.0);
    assert_eq!(unsafe { fanno_run_perturbation_norms(run, &mut v, &mut d) }, FannoStatus::Ok);
    assert!(v > 0.0 && d > 0.0);
    let count = unsafe { fanno_run_snapshot_count(run) };
    assert!(count > 64);
    let (mut t, mut rho, mut u) = (0.0, vec![0.0; 101], vec![0.0; 101]);
    assert_eq!(unsafe { fanno_run_snapshot(run, 64, &mut t, rho.as_mut_ptr(), u.as_mut_ptr(), 101) }, FannoStatus::Ok);
    assert_eq!(t, 1.0);
    assert_eq!(
        unsafe { fanno_run_snapshot(run, count, &mut t, rho.as_mut_ptr(), u.as_mut_ptr(), 101) },
        FannoStatus::OutOfRange
    );
    assert_eq!(unsafe { fanno_run_failure(run, &mut t, ptr::null_mut()) }, 0);
    unsafe {
        fanno_run_free(run);
        fanno_config_free(cfg);
    }
}

#[test]
fn lost_supersonicity_still_yields_a_run() {
    let text = CString::new(format!("{REFERENCE}boundary.epsilon = 0.2\nsim.t_end = 3\n")).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { fanno_config_parse(text.as_ptr(), &mut cfg) }, FannoStatus::Ok);
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { fanno_simulate(cfg, &mut run) }, FannoStatus::SupersonicityLost);
    assert!(!run.is_null());
    let (mut t, mut x) = (f64::NAN, f64::NAN);
    assert_eq!(unsafe { fanno_run_failure(run, &mut t, &mut x) }, 1);
    assert!(t.is_finite() && (0.0..=0.35).contains(&x));
    let mut res = 0.0;
    assert_eq!(unsafe { fanno_run_residual_max(run, &mut res) }, FannoStatus::Unavailable);
    unsafe {
        fanno_run_free(run);
        fanno_config_free(cfg);
    }

    let text = CString::new(format!("{REFERENCE}boundary.epsilon = 10\n")).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { fanno_config_parse(text.as_ptr(), &mut cfg) }, FannoStatus::Ok);
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { fanno_simulate(cfg, &mut run) }, FannoStatus::SupersonicityLost);
    assert!(run.is_null());
    assert!(last_error().contains("x = 0"));
    unsafe { fanno_config_free(cfg) };
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/fanno.h")).unwrap();
    for name in [
        "fanno_last_error",
        "fanno_gas_new",
        "fanno_gas_free",
        "fanno_critical_speed",
        "fanno_max_duct_length",
        "fanno_profile_solve",
        "fanno_profile_len",
        "fanno_profile_regime",
        "fanno_profile_copy",
        "fanno_profile_free",
        "fanno_config_parse",
        "fanno_config_free",
        "fanno_simulate",
        "fanno_run_failure",
        "fanno_run_residual_max",
        "fanno_run_perturbation_norms",
        "fanno_run_snapshot_count",
        "fanno_run_snapshot",
        "fanno_run_free",
        "typedef struct FannoRun FannoRun;",
        "FANNO_STATUS_SUPERSONICITY_LOST = 3",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles `tests/c/smoke.c` against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let profile_dir: PathBuf = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libfanno_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::temp_dir().join(format!("fanno-ffi-smoke-{}", std::process::id()));
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let build = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .expect("C compiler");
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
