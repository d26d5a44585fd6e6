use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const REFERENCE: &str = "\
# reference duct
gas.gamma = 2
gas.alpha = 0
gas.beta = -1
upstream.c_minus = 1
upstream.u_minus = 2
duct.length = 0.35
grid.nx = 101
boundary.epsilon = 1e-3
";

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("fanno-cli-test-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn config(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.join(name);
        fs::write(&path, text).unwrap();
        path
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.0.join(rel)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn fanno(args: &[&str], config: &Path, out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fanno"));
    cmd.args(args).arg("--config").arg(config).env("FANNO_LOG", "quiet");
    if let Some(out) = out {
        cmd.arg("--out").arg(out);
    }
    cmd.output().unwrap()
}

fn read_kv(path: &Path) -> Vec<(String, String)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

fn value(kv: &[(String, String)], key: &str) -> Option<String> {
    kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
}

#[test]
fn steady_command() {
    let s = Scratch::new("steady");
    let cfg = s.config("ref.cfg", REFERENCE);
    let out = fanno(&["steady"], &cfg, Some(&s.path("out")));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty(), "quiet run wrote to stderr");
    let kv = read_kv(&s.path("out/steady.txt"));
    assert_eq!(value(&kv, "regime").as_deref(), Some("friction_supersonic"));
    let l: f64 = value(&kv, "l_max").unwrap().parse().unwrap();
    assert!((l - 0.3601184251576903).abs() < 1e-13);

    let long = s.config("long.cfg", &REFERENCE.replace("duct.length = 0.35", "duct.length = 0.4"));
    let out = fanno(&["steady"], &long, Some(&s.path("long")));
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("L_m = 0.36011842"), "{msg}");
}

#[test]
fn simulate_outputs_are_byte_identical_across_runs() {
    let s = Scratch::new("determinism");
    let cfg = s.config("ref.cfg", &format!("{REFERENCE}sim.t_end = 1.5\n"));
    for dir in ["a", "b"] {
        let out = fanno(&["simulate"], &cfg, Some(&s.path(dir)));
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["snapshots.csv", "profile.csv", "norms.txt", "run.txt"] {
        let a = fs::read(s.path(&format!("a/{name}"))).unwrap();
        let b = fs::read(s.path(&format!("b/{name}"))).unwrap();
        assert!(a == b, "{name} differs between runs");
    }
    let csv = fs::read_to_string(s.path("a/snapshots.csv")).unwrap();
    assert!(csv.starts_with("t,x,rho,u,c,mach,r,s\n"));
}

#[test]
fn outputs_directory_from_config_and_subset() {
    let s = Scratch::new("which");
    let dir = s.path("from-config");
    let cfg = s.config(
        "ref.cfg",
        &format!("{REFERENCE}sim.t_end = 0.5\noutputs.directory = {}\noutputs.which = norms\n", dir.display()),
    );
    let out = fanno(&["simulate"], &cfg, None);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.join("norms.txt").exists() && dir.join("run.txt").exists());
    assert!(!dir.join("snapshots.csv").exists() && !dir.join("profile.csv").exists());
}

#[test]
fn supersonicity_loss_exits_three() {
    let s = Scratch::new("loss");
    let cfg = s.config("big.cfg", &REFERENCE.replace("boundary.epsilon = 1e-3", "boundary.epsilon = 10"));
    let out = fanno(&["simulate"], &cfg, Some(&s.path("out")));
    assert_eq!(out.status.code(), Some(3));
    let kv = read_kv(&s.path("out/run.txt"));
    assert_eq!(value(&kv, "status").as_deref(), Some("supersonicity_lost"));
    assert_eq!(value(&kv, "failure_x").as_deref(), Some("0"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x = 0"));
}

#[test]
fn config_errors_exit_four() {
    let s = Scratch::new("config");
    let bad = s.config("bad.cfg", &REFERENCE.replace("gas.gamma = 2", "gas.gamma = 1"));
    let out = fanno(&["check-config"], &bad, None);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma must exceed 1"));

    let typo = s.config("typo.cfg", &REFERENCE.replace("gas.beta", "gas.betta"));
    let out = fanno(&["steady"], &typo, None);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let out = fanno(&["simulate"], &s.path("missing.cfg"), None);
    assert_eq!(out.status.code(), Some(4));

    let out = Command::new(env!("CARGO_BIN_EXE_fanno")).arg("explode").output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn check_config_prints_normal_form() {
    let s = Scratch::new("check");
    let cfg = s.config("ref.cfg", REFERENCE);
    let out = fanno(&["check-config"], &cfg, None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("grid.cfl=0.9\n") && text.contains("sim.t_end=auto\n"), "{text}");
    assert!(text.contains("sim.snapshot_every=0.015625\n"));
}

#[test]
fn sweep_keeps_input_order_in_parallel() {
    let s = Scratch::new("sweep");
    let cfg = s.config("ref.cfg", &format!("{REFERENCE}sim.t_end = 0.5\n"));
    let out = Command::new(env!("CARGO_BIN_EXE_fanno"))
        .args(["sweep", "--axis", "beta", "--values", "-0.5,-2,-1,0.5,x", "--jobs", "4", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(s.path("out"))
        .env("FANNO_LOG", "quiet")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(s.path("out/sweep.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(csv.lines().next(), Some("value,regime,s_c,l_max,residual_max,exit"));
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), ["-0.5", "-2", "-1", "0.5", "x"]);
    assert_eq!(rows.iter().map(|r| r[5]).collect::<Vec<_>>(), ["0", "2", "0", "0", "4"]);
    let l = |i: usize| rows[i][3].parse::<f64>().unwrap();
    assert!((l(0) / l(2) - 2.0).abs() < 1e-12 && (l(2) / l(1) - 2.0).abs() < 1e-12);
    assert_eq!(rows[3][3], "unbounded");

    let out = Command::new(env!("CARGO_BIN_EXE_fanno"))
        .args(["sweep", "--axis", "delta", "--values", "1", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
