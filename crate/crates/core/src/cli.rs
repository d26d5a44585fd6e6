//! Scenario orchestration behind the `fanno` binary: steady solves,
//! transient runs, parameter sweeps and the files they emit.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{ConfigError, EndTime, OutputKind, RawConfig, ScenarioConfig};
use crate::diagnostics::{
    flushing_time_profile, flushing_time_record, periodicity_residual, periodicity_start, perturbation_norms,
    PerturbationNorms, PeriodicityReport,
};
use crate::error::{exit_code, FannoError, Result};
use crate::fanno::{classify_regime, critical_speed, existence_length, solve_profile, MaxLength, Regime, SteadyProfile};
use crate::output::{fmt_num, KeyValues};
use crate::signal::{check_compatibility, make_boundary_signal, CompatibilityReport, CornerData};
use crate::transient::{run, Field, RunOptions, RunRecord};

/// Corner compatibility tolerance reported in `run.txt`.
pub const COMPATIBILITY_TOL: f64 = 1e-10;

/// Parameters a sweep may vary, with the config key each one sets.
pub const SWEEP_AXES: &[(&str, &str)] = &[
    ("alpha", "gas.alpha"),
    ("beta", "gas.beta"),
    ("gamma", "gas.gamma"),
    ("u_minus", "upstream.u_minus"),
    ("c_minus", "upstream.c_minus"),
    ("epsilon", "boundary.epsilon"),
    ("nx", "grid.nx"),
];

pub fn sweep_key(axis: &str) -> Option<&'static str> {
    SWEEP_AXES.iter().find(|(a, _)| *a == axis).map(|(_, k)| *k)
}

/// Failure of a command: either a config problem or a solver error.
#[derive(Debug)]
pub enum CommandError {
    Config(ConfigError),
    Solver(FannoError),
    Io(io::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => exit_code::CONFIG,
            CommandError::Solver(e) => e.exit_code(),
            CommandError::Io(_) => exit_code::INTERNAL,
        }
    }
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Config(e) => write!(f, "config error: {e}"),
            CommandError::Solver(e) => write!(f, "{e}"),
            CommandError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e)
    }
}

impl From<FannoError> for CommandError {
    fn from(e: FannoError) -> Self {
        CommandError::Solver(e)
    }
}

impl From<io::Error> for CommandError {
    fn from(e: io::Error) -> Self {
        CommandError::Io(e)
    }
}

pub fn load_raw(path: &Path) -> std::result::Result<RawConfig, CommandError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CommandError::Config(ConfigError::Validation {
            field: path.display().to_string(),
            reason: format!("cannot read config: {e}"),
        })
    })?;
    Ok(RawConfig::parse(&text)?)
}

pub fn load_config(path: &Path) -> std::result::Result<ScenarioConfig, CommandError> {
    Ok(load_raw(path)?.validate()?)
}

/// Steady solve on the configured grid (`nx` points over `[0, L]`).
pub fn solve_steady(cfg: &ScenarioConfig) -> Result<SteadyProfile> {
    solve_profile(&cfg.gas, &cfg.upstream, cfg.length, cfg.nx)
}

pub fn steady_summary(profile: &SteadyProfile) -> KeyValues {
    let last = profile.len() - 1;
    let mut kv = KeyValues::new();
    kv.push("regime", profile.regime)
        .push("case", profile.params.case_tag().as_str())
        .push_num("s_c", profile.s_c)
        .push("l_max", profile.l_max)
        .push_num("length", profile.length())
        .push("n_points", profile.len())
        .push_num("u_end", profile.u_tilde[last])
        .push_num("c_end", profile.c_tilde[last])
        .push_num("rho_end", profile.rho_tilde[last])
        .push_num("mach_end", profile.mach(last));
    kv
}

/// Everything a transient scenario produces.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub profile: SteadyProfile,
    pub record: RunRecord,
    pub compatibility: CompatibilityReport,
    /// Flushing time of the steady background.
    pub flushing_profile: f64,
    /// Flushing time from the eigenvalues observed during the run.
    pub flushing_record: Option<f64>,
    pub periodicity: Option<PeriodicityReport>,
    pub norms: Option<PerturbationNorms>,
}

impl SimulationOutcome {
    pub fn failed(&self) -> bool {
        self.record.failure.is_some()
    }

    pub fn summary(&self) -> KeyValues {
        let mut kv = self.record.summary();
        kv.push("regime", self.profile.regime)
            .push_num("flushing_time_profile", self.flushing_profile);
        if let Some(t1) = self.flushing_record {
            kv.push_num("flushing_time", t1);
        }
        let c = &self.compatibility;
        kv.push_num("compat_mass", c.mass)
            .push_num("compat_momentum", c.momentum)
            .push_num("compat_rho_mismatch", c.rho_mismatch)
            .push_num("compat_u_mismatch", c.u_mismatch)
            .push("compat_ok", c.passes());
        match &self.periodicity {
            Some(p) => {
                kv.push_num("t_check", p.t_check).push_num("residual_max", p.residual_max);
            }
            None => {
                kv.push("periodicity", "unavailable");
            }
        }
        kv
    }

    pub fn norms_summary(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        if let Some(n) = &self.norms {
            kv.push_num("value_max", n.value_max)
                .push_num("derivative_max", n.derivative_max)
                .push_num("c1", n.c1());
        }
        if let Some(p) = self.record.max_perturbation() {
            kv.push_num("step_value_max", p);
        }
        if let Some(p) = &self.periodicity {
            for (k, v) in p.summary().entries() {
                kv.push(format!("periodicity.{k}"), v);
            }
        }
        kv
    }
}

/// End time used for the run: `1.05 * T1 + 3 P` unless fixed in the config.
pub fn resolve_t_end(cfg: &ScenarioConfig, flushing_profile: f64) -> f64 {
    match cfg.t_end {
        EndTime::Fixed(t) => t,
        EndTime::Auto => periodicity_start(flushing_profile) + 3.0 * cfg.period,
    }
}

/// Steady solve, transient run from the steady profile, and diagnostics.
///
/// Errors are returned only when the run cannot start; a loss of
/// supersonicity during the run is recorded in `record.failure`.
pub fn simulate(cfg: &ScenarioConfig) -> Result<SimulationOutcome> {
    let profile = solve_steady(cfg)?;
    let flushing_profile = flushing_time_profile(&profile)?;
    let signal = make_boundary_signal(&cfg.upstream, &cfg.gas, cfg.period, cfg.epsilon, cfg.shape)?;
    let compatibility =
        check_compatibility(&cfg.gas, &CornerData::from_profile(&profile), &signal, COMPATIBILITY_TOL);
    if !compatibility.passes() {
        log::warn!("corner compatibility residual {} exceeds {COMPATIBILITY_TOL}", compatibility.max_residual());
    }
    let grid = cfg.grid();
    let t_end = resolve_t_end(cfg, flushing_profile);
    log::info!(
        "simulate: nx = {}, dx = {}, t_end = {t_end}, T1(profile) = {flushing_profile}",
        grid.nx(),
        grid.dx()
    );
    let opts = RunOptions { t_end, snapshot_every: cfg.snapshot_every, background: Some(&profile) };
    let record = run(&cfg.gas, &grid, Field::from_profile(&profile)?, &signal, &opts, None)?;
    log::info!("run finished after {} steps, {} snapshots", record.steps, record.snapshots.len());

    let norms = perturbation_norms(&record, &profile)?;
    let (flushing_record, periodicity) = if record.failure.is_some() {
        (None, None)
    } else {
        let t1 = flushing_time_record(&record)?;
        let periodicity = match periodicity_residual(&record, cfg.period, periodicity_start(t1)) {
            Ok(p) => Some(p),
            Err(FannoError::InsufficientSnapshots(why)) => {
                log::warn!("periodicity residual unavailable: {why}");
                None
            }
            Err(e) => return Err(e),
        };
        (Some(t1), periodicity)
    };
    Ok(SimulationOutcome {
        profile,
        record,
        compatibility,
        flushing_profile,
        flushing_record,
        periodicity,
        norms: Some(norms),
    })
}

fn create_out_dir(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)
}

fn write_file(dir: &Path, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> io::Result<PathBuf> {
    let path = dir.join(name);
    let mut out = BufWriter::new(File::create(&path)?);
    body(&mut out)?;
    out.flush()?;
    log::debug!("wrote {}", path.display());
    Ok(path)
}

fn report(err: &CommandError) -> i32 {
    eprintln!("fanno: {err}");
    err.exit_code()
}

/// `steady`: writes `profile.csv` and `steady.txt`.
pub fn cmd_steady(cfg: &ScenarioConfig, out_dir: &Path) -> i32 {
    let result = (|| -> std::result::Result<(), CommandError> {
        let profile = solve_steady(cfg)?;
        create_out_dir(out_dir)?;
        write_file(out_dir, "profile.csv", |w| profile.write_csv(w))?;
        write_file(out_dir, "steady.txt", |w| steady_summary(&profile).write_to(w))?;
        log::info!("steady: regime {}, l_max {}", profile.regime, profile.l_max);
        Ok(())
    })();
    match result {
        Ok(()) => exit_code::OK,
        Err(e) => report(&e),
    }
}

fn write_failed_start(out_dir: &Path, err: &FannoError) -> io::Result<()> {
    let (t, x) = match *err {
        FannoError::EpsilonTooLarge { t, .. } => (t, 0.0),
        FannoError::SupersonicityLost { t, x } | FannoError::VacuumFormed { t, x } => (t, x),
        _ => return Ok(()),
    };
    let mut kv = KeyValues::new();
    kv.push("status", "supersonicity_lost")
        .push_num("failure_t", t)
        .push_num("failure_x", x)
        .push("failure", err);
    create_out_dir(out_dir)?;
    write_file(out_dir, "run.txt", |w| kv.write_to(w)).map(|_| ())
}

/// `simulate`: writes `run.txt` plus the selected outputs
/// (`profile.csv`/`steady.txt`, `snapshots.csv`, `periodicity.csv`, `norms.txt`).
pub fn cmd_simulate(cfg: &ScenarioConfig, out_dir: &Path) -> i32 {
    let outcome = match simulate(cfg) {
        Ok(o) => o,
        Err(e) => {
            if e.exit_code() == exit_code::SUPERSONICITY_LOST {
                if let Err(io) = write_failed_start(out_dir, &e) {
                    eprintln!("fanno: cannot write run.txt: {io}");
                }
            }
            return report(&CommandError::Solver(e));
        }
    };
    let written = (|| -> io::Result<()> {
        create_out_dir(out_dir)?;
        write_file(out_dir, "run.txt", |w| outcome.summary().write_to(w))?;
        if cfg.wants(OutputKind::Profile) {
            write_file(out_dir, "profile.csv", |w| outcome.profile.write_csv(w))?;
            write_file(out_dir, "steady.txt", |w| steady_summary(&outcome.profile).write_to(w))?;
        }
        if cfg.wants(OutputKind::Snapshots) {
            write_file(out_dir, "snapshots.csv", |w| outcome.record.write_snapshots_csv(w))?;
        }
        if cfg.wants(OutputKind::Periodicity) {
            if let Some(p) = &outcome.periodicity {
                write_file(out_dir, "periodicity.csv", |w| p.write_series_csv(w))?;
            }
        }
        if cfg.wants(OutputKind::Norms) {
            write_file(out_dir, "norms.txt", |w| outcome.norms_summary().write_to(w))?;
        }
        Ok(())
    })();
    if let Err(e) = written {
        return report(&CommandError::Io(e));
    }
    match &outcome.record.failure {
        Some(f) => {
            eprintln!("fanno: {} (first failure at t = {}, x = {})", f.error, fmt_num(f.t), fmt_num(f.x));
            exit_code::SUPERSONICITY_LOST
        }
        None => exit_code::OK,
    }
}

/// `check-config`: prints the normalized configuration.
pub fn cmd_check_config(raw: std::result::Result<RawConfig, CommandError>) -> i32 {
    match raw.and_then(|r| Ok(r.validate()?)) {
        Ok(cfg) => {
            print!("{}", cfg.to_key_values());
            exit_code::OK
        }
        Err(e) => report(&e),
    }
}

/// One line of `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub regime: Option<Regime>,
    pub s_c: Option<f64>,
    pub l_max: Option<MaxLength>,
    pub residual_max: Option<f64>,
    pub exit: i32,
}

impl SweepRow {
    fn csv_line(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.value,
            opt(self.regime.map(|r| r.to_string())),
            opt(self.s_c.map(fmt_num)),
            opt(self.l_max.map(|l| l.to_string())),
            opt(self.residual_max.map(fmt_num)),
            self.exit
        )
    }
}

/// Evaluates one sweep value. Supersonic scenarios are also simulated and
/// contribute their periodicity residual; subsonic ones stop after the
/// steady solve since the transient problem needs supersonic inflow.
pub fn sweep_row(base: &RawConfig, axis: &str, value: &str) -> SweepRow {
    let mut row = SweepRow {
        value: value.to_string(),
        regime: None,
        s_c: None,
        l_max: None,
        residual_max: None,
        exit: exit_code::OK,
    };
    let Some(key) = sweep_key(axis) else {
        row.exit = exit_code::CONFIG;
        return row;
    };
    let mut raw = base.clone();
    if key == "upstream.c_minus" {
        raw.remove("upstream.rho_minus");
    }
    raw.set(key, value);
    let cfg = match raw.validate() {
        Ok(c) => c,
        Err(e) => {
            log::warn!("sweep {axis}={value}: {e}");
            row.exit = exit_code::CONFIG;
            return row;
        }
    };
    if cfg.upstream.is_sonic() {
        row.exit = FannoError::SonicUpstream(cfg.upstream.u_minus()).exit_code();
        return row;
    }
    row.s_c = Some(critical_speed(&cfg.upstream, &cfg.gas));
    row.regime = if cfg.gas.beta() == 0.0 { Some(Regime::Uniform) } else { classify_regime(&cfg.gas, &cfg.upstream).ok() };
    row.l_max = existence_length(&cfg.gas, &cfg.upstream).ok();
    let result = if cfg.upstream.is_supersonic() {
        simulate(&cfg).map(|o| {
            row.residual_max = o.periodicity.as_ref().map(|p| p.residual_max);
            if o.failed() {
                exit_code::SUPERSONICITY_LOST
            } else {
                exit_code::OK
            }
        })
    } else {
        solve_steady(&cfg).map(|_| exit_code::OK)
    };
    row.exit = match result {
        Ok(code) => code,
        Err(e) => {
            log::warn!("sweep {axis}={value}: {e}");
            e.exit_code()
        }
    };
    row
}

/// Runs every value (in parallel on `jobs` threads, 0 = all cores) and
/// returns the rows in input order.
pub fn run_sweep(base: &RawConfig, axis: &str, values: &[String], jobs: usize) -> io::Result<Vec<SweepRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| io::Error::other(e.to_string()))?;
    Ok(pool.install(|| values.par_iter().map(|v| sweep_row(base, axis, v)).collect()))
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "value,regime,s_c,l_max,residual_max,exit")?;
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(())
}

/// `sweep`: writes `sweep.csv`. Per-row failures land in the `exit` column;
/// the command itself succeeds once every row has been evaluated.
pub fn cmd_sweep(base: &RawConfig, axis: &str, values: &[String], jobs: usize, out_dir: &Path) -> i32 {
    if sweep_key(axis).is_none() {
        let names: Vec<&str> = SWEEP_AXES.iter().map(|(a, _)| *a).collect();
        return report(&CommandError::Config(ConfigError::Validation {
            field: "--axis".into(),
            reason: format!("unknown axis `{axis}` (expected one of {})", names.join(", ")),
        }));
    }
    if values.is_empty() {
        return report(&CommandError::Config(ConfigError::Validation {
            field: "--values".into(),
            reason: "no sweep values given".into(),
        }));
    }
    if let Err(e) = base.validate() {
        return report(&CommandError::Config(e));
    }
    let result = (|| -> io::Result<()> {
        let rows = run_sweep(base, axis, values, jobs)?;
        create_out_dir(out_dir)?;
        write_file(out_dir, "sweep.csv", |w| write_sweep_csv(&rows, w))?;
        Ok(())
    })();
    match result {
        Ok(()) => exit_code::OK,
        Err(e) => report(&CommandError::Io(e)),
    }
}
