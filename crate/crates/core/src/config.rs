//! Scenario files: flat `section.key = value` lines, `#` comments.
//!
//! ```text
//! gas.gamma = 2
//! gas.alpha = 0
//! gas.beta = -1
//! upstream.c_minus = 1      # or upstream.rho_minus, not both
//! upstream.u_minus = 2
//! duct.length = 0.35
//! grid.nx = 401             # default 401
//! grid.cfl = 0.9            # default 0.9
//! boundary.period = 1       # default 1
//! boundary.epsilon = 1e-3   # default 0
//! boundary.shape = bump     # bump | sine-ramp, default bump
//! sim.t_end = auto          # default auto: 1.05 T1 + 3 P
//! sim.snapshot_every = 0.015625   # default period / 64
//! outputs.directory = out   # default .
//! outputs.which = profile,snapshots,periodicity,norms
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fanno::UpstreamState;
use crate::gas::GasParams;
use crate::output::{fmt_num, KeyValues};
use crate::signal::Shape;
use crate::transient::{Grid1D, DEFAULT_CFL, DEFAULT_NX};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: `{field}`: {reason}")]
    Parse {
        field: String,
        line: usize,
        reason: String,
    },
    #[error("`{field}`: {reason}")]
    Validation { field: String, reason: String },
}

impl ConfigError {
    fn validation(field: &str, reason: impl Into<String>) -> Self {
        ConfigError::Validation { field: field.to_string(), reason: reason.into() }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "gas.gamma",
    "gas.alpha",
    "gas.beta",
    "upstream.c_minus",
    "upstream.rho_minus",
    "upstream.u_minus",
    "duct.length",
    "grid.nx",
    "grid.cfl",
    "boundary.period",
    "boundary.epsilon",
    "boundary.shape",
    "sim.t_end",
    "sim.snapshot_every",
    "outputs.directory",
    "outputs.which",
];

/// Output groups selectable with `outputs.which`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputKind {
    Profile,
    Snapshots,
    Periodicity,
    Norms,
}

impl OutputKind {
    pub const ALL: [OutputKind; 4] =
        [OutputKind::Profile, OutputKind::Snapshots, OutputKind::Periodicity, OutputKind::Norms];

    pub fn as_str(self) -> &'static str {
        match self {
            OutputKind::Profile => "profile",
            OutputKind::Snapshots => "snapshots",
            OutputKind::Periodicity => "periodicity",
            OutputKind::Norms => "norms",
        }
    }
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutputKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown output `{s}` (expected profile, snapshots, periodicity or norms)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndTime {
    /// `1.05 * T1 + 3 * period`, with `T1` from the steady background.
    Auto,
    Fixed(f64),
}

/// How the upstream state was given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpstreamSpec {
    SoundSpeed(f64),
    Density(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub gas: GasParams,
    pub upstream_spec: UpstreamSpec,
    pub upstream: UpstreamState,
    pub length: f64,
    pub nx: usize,
    pub cfl: f64,
    pub period: f64,
    pub epsilon: f64,
    pub shape: Shape,
    pub t_end: EndTime,
    pub snapshot_every: f64,
    pub directory: String,
    pub outputs: Vec<OutputKind>,
}

/// Key/value entries with the line each came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Parse {
                    field: content.to_string(),
                    line,
                    reason: "expected `key = value`".into(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError::Parse { field: key.to_string(), line, reason: "unknown key".into() });
            }
            if value.is_empty() {
                return Err(ConfigError::Parse { field: key.to_string(), line, reason: "missing value".into() });
            }
            if let Some((_, first)) = entries.get(key) {
                return Err(ConfigError::Parse {
                    field: key.to_string(),
                    line,
                    reason: format!("duplicate key (first set on line {first})"),
                });
            }
            entries.insert(key.to_string(), (value.to_string(), line));
        }
        Ok(Self { entries })
    }

    /// Replaces (or adds) an entry; used by parameter sweeps.
    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), (value.to_string(), 0));
    }

    pub fn remove(&mut self, key: &str) {
        self.entries.remove(key);
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<T>().map(Some).map_err(|e| ConfigError::Parse {
                field: key.to_string(),
                line,
                reason: format!("cannot parse `{v}`: {e}"),
            }),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.parsed(key)?.ok_or_else(|| ConfigError::validation(key, "required key is missing"))
    }

    pub fn validate(&self) -> Result<ScenarioConfig, ConfigError> {
        let gamma: f64 = self.required("gas.gamma")?;
        let alpha: f64 = self.required("gas.alpha")?;
        let beta: f64 = self.required("gas.beta")?;
        let gas = GasParams::new(gamma, alpha, beta).map_err(|e| match e {
            crate::FannoError::InvalidParameter { name, reason } => {
                ConfigError::validation(&format!("gas.{name}"), reason)
            }
            other => ConfigError::validation("gas", other.to_string()),
        })?;

        let c_minus: Option<f64> = self.parsed("upstream.c_minus")?;
        let rho_minus: Option<f64> = self.parsed("upstream.rho_minus")?;
        let u_minus: f64 = self.required("upstream.u_minus")?;
        let upstream_spec = match (c_minus, rho_minus) {
            (Some(c), None) => UpstreamSpec::SoundSpeed(c),
            (None, Some(rho)) => UpstreamSpec::Density(rho),
            (Some(_), Some(_)) => {
                return Err(ConfigError::validation(
                    "upstream",
                    "give exactly one of upstream.c_minus and upstream.rho_minus, not both",
                ))
            }
            (None, None) => {
                return Err(ConfigError::validation(
                    "upstream",
                    "one of upstream.c_minus or upstream.rho_minus is required",
                ))
            }
        };
        let upstream = match upstream_spec {
            UpstreamSpec::SoundSpeed(c) => UpstreamState::new(c, u_minus),
            UpstreamSpec::Density(rho) => UpstreamState::from_density(&gas, rho, u_minus),
        }
        .map_err(|e| match e {
            crate::FannoError::InvalidParameter { name, reason } => {
                ConfigError::validation(&format!("upstream.{name}"), reason)
            }
            other => ConfigError::validation("upstream", other.to_string()),
        })?;

        let length: f64 = self.required("duct.length")?;
        if !length.is_finite() || length <= 0.0 {
            return Err(ConfigError::validation("duct.length", format!("length must be positive (got {length})")));
        }
        let nx: usize = self.parsed("grid.nx")?.unwrap_or(DEFAULT_NX);
        let cfl: f64 = self.parsed("grid.cfl")?.unwrap_or(DEFAULT_CFL);
        Grid1D::new(length, nx, cfl).map_err(|e| match e {
            crate::FannoError::InvalidParameter { name, reason } => {
                ConfigError::validation(&format!("grid.{name}"), reason)
            }
            other => ConfigError::validation("grid", other.to_string()),
        })?;

        let period: f64 = self.parsed("boundary.period")?.unwrap_or(1.0);
        if !period.is_finite() || period <= 0.0 {
            return Err(ConfigError::validation("boundary.period", format!("period must be positive (got {period})")));
        }
        let epsilon: f64 = self.parsed("boundary.epsilon")?.unwrap_or(0.0);
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(ConfigError::validation(
                "boundary.epsilon",
                format!("epsilon must be non-negative (got {epsilon})"),
            ));
        }
        let shape: Shape = self.parsed("boundary.shape")?.unwrap_or(Shape::Bump);

        let t_end = match self.get("sim.t_end") {
            None | Some(("auto", _)) => EndTime::Auto,
            Some(_) => {
                let t: f64 = self.required("sim.t_end")?;
                if !t.is_finite() || t <= 0.0 {
                    return Err(ConfigError::validation("sim.t_end", format!("t_end must be positive (got {t})")));
                }
                EndTime::Fixed(t)
            }
        };
        let snapshot_every: f64 = self.parsed("sim.snapshot_every")?.unwrap_or(period / 64.0);
        if !snapshot_every.is_finite() || snapshot_every <= 0.0 {
            return Err(ConfigError::validation(
                "sim.snapshot_every",
                format!("snapshot cadence must be positive (got {snapshot_every})"),
            ));
        }

        let directory = self.get("outputs.directory").map(|(v, _)| v.to_string()).unwrap_or_else(|| ".".into());
        let outputs = match self.get("outputs.which") {
            None => OutputKind::ALL.to_vec(),
            Some((v, line)) => {
                let mut kinds = Vec::new();
                for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let kind = item.parse::<OutputKind>().map_err(|reason| ConfigError::Parse {
                        field: "outputs.which".into(),
                        line,
                        reason,
                    })?;
                    if !kinds.contains(&kind) {
                        kinds.push(kind);
                    }
                }
                kinds.sort();
                kinds
            }
        };

        Ok(ScenarioConfig {
            gas,
            upstream_spec,
            upstream,
            length,
            nx,
            cfl,
            period,
            epsilon,
            shape,
            t_end,
            snapshot_every,
            directory,
            outputs,
        })
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    RawConfig::parse(text)?.validate()
}

impl ScenarioConfig {
    pub fn grid(&self) -> Grid1D {
        Grid1D::new(self.length, self.nx, self.cfl).expect("validated grid")
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    /// Normalized `key=value` view with defaults filled in.
    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.push_num("gas.gamma", self.gas.gamma())
            .push_num("gas.alpha", self.gas.alpha())
            .push_num("gas.beta", self.gas.beta())
            .push("gas.case", self.gas.case_tag().as_str());
        match self.upstream_spec {
            UpstreamSpec::SoundSpeed(c) => kv.push_num("upstream.c_minus", c),
            UpstreamSpec::Density(rho) => kv.push_num("upstream.rho_minus", rho),
        };
        kv.push_num("upstream.u_minus", self.upstream.u_minus())
            .push_num("duct.length", self.length)
            .push("grid.nx", self.nx)
            .push_num("grid.cfl", self.cfl)
            .push_num("boundary.period", self.period)
            .push_num("boundary.epsilon", self.epsilon)
            .push("boundary.shape", self.shape);
        match self.t_end {
            EndTime::Auto => kv.push("sim.t_end", "auto"),
            EndTime::Fixed(t) => kv.push_num("sim.t_end", t),
        };
        kv.push_num("sim.snapshot_every", self.snapshot_every)
            .push("outputs.directory", &self.directory)
            .push(
                "outputs.which",
                self.outputs.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","),
            );
        kv
    }
}

impl fmt::Display for EndTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndTime::Auto => f.write_str("auto"),
            EndTime::Fixed(t) => f.write_str(&fmt_num(*t)),
        }
    }
}
