use thiserror::Error;

/// Process exit codes used by the `fanno` binary.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const CHOKED: i32 = 2;
    pub const SUPERSONICITY_LOST: i32 = 3;
    pub const CONFIG: i32 = 4;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FannoError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("density must be positive (got {0})")]
    NonPositiveDensity(f64),

    #[error("sound speed must be positive: s - r = {0}")]
    NonPositiveSoundSpeed(f64),

    #[error("speed must be positive (got {0})")]
    NonPositiveSpeed(f64),

    #[error("upstream state is sonic (u_minus = c_minus = {0})")]
    SonicUpstream(f64),

    #[error("regime classification needs a nonzero source strength beta")]
    ZeroBeta,

    #[error("duct length {length} is not below the maximal duct length L_m = {l_max} (choked)")]
    DuctTooLong { length: f64, l_max: f64 },

    #[error("steady profile leaves the admissible speed range at x = {x_limit} (duct length {length})")]
    ProfileBlowUp { length: f64, x_limit: f64 },

    #[error("root finder failed: {0}")]
    RootNotFound(String),

    #[error("perturbation amplitude {epsilon} breaks inlet supersonicity at t = {t}, x = 0")]
    EpsilonTooLarge { epsilon: f64, t: f64 },

    #[error("supersonicity lost at t = {t}, x = {x}")]
    SupersonicityLost { t: f64, x: f64 },

    #[error("sound speed vanished (s <= r) at t = {t}, x = {x}")]
    VacuumFormed { t: f64, x: f64 },

    #[error("run record lacks matching snapshot pairs: {0}")]
    InsufficientSnapshots(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl FannoError {
    /// Maps the error onto the documented CLI exit codes.
    pub fn exit_code(&self) -> i32 {
        match self {
            FannoError::DuctTooLong { .. }
            | FannoError::ProfileBlowUp { .. }
            | FannoError::SonicUpstream(_) => exit_code::CHOKED,
            FannoError::SupersonicityLost { .. }
            | FannoError::VacuumFormed { .. }
            | FannoError::EpsilonTooLarge { .. }
            | FannoError::NonPositiveSoundSpeed(_) => exit_code::SUPERSONICITY_LOST,
            FannoError::InvalidParameter { .. } => exit_code::CONFIG,
            _ => exit_code::INTERNAL,
        }
    }
}

pub type Result<T, E = FannoError> = std::result::Result<T, E>;
