//! Dimensionless polytropic gas `p = rho^gamma`: state conversions, the
//! eigenstructure of the quasilinear system in `(rho, u)` and the Riemann
//! invariants that diagonalize it.

use crate::error::{FannoError, Result};

/// Densities below this are treated as vacuum and rejected.
pub const MIN_DENSITY: f64 = 1e-300;

/// Which closed form the steady potential takes for a given `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Generic,
    /// `alpha == 1`: logarithmic friction potential.
    AlphaOne,
    /// `alpha == -gamma`: logarithmic pressure potential.
    AlphaNegGamma,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Generic => "generic",
            CaseTag::AlphaOne => "alpha_one",
            CaseTag::AlphaNegGamma => "alpha_neg_gamma",
        }
    }
}

/// Adiabatic exponent, friction exponent and source strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    gamma: f64,
    alpha: f64,
    beta: f64,
    case_tag: CaseTag,
}

impl GasParams {
    /// The case tag compares `alpha` exactly; `1.0` and `-gamma` must be spelled exactly.
    pub fn new(gamma: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(FannoError::InvalidParameter {
                name: "gamma",
                reason: format!("gamma must exceed 1 (got {gamma})"),
            });
        }
        if !alpha.is_finite() {
            return Err(FannoError::InvalidParameter {
                name: "alpha",
                reason: format!("alpha must be finite (got {alpha})"),
            });
        }
        if !beta.is_finite() {
            return Err(FannoError::InvalidParameter {
                name: "beta",
                reason: format!("beta must be finite (got {beta})"),
            });
        }
        #[allow(clippy::float_cmp)]
        let case_tag = if alpha == 1.0 {
            CaseTag::AlphaOne
        } else if alpha == -gamma {
            CaseTag::AlphaNegGamma
        } else {
            CaseTag::Generic
        };
        Ok(Self {
            gamma,
            alpha,
            beta,
            case_tag,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn case_tag(&self) -> CaseTag {
        self.case_tag
    }

    /// Same gas with a different source strength.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.gamma, self.alpha, beta)
    }

    /// `2 / (gamma - 1)`, the factor linking `c` to the Riemann invariants.
    fn riemann_factor(&self) -> f64 {
        2.0 / (self.gamma - 1.0)
    }
}

fn check_density(rho: f64) -> Result<()> {
    if rho.is_nan() || rho < MIN_DENSITY {
        return Err(FannoError::NonPositiveDensity(rho));
    }
    Ok(())
}

/// `c = sqrt(gamma) * rho^((gamma - 1) / 2)`.
pub fn sound_speed(params: &GasParams, rho: f64) -> Result<f64> {
    check_density(rho)?;
    Ok(params.gamma.sqrt() * rho.powf(0.5 * (params.gamma - 1.0)))
}

/// Inverse of [`sound_speed`]: `rho = (c^2 / gamma)^(1 / (gamma - 1))`.
pub fn density_from_sound_speed(params: &GasParams, c: f64) -> Result<f64> {
    if c.is_nan() || c <= 0.0 {
        return Err(FannoError::NonPositiveSoundSpeed(c));
    }
    let rho = (c * c / params.gamma).powf(1.0 / (params.gamma - 1.0));
    check_density(rho)?;
    Ok(rho)
}

/// Primitive state `(rho, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState {
    pub rho: f64,
    pub u: f64,
}

impl FlowState {
    pub fn new(rho: f64, u: f64) -> Result<Self> {
        check_density(rho)?;
        Ok(Self { rho, u })
    }

    pub fn sound_speed(&self, params: &GasParams) -> Result<f64> {
        sound_speed(params, self.rho)
    }

    pub fn mach(&self, params: &GasParams) -> Result<f64> {
        Ok(self.u / self.sound_speed(params)?)
    }
}

/// Riemann invariants: `r` travels with `u - c`, `s` with `u + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannState {
    pub r: f64,
    pub s: f64,
}

impl RiemannState {
    pub fn velocity(&self) -> f64 {
        self.r + self.s
    }

    pub fn sound_speed(&self, params: &GasParams) -> f64 {
        0.5 * (params.gamma - 1.0) * (self.s - self.r)
    }

    /// `(lambda1, lambda2)` written directly in the invariants.
    pub fn eigenvalues(&self, params: &GasParams) -> (f64, f64) {
        let g = params.gamma;
        (
            0.5 * (g + 1.0) * self.r - 0.5 * (g - 3.0) * self.s,
            0.5 * (3.0 - g) * self.r + 0.5 * (g + 1.0) * self.s,
        )
    }
}

/// `(u - c, u + c)`.
pub fn eigenvalues(params: &GasParams, state: &FlowState) -> Result<(f64, f64)> {
    let c = state.sound_speed(params)?;
    Ok((state.u - c, state.u + c))
}

pub fn to_riemann(params: &GasParams, state: &FlowState) -> Result<RiemannState> {
    let c = state.sound_speed(params)?;
    let w = params.riemann_factor() * c;
    Ok(RiemannState {
        r: 0.5 * (state.u - w),
        s: 0.5 * (state.u + w),
    })
}

pub fn from_riemann(params: &GasParams, rs: &RiemannState) -> Result<FlowState> {
    let gap = rs.s - rs.r;
    if gap.is_nan() || gap <= 0.0 {
        return Err(FannoError::NonPositiveSoundSpeed(gap));
    }
    let c = rs.sound_speed(params);
    let rho = density_from_sound_speed(params, c)?;
    Ok(FlowState {
        rho,
        u: rs.velocity(),
    })
}

/// Right eigenvectors `r1, r2` (unit length) and the dual left eigenvectors
/// `l1, l2` of the coefficient matrix, with `l_i . r_j = delta_ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvectors {
    pub r1: [f64; 2],
    pub r2: [f64; 2],
    pub l1: [f64; 2],
    pub l2: [f64; 2],
}

impl Eigenvectors {
    pub fn right(&self, i: usize) -> [f64; 2] {
        [self.r1, self.r2][i]
    }

    pub fn left(&self, i: usize) -> [f64; 2] {
        [self.l1, self.l2][i]
    }
}

pub fn eigenvectors(params: &GasParams, state: &FlowState) -> Result<Eigenvectors> {
    let rho = state.rho;
    let c = state.sound_speed(params)?;
    let norm = rho.hypot(c);
    let half = 0.5 * norm;
    Ok(Eigenvectors {
        r1: [rho / norm, -c / norm],
        r2: [rho / norm, c / norm],
        l1: [half / rho, -half / c],
        l2: [half / rho, half / c],
    })
}

/// Coefficient matrix `A(V) = [[u, rho], [gamma rho^(gamma-2), u]]` of the
/// quasilinear system `V_t + A(V) V_x = source`.
pub fn jacobian(params: &GasParams, state: &FlowState) -> Result<[[f64; 2]; 2]> {
    check_density(state.rho)?;
    let g = params.gamma;
    Ok([
        [state.u, state.rho],
        [g * state.rho.powf(g - 2.0), state.u],
    ])
}
