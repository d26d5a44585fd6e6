//! Steady flow in a constant-area duct with the friction/forcing source
//! `beta * rho * |u|^alpha * u`.
//!
//! Along a steady solution `c * u^((gamma-1)/2)` is constant, which reduces
//! the momentum balance to a scalar ODE for the velocity whose exact
//! integral is `potential(u(x)) = potential(u_minus) + beta * x`. The
//! potential is convex-like with its minimum at the sonic speed `s_c`, so
//! the profile is found by root finding on the branch that contains the
//! upstream velocity, and frictional flows (`beta < 0`) choke once the
//! potential reaches its minimum.

use std::fmt;
use std::io::{self, Write};

use crate::error::{FannoError, Result};
use crate::gas::{self, CaseTag, GasParams};
use crate::output::fmt_num;
use crate::roots::{brent, BrentError, BrentOptions};

/// Upstream (inlet) state in sound-speed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpstreamState {
    c_minus: f64,
    u_minus: f64,
}

impl UpstreamState {
    pub fn new(c_minus: f64, u_minus: f64) -> Result<Self> {
        if !c_minus.is_finite() || c_minus <= 0.0 {
            return Err(FannoError::InvalidParameter {
                name: "c_minus",
                reason: format!("upstream sound speed must be positive (got {c_minus})"),
            });
        }
        if !u_minus.is_finite() || u_minus <= 0.0 {
            return Err(FannoError::InvalidParameter {
                name: "u_minus",
                reason: format!("upstream velocity must be positive (got {u_minus})"),
            });
        }
        Ok(Self { c_minus, u_minus })
    }

    pub fn from_density(params: &GasParams, rho_minus: f64, u_minus: f64) -> Result<Self> {
        let c = gas::sound_speed(params, rho_minus).map_err(|_| FannoError::InvalidParameter {
            name: "rho_minus",
            reason: format!("upstream density must be positive (got {rho_minus})"),
        })?;
        Self::new(c, u_minus)
    }

    pub fn c_minus(&self) -> f64 {
        self.c_minus
    }

    pub fn u_minus(&self) -> f64 {
        self.u_minus
    }

    pub fn rho_minus(&self, params: &GasParams) -> Result<f64> {
        gas::density_from_sound_speed(params, self.c_minus)
    }

    pub fn is_supersonic(&self) -> bool {
        self.u_minus > self.c_minus
    }

    #[allow(clippy::float_cmp)]
    pub fn is_sonic(&self) -> bool {
        self.u_minus == self.c_minus
    }

    fn require_non_sonic(&self) -> Result<()> {
        if self.is_sonic() {
            return Err(FannoError::SonicUpstream(self.u_minus));
        }
        Ok(())
    }

    /// `c_minus^2 * u_minus^(gamma - 1)`, the constant multiplying the
    /// pressure part of the potential.
    fn pressure_constant(&self, params: &GasParams) -> f64 {
        self.c_minus * self.c_minus * self.u_minus.powf(params.gamma() - 1.0)
    }
}

/// Length limit of a steady solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxLength {
    Finite(f64),
    Unbounded,
}

impl MaxLength {
    pub fn finite(self) -> Option<f64> {
        match self {
            MaxLength::Finite(l) => Some(l),
            MaxLength::Unbounded => None,
        }
    }

    /// Whether a duct of `length` fits strictly inside the limit.
    pub fn admits(self, length: f64) -> bool {
        match self {
            MaxLength::Finite(l) => length < l,
            MaxLength::Unbounded => true,
        }
    }
}

impl fmt::Display for MaxLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxLength::Finite(l) => f.write_str(&fmt_num(*l)),
            MaxLength::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Qualitative behaviour of the steady solution, by sign of `beta` and
/// upstream Mach number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `beta > 0`, subsonic: `0 < u < u_minus < c_minus < c`.
    ForcedSubsonic,
    /// `beta > 0`, supersonic: `0 < c < c_minus < u_minus < u`.
    ForcedSupersonic,
    /// `beta < 0`, subsonic: `0 < u_minus < u < c < c_minus`.
    FrictionSubsonic,
    /// `beta < 0`, supersonic: `0 < c_minus < c < u < u_minus`.
    FrictionSupersonic,
    /// `beta == 0`: constant profile.
    Uniform,
}

impl Regime {
    /// Index 1..=4 of the ordering case; `None` for the uniform profile.
    pub fn case_number(self) -> Option<u8> {
        match self {
            Regime::ForcedSubsonic => Some(1),
            Regime::ForcedSupersonic => Some(2),
            Regime::FrictionSubsonic => Some(3),
            Regime::FrictionSupersonic => Some(4),
            Regime::Uniform => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::ForcedSubsonic => "forced_subsonic",
            Regime::ForcedSupersonic => "forced_supersonic",
            Regime::FrictionSubsonic => "friction_subsonic",
            Regime::FrictionSupersonic => "friction_supersonic",
            Regime::Uniform => "uniform",
        }
    }

    /// Checks the strict ordering that characterizes the regime at a point
    /// downstream of the inlet (`x > 0`).
    pub fn ordering_holds(self, up: &UpstreamState, u: f64, c: f64) -> bool {
        let (um, cm) = (up.u_minus, up.c_minus);
        match self {
            Regime::ForcedSubsonic => 0.0 < u && u < um && um < cm && cm < c,
            Regime::ForcedSupersonic => 0.0 < c && c < cm && cm < um && um < u,
            Regime::FrictionSubsonic => 0.0 < um && um < u && u < c && c < cm,
            Regime::FrictionSupersonic => 0.0 < cm && cm < c && c < u && u < um,
            #[allow(clippy::float_cmp)]
            Regime::Uniform => u == um && c == cm,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sonic speed `s_c = c_minus^(2/(gamma+1)) * u_minus^((gamma-1)/(gamma+1))`
/// at which the steady potential is minimal.
pub fn critical_speed(up: &UpstreamState, params: &GasParams) -> f64 {
    let g = params.gamma();
    up.c_minus.powf(2.0 / (g + 1.0)) * up.u_minus.powf((g - 1.0) / (g + 1.0))
}

/// Potential whose level sets are the steady velocities:
/// `potential(u(x)) - potential(u_minus) = beta * x`.
pub fn implicit_potential(params: &GasParams, up: &UpstreamState, s: f64) -> Result<f64> {
    if s.is_nan() || s <= 0.0 {
        return Err(FannoError::NonPositiveSpeed(s));
    }
    Ok(potential(params, up.pressure_constant(params), s))
}

fn potential(params: &GasParams, k: f64, s: f64) -> f64 {
    let g = params.gamma();
    let a = params.alpha();
    match params.case_tag() {
        CaseTag::Generic => {
            s.powf(1.0 - a) / (1.0 - a) + k * s.powf(-g - a) / (g + a)
        }
        CaseTag::AlphaOne => s.ln() + k * s.powf(-g - 1.0) / (g + 1.0),
        CaseTag::AlphaNegGamma => s.powf(g + 1.0) / (g + 1.0) - k * s.ln(),
    }
}

/// `d potential / ds = s^(-alpha) - c_minus^2 u_minus^(gamma-1) s^(-gamma-alpha-1)`,
/// identical in all three cases.
pub fn potential_derivative(params: &GasParams, up: &UpstreamState, s: f64) -> f64 {
    let g = params.gamma();
    let a = params.alpha();
    s.powf(-a) - up.pressure_constant(params) * s.powf(-g - a - 1.0)
}

/// Steady velocity slope `u' = beta / potential'(u)`.
pub fn velocity_slope(params: &GasParams, up: &UpstreamState, u: f64) -> f64 {
    params.beta() / potential_derivative(params, up, u)
}

/// Sound speed carried by the steady invariant `c * u^((gamma-1)/2) = const`.
pub fn steady_sound_speed(params: &GasParams, up: &UpstreamState, u: f64) -> f64 {
    let e = 0.5 * (params.gamma() - 1.0);
    up.c_minus * up.u_minus.powf(e) * u.powf(-e)
}

/// Maximal duct length before a frictional flow chokes.
///
/// Finite only for `beta < 0`; forcing (`beta > 0`) drives the flow away
/// from the sonic point and `beta == 0` gives a uniform state.
pub fn max_duct_length(params: &GasParams, up: &UpstreamState) -> Result<MaxLength> {
    up.require_non_sonic()?;
    let beta = params.beta();
    if beta >= 0.0 {
        return Ok(MaxLength::Unbounded);
    }
    let g = params.gamma();
    let a = params.alpha();
    let sc = critical_speed(up, params);
    let (cm, um) = (up.c_minus, up.u_minus);
    let bracket = match params.case_tag() {
        CaseTag::Generic => {
            (sc.powf(1.0 - a) - um.powf(1.0 - a)) / (1.0 - a)
                + cm * cm * (um.powf(g - 1.0) * sc.powf(-g - a) - um.powf(-1.0 - a)) / (g + a)
        }
        CaseTag::AlphaOne => {
            cm * cm * (um.powf(g - 1.0) * sc.powf(-g - 1.0) - um.powf(-2.0)) / (g + 1.0)
                + (sc / um).ln()
        }
        CaseTag::AlphaNegGamma => {
            (sc.powf(g + 1.0) - um.powf(g + 1.0)) / (g + 1.0)
                - cm * cm * um.powf(g - 1.0) * (sc / um).ln()
        }
    };
    Ok(MaxLength::Finite(bracket / beta))
}

/// Length over which a steady solution exists at all.
///
/// For `beta < 0` this is [`max_duct_length`]. For `beta > 0` the potential
/// may stay bounded along the branch: the supersonic branch with `alpha > 1`
/// blows up (`u -> infinity`) and the subsonic branch with `alpha < -gamma`
/// stagnates (`u -> 0`) at a finite distance.
pub fn existence_length(params: &GasParams, up: &UpstreamState) -> Result<MaxLength> {
    up.require_non_sonic()?;
    let beta = params.beta();
    if beta < 0.0 {
        return max_duct_length(params, up);
    }
    if beta == 0.0 || params.case_tag() != CaseTag::Generic {
        return Ok(MaxLength::Unbounded);
    }
    let a = params.alpha();
    let g = params.gamma();
    let bounded = if up.is_supersonic() { a > 1.0 } else { g + a < 0.0 };
    if !bounded {
        return Ok(MaxLength::Unbounded);
    }
    // The branch limit of the potential is zero in both bounded cases.
    let start = potential(params, up.pressure_constant(params), up.u_minus);
    Ok(MaxLength::Finite(-start / beta))
}

pub fn classify_regime(params: &GasParams, up: &UpstreamState) -> Result<Regime> {
    up.require_non_sonic()?;
    let beta = params.beta();
    if beta == 0.0 {
        return Err(FannoError::ZeroBeta);
    }
    Ok(match (beta > 0.0, up.is_supersonic()) {
        (true, false) => Regime::ForcedSubsonic,
        (true, true) => Regime::ForcedSupersonic,
        (false, false) => Regime::FrictionSubsonic,
        (false, true) => Regime::FrictionSupersonic,
    })
}

/// Sampled steady background `(u~, c~, rho~)` on a uniform grid over `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyProfile {
    pub params: GasParams,
    pub upstream: UpstreamState,
    pub xs: Vec<f64>,
    pub u_tilde: Vec<f64>,
    pub c_tilde: Vec<f64>,
    pub rho_tilde: Vec<f64>,
    pub regime: Regime,
    pub l_max: MaxLength,
    pub s_c: f64,
}

impl SteadyProfile {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.xs.last().unwrap_or(&0.0)
    }

    pub fn mach(&self, i: usize) -> f64 {
        self.u_tilde[i] / self.c_tilde[i]
    }

    /// Exact `(rho~', u~')` at grid point `i` from the steady ODE.
    pub fn slopes(&self, i: usize) -> (f64, f64) {
        let u = self.u_tilde[i];
        let du = velocity_slope(&self.params, &self.upstream, u);
        // rho * u is constant along the profile.
        let drho = -self.rho_tilde[i] * du / u;
        (drho, du)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,u_tilde,c_tilde,rho_tilde,mach")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(self.xs[i]),
                fmt_num(self.u_tilde[i]),
                fmt_num(self.c_tilde[i]),
                fmt_num(self.rho_tilde[i]),
                fmt_num(self.mach(i)),
            )?;
        }
        Ok(())
    }
}

/// Uniform grid with `xs[0] == 0` and `xs[n-1] == length` exactly.
pub fn uniform_grid(length: f64, n_points: usize) -> Vec<f64> {
    let last = (n_points - 1) as f64;
    (0..n_points)
        .map(|i| if i + 1 == n_points { length } else { length * (i as f64 / last) })
        .collect()
}

const MAX_BRACKET_STEPS: usize = 2100;

/// Solves the steady profile on `n_points` uniformly spaced points of `[0, length]`.
pub fn solve_profile(
    params: &GasParams,
    up: &UpstreamState,
    length: f64,
    n_points: usize,
) -> Result<SteadyProfile> {
    if n_points < 2 {
        return Err(FannoError::InvalidParameter {
            name: "n_points",
            reason: format!("need at least 2 grid points (got {n_points})"),
        });
    }
    if !length.is_finite() || length <= 0.0 {
        return Err(FannoError::InvalidParameter {
            name: "length",
            reason: format!("duct length must be positive (got {length})"),
        });
    }
    up.require_non_sonic()?;
    let l_max = max_duct_length(params, up)?;
    if let MaxLength::Finite(l) = l_max {
        if length >= l {
            return Err(FannoError::DuctTooLong { length, l_max: l });
        }
    }
    if let MaxLength::Finite(x_limit) = existence_length(params, up)? {
        if length >= x_limit {
            return Err(FannoError::ProfileBlowUp { length, x_limit });
        }
    }

    let beta = params.beta();
    let regime = if beta == 0.0 { Regime::Uniform } else { classify_regime(params, up)? };
    let s_c = critical_speed(up, params);
    let xs = uniform_grid(length, n_points);

    let mut u_tilde = Vec::with_capacity(n_points);
    u_tilde.push(up.u_minus);
    if beta == 0.0 {
        u_tilde.resize(n_points, up.u_minus);
    } else {
        let solver = BranchSolver::new(params, up, s_c);
        for &x in &xs[1..] {
            u_tilde.push(solver.solve(x, length)?);
        }
    }

    let mut c_tilde = Vec::with_capacity(n_points);
    let mut rho_tilde = Vec::with_capacity(n_points);
    for &u in &u_tilde {
        #[allow(clippy::float_cmp)]
        let c = if u == up.u_minus { up.c_minus } else { steady_sound_speed(params, up, u) };
        c_tilde.push(c);
        rho_tilde.push(gas::density_from_sound_speed(params, c)?);
    }

    Ok(SteadyProfile {
        params: *params,
        upstream: *up,
        xs,
        u_tilde,
        c_tilde,
        rho_tilde,
        regime,
        l_max,
        s_c,
    })
}

/// Root finding for `potential(s) = potential(u_minus) + beta x` restricted
/// to the branch of `u_minus`.
struct BranchSolver<'a> {
    params: &'a GasParams,
    k: f64,
    s_c: f64,
    start: f64,
    supersonic: bool,
    u_minus: f64,
}

impl<'a> BranchSolver<'a> {
    fn new(params: &'a GasParams, up: &UpstreamState, s_c: f64) -> Self {
        let k = up.pressure_constant(params);
        Self {
            params,
            k,
            s_c,
            start: potential(params, k, up.u_minus),
            supersonic: up.u_minus > s_c,
            u_minus: up.u_minus,
        }
    }

    fn solve(&self, x: f64, length: f64) -> Result<f64> {
        let target = self.start + self.params.beta() * x;
        let f = |s: f64| potential(self.params, self.k, s) - target;
        let scale = self.start.abs().max(1.0);

        // Far end of the branch, where the potential exceeds the target.
        let mut far = if self.supersonic {
            (2.0 * self.u_minus).max(2.0 * self.s_c)
        } else {
            (0.5 * self.u_minus).min(0.5 * self.s_c)
        };
        let mut steps = 0;
        while !(f(far) > 0.0) {
            far = if self.supersonic { 2.0 * far } else { 0.5 * far };
            steps += 1;
            if steps > MAX_BRACKET_STEPS || !far.is_finite() || far <= f64::MIN_POSITIVE {
                return Err(FannoError::ProfileBlowUp { length, x_limit: x });
            }
        }

        let f_sonic = f(self.s_c);
        if f_sonic > 0.0 {
            // Target below the minimum of the potential: choked before x.
            return Err(self.choked(length));
        }
        let root = match brent(f, self.s_c, far, BrentOptions::default()) {
            Ok(root) => root,
            Err(BrentError::MaxIterations(root)) => root,
            Err(e) => return Err(FannoError::RootNotFound(e.to_string())),
        };
        let tol = 1e-10 * scale;
        if root.f.abs() > tol {
            if root.bracket_width < 1e3 * f64::EPSILON * self.s_c {
                return Err(self.choked(length));
            }
            return Err(FannoError::RootNotFound(format!(
                "potential residual {} at x = {x}",
                root.f
            )));
        }
        Ok(root.x)
    }

    fn choked(&self, length: f64) -> FannoError {
        let l_max = match self.params.beta() < 0.0 {
            true => (potential(self.params, self.k, self.s_c) - self.start) / self.params.beta(),
            false => f64::INFINITY,
        };
        FannoError::DuctTooLong { length, l_max }
    }
}
