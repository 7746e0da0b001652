//! Gaussian dynamics in a time-dependent uniform magnetic field.
//!
//! Everything here is driven by the complex solution `eps(t)` of
//! `eps'' + Omega(t)^2 eps = 0` normalized by `eps' eps* - eps'* eps = 2i`, where
//! `Omega = omega/2` in the symmetric gauge and `Omega = omega` in the Landau
//! gauge `A = (-H(t) y, 0)`. Geometric coordinates `(X, Y, xi, eta)` are always
//! built with the base cyclotron frequency.

mod epsilon;
mod squeeze;
mod symplectic;

pub use epsilon::{
    dynamics_trace, landau_auxiliaries, solve_epsilon, variances_landau, variances_symmetric, write_trace_csv,
    CovarianceState, DimensionlessVariances, EpsilonSolution, LandauAux, TraceRow, WRONSKIAN_TOL,
};
pub use squeeze::{
    principal_squeezing, rotate_relative_variances, scenario_kick, scenario_parametric, scenario_step, ParametricTrace,
    PulseOutcome, SqueezeReport, SAMPLES_PER_PERIOD,
};
pub use symplectic::{
    build_propagator, geometric_map, propagate_covariance, propagator_trace, solve_linear_invariants,
    symplectic_form, symplectic_defect, LinearInvariants, INVARIANT_TOL,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PhysicalConfig;
use crate::ode::{AdvanceError, Dopri5, OdeError, Tolerances};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynError {
    #[error("Wronskian drift {drift:.3e} at t = {t} exceeds {WRONSKIAN_TOL:e}")]
    WronskianDrift { drift: f64, t: f64 },
    #[error("invariant commutators drift by {drift:.3e} at t = {t}")]
    InvariantDrift { drift: f64, t: f64 },
    #[error("integration failed: {0}")]
    StepFailure(#[from] OdeError),
    #[error("solution was computed in the {found} gauge, {expected} required")]
    GaugeMismatch { expected: crate::config::Gauge, found: crate::config::Gauge },
    #[error("invalid frequency profile: {0}")]
    InvalidProfile(String),
    #[error("covariance determinant {d:.6e} is below the uncertainty floor {d_min:.6e}")]
    NonPhysical { d: f64, d_min: f64 },
    #[error("unsupported configuration: {0}")]
    UnsupportedConfig(String),
    #[error("invalid time grid: {0}")]
    InvalidTimes(String),
}

impl From<AdvanceError<DynError>> for DynError {
    fn from(e: AdvanceError<DynError>) -> Self {
        match e {
            AdvanceError::Ode(o) => DynError::StepFailure(o),
            AdvanceError::Callback(d) => d,
        }
    }
}

/// Shape of `omega(t) / omega_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    Constant,
    /// `omega = Theta omega_c` on `0 < t < tau`.
    Step { theta: f64, tau: f64 },
    /// `omega^2 = omega_c^2 + 2 gamma delta(t)`.
    DeltaKick { gamma: f64 },
    /// `omega = omega_c (1 + 2 gamma cos(2 omega_c t))`.
    Parametric { gamma: f64 },
    /// Piecewise-linear ratio `omega / omega_c` through `(times[k], ratios[k])`,
    /// equal to 1 before the first and after the last knot.
    Sampled { times: Vec<f64>, ratios: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct FrequencyProfile {
    #[serde(flatten)]
    kind: ProfileKind,
    omega_c: f64,
}

#[derive(Deserialize)]
struct RawProfile {
    #[serde(flatten)]
    kind: ProfileKind,
    omega_c: f64,
}

impl TryFrom<RawProfile> for FrequencyProfile {
    type Error = DynError;

    fn try_from(raw: RawProfile) -> Result<Self, Self::Error> {
        Self::new(raw.kind, raw.omega_c)
    }
}

impl FrequencyProfile {
    pub fn new(kind: ProfileKind, omega_c: f64) -> Result<Self, DynError> {
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(DynError::InvalidProfile(format!("omega_c must be positive, got {omega_c}")));
        }
        match &kind {
            ProfileKind::Constant => {}
            ProfileKind::Step { theta, tau } => {
                if !(theta.is_finite() && *theta > 0.0 && tau.is_finite() && *tau > 0.0) {
                    return Err(DynError::InvalidProfile(format!("step needs Theta > 0 and tau > 0, got {theta}, {tau}")));
                }
            }
            ProfileKind::DeltaKick { gamma } => {
                if !gamma.is_finite() {
                    return Err(DynError::InvalidProfile("kick strength must be finite".into()));
                }
            }
            ProfileKind::Parametric { gamma } => {
                if !(gamma.abs() < 0.2) {
                    return Err(DynError::InvalidProfile(format!("parametric modulation needs |gamma| < 0.2, got {gamma}")));
                }
            }
            ProfileKind::Sampled { times, ratios } => {
                if times.len() < 2 || times.len() != ratios.len() {
                    return Err(DynError::InvalidProfile("sampled profile needs at least two (t, ratio) knots".into()));
                }
                if times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
                    return Err(DynError::InvalidProfile("knot times must be finite, non-negative and increasing".into()));
                }
                if ratios.iter().any(|r| !r.is_finite()) {
                    return Err(DynError::InvalidProfile("knot ratios must be finite".into()));
                }
            }
        }
        Ok(Self { kind, omega_c })
    }

    pub fn constant(omega_c: f64) -> Result<Self, DynError> {
        Self::new(ProfileKind::Constant, omega_c)
    }

    pub fn step(omega_c: f64, theta: f64, tau: f64) -> Result<Self, DynError> {
        Self::new(ProfileKind::Step { theta, tau }, omega_c)
    }

    pub fn kick(omega_c: f64, gamma: f64) -> Result<Self, DynError> {
        Self::new(ProfileKind::DeltaKick { gamma }, omega_c)
    }

    pub fn parametric(omega_c: f64, gamma: f64) -> Result<Self, DynError> {
        Self::new(ProfileKind::Parametric { gamma }, omega_c)
    }

    pub fn sampled(omega_c: f64, times: Vec<f64>, ratios: Vec<f64>) -> Result<Self, DynError> {
        Self::new(ProfileKind::Sampled { times, ratios }, omega_c)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    /// Times in `(0, inf)` where `omega` or its derivative may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Step { tau, .. } => vec![*tau],
            ProfileKind::Sampled { times, .. } => times.iter().copied().filter(|t| *t > 0.0).collect(),
            _ => Vec::new(),
        }
    }

    /// Kick strength applied at `t = 0`.
    pub fn kick_strength(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::DeltaKick { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Time after which the field is back at `omega_c` for good, if any.
    pub fn settles_at(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::Constant | ProfileKind::DeltaKick { .. } => Some(0.0),
            ProfileKind::Step { tau, .. } => Some(*tau),
            ProfileKind::Sampled { times, .. } => times.last().copied(),
            ProfileKind::Parametric { .. } => None,
        }
    }

    /// `omega(t)` on the smooth piece that contains the open interval `(a, b)`.
    pub(crate) fn piece(&self, a: f64, b: f64) -> impl Fn(f64) -> f64 + '_ {
        let mid = if b.is_finite() { 0.5 * (a + b) } else { a + 1.0 };
        let wc = self.omega_c;
        let sel: Box<dyn Fn(f64) -> f64> = match &self.kind {
            ProfileKind::Constant | ProfileKind::DeltaKick { .. } => Box::new(move |_| wc),
            ProfileKind::Step { theta, tau } => {
                let w = if mid < *tau { theta * wc } else { wc };
                Box::new(move |_| w)
            }
            ProfileKind::Parametric { gamma } => {
                let g = *gamma;
                Box::new(move |t| wc * (1.0 + 2.0 * g * (2.0 * wc * t).cos()))
            }
            ProfileKind::Sampled { times, ratios } => {
                let n = times.len();
                if mid < times[0] || mid >= times[n - 1] {
                    Box::new(move |_| wc)
                } else {
                    let k = times.partition_point(|t| *t <= mid) - 1;
                    let (t0, t1, r0, r1) = (times[k], times[k + 1], ratios[k], ratios[k + 1]);
                    Box::new(move |t| wc * (r0 + (r1 - r0) * (t - t0) / (t1 - t0)))
                }
            }
        };
        sel
    }

    /// `omega(t)`, right-continuous at breakpoints.
    pub fn omega(&self, t: f64) -> f64 {
        self.piece(t, t + 1e-9 * t.abs().max(1.0))(t)
    }
}

/// Rejects configurations outside the pure-magnetic setting and profiles built
/// for a different base frequency.
pub(crate) fn check_setup(config: &PhysicalConfig, profile: &FrequencyProfile) -> Result<(), DynError> {
    if config.omega_0() != 0.0 {
        return Err(DynError::UnsupportedConfig("time-dependent dynamics assume omega_0 = 0".into()));
    }
    if (profile.omega_c() - config.omega_c()).abs() > 1e-12 * config.omega_c() {
        return Err(DynError::InvalidProfile(format!(
            "profile base frequency {} differs from the configured omega_c {}",
            profile.omega_c(),
            config.omega_c()
        )));
    }
    Ok(())
}

/// Integrates `y' = rhs(t, omega(t), y)` from `y0` at `t = 0`, stopping at every
/// profile breakpoint so that no step straddles a jump, and hands the state at
/// each of `times` to `record`.
pub(crate) fn integrate_profile(
    profile: &FrequencyProfile,
    y0: Vec<f64>,
    times: &[f64],
    rhs: impl Fn(f64, f64, &[f64], &mut [f64]),
    mut check: impl FnMut(f64, &[f64]) -> Result<(), DynError>,
    mut record: impl FnMut(f64, &[f64]) -> Result<(), DynError>,
) -> Result<(), DynError> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(DynError::InvalidTimes("output times must be finite, non-negative and sorted".into()));
    }
    let mut solver = Dopri5::new(0.0, y0, Tolerances::default());
    let bps = profile.breakpoints();
    for &t_out in times {
        let targets: Vec<f64> = bps.iter().copied().filter(|b| *b > solver.t() && *b < t_out).chain([t_out]).collect();
        for target in targets {
            let w = profile.piece(solver.t(), target);
            solver.advance(target, |t, y, d| rhs(t, w(t), y, d), &mut check)?;
        }
        record(t_out, solver.y())?;
    }
    Ok(())
}

/// `n + 1` evenly spaced times on `[0, t_end]`.
pub fn uniform_times(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_validation() {
        assert!(FrequencyProfile::step(1.0, 0.0, 1.0).is_err());
        assert!(FrequencyProfile::parametric(1.0, 0.25).is_err());
        assert!(FrequencyProfile::sampled(1.0, vec![0.0, 1.0, 0.5], vec![1.0; 3]).is_err());
        assert!(FrequencyProfile::constant(-1.0).is_err());
    }

    #[test]
    fn pieces_do_not_straddle_jumps() {
        let p = FrequencyProfile::step(2.0, 0.5, 1.0).unwrap();
        assert_eq!(p.piece(0.0, 1.0)(1.0), 1.0);
        assert_eq!(p.piece(1.0, 2.0)(1.0), 2.0);
        assert_eq!(p.omega(1.0), 2.0);
        let s = FrequencyProfile::sampled(1.0, vec![1.0, 2.0, 3.0], vec![1.0, 3.0, 1.0]).unwrap();
        assert_eq!(s.omega(0.5), 1.0);
        assert!((s.omega(1.5) - 2.0).abs() < 1e-15);
        assert!((s.omega(2.5) - 2.0).abs() < 1e-15);
        assert_eq!(s.omega(4.0), 1.0);
        assert_eq!(s.breakpoints(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn profile_json_roundtrip() {
        let p = FrequencyProfile::sampled(1.5, vec![0.0, 1.0], vec![1.0, 0.5]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<FrequencyProfile>(&s).unwrap(), p);
        let bad = r#"{"kind":"step","theta":-1.0,"tau":1.0,"omega_c":1.0}"#;
        assert!(serde_json::from_str::<FrequencyProfile>(bad).is_err());
    }
}
