use serde::Serialize;

use super::epsilon::{solve_epsilon, variances_landau};
use super::{uniform_times, DynError, FrequencyProfile};
use crate::config::Gauge;

/// Samples per half-period `pi / omega_c` in the post-pulse scan.
pub const SAMPLES_PER_PERIOD: usize = 200;

/// Relative slack below `d_min` tolerated before a block is called unphysical.
const DET_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeReport {
    pub trace: f64,
    pub det: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub purity: f64,
}

/// Extremal variances of a rotating pair with covariance block `cov2`.
///
/// `d_min` is the uncertainty floor of the determinant in the units of `cov2`.
pub fn principal_squeezing(cov2: [[f64; 2]; 2], d_min: f64) -> Result<SqueezeReport, DynError> {
    let (a, b) = (cov2[0][0], cov2[1][1]);
    let c = 0.5 * (cov2[0][1] + cov2[1][0]);
    let trace = a + b;
    let det = a * b - c * c;
    if !(det >= d_min * (1.0 - DET_SLACK)) || a < 0.0 || b < 0.0 {
        return Err(DynError::NonPhysical { d: det, d_min });
    }
    // hypot keeps the split accurate when the block is nearly isotropic
    let half_gap = (0.5 * (a - b)).hypot(c);
    let sigma_max = 0.5 * trace + half_gap;
    let sigma_min = det / sigma_max;
    Ok(SqueezeReport { trace, det, sigma_min, sigma_max, purity: (d_min / det).sqrt().min(1.0) })
}

/// `sigma_xixi` a time `dt` after the field settles at `omega`, starting from `block`.
pub fn rotate_relative_variances(block: [[f64; 2]; 2], omega: f64, dt: f64) -> f64 {
    let (s, c) = (omega * dt).sin_cos();
    block[0][0] * c * c + block[1][1] * s * s + block[0][1] * (2.0 * omega * dt).sin()
}

/// Post-pulse squeezing of an initially coherent state, in units of `hbar / (2 M omega_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseOutcome {
    /// Time at which the field returns to `omega_c`.
    pub settle_time: f64,
    /// `xi`-`eta` block at `settle_time`.
    pub block: [[f64; 2]; 2],
    /// Principal squeezing of `block`.
    pub sigma_min: f64,
    /// Smallest `sigma_xixi` found by re-solving over one post-pulse period.
    pub scanned_min: f64,
    /// Time of `scanned_min`.
    pub t_min: f64,
}

fn landau_xixi(profile: &FrequencyProfile, times: &[f64]) -> Result<Vec<(f64, [[f64; 2]; 2])>, DynError> {
    let sol = solve_epsilon(profile, Gauge::Landau, times)?;
    Ok(sol.times().iter().copied().zip(variances_landau(&sol)?.iter().map(|v| v.xieta_block())).collect())
}

fn pulse_outcome(profile: &FrequencyProfile) -> Result<PulseOutcome, DynError> {
    let wc = profile.omega_c();
    let t0 = profile.settles_at().expect("pulse profiles settle");
    let period = std::f64::consts::PI / wc;
    let times: Vec<f64> = uniform_times(period, SAMPLES_PER_PERIOD).into_iter().map(|t| t0 + t).collect();
    let samples = landau_xixi(profile, &times)?;
    let block = samples[0].1;
    let rep = principal_squeezing(block, 1.0)?;
    let k = (0..samples.len()).min_by(|&i, &j| samples[i].1[0][0].total_cmp(&samples[j].1[0][0])).unwrap();
    let h = period / SAMPLES_PER_PERIOD as f64;
    let (mut lo, mut hi) = ((samples[k].0 - h).max(t0), samples[k].0 + h);
    let eval = |t: f64| -> Result<f64, DynError> { Ok(landau_xixi(profile, &[t])?[0].1[0][0]) };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fa, mut fb) = (eval(a)?, eval(b)?);
    while hi - lo > 1e-7 * period {
        if fa < fb {
            hi = b;
            (b, fb) = (a, fa);
            a = hi - g * (hi - lo);
            fa = eval(a)?;
        } else {
            lo = a;
            (a, fa) = (b, fb);
            b = lo + g * (hi - lo);
            fb = eval(b)?;
        }
    }
    let (t_min, scanned_min) = [(a, fa), (b, fb), (samples[k].0, samples[k].1[0][0])]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    Ok(PulseOutcome { settle_time: t0, block, sigma_min: rep.sigma_min, scanned_min, t_min })
}

/// Field held at `theta omega_c` for `0 < t < tau`, Landau gauge.
pub fn scenario_step(omega_c: f64, theta: f64, tau: f64) -> Result<PulseOutcome, DynError> {
    pulse_outcome(&FrequencyProfile::step(omega_c, theta, tau)?)
}

/// `omega^2 -> omega^2 + 2 gamma delta(t)`, Landau gauge.
pub fn scenario_kick(omega_c: f64, gamma: f64) -> Result<PulseOutcome, DynError> {
    if !(gamma > 0.0) {
        return Err(DynError::InvalidProfile(format!("kick needs gamma > 0, got {gamma}")));
    }
    pulse_outcome(&FrequencyProfile::kick(omega_c, gamma)?)
}

/// Dimensionless Landau-gauge variances under `omega = omega_c (1 + 2 gamma cos 2 omega_c t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParametricTrace {
    pub gamma: f64,
    pub times: Vec<f64>,
    /// Principal squeezing of the `xi`-`eta` pair.
    pub sigma_min: Vec<f64>,
    /// `exp(-2 omega_c gamma t)`.
    pub analytic_min: Vec<f64>,
    pub xixi: Vec<f64>,
    pub xx: Vec<f64>,
    pub yy: Vec<f64>,
    pub xy: Vec<f64>,
}

impl ParametricTrace {
    /// Largest `|sigma_min / analytic - 1|` over samples with `t >= t_from`.
    pub fn max_relative_error(&self, t_from: f64) -> f64 {
        self.times
            .iter()
            .zip(self.sigma_min.iter().zip(&self.analytic_min))
            .filter(|(t, _)| **t >= t_from)
            .map(|(_, (s, a))| (s / a - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the `X`-`Y` block from the coherent value.
    pub fn max_xy_deviation(&self) -> f64 {
        self.xx
            .iter()
            .zip(&self.yy)
            .zip(&self.xy)
            .map(|((a, b), c)| (a - 1.0).abs().max((b - 1.0).abs()).max(c.abs()))
            .fold(0.0, f64::max)
    }
}

pub fn scenario_parametric(omega_c: f64, gamma: f64, t_max: f64, samples: usize) -> Result<ParametricTrace, DynError> {
    if !(gamma > 0.0 && gamma <= 0.1) {
        return Err(DynError::InvalidProfile(format!("parametric scenario needs 0 < gamma <= 0.1, got {gamma}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) || samples == 0 {
        return Err(DynError::InvalidTimes(format!("need t_max > 0 and at least one sample, got {t_max}, {samples}")));
    }
    let profile = FrequencyProfile::parametric(omega_c, gamma)?;
    let times = uniform_times(t_max, samples);
    let sol = solve_epsilon(&profile, Gauge::Landau, &times)?;
    let vars = variances_landau(&sol)?;
    let mut out = ParametricTrace {
        gamma,
        times: times.clone(),
        sigma_min: Vec::with_capacity(times.len()),
        analytic_min: times.iter().map(|t| (-2.0 * omega_c * gamma * t).exp()).collect(),
        xixi: Vec::with_capacity(times.len()),
        xx: Vec::with_capacity(times.len()),
        yy: Vec::with_capacity(times.len()),
        xy: Vec::with_capacity(times.len()),
    };
    for v in &vars {
        out.sigma_min.push(principal_squeezing(v.xieta_block(), 1.0)?.sigma_min);
        out.xixi.push(v.xixi);
        out.xx.push(v.xx);
        out.yy.push(v.yy);
        out.xy.push(v.xy);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_squeezing_examples() {
        let r = principal_squeezing([[1.0, 0.0], [0.0, 1.0]], 1.0).unwrap();
        assert_eq!((r.sigma_min, r.purity), (1.0, 1.0));
        let r = principal_squeezing([[2.0, 0.0], [0.0, 0.5]], 1.0).unwrap();
        assert!((r.sigma_min - 0.5).abs() < 1e-15);
        assert!(principal_squeezing([[0.5, 0.0], [0.0, 0.5]], 1.0).is_err());
        let r = principal_squeezing([[2.0, 0.0], [0.0, 2.0]], 1.0).unwrap();
        assert!((r.purity - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rotation_extremum() {
        let b = [[2.0, 0.0], [0.0, 0.5]];
        let m = (0..=1000).map(|k| rotate_relative_variances(b, 1.0, k as f64 * 1e-3 * std::f64::consts::PI)).fold(f64::MAX, f64::min);
        assert!((m - 0.5).abs() < 1e-12);
        assert_eq!(rotate_relative_variances([[1.0, 0.0], [0.0, 1.0]], 2.0, 0.3), 1.0);
    }

    #[test]
    fn unit_step_changes_nothing() {
        let o = scenario_step(1.0, 1.0, 2.0).unwrap();
        assert!((o.sigma_min - 1.0).abs() < 1e-8, "{o:?}");
        assert!((o.scanned_min - 1.0).abs() < 1e-8, "{o:?}");
    }
}
