use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use super::squeeze::principal_squeezing;
use super::{check_setup, integrate_profile, DynError, FrequencyProfile};
use crate::config::{Gauge, PhysicalConfig};

type C64 = Complex64;

/// Largest accepted `|eps' eps* - eps'* eps - 2i|` along an integration.
pub const WRONSKIAN_TOL: f64 = 1e-8;

/// Landau-gauge auxiliaries `sigma = int omega eps - i omega_c^{-1/2}`,
/// `s = Im(eps sigma*)`, `s'` and `kappa = int (1 - omega s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauAux {
    pub sigma: C64,
    pub s: f64,
    pub s_dot: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSolution {
    gauge: Gauge,
    omega_c: f64,
    times: Vec<f64>,
    eps: Vec<C64>,
    eps_dot: Vec<C64>,
    aux: Option<Vec<LandauAux>>,
    max_drift: f64,
}

impl EpsilonSolution {
    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn eps(&self) -> &[C64] {
        &self.eps
    }

    pub fn eps_dot(&self) -> &[C64] {
        &self.eps_dot
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest Wronskian deviation over every accepted step.
    pub fn max_wronskian_drift(&self) -> f64 {
        self.max_drift
    }
}

fn wronskian_drift(y: &[f64]) -> f64 {
    (2.0 * (y[3] * y[0] - y[2] * y[1]) - 2.0).abs()
}

/// Integrates `eps'' + Omega^2 eps = 0` from the constant-field solution at
/// `t = 0` and samples it at `times` (sorted, non-negative).
///
/// In the Landau gauge the auxiliaries are integrated alongside.
pub fn solve_epsilon(profile: &FrequencyProfile, gauge: Gauge, times: &[f64]) -> Result<EpsilonSolution, DynError> {
    let wc = profile.omega_c();
    let factor = match gauge {
        Gauge::Symmetric => 0.5,
        Gauge::Landau => 1.0,
    };
    let base = factor * wc;
    let landau = gauge == Gauge::Landau;
    let mut y0 = vec![base.powf(-0.5), 0.0, 0.0, base.sqrt()];
    if landau {
        y0.extend([0.0, -wc.powf(-0.5), 0.0]);
    }
    if let Some(g) = profile.kick_strength() {
        let jump = 2.0 * g * factor * factor;
        y0[2] -= jump * y0[0];
        y0[3] -= jump * y0[1];
    }
    let mut max_drift = wronskian_drift(&y0);
    let mut out = EpsilonSolution {
        gauge,
        omega_c: wc,
        times: Vec::with_capacity(times.len()),
        eps: Vec::with_capacity(times.len()),
        eps_dot: Vec::with_capacity(times.len()),
        aux: landau.then(|| Vec::with_capacity(times.len())),
        max_drift: 0.0,
    };
    let rhs = |_: f64, om: f64, y: &[f64], d: &mut [f64]| {
        let om2 = (factor * om).powi(2);
        d[0] = y[2];
        d[1] = y[3];
        d[2] = -om2 * y[0];
        d[3] = -om2 * y[1];
        if landau {
            let s = y[1] * y[4] - y[0] * y[5];
            d[4] = om * y[0];
            d[5] = om * y[1];
            d[6] = 1.0 - om * s;
        }
    };
    let check = |t: f64, y: &[f64]| {
        let drift = wronskian_drift(y);
        max_drift = max_drift.max(drift);
        if drift > WRONSKIAN_TOL {
            return Err(DynError::WronskianDrift { drift, t });
        }
        Ok(())
    };
    let record = |t: f64, y: &[f64]| {
        out.times.push(t);
        out.eps.push(C64::new(y[0], y[1]));
        out.eps_dot.push(C64::new(y[2], y[3]));
        if let Some(aux) = out.aux.as_mut() {
            aux.push(LandauAux {
                sigma: C64::new(y[4], y[5]),
                s: y[1] * y[4] - y[0] * y[5],
                s_dot: y[3] * y[4] - y[2] * y[5],
                kappa: y[6],
            });
        }
        Ok(())
    };
    integrate_profile(profile, y0, times, rhs, check, record)?;
    out.max_drift = max_drift;
    Ok(out)
}

pub fn landau_auxiliaries(sol: &EpsilonSolution) -> Result<&[LandauAux], DynError> {
    sol.aux.as_deref().ok_or(DynError::GaugeMismatch { expected: Gauge::Landau, found: sol.gauge })
}

/// Within-pair variances in units of `hbar / (2 M omega_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionlessVariances {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
    pub xixi: f64,
    pub etaeta: f64,
    pub xieta: f64,
}

impl DimensionlessVariances {
    pub fn xy_block(&self) -> [[f64; 2]; 2] {
        [[self.xx, self.xy], [self.xy, self.yy]]
    }

    pub fn xieta_block(&self) -> [[f64; 2]; 2] {
        [[self.xixi, self.xieta], [self.xieta, self.etaeta]]
    }

    /// Reads the within-pair entries of a physical covariance matrix.
    pub fn from_covariance(cov: &[[f64; 4]; 4], config: &PhysicalConfig) -> Self {
        let k = config.coherent_variance().recip();
        Self {
            xx: cov[0][0] * k,
            yy: cov[1][1] * k,
            xy: cov[0][1] * k,
            xixi: cov[2][2] * k,
            etaeta: cov[3][3] * k,
            xieta: cov[2][3] * k,
        }
    }
}

/// Means and covariance matrix of `(X, Y, xi, eta)` in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceState {
    pub means: [f64; 4],
    pub cov: [[f64; 4]; 4],
}

impl CovarianceState {
    /// A coherent state centred at `means`.
    pub fn coherent(config: &PhysicalConfig, means: [f64; 4]) -> Self {
        let v = config.coherent_variance();
        let mut cov = [[0.0; 4]; 4];
        (0..4).for_each(|i| cov[i][i] = v);
        Self { means, cov }
    }

    pub fn xi_eta_block(&self) -> [[f64; 2]; 2] {
        [[self.cov[2][2], self.cov[2][3]], [self.cov[3][2], self.cov[3][3]]]
    }

    pub fn x_y_block(&self) -> [[f64; 2]; 2] {
        [[self.cov[0][0], self.cov[0][1]], [self.cov[1][0], self.cov[1][1]]]
    }
}

/// Variances of an initially coherent state in the symmetric gauge; all four
/// coincide and the within-pair covariances vanish.
pub fn variances_symmetric(sol: &EpsilonSolution) -> Result<Vec<DimensionlessVariances>, DynError> {
    if sol.gauge != Gauge::Symmetric {
        return Err(DynError::GaugeMismatch { expected: Gauge::Symmetric, found: sol.gauge });
    }
    let wc = sol.omega_c;
    Ok(sol
        .eps
        .iter()
        .zip(&sol.eps_dot)
        .map(|(e, ed)| {
            let v = (wc * wc * e.norm_sqr() + 4.0 * ed.norm_sqr()) / (4.0 * wc);
            DimensionlessVariances { xx: v, yy: v, xy: 0.0, xixi: v, etaeta: v, xieta: 0.0 }
        })
        .collect())
}

/// Variances of an initially coherent state in the Landau gauge.
pub fn variances_landau(sol: &EpsilonSolution) -> Result<Vec<DimensionlessVariances>, DynError> {
    let aux = landau_auxiliaries(sol)?;
    let wc = sol.omega_c;
    Ok(aux
        .iter()
        .zip(sol.eps.iter().zip(&sol.eps_dot))
        .map(|(a, (e, ed))| {
            let xy = a.s_dot - wc * a.kappa;
            DimensionlessVariances {
                xx: 1.0 + xy * xy + (a.sigma * wc + ed).norm_sqr() / wc,
                yy: 1.0,
                xy,
                xixi: a.s_dot * a.s_dot + ed.norm_sqr() / wc,
                etaeta: (wc * a.s - 1.0).powi(2) + wc * e.norm_sqr(),
                xieta: -a.s_dot * (wc * a.s - 1.0) - (ed * e.conj()).re,
            }
        })
        .collect())
}

/// One sample of a dynamics trace; variances, `T` and `d` refer to the
/// `xi`-`eta` pair in units of `hbar / (2 M omega_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub re_eps: f64,
    pub im_eps: f64,
    pub sxx: f64,
    pub syy: f64,
    pub sxy: f64,
    pub sxixi: f64,
    pub setaeta: f64,
    pub sxieta: f64,
    pub smin: f64,
    pub trace: f64,
    pub det: f64,
    pub purity: f64,
}

pub fn dynamics_trace(
    config: &PhysicalConfig,
    profile: &FrequencyProfile,
    gauge: Gauge,
    times: &[f64],
) -> Result<Vec<TraceRow>, DynError> {
    check_setup(config, profile)?;
    let sol = solve_epsilon(profile, gauge, times)?;
    let vars = match gauge {
        Gauge::Symmetric => variances_symmetric(&sol)?,
        Gauge::Landau => variances_landau(&sol)?,
    };
    vars.iter()
        .enumerate()
        .map(|(k, v)| {
            let rep = principal_squeezing(v.xieta_block(), 1.0)?;
            Ok(TraceRow {
                t: sol.times[k],
                re_eps: sol.eps[k].re,
                im_eps: sol.eps[k].im,
                sxx: v.xx,
                syy: v.yy,
                sxy: v.xy,
                sxixi: v.xixi,
                setaeta: v.etaeta,
                sxieta: v.xieta,
                smin: rep.sigma_min,
                trace: rep.trace,
                det: rep.det,
                purity: rep.purity,
            })
        })
        .collect()
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> io::Result<()> {
    writeln!(out, "t,re_eps,im_eps,sxx,syy,sxy,sxixi,setaeta,sxieta,smin,T,d,purity")?;
    for r in rows {
        let vals = [
            r.t, r.re_eps, r.im_eps, r.sxx, r.syy, r.sxy, r.sxixi, r.setaeta, r.sxieta, r.smin, r.trace, r.det, r.purity,
        ];
        let line: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}
