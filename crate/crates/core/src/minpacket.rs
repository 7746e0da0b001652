//! Minimum-energy Gaussian packets with a fixed mean angular momentum in a
//! constant field (symmetric gauge).
//!
//! Momenta are stored as magnitudes `l_c`, `l_i` with rotation signs
//! `lambda_c`, `lambda`; the signed values are `lambda_c * l_c` and `lambda * l_i`.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Gauge, PhysicalConfig};
use crate::wavefields::{Grid, GridSpec, WaveError, WaveField};

type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinPacketError {
    #[error("invalid packet parameter: {0}")]
    InvalidParams(String),
    #[error("closed-form energy moments assume omega_0 = 0")]
    OscillatorNotSupported,
    #[error(transparent)]
    Wave(#[from] WaveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinPacketParams {
    pub l_c: f64,
    pub l_i: f64,
    pub lambda_c: i8,
    pub lambda: i8,
    pub u: f64,
    pub v: f64,
}

impl MinPacketParams {
    pub fn new(l_c: f64, l_i: f64, lambda_c: i8, lambda: i8, u: f64, v: f64) -> Result<Self, MinPacketError> {
        let p = Self { l_c, l_i, lambda_c, lambda, u, v };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MinPacketError> {
        if !(self.l_c.is_finite() && self.l_c >= 0.0 && self.l_i.is_finite() && self.l_i >= 0.0) {
            return Err(MinPacketError::InvalidParams(format!(
                "momentum magnitudes must be finite and >= 0, got {}, {}",
                self.l_c, self.l_i
            )));
        }
        if self.lambda_c.abs() != 1 || self.lambda.abs() != 1 {
            return Err(MinPacketError::InvalidParams(format!(
                "rotation signs must be +-1, got {}, {}",
                self.lambda_c, self.lambda
            )));
        }
        if !(self.u.is_finite() && self.v.is_finite()) {
            return Err(MinPacketError::InvalidParams("angles must be finite".into()));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        (self.l_i / (1.0 + self.l_i)).sqrt()
    }

    /// `w = lambda (v - u/2)`.
    pub fn w(&self) -> f64 {
        self.lam() * (self.v - 0.5 * self.u)
    }

    /// Signed external momentum.
    pub fn signed_l_c(&self) -> f64 {
        self.lam_c() * self.l_c
    }

    /// Signed internal momentum.
    pub fn signed_l_i(&self) -> f64 {
        self.lam() * self.l_i
    }

    fn lam(&self) -> f64 {
        f64::from(self.lambda)
    }

    fn lam_c(&self) -> f64 {
        f64::from(self.lambda_c)
    }
}

/// Coefficients of `exp[-(a X^2 + b X Y + c Y^2) + F X + G Y - Phi]` with
/// `X = sqrt(mu) x`, `Y = sqrt(mu) y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacketCoefficients {
    pub rho: f64,
    pub phi: f64,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub f: C64,
    pub g: C64,
}

pub fn packet_coefficients(p: &MinPacketParams) -> PacketCoefficients {
    let rho = p.rho();
    let (lam, lam_c) = (p.lam(), p.lam_c());
    let e = C64::from_polar(rho, -lam * p.u);
    let i = C64::i();
    let k = p.l_c.sqrt();
    let outer = C64::from_polar(1.0, -lam_c * p.v);
    let inner = C64::from_polar(rho, lam * (p.v - p.u));
    PacketCoefficients {
        rho,
        phi: 0.5 * p.l_c * (1.0 + rho * (p.u - 2.0 * p.v).cos()),
        a: 0.5 * (1.0 + e),
        b: i * lam * e,
        c: 0.5 * (1.0 - e),
        f: k * (outer + inner),
        g: i * k * (lam_c * outer + lam * inner),
    }
}

fn prefactor(rho: f64) -> f64 {
    (1.0 - rho * rho).powf(0.25) / std::f64::consts::PI.sqrt()
}

/// Packet amplitude in units of `sqrt(mu)` at dimensionless `(X, Y)`.
pub fn cartesian_amplitude(k: &PacketCoefficients, x: f64, y: f64) -> C64 {
    let q = k.a * x * x + k.b * x * y + k.c * y * y;
    (-q + k.f * x + k.g * y - k.phi).exp() * prefactor(k.rho)
}

/// The same amplitude from the polar form at dimensionless radius `s` and angle `phi`.
pub fn polar_amplitude(p: &MinPacketParams, s: f64, phi: f64) -> C64 {
    let rho = p.rho();
    let (lam, lam_c) = (p.lam(), p.lam_c());
    let quad = -0.5 * s * s * (1.0 + C64::from_polar(rho, 2.0 * lam * phi - lam * p.u));
    let lin = p.l_c.sqrt()
        * s
        * (C64::from_polar(1.0, lam_c * (phi - p.v)) + C64::from_polar(rho, lam * (phi + p.v - p.u)));
    let big_phi = 0.5 * p.l_c * (1.0 + rho * (p.u - 2.0 * p.v).cos());
    (quad + lin - big_phi).exp() * prefactor(rho)
}

/// Mean position `<(x, y)>` from the linear coefficients.
pub fn packet_center(p: &MinPacketParams, config: &PhysicalConfig) -> (f64, f64) {
    let k = packet_coefficients(p);
    let (m11, m12, m22) = (2.0 * k.a.re, k.b.re, 2.0 * k.c.re);
    let det = m11 * m22 - m12 * m12;
    let (fx, gy) = (k.f.re, k.g.re);
    let s = config.scales().mu.sqrt();
    ((m22 * fx - m12 * gy) / det / s, (m11 * gy - m12 * fx) / det / s)
}

pub fn min_packet_field(config: &PhysicalConfig, spec: GridSpec, p: &MinPacketParams) -> Result<WaveField, MinPacketError> {
    p.validate()?;
    let grid = Grid::new(spec, config);
    let (x0, y0) = packet_center(p, config);
    grid.check_center(x0, y0)?;
    let k = packet_coefficients(p);
    let s = config.scales().mu.sqrt();
    let values = grid.sample(|x, y| cartesian_amplitude(&k, s * x, s * y) * s);
    Ok(WaveField::checked(grid, *config, Gauge::Symmetric, values)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacketEnergy {
    pub mean: f64,
    pub variance: f64,
}

pub fn packet_energy(p: &MinPacketParams, config: &PhysicalConfig) -> Result<PacketEnergy, MinPacketError> {
    p.validate()?;
    if config.omega_0() != 0.0 {
        return Err(MinPacketError::OscillatorNotSupported);
    }
    let unit = config.hbar() * config.scales().larmor;
    let (lam, lam_c) = (p.lam(), p.lam_c());
    let (lc, li) = (p.l_c, p.l_i);
    let mean = unit * (1.0 + li * (1.0 - lam) + lc * (1.0 - lam_c));
    let mixed = li - (li * (1.0 + li)).sqrt() * (2.0 * p.w()).cos();
    let variance = unit
        * unit
        * (2.0 * (1.0 - lam_c) * (1.0 - lam) * lc * mixed
            + 2.0 * lc * (1.0 - lam_c)
            + 4.0 * li * (1.0 + li) * (1.0 - lam));
    Ok(PacketEnergy { mean, variance })
}

/// Mean and variance of `L_z`, both in units of `hbar` (variance in `hbar^2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacketAngular {
    pub mean: f64,
    pub variance: f64,
}

pub fn packet_angular(p: &MinPacketParams) -> PacketAngular {
    let (lc, li) = (p.l_c, p.l_i);
    let mixed = li - (li * (1.0 + li)).sqrt() * (2.0 * p.w()).cos();
    let variance = lc + 2.0 * li * (1.0 + li) + (1.0 + p.lam() * p.lam_c()) * lc * mixed;
    PacketAngular { mean: p.signed_l_c() + p.signed_l_i(), variance }
}

/// Variances of the geometric coordinates in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricVariances {
    pub xx: f64,
    pub yy: f64,
    pub xixi: f64,
    pub etaeta: f64,
}

pub fn packet_geometric_covariances(p: &MinPacketParams, config: &PhysicalConfig) -> GeometricVariances {
    let li = p.l_i;
    // (|L_i| +- L_i) cos(u) / rho written without the 1/rho
    let k = (li * (1.0 + li)).sqrt() * p.u.cos();
    let (plus, minus) = (1.0 + p.lam(), 1.0 - p.lam());
    let unit = config.coherent_variance();
    GeometricVariances {
        xx: unit * (1.0 + plus * (li - k)),
        yy: unit * (1.0 + plus * (li + k)),
        xixi: unit * (1.0 + minus * (li - k)),
        etaeta: unit * (1.0 + minus * (li + k)),
    }
}

/// Angles after free motion for time `t`.
pub fn evolve_angles(p: &MinPacketParams, t: f64, config: &PhysicalConfig) -> Result<MinPacketParams, MinPacketError> {
    if config.omega_0() != 0.0 {
        return Err(MinPacketError::OscillatorNotSupported);
    }
    let wl = config.scales().larmor;
    Ok(MinPacketParams {
        u: p.u + 2.0 * wl * t * (p.lam() - 1.0),
        v: p.v + wl * t * (p.lam_c() - 1.0),
        ..*p
    })
}

/// Closed-form moments of one packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacketSummary {
    pub params: MinPacketParams,
    pub energy: PacketEnergy,
    pub angular: PacketAngular,
    pub covariances: GeometricVariances,
}

pub fn summarize(p: &MinPacketParams, config: &PhysicalConfig) -> Result<PacketSummary, MinPacketError> {
    Ok(PacketSummary {
        params: *p,
        energy: packet_energy(p, config)?,
        angular: packet_angular(p),
        covariances: packet_geometric_covariances(p, config),
    })
}

/// Every combination of the given magnitudes and both rotation signs, at fixed angles.
pub fn parameter_lattice(l_c: &[f64], l_i: &[f64], u: f64, v: f64) -> Result<Vec<MinPacketParams>, MinPacketError> {
    let mut out = Vec::with_capacity(l_c.len() * l_i.len() * 4);
    for &lc in l_c {
        for &li in l_i {
            for lambda in [1, -1] {
                for lambda_c in [1, -1] {
                    out.push(MinPacketParams::new(lc, li, lambda_c, lambda, u, v)?);
                }
            }
        }
    }
    Ok(out)
}

pub fn write_summary_csv<W: Write>(rows: &[PacketSummary], mut out: W) -> io::Result<()> {
    writeln!(out, "L_c,L_i,lambda,lambda_c,u,v,E,sigma_E,sigma_L,sigma_XX,sigma_YY,sigma_xixi,sigma_etaeta")?;
    for r in rows {
        let p = &r.params;
        let vals = [
            p.u,
            p.v,
            r.energy.mean,
            r.energy.variance,
            r.angular.variance,
            r.covariances.xx,
            r.covariances.yy,
            r.covariances.xixi,
            r.covariances.etaeta,
        ];
        let tail: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{:.16e},{:.16e},{},{},{}", p.l_c, p.l_i, p.lambda, p.lambda_c, tail.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_and_centred_limits() {
        let k = packet_coefficients(&MinPacketParams::new(2.0, 0.0, 1, 1, 0.4, 0.2).unwrap());
        assert_eq!(k.rho, 0.0);
        assert!((k.a - 0.5).norm() < 1e-15 && (k.c - 0.5).norm() < 1e-15 && k.b.norm() < 1e-15);
        let k = packet_coefficients(&MinPacketParams::new(0.0, 1.5, -1, 1, 0.4, 0.2).unwrap());
        assert_eq!((k.f, k.g, k.phi), (C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.0));
        assert!(((k.a + k.c) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn closed_form_examples() {
        let cfg = PhysicalConfig::new(1.0, 2.0).unwrap();
        let unit = cfg.hbar() * cfg.scales().larmor;
        let p = MinPacketParams::new(3.0, 2.0, 1, 1, 0.7, 0.1).unwrap();
        let e = packet_energy(&p, &cfg).unwrap();
        assert_eq!((e.mean, e.variance), (unit, 0.0));
        let p = MinPacketParams::new(1.5, 2.0, -1, 1, 0.7, 0.1).unwrap();
        assert!((packet_energy(&p, &cfg).unwrap().variance / (unit * unit) - 6.0).abs() < 1e-12);
        let p = MinPacketParams::new(1.0, 1.0, 1, 1, 0.0, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((packet_angular(&p).variance - 7.0).abs() < 1e-12);
        assert!(packet_energy(&p, &cfg.with_omega_0(1.0).unwrap()).is_err());
        assert!(MinPacketParams::new(1.0, 1.0, 0, 1, 0.0, 0.0).is_err());
    }
}
