//! Physical configuration, derived scales and closed-form spectra.
//!
//! All lengths, times and energies are carried with their symbolic constants,
//! so the default `hbar = mass = 1` unit system is a convenience rather than a
//! requirement.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{name} must be strictly positive (got {value})")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite and non-negative (got {value})")]
    Negative { name: &'static str, value: f64 },
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
}

/// Gauge of the vector potential.
///
/// `Symmetric` is `A = (H/2)(-y, x)`, `Landau` is `A = H(-y, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    #[default]
    Symmetric,
    Landau,
}

impl std::str::FromStr for Gauge {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "symmetric" | "circular" | "s" => Ok(Gauge::Symmetric),
            "landau" | "l" => Ok(Gauge::Landau),
            other => Err(format!("unknown gauge `{other}` (expected symmetric|landau)")),
        }
    }
}

impl std::fmt::Display for Gauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Gauge::Symmetric => f.write_str("symmetric"),
            Gauge::Landau => f.write_str("landau"),
        }
    }
}

/// Mass, field and unit constants of a spinless charged particle in the plane.
///
/// Only `omega_c > 0` is accepted. For a negative charge replace `omega_c` by
/// its modulus and rotate the coordinate plane by 90 degrees
/// (`x -> y`, `y -> -x`) before using any of the formulas here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConfig {
    mass: f64,
    omega_c: f64,
    omega_0: f64,
    hbar: f64,
    c: f64,
    gauge: Gauge,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "one")]
    mass: f64,
    #[serde(default = "one")]
    omega_c: f64,
    #[serde(default)]
    omega_0: f64,
    #[serde(default = "one")]
    hbar: f64,
    #[serde(default = "one")]
    c: f64,
    #[serde(default)]
    gauge: Gauge,
}

fn one() -> f64 {
    1.0
}

impl<'de> Deserialize<'de> for PhysicalConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawConfig::deserialize(d)?;
        PhysicalConfig::new(raw.mass, raw.omega_c)
            .and_then(|c| c.with_omega_0(raw.omega_0))
            .and_then(|c| c.with_hbar(raw.hbar))
            .and_then(|c| c.with_light_speed(raw.c))
            .map(|c| c.with_gauge(raw.gauge))
            .map_err(serde::de::Error::custom)
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ConfigError::NotPositive { name, value })
    }
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            omega_c: 1.0,
            omega_0: 0.0,
            hbar: 1.0,
            c: 1.0,
            gauge: Gauge::Symmetric,
        }
    }
}

impl PhysicalConfig {
    pub fn new(mass: f64, omega_c: f64) -> Result<Self, ConfigError> {
        Ok(Self {
            mass: positive("mass", mass)?,
            omega_c: positive("omega_c", omega_c)?,
            ..Self::default()
        })
    }

    pub fn with_omega_0(mut self, omega_0: f64) -> Result<Self, ConfigError> {
        if !(omega_0.is_finite() && omega_0 >= 0.0) {
            return Err(ConfigError::Negative { name: "omega_0", value: omega_0 });
        }
        self.omega_0 = omega_0;
        Ok(self)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self, ConfigError> {
        self.hbar = positive("hbar", hbar)?;
        Ok(self)
    }

    pub fn with_light_speed(mut self, c: f64) -> Result<Self, ConfigError> {
        self.c = positive("c", c)?;
        Ok(self)
    }

    pub fn with_gauge(mut self, gauge: Gauge) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn omega_0(&self) -> f64 {
        self.omega_0
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    pub fn light_speed(&self) -> f64 {
        self.c
    }
    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    /// `hbar / (2 M omega_c)`: the coherent-state variance of every geometric coordinate.
    pub fn coherent_variance(&self) -> f64 {
        self.hbar / (2.0 * self.mass * self.omega_c)
    }

    pub fn scales(&self) -> DerivedScales {
        derive_scales(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Larmor frequency `omega_c / 2`.
    pub larmor: f64,
    /// `sqrt(omega_0^2 + omega_L^2)`.
    pub effective: f64,
    /// `M * effective / hbar`, inverse length squared.
    pub mu: f64,
    /// `(hbar / (2 M omega_c))^2`, the floor of the covariance determinant.
    pub d_min: f64,
}

pub fn derive_scales(config: &PhysicalConfig) -> DerivedScales {
    let larmor = 0.5 * config.omega_c;
    let effective = config.omega_0.hypot(larmor);
    let mu = config.mass * effective / config.hbar;
    let d_min = config.coherent_variance().powi(2);
    DerivedScales { larmor, effective, mu, d_min }
}

/// Fock–Darwin level `hbar*w~*(1 + |l| + 2 n_r) - hbar*w_L*l`.
pub fn landau_level_energy(config: &PhysicalConfig, n_r: u32, l: i64) -> f64 {
    let s = config.scales();
    config.hbar * s.effective * (1.0 + l.unsigned_abs() as f64 + 2.0 * n_r as f64)
        - config.hbar * s.larmor * l as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyBranch {
    Positive,
    Negative,
}

/// Relativistic Landau level of a Dirac particle,
/// `±sqrt(M²c⁴ + p_z²c² + 2Mc²ħω_c(n+1))`.
///
/// Takes raw constants so that the field-free limit `omega_c = 0` is reachable.
pub fn rabi_energy(mass: f64, c: f64, hbar: f64, omega_c: f64, n: u32, p_z: f64, branch: EnergyBranch) -> f64 {
    let c2 = c * c;
    let e = (mass * mass * c2 * c2 + p_z * p_z * c2 + 2.0 * mass * c2 * hbar * omega_c * (n as f64 + 1.0)).sqrt();
    match branch {
        EnergyBranch::Positive => e,
        EnergyBranch::Negative => -e,
    }
}

pub fn dirac_landau_level(config: &PhysicalConfig, n: u32, p_z: f64, branch: EnergyBranch) -> f64 {
    rabi_energy(config.mass, config.c, config.hbar, config.omega_c, n, p_z, branch)
}
