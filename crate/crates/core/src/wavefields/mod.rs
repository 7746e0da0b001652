//! Position-space wavefunctions on uniform 2D grids.
//!
//! Grids are specified in units of `mu^{-1/2}` (see [`crate::config::DerivedScales`])
//! and carry trapezoid weights in physical units, so quadrature results are
//! directly comparable with closed-form moments.

mod analysis;
mod basis;
mod families;
pub mod io;

pub use analysis::{
    angular_variance, apply_operator, energy_variance, expectation, ladder_residual, operator_residual,
    quadratic_moments, GridOperator, Ladder, QuadraticMoments, BORDER,
};
pub use basis::{fock_field, fock_field_unchecked, project_to_fock, reconstruct_field};
pub use families::{
    charged_closed_form_raw, charged_coherent_field, fock_darwin_field, gauge_transform_field, husimi_field,
    malkin_manko_field, malkin_manko_center, null_plane_field, partially_coherent_field, td_coherent_field,
    to_landau_gauge, CHARGED_MATCH_TOL,
};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Gauge, PhysicalConfig};
use crate::fock::FockError;

pub const NORM_TOL: f64 = 1e-6;
/// Packet centres must stay this many `mu^{-1/2}` units inside the grid edge.
pub const CENTER_MARGIN: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("grid too coarse or too small: quadrature norm {norm} deviates from 1 by more than {NORM_TOL:e}")]
    GridTooCoarse { norm: f64 },
    #[error("packet centre ({x:.3}, {y:.3}) lies outside |x|,|y| <= {limit:.3} (units mu^-1/2)")]
    CenterOutsideGrid { x: f64, y: f64, limit: f64 },
    #[error("closed form disagrees with the Fock-sum reconstruction by {deviation:.3e} after phase alignment")]
    BranchMismatch { deviation: f64 },
    #[error("Wronskian {re}+{im}i of (eps, eps_dot) differs from 2i")]
    BadWronskian { re: f64, im: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Half-width `W` (units `mu^{-1/2}`) and number of points per axis `P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    half_width: f64,
    points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { half_width: 8.0, points: 256 }
    }
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self, WaveError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(WaveError::InvalidGrid(format!("half-width must be positive, got {half_width}")));
        }
        if points < 16 || points % 2 != 0 {
            return Err(WaveError::InvalidGrid(format!("points per axis must be even and >= 16, got {points}")));
        }
        Ok(Self { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Spacing in units of `mu^{-1/2}`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }
}

impl std::str::FromStr for GridSpec {
    type Err = WaveError;

    /// Parses `W:P`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, p) = s.split_once(':').ok_or_else(|| WaveError::InvalidGrid(format!("expected W:P, got `{s}`")))?;
        let w: f64 = w.trim().parse().map_err(|_| WaveError::InvalidGrid(format!("bad half-width `{w}`")))?;
        let p: usize = p.trim().parse().map_err(|_| WaveError::InvalidGrid(format!("bad point count `{p}`")))?;
        Self::new(w, p)
    }
}

/// A [`GridSpec`] realized in physical units for a given configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    spec: GridSpec,
    length_scale: f64,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn new(spec: GridSpec, config: &PhysicalConfig) -> Self {
        let length_scale = config.scales().mu.sqrt().recip();
        let p = spec.points;
        let h = spec.spacing() * length_scale;
        let coords = (0..p).map(|i| (-spec.half_width + i as f64 * spec.spacing()) * length_scale).collect();
        let weights = (0..p).map(|i| if i == 0 || i == p - 1 { 0.5 * h } else { h }).collect();
        Self { spec, length_scale, coords, weights }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn points(&self) -> usize {
        self.spec.points
    }

    /// Physical length of one `mu^{-1/2}` unit.
    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    /// Physical spacing.
    pub fn step(&self) -> f64 {
        self.spec.spacing() * self.length_scale
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Flat index of `(x_i, y_j)`; rows run along `x`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.spec.points + i
    }

    pub fn len(&self) -> usize {
        self.spec.points * self.spec.points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Evaluates `f(x, y)` at every node, rows in parallel.
    pub fn sample(&self, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Vec<Complex64> {
        let p = self.spec.points;
        let mut out = vec![Complex64::new(0.0, 0.0); p * p];
        out.par_chunks_mut(p).enumerate().for_each(|(j, row)| {
            let y = self.coords[j];
            for (i, v) in row.iter_mut().enumerate() {
                *v = f(self.coords[i], y);
            }
        });
        out
    }

    /// Trapezoid quadrature of `conj(f) g`.
    pub fn integrate_product(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        let p = self.spec.points;
        (0..p)
            .into_par_iter()
            .map(|j| {
                let wy = self.weights[j];
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..p {
                    let k = j * p + i;
                    acc += f[k].conj() * g[k] * self.weights[i];
                }
                acc * wy
            })
            .sum()
    }

    pub fn integrate_norm_sqr(&self, f: &[Complex64]) -> f64 {
        self.integrate_product(f, f).re
    }

    /// Checks that a packet centred at physical `(x, y)` leaves [`CENTER_MARGIN`] to the edge.
    pub fn check_center(&self, x: f64, y: f64) -> Result<(), WaveError> {
        let limit = self.spec.half_width - CENTER_MARGIN;
        let (xs, ys) = (x / self.length_scale, y / self.length_scale);
        if xs.abs() > limit || ys.abs() > limit {
            return Err(WaveError::CenterOutsideGrid { x: xs, y: ys, limit });
        }
        Ok(())
    }
}

/// Complex samples on a grid together with the configuration and gauge they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Grid,
    config: PhysicalConfig,
    gauge: Gauge,
    values: Vec<Complex64>,
    raw_norm: f64,
}

impl WaveField {
    pub fn new(grid: Grid, config: PhysicalConfig, gauge: Gauge, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.len());
        let raw_norm = grid.integrate_norm_sqr(&values);
        Self { grid, config, gauge, values, raw_norm }
    }

    /// Like [`WaveField::new`] but fails when the quadrature norm is not 1 within [`NORM_TOL`].
    pub fn checked(grid: Grid, config: PhysicalConfig, gauge: Gauge, values: Vec<Complex64>) -> Result<Self, WaveError> {
        let f = Self::new(grid, config, gauge, values);
        if !((f.raw_norm - 1.0).abs() <= NORM_TOL) {
            return Err(WaveError::GridTooCoarse { norm: f.raw_norm });
        }
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn config(&self) -> &PhysicalConfig {
        &self.config
    }

    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Quadrature norm `int |psi|^2` of the samples as constructed.
    pub fn raw_norm(&self) -> f64 {
        self.raw_norm
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.integrate_norm_sqr(&self.values)
    }

    /// Rescales to unit quadrature norm.
    pub fn normalized(mut self) -> Self {
        let s = self.norm_sqr().sqrt().recip();
        self.values.iter_mut().for_each(|v| *v *= s);
        self
    }

    pub fn value_at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }
}

/// Trapezoid quadrature of `conj(f1) f2`.
pub fn inner_product(f1: &WaveField, f2: &WaveField) -> Result<Complex64, WaveError> {
    if f1.grid != f2.grid {
        return Err(WaveError::GridMismatch);
    }
    Ok(f1.grid.integrate_product(&f1.values, &f2.values))
}

/// `|<f1|f2>|^2 / (<f1|f1><f2|f2>)`.
pub fn fidelity(f1: &WaveField, f2: &WaveField) -> Result<f64, WaveError> {
    let ov = inner_product(f1, f2)?;
    Ok(ov.norm_sqr() / (f1.norm_sqr() * f2.norm_sqr()))
}

/// Largest pointwise difference after removing the best global phase, relative
/// to the largest modulus of `reference`.
pub fn max_deviation_up_to_phase(reference: &WaveField, other: &WaveField) -> Result<f64, WaveError> {
    let ov = inner_product(other, reference)?;
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
    let scale = reference.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let dev = reference
        .values
        .iter()
        .zip(&other.values)
        .map(|(r, o)| (r - o * phase).norm())
        .fold(0.0, f64::max);
    Ok(dev / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parsing() {
        let g: GridSpec = "8:256".parse().unwrap();
        assert_eq!(g, GridSpec::default());
        assert!("8:255".parse::<GridSpec>().is_err());
        assert!("-1:256".parse::<GridSpec>().is_err());
        assert!("8".parse::<GridSpec>().is_err());
    }

    #[test]
    fn gaussian_quadrature_is_spectral() {
        let cfg = PhysicalConfig::new(1.0, 2.0).unwrap();
        let grid = Grid::new(GridSpec::default(), &cfg);
        let v = grid.sample(|x, y| Complex64::new((-(x * x + y * y) / 2.0).exp() / std::f64::consts::PI.sqrt(), 0.0));
        assert!((grid.integrate_norm_sqr(&v) - 1.0).abs() < 1e-14);
    }
}
