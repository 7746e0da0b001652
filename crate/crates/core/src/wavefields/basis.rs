use num_complex::Complex64;
use rayon::prelude::*;

use super::{Grid, GridSpec, WaveError, WaveField};
use crate::config::{Gauge, PhysicalConfig};
use crate::fock::{FockVector, TruncatedSpace};
use crate::special::{laguerre_sequence, ln_factorial};

type C64 = Complex64;

/// Values of every `<x,y|n,m>` with `n, m <= cutoff` at one point, written into
/// `out` in [`TruncatedSpace::index`] order.
fn basis_values(space: TruncatedSpace, k0: f64, x: f64, y: f64, out: &mut [C64]) {
    let n_max = space.cutoff();
    let kk = 0.5 * k0;
    let s = kk * (x * x + y * y);
    let pref = (kk / std::f64::consts::PI).sqrt();
    let phase = C64::new(x, y);
    let unit = if phase.norm() > 0.0 { phase / phase.norm() } else { C64::new(1.0, 0.0) };
    let neg_i = [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)];
    for la in 0..=n_max {
        let k_max = n_max - la;
        let lag = laguerre_sequence(k_max, la as f64, s);
        let radial_pow = if la == 0 {
            0.0
        } else if s > 0.0 {
            0.5 * la as f64 * s.ln()
        } else {
            f64::NEG_INFINITY
        };
        let e_pos = unit.powu(la as u32);
        for (k, lk) in lag.iter().enumerate() {
            let mag = (0.5 * (ln_factorial(k) - ln_factorial(k + la)) + radial_pow - 0.5 * s).exp() * lk * pref;
            let base = neg_i[k % 4] * mag;
            // l = m - n = +la
            out[space.index(k, k + la)] = base * e_pos;
            if la > 0 {
                // l = -la carries an extra i^la
                out[space.index(k + la, k)] = base * neg_i[(4 - la % 4) % 4] * e_pos.conj();
            }
        }
    }
}

fn check_symmetric(config: &PhysicalConfig, gauge: Gauge) -> Result<f64, WaveError> {
    if gauge != Gauge::Symmetric {
        return Err(WaveError::InvalidParameter("number-basis functions are defined in the symmetric gauge".into()));
    }
    Ok(config.mass() * config.omega_c() / config.hbar())
}

/// `<x,y|n,m>` sampled without a norm check.
pub fn fock_field_unchecked(config: &PhysicalConfig, spec: GridSpec, n: usize, m: usize) -> WaveField {
    let grid = Grid::new(spec, config);
    let space = TruncatedSpace::new(n.max(m).max(1)).expect("non-zero cutoff");
    let k0 = config.mass() * config.omega_c() / config.hbar();
    let idx = space.index(n, m);
    let values = grid.sample(|x, y| {
        let mut b = vec![C64::new(0.0, 0.0); space.dim()];
        basis_values(space, k0, x, y, &mut b);
        b[idx]
    });
    WaveField::new(grid, *config, Gauge::Symmetric, values)
}

/// `<x,y|n,m>`, the joint eigenfunction of `a^dag a` and `b^dag b` in the symmetric gauge.
pub fn fock_field(config: &PhysicalConfig, spec: GridSpec, n: usize, m: usize) -> Result<WaveField, WaveError> {
    let f = fock_field_unchecked(config, spec, n, m);
    if (f.raw_norm() - 1.0).abs() > super::NORM_TOL {
        return Err(WaveError::GridTooCoarse { norm: f.raw_norm() });
    }
    Ok(f)
}

/// `sum c_{n,m} <x,y|n,m>` on the grid of `spec`.
pub fn reconstruct_field(config: &PhysicalConfig, spec: GridSpec, v: &FockVector) -> WaveField {
    let grid = Grid::new(spec, config);
    let space = v.space();
    let k0 = config.mass() * config.omega_c() / config.hbar();
    let amps = v.amplitudes();
    let support: Vec<usize> = (0..amps.len()).filter(|&i| amps[i] != C64::new(0.0, 0.0)).collect();
    let p = grid.points();
    let mut values = vec![C64::new(0.0, 0.0); p * p];
    values.par_chunks_mut(p).enumerate().for_each(|(j, row)| {
        let mut b = vec![C64::new(0.0, 0.0); space.dim()];
        let y = grid.coords()[j];
        for (i, out) in row.iter_mut().enumerate() {
            basis_values(space, k0, grid.coords()[i], y, &mut b);
            *out = support.iter().map(|&q| amps[q] * b[q]).sum();
        }
    });
    WaveField::new(grid, *config, Gauge::Symmetric, values)
}

/// Quadrature coefficients `<n,m|psi>` for every basis state of `space`.
pub fn project_to_fock(field: &WaveField, space: TruncatedSpace) -> Result<FockVector, WaveError> {
    let k0 = check_symmetric(field.config(), field.gauge())?;
    let grid = field.grid();
    let p = grid.points();
    let dim = space.dim();
    let psi = field.values();
    let amps = (0..p)
        .into_par_iter()
        .map(|j| {
            let mut b = vec![C64::new(0.0, 0.0); dim];
            let mut acc = vec![C64::new(0.0, 0.0); dim];
            let y = grid.coords()[j];
            for i in 0..p {
                let w = psi[j * p + i] * (grid.weights()[i] * grid.weights()[j]);
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                basis_values(space, k0, grid.coords()[i], y, &mut b);
                acc.iter_mut().zip(&b).for_each(|(a, bv)| *a += bv.conj() * w);
            }
            acc
        })
        .reduce(
            || vec![C64::new(0.0, 0.0); dim],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(FockVector::from_amplitudes(space, amps)?)
}
