use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;

use super::basis::reconstruct_field;
use super::{max_deviation_up_to_phase, Grid, GridSpec, WaveError, WaveField, NORM_TOL};
use crate::config::{Gauge, PhysicalConfig};
use crate::fock::{charged_coherent_vector, charged_norm_closed, PartialMode, TruncatedSpace, DEFAULT_CUTOFF};
use crate::special::{bessel_j, laguerre, ln_factorial};

type C64 = Complex64;

/// Pointwise tolerance between the charged closed form and its number-basis sum.
pub const CHARGED_MATCH_TOL: f64 = 1e-6;

const WRONSKIAN_TOL: f64 = 1e-6;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `zeta = sqrt(M omega_c / 4 hbar) (x + iy)`.
fn zeta_scale(config: &PhysicalConfig) -> f64 {
    (config.mass() * config.omega_c() / (4.0 * config.hbar())).sqrt()
}

fn landau_prefactor(config: &PhysicalConfig) -> f64 {
    (config.mass() * config.omega_c() / (2.0 * PI * config.hbar())).sqrt()
}

fn magnetic_length(config: &PhysicalConfig) -> f64 {
    (config.hbar() / (2.0 * config.mass() * config.omega_c())).sqrt()
}

fn finish(grid: Grid, config: &PhysicalConfig, values: Vec<C64>) -> Result<WaveField, WaveError> {
    WaveField::checked(grid, *config, Gauge::Symmetric, values)
}

/// Fock–Darwin eigenfunction with radial number `n_r` and angular number `l`.
pub fn fock_darwin_field(config: &PhysicalConfig, spec: GridSpec, n_r: u32, l: i64) -> Result<WaveField, WaveError> {
    let grid = Grid::new(spec, config);
    let mu = config.scales().mu;
    let la = l.unsigned_abs() as usize;
    let n = n_r as usize;
    let norm = (mu / PI).sqrt() * (0.5 * (ln_factorial(n) - ln_factorial(n + la))).exp();
    let sm = mu.sqrt();
    let values = grid.sample(|x, y| {
        let s = mu * (x * x + y * y);
        let w = if l >= 0 { c(x, y) } else { c(x, -y) } * sm;
        w.powu(la as u32) * (norm * laguerre(n, la as f64, s) * (-0.5 * s).exp())
    });
    finish(grid, config, values)
}

/// Mean position `(<x>, <y>) = (<X + xi>, <Y + eta>)` of the coherent packet `|alpha, beta>`.
pub fn malkin_manko_center(config: &PhysicalConfig, alpha: C64, beta: C64) -> (f64, f64) {
    let l = magnetic_length(config);
    (2.0 * l * (beta.re - alpha.im), 2.0 * l * (alpha.re - beta.im))
}

fn mmcs_values(config: &PhysicalConfig, grid: &Grid, alpha: C64, beta: C64) -> Vec<C64> {
    let zs = zeta_scale(config);
    let pref = landau_prefactor(config);
    let konst = -c(0.0, 1.0) * alpha * beta - 0.5 * (alpha.norm_sqr() + beta.norm_sqr());
    grid.sample(|x, y| {
        let z = c(x, y) * zs;
        let e = -z.norm_sqr() + SQRT_2 * beta * z + c(0.0, SQRT_2) * alpha * z.conj() + konst;
        e.exp() * pref
    })
}

/// Coherent state `|alpha, beta>`, the joint eigenfunction of `a` and `b`.
pub fn malkin_manko_field(config: &PhysicalConfig, spec: GridSpec, alpha: C64, beta: C64) -> Result<WaveField, WaveError> {
    let grid = Grid::new(spec, config);
    let (x0, y0) = malkin_manko_center(config, alpha, beta);
    grid.check_center(x0, y0)?;
    let values = mmcs_values(config, &grid, alpha, beta);
    finish(grid, config, values)
}

/// States with one fixed quantum number and the other mode coherent.
///
/// `FixN(n)` is an eigenstate of `b` with eigenvalue `amplitude`; `FixM(m)` of `a`.
pub fn partially_coherent_field(
    config: &PhysicalConfig,
    spec: GridSpec,
    mode: PartialMode,
    amplitude: C64,
) -> Result<WaveField, WaveError> {
    let grid = Grid::new(spec, config);
    let l = magnetic_length(config);
    let zs = zeta_scale(config);
    let pref = landau_prefactor(config);
    let values = match mode {
        PartialMode::FixN(n) => {
            grid.check_center(2.0 * l * amplitude.re, -2.0 * l * amplitude.im)?;
            let beta = amplitude;
            let norm = pref * (-0.5 * ln_factorial(n)).exp();
            let phase = C64::i().powu(n as u32);
            grid.sample(|x, y| {
                let z = c(x, y) * zs;
                let poly = (SQRT_2 * z.conj() - beta).powu(n as u32);
                phase * poly * (-z.norm_sqr() + SQRT_2 * beta * z - 0.5 * beta.norm_sqr()).exp() * norm
            })
        }
        PartialMode::FixM(m) => {
            grid.check_center(-2.0 * l * amplitude.im, 2.0 * l * amplitude.re)?;
            let alpha = amplitude;
            let norm = pref * (-0.5 * ln_factorial(m)).exp();
            grid.sample(|x, y| {
                let z = c(x, y) * zs;
                let poly = (SQRT_2 * z - C64::i() * alpha).powu(m as u32);
                poly * (-z.norm_sqr() + C64::i() * SQRT_2 * alpha * z.conj() - 0.5 * alpha.norm_sqr()).exp() * norm
            })
        }
    };
    finish(grid, config, values)
}

fn charged_values(config: &PhysicalConfig, grid: &Grid, z: C64, l: i64, norm: f64) -> Vec<C64> {
    let zs = zeta_scale(config);
    let pref = landau_prefactor(config) * norm;
    let power = ((C64::i() * z).ln() * (0.5 * l as f64)).exp();
    let root = (2.0 * z).sqrt() * C64::from_polar(1.0, -FRAC_PI_4);
    let tail = (-C64::i() * z).exp();
    grid.sample(|x, y| {
        let w = c(x, y);
        let r = w.norm();
        let unit = if r > 0.0 { w / r } else { c(1.0, 0.0) };
        let ang = if l >= 0 { unit.powu(l as u32) } else { unit.conj().powu(l.unsigned_abs() as u32) };
        let zeta = r * zs;
        power * ang * bessel_j(l, root * (2.0 * zeta)) * (-zeta * zeta).exp() * tail * pref
    })
}

/// The charged closed form without its normalization constant.
pub fn charged_closed_form_raw(config: &PhysicalConfig, spec: GridSpec, z: C64, l: i64) -> WaveField {
    let grid = Grid::new(spec, config);
    let values = charged_values(config, &grid, z, l, 1.0);
    WaveField::new(grid, *config, Gauge::Symmetric, values)
}

/// Joint eigenstate of `L` (eigenvalue `hbar l`) and `ab` (eigenvalue `z`).
///
/// The closed form is compared against the number-basis sum; a disagreement
/// beyond [`CHARGED_MATCH_TOL`] after global-phase alignment is an error.
pub fn charged_coherent_field(config: &PhysicalConfig, spec: GridSpec, z: C64, l: i64) -> Result<WaveField, WaveError> {
    if l.abs() > 30 {
        return Err(WaveError::InvalidParameter(format!("|l| must not exceed 30, got {l}")));
    }
    let space = TruncatedSpace::new(DEFAULT_CUTOFF)?;
    let v = charged_coherent_vector(space, z, l)?;
    let reference = reconstruct_field(config, spec, &v);
    if z == c(0.0, 0.0) {
        return finish(reference.grid().clone(), config, reference.values().to_vec());
    }
    let grid = Grid::new(spec, config);
    let values = charged_values(config, &grid, z, l, charged_norm_closed(z, l).sqrt().recip());
    let field = finish(grid, config, values)?;
    let deviation = max_deviation_up_to_phase(&reference, &field)?;
    if deviation > CHARGED_MATCH_TOL {
        return Err(WaveError::BranchMismatch { deviation });
    }
    Ok(field)
}

/// Magnetic coherent packet in units where `mu = 1` and time is measured in
/// Larmor periods over `2 pi`; requires `omega_0 = 0`.
pub fn husimi_field(config: &PhysicalConfig, spec: GridSpec, a: [f64; 2], beta_h: f64, t: f64) -> Result<WaveField, WaveError> {
    if !(beta_h > 0.0 && beta_h.is_finite()) {
        return Err(WaveError::InvalidParameter(format!("beta_h must be positive, got {beta_h}")));
    }
    if config.omega_0() != 0.0 {
        return Err(WaveError::InvalidParameter("the magnetic coherent packet requires omega_0 = 0".into()));
    }
    let grid = Grid::new(spec, config);
    let mu = config.scales().mu;
    let sm = mu.sqrt();
    grid.check_center(a[0] / sm, a[1] / sm)?;
    let tt = config.scales().larmor * t;
    let arg = c(beta_h, tt);
    let coth = arg.cosh() / arg.sinh();
    let pref = ((2.0 * beta_h).sinh() / (2.0 * PI)).sqrt() / arg.sinh() * sm;
    let values = grid.sample(|x, y| {
        let (xs, ys) = (x * sm, y * sm);
        let d2 = (xs - a[0]).powi(2) + (ys - a[1]).powi(2);
        let cross = xs * a[1] - ys * a[0];
        pref * (-0.5 * coth * d2 - C64::i() * cross).exp()
    });
    finish(grid, config, values)
}

/// Transverse profile of the null-plane packet at light-front time `s`; the
/// amplitude rotates as `alpha e^{-iBs}` with `B = M omega_c / hbar`.
pub fn null_plane_field(
    config: &PhysicalConfig,
    spec: GridSpec,
    alpha: C64,
    beta: C64,
    momentum: f64,
    s: f64,
) -> Result<WaveField, WaveError> {
    if !(momentum > 0.0 && momentum.is_finite()) {
        return Err(WaveError::InvalidParameter(format!("light-front momentum must be positive, got {momentum}")));
    }
    let b = config.mass() * config.omega_c() / config.hbar();
    let alpha_mm = -C64::i() * alpha * C64::from_polar(1.0, -b * s);
    let grid = Grid::new(spec, config);
    let (x0, y0) = malkin_manko_center(config, alpha_mm, beta);
    grid.check_center(x0, y0)?;
    let values = mmcs_values(config, &grid, alpha_mm, beta);
    let raw = grid.integrate_norm_sqr(&values);
    let s = raw.sqrt().recip();
    finish(grid, config, values.into_iter().map(|v| v * s).collect())
}

/// Coherent packet for a time-dependent field, built from a solution `eps` of
/// `eps'' + Omega^2 eps = 0` with Wronskian `2i` and the accumulated angle `phi`.
///
/// The samples are renormalized by quadrature; [`WaveField::raw_norm`] keeps the
/// norm of the closed form as written.
pub fn td_coherent_field(
    config: &PhysicalConfig,
    spec: GridSpec,
    eps: C64,
    eps_dot: C64,
    phi: f64,
    alpha: C64,
    beta: C64,
) -> Result<WaveField, WaveError> {
    if eps == c(0.0, 0.0) {
        return Err(WaveError::InvalidParameter("eps must not vanish".into()));
    }
    let w = eps_dot * eps.conj() - eps_dot.conj() * eps;
    if (w - c(0.0, 2.0)).norm() > WRONSKIAN_TOL {
        return Err(WaveError::BadWronskian { re: w.re, im: w.im });
    }
    let grid = Grid::new(spec, config);
    let ks = (config.mass() / config.hbar()).sqrt();
    let pref = (config.mass() / (PI * config.hbar())).sqrt() / eps;
    let quad = C64::i() * eps_dot / (2.0 * eps);
    let la = C64::i() * alpha * C64::from_polar(1.0, -phi) / eps;
    let lb = beta * C64::from_polar(1.0, phi) / eps;
    let konst = -C64::i() * alpha * beta * eps.conj() / eps - 0.5 * (alpha.norm_sqr() + beta.norm_sqr());
    let values = grid.sample(|x, y| {
        let zt = c(x, y) * ks;
        pref * (quad * zt.norm_sqr() + la * zt.conj() + lb * zt + konst).exp()
    });
    let field = WaveField::new(grid, *config, Gauge::Symmetric, values);
    let raw = field.raw_norm();
    if (raw - 1.0).abs() > NORM_TOL {
        return Err(WaveError::GridTooCoarse { norm: raw });
    }
    let normalized = field.normalized();
    Ok(WaveField { raw_norm: raw, ..normalized })
}

/// Multiplies by `exp(i g(x, y) / hbar)` (charge and light speed set to 1) and
/// relabels the gauge.
pub fn gauge_transform_field(field: &WaveField, g: impl Fn(f64, f64) -> f64 + Sync, gauge: Gauge) -> WaveField {
    let grid = field.grid();
    let hbar = field.config().hbar();
    let phases = grid.sample(|x, y| C64::from_polar(1.0, g(x, y) / hbar));
    let values = field.values().iter().zip(&phases).map(|(v, p)| v * p).collect();
    WaveField { gauge, values, ..field.clone() }
}

/// Maps a symmetric-gauge field to the gauge `A = (-H y, 0)`.
pub fn to_landau_gauge(field: &WaveField) -> Result<WaveField, WaveError> {
    if field.gauge() != Gauge::Symmetric {
        return Err(WaveError::InvalidParameter("field is not in the symmetric gauge".into()));
    }
    let h = field.config().mass() * field.config().omega_c();
    Ok(gauge_transform_field(field, |x, y| -0.5 * h * x * y, Gauge::Landau))
}
