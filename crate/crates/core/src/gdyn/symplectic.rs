use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use super::epsilon::CovarianceState;
use super::{check_setup, integrate_profile, DynError, FrequencyProfile};
use crate::config::{Gauge, PhysicalConfig};

type C64 = Complex64;

/// Largest accepted defect of the invariant commutation relations (times `hbar`).
pub const INVARIANT_TOL: f64 = 1e-8;

/// `[q_i, q_j] = i hbar / (M omega_c) J_ij` for `q = (X, Y, xi, eta)`.
pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Linear map from canonical `(x, y, p_x, p_y)` to `(X, Y, xi, eta)` for the
/// constant base field in the given gauge.
pub fn geometric_map(config: &PhysicalConfig, gauge: Gauge) -> Matrix4<f64> {
    let mw = config.mass() * config.omega_c();
    let k = mw.recip();
    match gauge {
        Gauge::Symmetric => Matrix4::new(
            0.5, 0.0, 0.0, k, //
            0.0, 0.5, -k, 0.0, //
            0.5, 0.0, 0.0, -k, //
            0.0, 0.5, k, 0.0,
        ),
        Gauge::Landau => Matrix4::new(
            1.0, 0.0, 0.0, k, //
            0.0, 0.0, -k, 0.0, //
            0.0, 0.0, 0.0, -k, //
            0.0, 1.0, k, 0.0,
        ),
    }
}

/// Blocks of `r' = b1 p + b2 r`, `p' = -(b3 p + b4 r)` with `b1 = 1/M` and `b3 = b2^T`.
fn blocks(gauge: Gauge, m: f64, w: f64) -> (Matrix2<f64>, Matrix2<f64>) {
    match gauge {
        Gauge::Symmetric => (Matrix2::new(0.0, 0.5 * w, -0.5 * w, 0.0), Matrix2::identity() * (0.25 * m * w * w)),
        Gauge::Landau => (Matrix2::new(0.0, w, 0.0, 0.0), Matrix2::new(0.0, 0.0, 0.0, m * w * w)),
    }
}

/// Momentum jump `p -> p - K r` produced by `omega^2 -> omega^2 + 2 gamma delta(t)`.
fn kick_block(gauge: Gauge, m: f64, gamma: f64) -> Matrix2<f64> {
    match gauge {
        Gauge::Symmetric => Matrix2::identity() * (0.5 * m * gamma),
        Gauge::Landau => Matrix2::new(0.0, 0.0, 0.0, 2.0 * m * gamma),
    }
}

fn flow_matrix(gauge: Gauge, m: f64, w: f64) -> Matrix4<f64> {
    let (b2, b4) = blocks(gauge, m, w);
    let mut a = Matrix4::zeros();
    a.fixed_view_mut::<2, 2>(0, 0).copy_from(&b2);
    a.fixed_view_mut::<2, 2>(0, 2).copy_from(&(Matrix2::identity() / m));
    a.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-b4));
    a.fixed_view_mut::<2, 2>(2, 2).copy_from(&(-b2.transpose()));
    a
}

/// `Lambda(t)` with `<q>(t) = Lambda(t) <q>(0)` for every requested time.
pub fn propagator_trace(
    config: &PhysicalConfig,
    profile: &FrequencyProfile,
    gauge: Gauge,
    times: &[f64],
) -> Result<Vec<Matrix4<f64>>, DynError> {
    check_setup(config, profile)?;
    let m = config.mass();
    let mut s0 = Matrix4::<f64>::identity();
    if let Some(g) = profile.kick_strength() {
        s0.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-kick_block(gauge, m, g)));
    }
    let g = geometric_map(config, gauge);
    let g_inv = g.try_inverse().expect("geometric map is invertible");
    let mut out = Vec::with_capacity(times.len());
    let rhs = |_: f64, w: f64, y: &[f64], d: &mut [f64]| {
        let s = Matrix4::from_column_slice(y);
        d.copy_from_slice((flow_matrix(gauge, m, w) * s).as_slice());
    };
    let record = |_: f64, y: &[f64]| {
        out.push(g * Matrix4::from_column_slice(y) * g_inv);
        Ok(())
    };
    integrate_profile(profile, s0.as_slice().to_vec(), times, rhs, |_, _| Ok(()), record)?;
    Ok(out)
}

pub fn build_propagator(
    config: &PhysicalConfig,
    profile: &FrequencyProfile,
    gauge: Gauge,
    t: f64,
) -> Result<Matrix4<f64>, DynError> {
    Ok(propagator_trace(config, profile, gauge, &[t])?.remove(0))
}

/// Frobenius norm of `Lambda J Lambda^T - J`.
pub fn symplectic_defect(lambda: &Matrix4<f64>) -> f64 {
    let j = symplectic_form();
    (lambda * j * lambda.transpose() - j).norm()
}

/// `sigma(t) = Lambda sigma(0) Lambda^T`, means mapped by `Lambda`.
pub fn propagate_covariance(lambda: &Matrix4<f64>, state: &CovarianceState) -> CovarianceState {
    let cov0 = Matrix4::from_fn(|i, j| state.cov[i][j]);
    let cov = lambda * cov0 * lambda.transpose();
    let means = lambda * nalgebra::Vector4::from_column_slice(&state.means);
    CovarianceState {
        means: [means[0], means[1], means[2], means[3]],
        cov: std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (cov[(i, j)] + cov[(j, i)]))),
    }
}

/// Coefficients of the invariants `A_j = sum_k (lambda_p)_jk p_k + (lambda_r)_jk r_k`;
/// row 0 evolves from `a`, row 1 from `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearInvariants {
    pub t: f64,
    pub lambda_p: Matrix2<C64>,
    pub lambda_r: Matrix2<C64>,
}

impl LinearInvariants {
    /// `hbar |lambda_p lambda_r^T - lambda_r lambda_p^T|` and
    /// `|hbar (lambda_p lambda_r^+ - lambda_r lambda_p^+) - i|`.
    pub fn commutator_defects(&self, hbar: f64) -> (f64, f64) {
        let (p, r) = (self.lambda_p, self.lambda_r);
        let sym = (p * r.transpose() - r * p.transpose()).map(|z| z * hbar);
        let herm = (p * r.adjoint() - r * p.adjoint()).map(|z| z * hbar) - Matrix2::identity() * C64::i();
        (sym.norm(), herm.norm())
    }

    fn pack(p: &Matrix2<C64>, r: &Matrix2<C64>) -> Vec<f64> {
        p.iter().chain(r.iter()).flat_map(|z| [z.re, z.im]).collect()
    }

    fn unpack(y: &[f64]) -> (Matrix2<C64>, Matrix2<C64>) {
        let z = |k: usize| C64::new(y[2 * k], y[2 * k + 1]);
        (Matrix2::from_fn(|i, j| z(i + 2 * j)), Matrix2::from_fn(|i, j| z(4 + i + 2 * j)))
    }
}

fn initial_invariants(config: &PhysicalConfig, gauge: Gauge) -> (Matrix2<C64>, Matrix2<C64>) {
    let (m, w, h) = (config.mass(), config.omega_c(), config.hbar());
    let n = (2.0 * h * m * w).sqrt().recip();
    let i = C64::i();
    let one = C64::new(1.0, 0.0);
    let p = Matrix2::new(one, i, i, one).map(|z| z * n);
    let r = match gauge {
        Gauge::Symmetric => {
            let kb = 0.5 * (m * w / (2.0 * h)).sqrt();
            Matrix2::new(-i * (0.5 * m * w * n), one * (0.5 * m * w * n), one * kb, -i * kb)
        }
        Gauge::Landau => {
            let kb = (m * w / (2.0 * h)).sqrt();
            Matrix2::new(C64::new(0.0, 0.0), one * (m * w * n), one * kb, C64::new(0.0, 0.0))
        }
    };
    (p, r)
}

/// Integrates `lambda_p' = lambda_p b3 - lambda_r b1`, `lambda_r' = lambda_p b4 - lambda_r b2`
/// from the ladder operators at `t = 0`.
pub fn solve_linear_invariants(
    config: &PhysicalConfig,
    profile: &FrequencyProfile,
    gauge: Gauge,
    times: &[f64],
) -> Result<Vec<LinearInvariants>, DynError> {
    check_setup(config, profile)?;
    let (m, hbar) = (config.mass(), config.hbar());
    let (p0, mut r0) = initial_invariants(config, gauge);
    if let Some(g) = profile.kick_strength() {
        r0 += p0 * kick_block(gauge, m, g).map(|v| C64::new(v, 0.0));
    }
    let mut out = Vec::with_capacity(times.len());
    let rhs = |_: f64, w: f64, y: &[f64], d: &mut [f64]| {
        let (p, r) = LinearInvariants::unpack(y);
        let (b2, b4) = blocks(gauge, m, w);
        let b2c = b2.map(|v| C64::new(v, 0.0));
        let b4c = b4.map(|v| C64::new(v, 0.0));
        let dp = p * b2c.transpose() - r / C64::new(m, 0.0);
        let dr = p * b4c - r * b2c;
        d.copy_from_slice(&LinearInvariants::pack(&dp, &dr));
    };
    let record = |t: f64, y: &[f64]| {
        let (lambda_p, lambda_r) = LinearInvariants::unpack(y);
        let inv = LinearInvariants { t, lambda_p, lambda_r };
        let (a, b) = inv.commutator_defects(hbar);
        if a.max(b) > INVARIANT_TOL {
            return Err(DynError::InvariantDrift { drift: a.max(b), t });
        }
        out.push(inv);
        Ok(())
    };
    integrate_profile(profile, LinearInvariants::pack(&p0, &r0), times, rhs, |_, _| Ok(()), record)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdyn::uniform_times;

    fn cfg() -> PhysicalConfig {
        PhysicalConfig::new(1.3, 0.9).unwrap().with_hbar(0.7).unwrap()
    }

    #[test]
    fn geometric_commutators_follow_j() {
        // canonical form: [x, p_x] = [y, p_y] = i hbar
        let omega = Matrix4::new(
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, -1.0, 0.0, 0.0,
        );
        let c = cfg();
        for gauge in [Gauge::Symmetric, Gauge::Landau] {
            let g = geometric_map(&c, gauge);
            let j = g * omega * g.transpose() * (c.mass() * c.omega_c());
            assert!((j - symplectic_form()).norm() < 1e-14, "{gauge}");
        }
    }

    #[test]
    fn constant_field_propagator() {
        let c = cfg();
        let p = FrequencyProfile::constant(c.omega_c()).unwrap();
        for gauge in [Gauge::Symmetric, Gauge::Landau] {
            let times = uniform_times(7.0, 7);
            let lams = propagator_trace(&c, &p, gauge, &times).unwrap();
            assert!((lams[0] - Matrix4::identity()).norm() < 1e-15);
            for (t, l) in times.iter().zip(&lams) {
                let (cs, sn) = ((c.omega_c() * t).cos(), (c.omega_c() * t).sin());
                let want = Matrix4::new(
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, 1.0, 0.0, 0.0, //
                    0.0, 0.0, cs, sn, //
                    0.0, 0.0, -sn, cs,
                );
                assert!((l - want).norm() < 1e-8, "{gauge} t={t}\n{l}");
            }
        }
    }

    #[test]
    fn initial_invariants_are_ladder_operators() {
        let c = cfg();
        for gauge in [Gauge::Symmetric, Gauge::Landau] {
            let (p, r) = initial_invariants(&c, gauge);
            let inv = LinearInvariants { t: 0.0, lambda_p: p, lambda_r: r };
            let (a, b) = inv.commutator_defects(c.hbar());
            assert!(a < 1e-15 && b < 1e-15, "{gauge}: {a} {b}");
        }
    }
}
