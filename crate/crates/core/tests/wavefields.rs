use std::f64::consts::PI;

use magcoh::config::{landau_level_energy, Gauge, PhysicalConfig};
use magcoh::fock::{coherent_vector, partial_coherent_vector, PartialMode, TruncatedSpace};
use magcoh::wavefields::{
    self, charged_closed_form_raw, charged_coherent_field, fidelity, fock_darwin_field, fock_field,
    gauge_transform_field, husimi_field, inner_product, ladder_residual, malkin_manko_field, max_deviation_up_to_phase,
    null_plane_field, operator_residual, partially_coherent_field, project_to_fock, quadratic_moments,
    reconstruct_field, td_coherent_field, to_landau_gauge, GridOperator, GridSpec, Ladder, WaveError,
};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn cfg() -> PhysicalConfig {
    PhysicalConfig::new(1.0, 2.0).unwrap()
}

fn spec() -> GridSpec {
    GridSpec::default()
}

#[test]
fn fock_darwin_ground_state_and_orthogonality() {
    let cfg = cfg();
    let g = fock_darwin_field(&cfg, spec(), 0, 0).unwrap();
    assert!((g.norm_sqr() - 1.0).abs() < 1e-12);
    let mu = cfg.scales().mu;
    let x = g.grid().coords()[100];
    let y = g.grid().coords()[140];
    let want = (mu / PI).sqrt() * (-mu * (x * x + y * y) / 2.0).exp();
    assert!((g.value_at(100, 140) - c(want, 0.0)).norm() < 1e-14);
    let g1 = fock_darwin_field(&cfg, spec(), 0, 1).unwrap();
    assert!(inner_product(&g, &g1).unwrap().norm() < 1e-8);
    let gm = fock_darwin_field(&cfg, spec(), 0, -1).unwrap();
    assert!(inner_product(&g1, &gm).unwrap().norm() < 1e-8);
}

#[test]
fn fock_darwin_energies_with_confinement() {
    for cfg in [cfg(), cfg().with_omega_0(1.5).unwrap()] {
        for (n_r, l) in [(1u32, 2i64), (2, -1)] {
            let f = fock_darwin_field(&cfg, spec(), n_r, l).unwrap();
            let e = quadratic_moments(&f).unwrap().energy;
            let want = landau_level_energy(&cfg, n_r, l);
            assert!((e - want).abs() < 1e-6 * want.abs(), "{n_r},{l}: {e} vs {want}");
        }
    }
}

#[test]
fn mmcs_vacuum_is_ground_gaussian() {
    let cfg = cfg();
    let a = malkin_manko_field(&cfg, spec(), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    let b = fock_darwin_field(&cfg, spec(), 0, 0).unwrap();
    let d = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(d < 1e-10);
}

#[test]
fn mmcs_matches_number_basis_sum() {
    let cfg = cfg();
    let (al, be) = (c(1.0, 0.0), c(0.0, 1.0));
    let f = malkin_manko_field(&cfg, spec(), al, be).unwrap();
    let v = coherent_vector(TruncatedSpace::new(24).unwrap(), al, be).unwrap();
    let r = reconstruct_field(&cfg, spec(), &v);
    let ov = inner_product(&r, &f).unwrap();
    assert!(ov.norm() >= 1.0 - 1e-8, "{ov}");
    assert!((ov - 1.0).norm() < 1e-8, "phase convention differs: {ov}");
}

#[test]
fn mmcs_mean_angular_momentum_and_energy() {
    let cfg = cfg();
    let (al, be) = (c(1.0, 0.0), c(2.0, 0.0));
    let f = malkin_manko_field(&cfg, spec(), al, be).unwrap();
    let m = quadratic_moments(&f).unwrap();
    assert!((m.angular_momentum - (be.norm_sqr() - al.norm_sqr())).abs() < 1e-6);
    assert!((m.energy - cfg.omega_c() * (al.norm_sqr() + 0.5)).abs() < 1e-6);
    let (x0, y0) = wavefields::malkin_manko_center(&cfg, al, be);
    assert!((m.means[0] + m.means[2] - x0).abs() < 1e-8 && (m.means[1] + m.means[3] - y0).abs() < 1e-8);
}

#[test]
fn mmcs_center_outside_grid_is_rejected() {
    let err = malkin_manko_field(&cfg(), spec(), c(0.0, 0.0), c(6.0, 0.0)).unwrap_err();
    assert!(matches!(err, WaveError::CenterOutsideGrid { .. }));
}

#[test]
fn coarse_grid_is_reported() {
    let err = fock_darwin_field(&cfg(), GridSpec::new(1.5, 16).unwrap(), 0, 0).unwrap_err();
    assert!(matches!(err, WaveError::GridTooCoarse { .. }), "{err:?}");
}

#[test]
fn partial_states_reduce_and_cross_check() {
    let cfg = cfg();
    let beta = c(0.7, -0.4);
    let p0 = partially_coherent_field(&cfg, spec(), PartialMode::FixN(0), beta).unwrap();
    let mm = malkin_manko_field(&cfg, spec(), c(0.0, 0.0), beta).unwrap();
    let d = p0.values().iter().zip(mm.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(d < 1e-12);

    let p1 = partially_coherent_field(&cfg, spec(), PartialMode::FixN(1), c(0.0, 0.0)).unwrap();
    let f10 = fock_field(&cfg, spec(), 1, 0).unwrap();
    assert!(max_deviation_up_to_phase(&f10, &p1).unwrap() < 1e-10);

    let space = TruncatedSpace::new(24).unwrap();
    for (mode, amp) in [(PartialMode::FixN(2), c(0.3, 0.8)), (PartialMode::FixM(3), c(-0.5, 0.6))] {
        let f = partially_coherent_field(&cfg, spec(), mode, amp).unwrap();
        let r = reconstruct_field(&cfg, spec(), &partial_coherent_vector(space, mode, amp).unwrap());
        assert!(fidelity(&f, &r).unwrap() > 1.0 - 1e-8);
        let (which, resid) = match mode {
            PartialMode::FixN(_) => (Ladder::B, ladder_residual(&f, Ladder::B, amp).unwrap()),
            PartialMode::FixM(_) => (Ladder::A, ladder_residual(&f, Ladder::A, amp).unwrap()),
        };
        assert!(resid < 1e-5, "{which:?} residual {resid}");
    }

    let p2 = partially_coherent_field(&cfg, spec(), PartialMode::FixN(2), c(0.9, 0.2)).unwrap();
    let e = quadratic_moments(&p2).unwrap().energy;
    assert!((e - 2.5 * cfg.omega_c()).abs() < 1e-6 * 2.5 * cfg.omega_c());
}

#[test]
fn charged_state_angular_and_pair_eigenrelations() {
    let cfg = cfg();
    let (z, l) = (c(0.5, 0.0), 2);
    let f = charged_coherent_field(&cfg, spec(), z, l).unwrap();
    assert!((f.norm_sqr() - 1.0).abs() < 1e-6);
    assert!(operator_residual(&f, GridOperator::L, c(l as f64, 0.0)) < 1e-5);
    assert!(operator_residual(&f, GridOperator::AB, z) < 1e-5);
}

#[test]
fn charged_state_small_z_tends_to_vacuum() {
    let cfg = cfg();
    let f = charged_coherent_field(&cfg, spec(), c(1e-9, 0.0), 0).unwrap();
    let g = fock_darwin_field(&cfg, spec(), 0, 0).unwrap();
    assert!(fidelity(&f, &g).unwrap() > 1.0 - 1e-12);
    let f0 = charged_coherent_field(&cfg, spec(), c(0.0, 0.0), 0).unwrap();
    assert!(fidelity(&f0, &g).unwrap() > 1.0 - 1e-12);
}

#[test]
fn charged_raw_norm_follows_bessel_scaling() {
    let cfg = cfg();
    for (z, l) in [(c(1.0, 0.0), 1i64), (c(0.5, 0.0), 0), (c(0.8, 0.3), 2)] {
        let raw = charged_closed_form_raw(&cfg, spec(), z, l);
        let want = magcoh::fock::charged_norm_closed(z, l);
        assert!((raw.norm_sqr() / want - 1.0).abs() < 1e-6, "{z},{l}: {} vs {want}", raw.norm_sqr());
    }
}

#[test]
fn charged_state_cross_engine_for_several_orders() {
    let cfg = cfg();
    // odd l with z on either side of the principal-log cut
    for (z, l) in [(c(1.0, 0.0), 1i64), (c(0.3, 0.4), -2), (c(-0.5, 0.2), 0), (c(1.5, -0.5), 3), (c(-1.0, -0.5), 1), (c(-1.0, 0.5), -1)] {
        let f = charged_coherent_field(&cfg, spec(), z, l).unwrap();
        assert!((f.norm_sqr() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn husimi_norm_is_constant_and_peak_sits_at_a() {
    let cfg = cfg();
    for t in [0.0, 0.7, PI] {
        let f = husimi_field(&cfg, spec(), [1.0, -0.5], 0.8, t).unwrap();
        assert!((f.raw_norm() - 1.0).abs() < 1e-6, "t={t}: {}", f.raw_norm());
    }
    let f = husimi_field(&cfg, spec(), [1.0, 0.0], 1.0, 0.0).unwrap();
    let (k, _) = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| (k, v.norm_sqr()))
        .fold((0, 0.0), |acc, kv| if kv.1 > acc.1 { kv } else { acc });
    let p = f.grid().points();
    let sm = cfg.scales().mu.sqrt();
    let (xp, yp) = (f.grid().coords()[k % p] * sm, f.grid().coords()[k / p] * sm);
    assert!((xp - 1.0).abs() <= f.grid().spec().spacing() && yp.abs() <= f.grid().spec().spacing());
    let dens: Vec<f64> = f.values().iter().map(|v| v.norm_sqr()).collect();
    let mean_x: f64 = (0..dens.len())
        .map(|k| dens[k] * f.grid().coords()[k % p] * f.grid().weights()[k % p] * f.grid().weights()[k / p])
        .sum();
    assert!((mean_x * sm - 1.0).abs() < 1e-8);
}

#[test]
fn null_plane_density_rotates_with_s() {
    let cfg = cfg();
    let b = cfg.mass() * cfg.omega_c() / cfg.hbar();
    let v0 = null_plane_field(&cfg, spec(), c(0.0, 0.0), c(0.0, 0.0), 1.0, 0.0).unwrap();
    let x = v0.grid().coords()[90];
    let y = v0.grid().coords()[170];
    let want = (-(b / 4.0) * (x * x + y * y)).exp();
    let got = v0.value_at(90, 170) / v0.value_at(127, 127).norm() * (-(b / 4.0) * 2.0 * v0.grid().coords()[127].powi(2)).exp();
    assert!((got.norm() - want).abs() < 1e-12);

    let s = 0.4;
    let moved = null_plane_field(&cfg, spec(), c(1.0, 0.0), c(0.3, 0.0), 1.0, s).unwrap();
    let rotated = null_plane_field(&cfg, spec(), C64::from_polar(1.0, -b * s), c(0.3, 0.0), 1.0, 0.0).unwrap();
    let d = moved.values().iter().zip(rotated.values()).map(|(a, r)| (a.norm() - r.norm()).abs()).fold(0.0, f64::max);
    assert!(d < 1e-12);

    let f = null_plane_field(&cfg, spec(), c(0.5, 0.0), c(0.5, 0.0), 1.0, 0.0).unwrap();
    assert!(ladder_residual(&f, Ladder::B, c(0.5, 0.0)).unwrap() < 1e-5);
    assert!(null_plane_field(&cfg, spec(), c(0.5, 0.0), c(0.5, 0.0), 0.0, 0.0).is_err());
}

#[test]
fn td_coherent_reduces_to_mmcs_for_constant_field() {
    let cfg = cfg();
    let om = cfg.omega_c() / 2.0;
    let (al, be) = (c(0.4, -0.3), c(-0.6, 0.5));
    let eps = c(om.powf(-0.5), 0.0);
    let eps_dot = c(0.0, om.sqrt());
    let f = td_coherent_field(&cfg, spec(), eps, eps_dot, 0.0, al, be).unwrap();
    let mm = malkin_manko_field(&cfg, spec(), al, be).unwrap();
    let d = f.values().iter().zip(mm.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(d < 1e-8);
    let bad = td_coherent_field(&cfg, spec(), eps, eps_dot * 1.1, 0.0, al, be).unwrap_err();
    assert!(matches!(bad, WaveError::BadWronskian { .. }));
}

#[test]
fn td_coherent_vacuum_width_follows_eps() {
    let cfg = cfg();
    let om = cfg.omega_c() / 2.0;
    // rescaling eps by k and eps_dot by 1/k keeps the Wronskian at 2i
    let k = 1.3;
    let eps = c(k * om.powf(-0.5), 0.0);
    let eps_dot = c(0.0, om.sqrt() / k);
    let f = td_coherent_field(&cfg, spec(), eps, eps_dot, 0.0, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    let p = f.grid().points();
    let dens_r2: f64 = (0..p * p)
        .map(|q| {
            let (x, y) = (f.grid().coords()[q % p], f.grid().coords()[q / p]);
            f.values()[q].norm_sqr() * (x * x + y * y) * f.grid().weights()[q % p] * f.grid().weights()[q / p]
        })
        .sum();
    // |psi|^2 = (M / pi hbar |eps|^2) exp(-M r^2 / hbar |eps|^2)
    let want = cfg.hbar() * eps.norm_sqr() / cfg.mass();
    assert!((dens_r2 - want).abs() < 1e-8 * want);
}

#[test]
fn landau_gauge_moments_agree() {
    let cfg = cfg();
    let f = malkin_manko_field(&cfg, spec(), c(0.8, 0.1), c(-0.4, 0.6)).unwrap();
    let lg = to_landau_gauge(&f).unwrap();
    assert_eq!(lg.gauge(), Gauge::Landau);
    assert!((lg.norm_sqr() - f.norm_sqr()).abs() < 1e-14);
    let ms = quadratic_moments(&f).unwrap();
    let ml = quadratic_moments(&lg).unwrap();
    assert!((ms.energy - ml.energy).abs() < 1e-6);
    for i in 0..4 {
        assert!((ms.means[i] - ml.means[i]).abs() < 1e-6);
        for j in 0..4 {
            assert!((ms.covariance[i][j] - ml.covariance[i][j]).abs() < 1e-6);
        }
    }
    let id = gauge_transform_field(&f, |_, _| 0.0, Gauge::Symmetric);
    assert_eq!(id.values(), f.values());
}

#[test]
fn coherent_overlaps_follow_gaussian_law() {
    let cfg = cfg();
    let pairs = [(c(0.5, 0.2), c(-0.3, 0.1)), (c(-1.0, 0.4), c(0.6, -0.8))];
    let f = malkin_manko_field(&cfg, spec(), pairs[0].0, pairs[0].1).unwrap();
    let g = malkin_manko_field(&cfg, spec(), pairs[1].0, pairs[1].1).unwrap();
    let want = (-((pairs[0].0 - pairs[1].0).norm_sqr() + (pairs[0].1 - pairs[1].1).norm_sqr()) / 2.0).exp();
    assert!((inner_product(&f, &g).unwrap().norm() - want).abs() < 1e-6);
    let a = fock_darwin_field(&cfg, spec(), 0, 1).unwrap();
    let b = fock_field(&cfg, spec(), 1, 0).unwrap();
    assert!(inner_product(&a, &b).unwrap().norm() < 1e-8);
    let other = malkin_manko_field(&cfg, GridSpec::new(8.0, 128).unwrap(), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!(matches!(inner_product(&f, &other), Err(WaveError::GridMismatch)));
}

#[test]
fn wrong_eigenvalue_is_rejected() {
    let cfg = cfg();
    let al = c(0.5, -0.5);
    let f = malkin_manko_field(&cfg, spec(), al, c(1.0, 0.0)).unwrap();
    assert!(ladder_residual(&f, Ladder::A, al).unwrap() < 1e-5);
    assert!(ladder_residual(&f, Ladder::A, al + 1.0).unwrap() >= 0.5);
}

#[test]
fn vacuum_covariances_and_quantized_radii() {
    let cfg = cfg();
    let s0 = cfg.coherent_variance();
    let v = malkin_manko_field(&cfg, spec(), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    let m = quadratic_moments(&v).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { s0 } else { 0.0 };
            assert!((m.covariance[i][j] - want).abs() < 1e-9, "{i}{j}: {}", m.covariance[i][j]);
        }
    }
    let unit = cfg.hbar() / (cfg.mass() * cfg.omega_c());
    for n in 0..=4usize {
        let f = fock_field(&cfg, spec(), n, 0).unwrap();
        let r2 = quadratic_moments(&f).unwrap().relative_radius_sqr();
        let want = unit * (2 * n + 1) as f64;
        assert!((r2 / want - 1.0).abs() < 1e-5, "n={n}: {r2} vs {want}");
        // flux H0 pi <r^2> in units hc/e with e = c = 1 and H0 = M omega_c
        let flux = cfg.mass() * cfg.omega_c() * PI * r2 / (2.0 * PI * cfg.hbar());
        assert!((flux - (n as f64 + 0.5)).abs() < 1e-5);
    }
}

#[test]
fn projection_roundtrip_of_mmcs() {
    let cfg = cfg();
    let (al, be) = (c(0.3, 0.2), c(-0.5, 0.4));
    let f = malkin_manko_field(&cfg, spec(), al, be).unwrap();
    let space = TruncatedSpace::new(16).unwrap();
    let v = project_to_fock(&f, space).unwrap();
    let want = coherent_vector(space, al, be).unwrap();
    let ov = want.inner(&v).unwrap();
    assert!((ov - 1.0).norm() < 1e-8, "{ov}");
}

#[test]
fn raster_and_csv_export() {
    let cfg = cfg();
    let s = GridSpec::new(6.0, 32).unwrap();
    let f = fock_darwin_field(&cfg, s, 0, 1).unwrap();
    let mut buf = Vec::new();
    wavefields::io::write_raster(&f, &mut buf).unwrap();
    assert_eq!(buf.len(), 16 + 32 * 32 * 16);
    let (spec_back, vals) = wavefields::io::read_raster(buf.as_slice()).unwrap();
    assert_eq!(spec_back, s);
    assert_eq!(vals, f.values());
    let mut csv = Vec::new();
    wavefields::io::write_csv(&f, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next(), Some("x,y,re,im"));
    assert_eq!(text.lines().count(), 1 + 32 * 32);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mmcs_ladder_residuals_small(ar in -1.4f64..1.4, ai in -1.4f64..1.4, br in -1.4f64..1.4, bi in -1.4f64..1.4) {
        let cfg = cfg();
        let (al, be) = (c(ar, ai), c(br, bi));
        let f = malkin_manko_field(&cfg, spec(), al, be).unwrap();
        prop_assert!(ladder_residual(&f, Ladder::A, al).unwrap() < 1e-5);
        prop_assert!(ladder_residual(&f, Ladder::B, be).unwrap() < 1e-5);
        let m = quadratic_moments(&f).unwrap();
        let floor = cfg.coherent_variance().powi(2);
        let det = |b: [[f64; 2]; 2]| b[0][0] * b[1][1] - b[0][1] * b[1][0];
        prop_assert!(det(m.x_y_block()) >= floor - 1e-6);
        prop_assert!(det(m.xi_eta_block()) >= floor - 1e-6);
    }

    #[test]
    fn gauge_phase_preserves_density(k1 in -3.0f64..3.0, k2 in -3.0f64..3.0) {
        let cfg = cfg();
        let s = GridSpec::new(8.0, 128).unwrap();
        let f = malkin_manko_field(&cfg, s, c(0.2, 0.1), c(0.0, -0.3)).unwrap();
        let g = gauge_transform_field(&f, |x, y| k1 * x * x + k2 * (x * y).sin(), Gauge::Symmetric);
        prop_assert!((g.norm_sqr() - f.norm_sqr()).abs() < 1e-14);
        for (a, b) in f.values().iter().zip(g.values()) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-15 * (1.0 + a.norm()));
        }
    }
}
