use std::f64::consts::PI;

use magcoh::config::PhysicalConfig;
use magcoh::fock::{evolve_constant_field, TruncatedSpace};
use magcoh::minpacket::{
    cartesian_amplitude, evolve_angles, min_packet_field, packet_angular, packet_center, packet_coefficients,
    packet_energy, packet_geometric_covariances, parameter_lattice, polar_amplitude, summarize,
    write_summary_csv, MinPacketParams,
};
use magcoh::wavefields::{
    angular_variance, energy_variance, fidelity, fock_darwin_field, project_to_fock, quadratic_moments,
    reconstruct_field, GridSpec,
};
use proptest::prelude::*;

fn cfg() -> PhysicalConfig {
    PhysicalConfig::new(1.0, 2.0).unwrap()
}

fn params(l_c: f64, l_i: f64, lambda_c: i8, lambda: i8, u: f64, v: f64) -> MinPacketParams {
    MinPacketParams::new(l_c, l_i, lambda_c, lambda, u, v).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn polar_and_cartesian_forms_agree() {
    for p in parameter_lattice(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.5], 0.3, 0.1).unwrap() {
        let k = packet_coefficients(&p);
        let mut worst = 0.0f64;
        for i in 0..41 {
            for j in 0..41 {
                let (x, y) = (-4.0 + 0.2 * i as f64, -4.0 + 0.2 * j as f64);
                let a = cartesian_amplitude(&k, x, y);
                let b = polar_amplitude(&p, x.hypot(y), y.atan2(x));
                worst = worst.max((a - b).norm());
            }
        }
        assert!(worst < 1e-10, "{p:?}: {worst:e}");
    }
}

#[test]
fn vacuum_limit_is_the_ground_gaussian() {
    let c = cfg();
    let f = min_packet_field(&c, GridSpec::default(), &params(0.0, 0.0, 1, 1, 0.0, 0.0)).unwrap();
    let g = fock_darwin_field(&c, GridSpec::default(), 0, 0).unwrap();
    assert!(1.0 - fidelity(&f, &g).unwrap() < 1e-12);
}

#[test]
fn closed_form_prefactor_normalizes() {
    let c = cfg();
    let f = min_packet_field(&c, GridSpec::new(10.0, 256).unwrap(), &params(1.0, 2.0, 1, 1, 0.0, 0.0)).unwrap();
    assert!((f.raw_norm() - 1.0).abs() < 1e-6);
    let m = quadratic_moments(&f).unwrap();
    assert!((m.angular_momentum - c.hbar() * 3.0).abs() < 1e-5);
}

#[test]
fn closed_form_moments_match_quadrature_on_the_lattice() {
    let c = cfg();
    let spec = GridSpec::new(10.0, 256).unwrap();
    let unit_e = c.hbar() * c.scales().larmor;
    for p in parameter_lattice(&[0.0, 0.5, 2.0], &[0.0, 0.5, 2.0], 0.7, 0.3).unwrap() {
        let f = min_packet_field(&c, spec, &p).unwrap();
        let m = quadratic_moments(&f).unwrap();
        let s = summarize(&p, &c).unwrap();
        let checks = [
            ("E", m.energy / unit_e, s.energy.mean / unit_e),
            ("sigma_E", energy_variance(&f) / unit_e.powi(2), s.energy.variance / unit_e.powi(2)),
            ("L", m.angular_momentum / c.hbar(), s.angular.mean),
            ("sigma_L", angular_variance(&f) / c.hbar().powi(2), s.angular.variance),
            ("XX", m.covariance[0][0], s.covariances.xx),
            ("YY", m.covariance[1][1], s.covariances.yy),
            ("xixi", m.covariance[2][2], s.covariances.xixi),
            ("etaeta", m.covariance[3][3], s.covariances.etaeta),
        ];
        for (name, got, want) in checks {
            assert!(rel(got, want) < 1e-4, "{p:?} {name}: {got} vs {want}");
        }
        let (cx, cy) = packet_center(&p, &c);
        assert!((m.means[0] + m.means[2] - cx).hypot(m.means[1] + m.means[3] - cy) < 1e-6);
    }
}

#[test]
fn energy_variance_examples() {
    let c = cfg();
    let unit = (c.hbar() * c.scales().larmor).powi(2);
    // counter-rotating co-rotation, w = 0
    let p = params(1.0, 1.0, -1, -1, 0.0, 0.0);
    let want = 8.0 * (1.0 - 2f64.sqrt()) + 4.0 + 16.0;
    assert!((packet_energy(&p, &c).unwrap().variance / unit - want).abs() < 1e-12);
    let f = min_packet_field(&c, GridSpec::new(10.0, 256).unwrap(), &p).unwrap();
    assert!(rel(energy_variance(&f) / unit, want) < 1e-4);
    for w in [0.0, 0.4, 1.3] {
        let p = params(2.5, 0.7, -1, 1, 0.0, w);
        assert!((packet_energy(&p, &c).unwrap().variance / unit - 10.0).abs() < 1e-12);
    }
}

#[test]
fn angular_variance_branches() {
    for lambda in [1, -1] {
        let a = packet_angular(&params(1.7, 0.0, -lambda, lambda, 0.3, 0.9)).variance;
        let b = packet_angular(&params(1.7, 0.0, lambda, lambda, 0.3, 0.9)).variance;
        assert!((a - 1.7).abs() < 1e-14 && (b - 1.7).abs() < 1e-14);
    }
    let vals: Vec<f64> = (0..8).map(|k| packet_angular(&params(1.2, 0.8, -1, 1, 0.0, k as f64 * 0.4)).variance).collect();
    let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-10);
    let co = params(1.0, 1.0, 1, 1, 0.0, PI / 4.0);
    assert!((packet_angular(&co).variance - 7.0).abs() < 1e-12);
}

#[test]
fn geometric_covariance_asymptotes() {
    let c = cfg();
    let unit = c.coherent_variance();
    let g = packet_geometric_covariances(&params(0.0, 50.0, 1, 1, 0.0, 0.0), &c);
    let small = c.hbar() / (8.0 * c.mass() * c.omega_c() * 50.0);
    let large = 2.0 * c.hbar() * 50.0 / (c.mass() * c.omega_c());
    assert!((g.xx / small - 1.0).abs() < 0.03);
    assert!((g.yy / large - 1.0).abs() < 0.03);
    assert!((g.xx * g.yy / (unit * unit) - 1.0).abs() < 1e-9);
    assert!((g.xixi - unit).abs() < 1e-15 && (g.etaeta - unit).abs() < 1e-15);
}

#[test]
fn angles_rotate_at_larmor_multiples() {
    let c = cfg();
    let wl = c.scales().larmor;
    let p = params(1.0, 0.5, 1, 1, 0.4, 0.2);
    assert_eq!(evolve_angles(&p, 3.7, &c).unwrap(), p);
    let q = params(1.0, 0.5, -1, -1, 0.4, 0.2);
    let e = evolve_angles(&q, 0.5, &c).unwrap();
    assert!((e.u - (0.4 - 4.0 * wl * 0.5)).abs() < 1e-15);
    assert!((e.v - (0.2 - 2.0 * wl * 0.5)).abs() < 1e-15);
    let energies: Vec<f64> = (0..5)
        .map(|k| packet_energy(&evolve_angles(&q, k as f64 * 0.7, &c).unwrap(), &c).unwrap().mean)
        .collect();
    let spread = energies.iter().cloned().fold(f64::MIN, f64::max) - energies.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-12);
}

#[test]
fn angle_evolution_matches_fock_dynamics() {
    let c = cfg();
    let spec = GridSpec::new(8.0, 128).unwrap();
    let space = TruncatedSpace::new(24).unwrap();
    for (lambda_c, lambda) in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
        let p = params(1.0, 0.4, lambda_c, lambda, 0.5, 0.2);
        let f0 = min_packet_field(&c, spec, &p).unwrap();
        let v0 = project_to_fock(&f0, space).unwrap();
        for t in [0.3, 1.1] {
            let evolved = reconstruct_field(&c, spec, &evolve_constant_field(&v0, &c, t));
            let closed = min_packet_field(&c, spec, &evolve_angles(&p, t, &c).unwrap()).unwrap();
            let fid = fidelity(&evolved, &closed).unwrap();
            assert!(fid > 1.0 - 1e-5, "{p:?} t={t}: {fid}");
        }
    }
}

#[test]
fn center_lies_on_the_classical_circle() {
    let c = cfg();
    let mu = c.scales().mu;
    for p in parameter_lattice(&[0.5, 2.0], &[0.0, 1.0, 3.0], 0.9, 0.4).unwrap() {
        let (x, y) = packet_center(&p, &c);
        assert!((x.hypot(y) - (p.l_c / mu).sqrt()).abs() < 1e-12, "{p:?}");
    }
}

#[test]
fn summary_csv_layout() {
    let c = cfg();
    let rows: Vec<_> = parameter_lattice(&[1.0], &[0.5, 1.0], 0.0, 0.0)
        .unwrap()
        .iter()
        .map(|p| summarize(p, &c).unwrap())
        .collect();
    let mut buf = Vec::new();
    write_summary_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 13);
}

proptest! {
    #[test]
    fn covariances_respect_the_uncertainty_floor(
        l_i in 0.0f64..40.0, u in 0.0f64..(2.0 * PI), lambda in prop::sample::select(vec![1i8, -1]),
    ) {
        let c = cfg();
        let g = packet_geometric_covariances(&params(1.0, l_i, 1, lambda, u, 0.0), &c);
        let floor = c.coherent_variance().powi(2);
        prop_assert!(g.xx * g.yy >= floor * (1.0 - 1e-12));
        prop_assert!(g.xixi * g.etaeta >= floor * (1.0 - 1e-12));
        prop_assert!(g.xx > 0.0 && g.yy > 0.0);
    }

    #[test]
    fn coefficients_sum_to_one(
        l_c in 0.0f64..5.0, l_i in 0.0f64..5.0, u in -PI..PI, v in -PI..PI,
        lc in prop::sample::select(vec![1i8, -1]), l in prop::sample::select(vec![1i8, -1]),
    ) {
        let k = packet_coefficients(&params(l_c, l_i, lc, l, u, v));
        prop_assert!(((k.a + k.c).re - 1.0).abs() < 1e-14);
        prop_assert!((k.b - num_complex::Complex64::i() * f64::from(l) * (k.a - k.c)).norm() < 1e-14);
    }
}
