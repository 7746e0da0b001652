use magcoh::config::PhysicalConfig;
use magcoh::fock::{
    charged_coherent_vector, charged_fock_norm, coherent_vector, eigen_residual, ladder_matrices, photon_added_fock_norm,
    semi_coherent_vector, FockEnsemble, TruncatedSpace,
};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn space() -> TruncatedSpace {
    TruncatedSpace::new(40).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `I_nu(x)` from its ascending series.
fn bessel_i_series(nu: u32, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(nu as i32) / (1..=nu).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= (x / 2.0).powi(2) / (k as f64 * (k + nu) as f64);
        sum += term;
    }
    sum
}

#[test]
fn charged_norm_matches_bessel_series() {
    let sp = space();
    for (r, l) in [(0.3, 0i64), (0.8, 2), (1.7, -1), (2.5, 3), (1.2, -4)] {
        let z = C64::from_polar(r, 0.7);
        let got = charged_fock_norm(sp, z, l).unwrap();
        let nu = l.unsigned_abs() as u32;
        let want = r.powi(l as i32) * bessel_i_series(nu, 2.0 * r);
        assert!((got / want - 1.0).abs() < 1e-12, "(r={r}, l={l}): {got} vs {want}");
    }
}

#[test]
fn charged_states_are_joint_eigenstates() {
    let sp = space();
    let lad = ladder_matrices(sp, &PhysicalConfig::default());
    let ab = lad.a.then(&lad.b);
    for (z, l) in [(c(0.6, -0.2), 0), (c(-1.0, 0.9), 2), (c(0.4, 1.1), -3)] {
        let v = charged_coherent_vector(sp, z, l).unwrap();
        assert!(eigen_residual(&ab, &v, z) < 1e-10);
        assert!(eigen_residual(&lad.l, &v, c(l as f64, 0.0)) < 1e-10);
    }
}

#[test]
fn photon_added_norm_is_a_laguerre_sum() {
    let sp = space();
    for (alpha, q) in [(c(0.5, 0.1), 1usize), (c(-0.9, 0.7), 3), (c(1.3, 0.0), 5)] {
        let x = alpha.norm_sqr();
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        let want: f64 = (0..=q).map(|k| fact(q).powi(2) / (fact(k).powi(2) * fact(q - k)) * x.powi(k as i32)).sum();
        let got = photon_added_fock_norm(sp, alpha, c(0.2, -0.1), q);
        assert!((got / want - 1.0).abs() < 1e-12, "q={q}: {got} vs {want}");
    }
}

#[test]
fn thermal_purity_is_inverse_occupation() {
    for nbar in [0.0, 0.3, 1.0, 1.8] {
        let ens = FockEnsemble::thermal_a_mode(TruncatedSpace::new(64).unwrap(), nbar, 2).unwrap();
        assert!((ens.purity() - 1.0 / (2.0 * nbar + 1.0)).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn coherent_overlap_is_gaussian(
        ar in -1.5f64..1.5, ai in -1.5f64..1.5, br in -1.5f64..1.5, bi in -1.5f64..1.5,
        dr in -1.0f64..1.0, di in -1.0f64..1.0,
    ) {
        let sp = space();
        let (a, b) = (c(ar, ai), c(br, bi));
        let u = coherent_vector(sp, a, b).unwrap();
        let v = coherent_vector(sp, a + c(dr, di), b - c(di, dr)).unwrap();
        let want = (-(dr * dr + di * di) * 2.0).exp();
        prop_assert!((u.inner(&v).unwrap().norm_sqr() - want).abs() < 1e-10);
    }

    #[test]
    fn coherent_states_are_ladder_eigenstates(
        ar in -2.0f64..2.0, ai in -2.0f64..2.0, br in -2.0f64..2.0, bi in -2.0f64..2.0,
    ) {
        let sp = space();
        let lad = ladder_matrices(sp, &PhysicalConfig::default());
        let (a, b) = (c(ar, ai), c(br, bi));
        let v = coherent_vector(sp, a, b).unwrap();
        prop_assert!(eigen_residual(&lad.a, &v, a) < 1e-8);
        prop_assert!(eigen_residual(&lad.b, &v, b) < 1e-8);
    }

    #[test]
    fn semi_coherent_states_are_orthogonal_to_the_reference(
        ar in -1.5f64..1.5, ai in -1.5f64..1.5, br in -1.5f64..1.5, bi in -1.5f64..1.5,
        cr in -1.5f64..1.5, ci in -1.5f64..1.5,
    ) {
        let sp = space();
        let a = (c(ar, ai), c(br, bi));
        let b = (c(cr, ci), c(0.1, 0.05));
        prop_assume!((a.0 - b.0).norm_sqr() + (a.1 - b.1).norm_sqr() > 1e-3);
        let v = semi_coherent_vector(sp, a, b).unwrap();
        let reference = coherent_vector(sp, b.0, b.1).unwrap();
        prop_assert!(reference.inner(&v).unwrap().norm() < 1e-10);
        prop_assert!((v.norm() - 1.0).abs() < 1e-10);
    }
}
