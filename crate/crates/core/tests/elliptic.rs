mod common;

use std::f64::consts::FRAC_PI_2;

use hyperdisk::elliptic::{complete_e, complete_k, incomplete_e, incomplete_f, jacobi};
use proptest::prelude::*;

#[test]
fn jacobi_matches_ode_integration() {
    for &(u, m) in &[(1.0, 0.25), (0.3, 0.9), (2.5, 0.5), (-1.7, 0.75), (4.0, 0.1)] {
        let t = jacobi(u, m).unwrap();
        let [sn, cn, dn] = common::jacobi_by_ode(u, m);
        assert!((t.sn - sn).abs() < 1e-11, "sn({u}|{m})");
        assert!((t.cn - cn).abs() < 1e-11, "cn({u}|{m})");
        assert!((t.dn - dn).abs() < 1e-11, "dn({u}|{m})");
    }
}

#[test]
fn incomplete_integrals_match_simpson() {
    for &m in &[0.0, 0.2, 0.5, 0.81, 0.99] {
        for &phi in &[0.1, 0.7, 1.3, FRAC_PI_2, 2.4, 5.0] {
            let f = incomplete_f(phi, m).unwrap();
            let e = incomplete_e(phi, m).unwrap();
            assert!((f - common::legendre_f(phi, m)).abs() < 1e-11, "F({phi}|{m})");
            assert!((e - common::legendre_e(phi, m)).abs() < 1e-11, "E({phi}|{m})");
        }
        assert!((complete_k(m).unwrap() - common::legendre_f(FRAC_PI_2, m)).abs() < 1e-11);
        assert!((complete_e(m).unwrap() - common::legendre_e(FRAC_PI_2, m)).abs() < 1e-11);
    }
}

#[test]
fn amplitude_inverts_f() {
    for &m in &[0.3, 0.7, 0.95] {
        for &u in &[0.2, 1.0, 3.0, 7.5] {
            let t = jacobi(u, m).unwrap();
            assert!((incomplete_f(t.am, m).unwrap() - u).abs() < 1e-11);
        }
    }
}

#[test]
fn degenerate_parameters() {
    for &u in &[-2.0, 0.0, 0.4, 1.5, 6.0] {
        let t = jacobi(u, 0.0).unwrap();
        assert!((t.sn - u.sin()).abs() < 1e-12 && (t.cn - u.cos()).abs() < 1e-12 && (t.dn - 1.0).abs() < 1e-12);
        let t = jacobi(u, 1.0).unwrap();
        let sech = 1.0 / u.cosh();
        assert!((t.sn - u.tanh()).abs() < 1e-12 && (t.cn - sech).abs() < 1e-12 && (t.dn - sech).abs() < 1e-12);
    }
    assert!((complete_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert!((complete_e(1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!(complete_k(1.0).unwrap().is_infinite());
    assert!(jacobi(1.0, 1.5).is_err() && jacobi(1.0, -0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn pythagorean_identities(u in -20.0f64..20.0, m in 0.0f64..=1.0) {
        let t = jacobi(u, m).unwrap();
        prop_assert!((t.sn * t.sn + t.cn * t.cn - 1.0).abs() <= 1e-12);
        prop_assert!((t.dn * t.dn + m * t.sn * t.sn - 1.0).abs() <= 1e-12);
    }
}
