use std::f64::consts::PI;

use hyperdisk::small_slopes::{
    amplitude, monge_ampere_residual, omega_a, periodic_energy, periodic_energy_quadrature, HeightField, PeriodicSaddle,
};

#[test]
fn quadratic_saddles_solve_monge_ampere() {
    for n in 2..=6 {
        let a = (PI / (2.0 * n as f64)).tan();
        let f = HeightField::from_fn(-1.0, -1.0, 1.0 / 64.0, 129, 129, |u, v| omega_a(a, u, v));
        assert!(monge_ampere_residual(&f, |_, _| false) <= 1e-10);
    }
}

#[test]
fn periodic_extension_solves_monge_ampere_off_the_seams() {
    for n in 2..=5 {
        let s = PeriodicSaddle::new(n).unwrap();
        let field = s.sample(1.0, 161);
        let h = field.h;
        let res = monge_ampere_residual(&field, |x, y| s.seam_gap(x, y) < 2.0 * h);
        assert!(res < 1e-9, "n={n}: {res}");
    }
}

#[test]
fn extension_is_c1_across_the_seams() {
    for n in 2..=5 {
        let s = PeriodicSaddle::new(n).unwrap();
        let grad = |x: f64, y: f64, e: f64| {
            [
                (s.height(x + e, y) - s.height(x - e, y)) / (2.0 * e),
                (s.height(x, y + e) - s.height(x, y - e)) / (2.0 * e),
            ]
        };
        for k in 0..2 * n {
            let t = k as f64 * s.sector_width();
            let (c, sn) = (t.cos(), t.sin());
            let normal = [-sn, c];
            for &r in &[0.3, 0.7, 1.0] {
                let (x, y) = (r * c, r * sn);
                assert!(s.height(x, y).abs() < 1e-14);
                // one-sided gradients taken a distance δ either side of the seam
                let mut jumps = Vec::new();
                for &d in &[1e-3, 5e-4] {
                    let e = 0.1 * d;
                    let p = grad(x + d * normal[0], y + d * normal[1], e);
                    let m = grad(x - d * normal[0], y - d * normal[1], e);
                    jumps.push(((p[0] - m[0]).powi(2) + (p[1] - m[1]).powi(2)).sqrt());
                }
                // the gap closes linearly in δ: the Hessian jumps, the gradient does not
                assert!(jumps[0] < 1e-2 && (jumps[0] / jumps[1] - 2.0).abs() < 0.05, "n={n} {jumps:?}");
            }
        }
    }
}

#[test]
fn energies_match_closed_form() {
    for n in 2..=6 {
        for &r in &[0.5, 1.0, 2.0] {
            let e = periodic_energy(n, r).unwrap();
            assert!(((e.quadrature - e.closed_form) / e.closed_form).abs() <= 1e-6);
        }
    }
    let e = periodic_energy(2, 1.0).unwrap();
    assert!((e.quadrature - 2.0 * PI).abs() < 1e-9);
    // the quadrature does not depend on the angular resolution within a sector
    let q1 = periodic_energy_quadrature(4, 1.0, 16, 3).unwrap();
    let q2 = periodic_energy_quadrature(4, 1.0, 32, 11).unwrap();
    assert!(((q1 - q2) / q1).abs() < 1e-9);
}

#[test]
fn amplitude_and_csv() {
    assert!((amplitude(3, 2.0).unwrap() - 2.0 * (PI / 6.0).tan()).abs() < 1e-15);
    let field = PeriodicSaddle::new(2).unwrap().sample(1.0, 5);
    let mut out = Vec::new();
    field.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("x,y,omega\n"));
    assert_eq!(text.lines().count(), 26);
    assert!(PeriodicSaddle::new(1).is_err());
}
