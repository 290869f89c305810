use std::f64::consts::FRAC_PI_2;

use hyperdisk::minimax::{
    ansatz_data, argmax_equivalent, collapse_spread, grid_minimize, march, objective, MinimaxOptions, MinimaxRow,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn right_angle_is_optimal_without_curvature() {
    let sol = grid_minimize(0.0, 4.0, 16, &MinimaxOptions::default()).unwrap();
    assert!(sol.objective < 1e-10 && sol.sup_cot2 < 1e-10);
    assert!(sol.sg_residual < 1e-12);
}

#[test]
fn power_means_increase_with_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let phi: Vec<f64> = (0..64).map(|_| rng.gen_range(0.3..2.8)).collect();
        let sup = phi.iter().map(|f: &f64| (f.cos() / f.sin()).powi(2)).fold(0.0, f64::max);
        let mut prev = 0.0;
        for p in [1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
            let v = objective(&phi, p);
            assert!(v >= prev - 1e-12 && v <= sup + 1e-12);
            prev = v;
        }
    }
}

#[test]
fn curvature_proxies_share_their_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let phi: Vec<f64> = (0..50).map(|_| rng.gen_range(0.05..3.09)).collect();
        let [a, b, c] = argmax_equivalent(&phi);
        assert!(a == b && b == c);
    }
}

#[test]
fn ansatz_is_a_traveling_wave() {
    let eps = hyperdisk::pendulum::epsilon_from_time_of_flight(4.0).unwrap();
    let target = (eps.cos() / eps.sin()).powi(2);
    let err = |n: usize| {
        let phi = march(&ansatz_data(4.0, n).unwrap(), 4.0);
        // marching ψ(u) + ψ(v) data reproduces ψ(u + v) up to the scheme's O(h²) error
        assert!(collapse_spread(&phi, n) < 1e-3);
        let sup = phi.iter().map(|f| (f.cos() / f.sin()).powi(2)).fold(0.0, f64::max);
        (sup - target).abs()
    };
    let (e1, e2) = (err(17), err(33));
    assert!(e2 < 5e-3 && (e1 / e2).log2() > 1.7, "{e1} {e2}");
}

#[test]
fn minimizer_beats_the_ansatz_and_is_reproducible() {
    let opts = MinimaxOptions { seed: 3, ..Default::default() };
    let a = grid_minimize(4.0, 4.0, 16, &opts).unwrap();
    let b = grid_minimize(4.0, 4.0, 16, &opts).unwrap();
    assert_eq!(a.objective, b.objective);
    let ansatz = objective(&march(&ansatz_data(4.0, 16).unwrap(), 4.0), 4.0);
    assert!(a.objective <= ansatz + 1e-9);
    assert!(a.sg_residual < 1e-10);
    let row = MinimaxRow::new(&a).unwrap();
    let mut out = Vec::new();
    row.write_csv(&mut out, true).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(MinimaxRow::CSV_HEADER));
    assert_eq!(lines.next().unwrap().split(',').count(), 9);
}

#[test]
fn invalid_inputs_are_rejected() {
    let o = MinimaxOptions::default();
    assert!(grid_minimize(-1.0, 2.0, 16, &o).is_err());
    assert!(grid_minimize(1.0, 0.5, 16, &o).is_err());
    assert!(grid_minimize(1.0, 2.0, 4, &o).is_err());
    assert!(objective(&[FRAC_PI_2; 4], 2.0) < 1e-30);
}
