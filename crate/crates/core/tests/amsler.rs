mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use hyperdisk::amsler::{energy_share_of_densest, painleve_solve, AmslerSurface};
use hyperdisk::geodesic::{energy_floor, EnergyOptions, SurfaceChart};
use hyperdisk::mesh::{grid_index, Vec3};
use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector3};

fn surfaces() -> &'static Vec<AmslerSurface> {
    static S: OnceLock<Vec<AmslerSurface>> = OnceLock::new();
    S.get_or_init(|| (2..=5).map(|n| AmslerSurface::new(n).unwrap()).collect())
}

/// Crossing of π by RK4 on φ'' = sin φ − φ'/z from the series start.
fn crossing_by_rk4(n: usize) -> f64 {
    let a = PI / n as f64;
    let (s, c) = a.sin_cos();
    let z0 = 1e-2;
    let mut y = [a + 0.25 * s * z0 * z0 + s * c / 64.0 * z0.powi(4), 0.5 * s * z0 + s * c / 16.0 * z0.powi(3)];
    let h = 1e-4;
    let mut z = z0;
    loop {
        let next = common::rk4(|t, y: &[f64; 2]| [y[1], y[0].sin() - y[1] / t], z, y, z + h, 1);
        if next[0] >= PI {
            // cubic Hermite root of φ − π on [z, z + h]
            let (p0, p1, d0, d1) = (y[0] - PI, next[0] - PI, h * y[1], h * next[1]);
            let hermite = |t: f64| {
                let (t2, t3) = (t * t, t * t * t);
                (2.0 * t3 - 3.0 * t2 + 1.0) * p0
                    + (t3 - 2.0 * t2 + t) * d0
                    + (-2.0 * t3 + 3.0 * t2) * p1
                    + (t3 - t2) * d1
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if hermite(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return z + h * lo;
        }
        y = next;
        z += h;
    }
}

#[test]
fn singular_value_matches_rk4_and_lower_bound() {
    let mut prev = 0.0;
    for s in surfaces() {
        let n = s.n();
        let z_n = s.profile.z_singular;
        assert!((z_n - crossing_by_rk4(n)).abs() < 1e-8, "n={n}");
        assert!(z_n >= (1.0 / (PI / (4.0 * n as f64)).tan()).ln());
        assert!((s.profile.phi(z_n) - PI).abs() < 1e-10);
        assert!(z_n > prev);
        prev = z_n;
    }
    // n = 2: ln cot(π/8) = ln(1 + √2)
    assert!(surfaces()[0].profile.z_singular >= (1.0 + 2f64.sqrt()).ln());
}

#[test]
fn profile_series_coefficient_by_richardson() {
    for n in 2..=5 {
        let p = painleve_solve(n, 0.5).unwrap();
        let r = |h: f64| (p.phi(h) - PI / n as f64) / (h * h);
        let (h1, h2) = (0.02, 0.04);
        let c2 = (4.0 * r(h1) - r(h2)) / 3.0;
        assert!((c2 - (PI / n as f64).sin() / 4.0).abs() < 1e-8, "n={n}: {c2}");
    }
}

#[test]
fn profile_solves_the_painleve_equation() {
    let p = &surfaces()[1].profile;
    let e = 1e-4;
    for k in 1..30 {
        let z = 0.1 * k as f64;
        let (f, d) = p.eval(z);
        let dd = (p.eval(z + e).1 - p.eval(z - e).1) / (2.0 * e);
        assert!((dd + d / z - f.sin()).abs() < 1e-6, "z={z}");
    }
}

#[test]
fn max_radius_is_monotone_and_above_the_right_angle_bound() {
    let mut prev = 0.0;
    for s in surfaces() {
        let r = s.max_radius().unwrap();
        assert!(r.radius > prev);
        prev = r.radius;
        // the diagonal is a geodesic; its length agrees with ∫ cos(φ/2) dz
        let diag = common::simpson(&|z: f64| (0.5 * s.profile.phi(z)).cos(), 0.0, s.profile.z_singular, 1e-12);
        assert!((s.first_hit(FRAC_PI_4).unwrap() - diag).abs() < 1e-6);
        assert!(r.radius <= diag + 1e-9);
        // while φ ≤ π/2 the metric dominates du² + dv², so reaching φ = π/2 costs at least √(uv)
        let (mut lo, mut hi) = (0.0, s.profile.z_singular);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if s.profile.phi(mid) < FRAC_PI_2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(r.radius >= 0.5 * lo);
    }
}

#[test]
fn polar_grid_nodes_lie_on_rk4_geodesics() {
    let s = &surfaces()[1];
    let grid = s.polar_grid(1.5, 8, 6).unwrap();
    let chart = &s.profile;
    for (j, ray) in grid.node_coords.iter().enumerate() {
        let d = hyperdisk::geodesic::unit_direction(chart, [0.0, 0.0], grid.angles[j]);
        for (i, node) in ray.iter().enumerate().skip(1) {
            let rhs = |_t: f64, y: &[f64; 4]| {
                let g = chart.christoffel([y[0], y[1]]);
                let (a, b) = (y[2], y[3]);
                [
                    a,
                    b,
                    -(g[0][0] * a * a + 2.0 * g[0][1] * a * b + g[0][2] * b * b),
                    -(g[1][0] * a * a + 2.0 * g[1][1] * a * b + g[1][2] * b * b),
                ]
            };
            let y = common::rk4(rhs, 0.0, [0.0, 0.0, d[0], d[1]], grid.radii[i], 4000);
            assert!((y[0] - node[0]).abs() < 1e-6 && (y[1] - node[1]).abs() < 1e-6);
        }
    }
}

#[test]
fn sector_mesh_has_straight_edges_and_unit_negative_curvature() {
    for s in surfaces() {
        let r = 0.95 * s.max_radius().unwrap().radius;
        let mesh = s.sector_mesh(r, 1.0 / 128.0).unwrap();
        let side = (mesh.vertices.len() as f64).sqrt().round() as usize;
        for edge in [0usize, 1] {
            let pts: Vec<Vec3> = (0..side)
                .map(|k| mesh.vertices[if edge == 0 { grid_index(k, 0, side) } else { grid_index(0, k, side) }])
                .collect();
            assert!(line_residual(&pts) <= 1e-3, "n={} edge {edge}", s.n());
        }
        let worst = mesh
            .gaussian_curvature()
            .iter()
            .zip(&mesh.phi)
            .filter(|(_, p)| **p < PI - 0.1)
            .filter_map(|(k, _)| k.map(|k| (k + 1.0).abs()))
            .fold(0.0, f64::max);
        assert!(worst <= 1e-2, "n={}: {worst}", s.n());
    }
}

/// Largest distance from the best-fit line (principal axis) through the points.
fn line_residual(pts: &[Vec3]) -> f64 {
    let n = pts.len() as f64;
    let c = pts.iter().fold(Vector3::zeros(), |s, p| s + Vector3::new(p[0], p[1], p[2])) / n;
    let mut cov = Matrix3::zeros();
    for p in pts {
        let d = Vector3::new(p[0], p[1], p[2]) - c;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let k = eig.eigenvalues.imax();
    let dir = eig.eigenvectors.column(k).into_owned();
    pts.iter()
        .map(|p| {
            let d = Vector3::new(p[0], p[1], p[2]) - c;
            (d - dir * d.dot(&dir)).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn periodic_mesh_is_welded() {
    for s in surfaces() {
        let r = 0.9 * s.max_radius().unwrap().radius;
        let step = 1.0 / 32.0;
        let sector = s.sector_mesh(r, step).unwrap();
        let mesh = s.periodic_mesh(r, step).unwrap();
        let side = (sector.vertices.len() as f64).sqrt().round() as usize;
        let copies = 2 * s.n();
        let expect = side * side + (copies - 1) * (side * side - side) - (side - 1);
        assert_eq!(mesh.vertices.len(), expect, "n={}", s.n());
        assert_eq!(mesh.faces.len(), copies * sector.faces.len());
        // seams are interior: only the far sides of the copies are boundary
        let boundary = mesh.boundary_vertices();
        assert!(!boundary[0]);
        assert_eq!(boundary.iter().filter(|b| **b).count(), copies * (2 * side - 2));
        let worst = mesh
            .gaussian_curvature()
            .iter()
            .zip(&mesh.phi)
            .filter(|(_, p)| **p < PI - 0.1)
            .filter_map(|(k, _)| k.map(|k| (k + 1.0).abs()))
            .fold(0.0, f64::max);
        assert!(worst <= 1e-2, "n={}: {worst}", s.n());
    }
}

#[test]
fn two_wave_mesh_is_close_to_the_small_slopes_saddle() {
    let s = &surfaces()[0];
    let mesh = s.periodic_mesh(0.6, 1.0 / 128.0).unwrap();
    // tangent plane at the origin is z = 0; fit z = A x² + B xy + C y² + D x + E y
    let near: Vec<Vec3> = mesh.vertices.iter().copied().filter(|p| p[0].hypot(p[1]) <= 0.3).collect();
    let a = DMatrix::from_fn(near.len(), 5, |i, j| {
        let [x, y, _] = near[i];
        [x * x, x * y, y * y, x, y][j]
    });
    let b = DVector::from_iterator(near.len(), near.iter().map(|p| p[2]));
    let coef = a.svd(true, true).solve(&b, 1e-14).unwrap();
    let hess = Matrix2::new(2.0 * coef[0], coef[1], coef[1], 2.0 * coef[2]);
    let mut ev: Vec<f64> = hess.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] + 1.0).abs() < 0.1 && (ev[1] - 1.0).abs() < 0.1, "{ev:?}");
}

#[test]
fn energy_respects_floor_and_concentrates_towards_the_edge() {
    for s in surfaces() {
        let r_max = s.max_radius().unwrap().radius;
        let opts = EnergyOptions::coarse(32, 32);
        let e = s.disk_energy(0.5 * r_max, &opts).unwrap();
        assert!(e.energy >= energy_floor(0.5 * r_max));
        assert_eq!(s.disk_energy(0.0, &opts).unwrap().energy, 0.0);
        assert_eq!(s.disk_energy(1.01 * r_max, &opts).unwrap_err().kind(), "boundary-exceeded");
        // the densest tenth of the disk carries a growing share as R → R_max
        let share = |f: f64| energy_share_of_densest(&s.polar_grid(f * r_max, 128, 128).unwrap(), 0.1);
        let (a, b, c) = (share(0.9), share(0.99), share(0.999));
        assert!(a < b && b < c, "n={}: {a} {b} {c}", s.n());
        assert!(b > 0.2, "n={}: {b}", s.n());
    }
}

#[test]
fn profile_csv() {
    let p = &surfaces()[0].profile;
    let mut out = Vec::new();
    p.write_csv(&mut out, 100).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,phi"));
    assert_eq!(lines.next(), Some(format!("0,{}", FRAC_PI_2).as_str()));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last, vec![p.z_singular, PI]);
}
