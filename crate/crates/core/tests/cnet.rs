use hyperdisk::chebyshev::{
    compatibility_gap, integrate_frame, sine_gordon_residual, Anchor, FrameOptions, GeneratingAngleField, Lattice,
};
use hyperdisk::mesh::{grid_index, Vec3};
use hyperdisk::pseudosphere::{cnet_angle, cnet_mesh, cnet_point};
use nalgebra::{Matrix3, Rotation3, Vector3};

fn v(p: Vec3) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

/// RMS distance after the best proper rigid alignment of `a` onto `b` (Kabsch).
fn procrustes_rms(a: &[Vec3], b: &[Vec3]) -> f64 {
    let n = a.len() as f64;
    let ca = a.iter().fold(Vector3::zeros(), |s, p| s + v(*p)) / n;
    let cb = b.iter().fold(Vector3::zeros(), |s, p| s + v(*p)) / n;
    let mut h = Matrix3::zeros();
    for (p, q) in a.iter().zip(b) {
        h += (v(*p) - ca) * (v(*q) - cb).transpose();
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let d = (vt.transpose() * u.transpose()).determinant().signum();
    let r = vt.transpose() * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let sq: f64 = a.iter().zip(b).map(|(p, q)| (r * (v(*p) - ca) - (v(*q) - cb)).norm_squared()).sum();
    (sq / n).sqrt()
}

#[test]
fn pseudosphere_cnet_matches_closed_form_up_to_rigid_motion() {
    let mesh = cnet_mesh(0.5, 1.0, 129).unwrap();
    let exact: Vec<Vec3> = mesh.uv.iter().map(|&[u, w]| cnet_point(u, w).unwrap()).collect();
    let rms = procrustes_rms(&mesh.vertices, &exact);
    assert!(rms <= 1e-3, "rms {rms:e}");
}

#[test]
fn pseudosphere_cnet_has_unit_negative_curvature() {
    let mesh = cnet_mesh(0.5, 1.0, 129).unwrap();
    let worst = mesh.gaussian_curvature().iter().flatten().map(|k| (k + 1.0).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-2, "{worst}");
}

#[test]
fn reconstruction_is_equivariant_under_rigid_motions() {
    let lattice = Lattice::square(0.3, 0.4, 0.8, 17);
    let field = GeneratingAngleField::from_fn(lattice, 1.0, cnet_angle).unwrap();
    let opts = FrameOptions::default();
    let base = integrate_frame(&field, &Anchor::default(), &opts).unwrap();
    let rot = Rotation3::from_euler_angles(0.3, -1.1, 2.0);
    let shift = Vector3::new(1.0, -2.0, 0.5);
    let to = |p: Vector3<f64>| [p.x, p.y, p.z];
    let anchor =
        Anchor { node: (0, 0), position: to(shift), tangent_u: to(rot * Vector3::x()), normal: to(rot * Vector3::z()) };
    let moved = integrate_frame(&field, &anchor, &opts).unwrap();
    for (p, q) in base.vertices.iter().zip(&moved.vertices) {
        assert!((rot * v(*p) + shift - v(*q)).norm() < 1e-12);
    }
    // re-anchoring at an interior node of the first mesh reproduces it
    let (i, j) = (8, 8);
    let k = grid_index(i, j, 17);
    let tangent = {
        let (a, b) = (base.vertices[grid_index(i + 1, j, 17)], base.vertices[grid_index(i - 1, j, 17)]);
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    };
    let anchor = Anchor { node: (i, j), position: base.vertices[k], tangent_u: tangent, normal: base.normals[k] };
    let again = integrate_frame(&field, &anchor, &opts).unwrap();
    // the tangent is a central difference, so agreement is to O(h²)
    let worst = base.vertices.iter().zip(&again.vertices).map(|(p, q)| (v(*p) - v(*q)).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn sine_gordon_residual_converges_at_second_order() {
    let res = |n: usize| {
        let f = GeneratingAngleField::from_fn(Lattice::square(0.2, 0.1, 1.0, n), 1.0, cnet_angle).unwrap();
        sine_gordon_residual(&f)
    };
    let (r1, r2, r3) = (res(17), res(33), res(65));
    let (o1, o2) = ((r1 / r2).log2(), (r2 / r3).log2());
    assert!((o1 - 2.0).abs() < 0.15 && (o2 - 2.0).abs() < 0.15, "orders {o1} {o2}");
}

#[test]
fn compatibility_gap_vanishes_with_refinement() {
    let gap = |n: usize| {
        let f = GeneratingAngleField::from_fn(Lattice::square(0.5, 0.5, 1.0, n), 1.0, cnet_angle).unwrap();
        compatibility_gap(&f, &Anchor::default(), &FrameOptions::default()).unwrap()
    };
    let (g1, g2) = (gap(17), gap(33));
    assert!(g2 < 0.5 * g1 && g2 < 1e-3, "{g1} {g2}");
}

#[test]
fn lattice_spacing_scales_with_lambda() {
    // φ(u, v) solving φ_uv = sin φ gives ψ(s, t) = φ(2s, 2t) solving ψ_st = 4 sin ψ;
    // with physical spacing √λ·h both reconstructions are the same surface
    let f1 = GeneratingAngleField::from_fn(Lattice::square(0.5, 0.5, 1.0, 33), 1.0, cnet_angle).unwrap();
    let f4 =
        GeneratingAngleField::from_fn(Lattice::square(0.25, 0.25, 0.5, 33), 4.0, |s, t| cnet_angle(2.0 * s, 2.0 * t))
            .unwrap();
    let opts = FrameOptions::default();
    let a = integrate_frame(&f1, &Anchor::default(), &opts).unwrap();
    let b = integrate_frame(&f4, &Anchor::default(), &opts).unwrap();
    let worst = a.vertices.iter().zip(&b.vertices).map(|(p, q)| (v(*p) - v(*q)).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
}
