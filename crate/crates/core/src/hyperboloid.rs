//! Hyperboloids of revolution with K = −1.
//!
//! With modulus k = b² and parameter m = b⁴,
//! y(η, ξ) = (1/k)·(dn η cos kξ, dn η sin kξ, η − E(am η | m)).
//! The metric is m·sn²η dη² + dn²η dξ²; the profile is singular on the
//! parallels sn η = 0, i.e. η = 0 and η = 2K, and the waist sits at η = K.

use std::f64::consts::PI;

use crate::elliptic::{complete_k, incomplete_e, jacobi};
use crate::error::{Error, Result};
use crate::geodesic::{self, AngularRule, Coords, EnergyEstimate, EnergyOptions, SurfaceChart};
use crate::mesh::{grid_faces, SurfaceMesh, Vec3};
use crate::pendulum;

/// Guard on the amplitude: am η must stay in (AM_GUARD, π − AM_GUARD).
pub const AM_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct HyperboloidChart {
    pub b: f64,
    /// Elliptic parameter m = b⁴.
    pub m: f64,
    /// η at the waist, K(m).
    pub eta_center: f64,
}

impl HyperboloidChart {
    pub fn new(b: f64) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Domain(format!("modulus b={b} must lie in (0, 1)")));
        }
        let m = b.powi(4);
        Ok(Self { b, m, eta_center: complete_k(m)? })
    }

    pub fn k(&self) -> f64 {
        self.b * self.b
    }

    pub fn center(&self) -> Coords {
        [self.eta_center, 0.0]
    }

    pub fn embed(&self, eta: f64, xi: f64) -> Result<Vec3> {
        let t = jacobi(eta, self.m)?;
        if !(t.am > 0.0 && t.am < PI) {
            return Err(Error::Domain(format!("eta={eta} is outside the smooth band (0, 2K)")));
        }
        let k = self.k();
        let height = eta - incomplete_e(t.am, self.m)?;
        Ok([t.dn * (k * xi).cos() / k, t.dn * (k * xi).sin() / k, height / k])
    }

    /// cos²(φ/2) = m·sn²η; the generating angle is φ = 2·acos(k·sn η).
    pub fn generating_angle(&self, eta: f64) -> Result<f64> {
        let t = jacobi(eta, self.m)?;
        Ok(2.0 * (self.k() * t.sn).clamp(-1.0, 1.0).acos())
    }

    /// `(tan²(φ/2), cot²(φ/2))` in terms of c² = m·sn²η.
    pub fn curvature_squares(&self, eta: f64) -> Result<(f64, f64)> {
        let t = jacobi(eta, self.m)?;
        let c2 = self.m * t.sn * t.sn;
        Ok(((1.0 - c2) / c2, c2 / (1.0 - c2)))
    }

    /// Radius of the largest geodesic disk around the waist, atanh(k): the
    /// meridian distance from the waist to a singular parallel.
    pub fn max_disk_radius(&self) -> f64 {
        self.k().atanh()
    }

    /// Meridian distance from the waist to the parallel η ∈ (0, 2K), using
    /// ∫ k·sn dη = ln(dn − k·cn).
    pub fn meridian_distance(&self, eta: f64) -> Result<f64> {
        let t = jacobi(eta, self.m)?;
        let k = self.k();
        let kp = (1.0 - self.m).sqrt();
        let d = (t.dn - k * t.cn).ln() - kp.ln();
        Ok(if eta >= self.eta_center { d } else { -d })
    }
}

impl SurfaceChart for HyperboloidChart {
    fn metric(&self, x: Coords) -> [f64; 3] {
        let t = jacobi(x[0], self.m).expect("parameter checked at construction");
        [self.m * t.sn * t.sn, 0.0, t.dn * t.dn]
    }

    fn christoffel(&self, x: Coords) -> [[f64; 3]; 2] {
        let t = jacobi(x[0], self.m).expect("parameter checked at construction");
        let a = t.cn * t.dn / t.sn;
        [[a, 0.0, a], [0.0, -self.m * t.sn * t.cn / t.dn, 0.0]]
    }

    fn density(&self, x: Coords) -> f64 {
        let (a, b) = self.curvature_squares(x[0]).expect("parameter checked at construction");
        a + b
    }

    fn inside(&self, x: Coords) -> bool {
        match jacobi(x[0], self.m) {
            Ok(t) => t.am > AM_GUARD && t.am < PI - AM_GUARD,
            Err(_) => false,
        }
    }
}

/// Time-of-flight calibration with λ = R²: returns `(ε, b)` with b = √cos(ε/2).
pub fn modulus_from_radius(radius: f64) -> Result<(f64, f64)> {
    let eps = pendulum::epsilon_from_time_of_flight(radius * radius)?;
    Ok((eps, (0.5 * eps).cos().sqrt()))
}

/// Modulus whose largest disk around the waist has radius `radius`:
/// atanh(b²) = R, so b = √tanh R.
pub fn modulus_for_max_radius(radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("radius={radius} must be positive and finite")));
    }
    let b = radius.tanh().sqrt();
    if b >= 1.0 {
        return Err(Error::Domain(format!("radius={radius} is too large for a modulus below 1")));
    }
    Ok(b)
}

/// Bending energy of the geodesic disk of radius `radius` centred on the waist.
pub fn disk_energy(b: f64, radius: f64, opts: &EnergyOptions) -> Result<EnergyEstimate> {
    let chart = HyperboloidChart::new(b)?;
    geodesic::disk_energy(&chart, chart.center(), radius, AngularRule::FullCircle, opts)
}

/// Band of the hyperboloid within meridian distance `radius` of the waist,
/// sampled on an (η, ξ) lattice over one full turn. `n_eta` and `n_xi` are
/// node counts.
pub fn band_mesh(b: f64, radius: f64, n_eta: usize, n_xi: usize) -> Result<SurfaceMesh> {
    let chart = HyperboloidChart::new(b)?;
    if !(radius > 0.0 && radius < chart.max_disk_radius()) {
        return Err(Error::BoundaryExceeded { direction: 0.0, max_radius: chart.max_disk_radius() });
    }
    // invert the meridian distance on [K, 2K] by bisection
    let kk = chart.eta_center;
    let (mut lo, mut hi) = (kk, 2.0 * kk);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chart.meridian_distance(mid)? < radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let half = lo - kk;
    let n_eta = n_eta.max(2);
    let n_xi = n_xi.max(3);
    let xi_period = 2.0 * PI / chart.k();
    let mut mesh = SurfaceMesh::default();
    for i in 0..n_eta {
        let eta = kk - half + 2.0 * half * i as f64 / (n_eta - 1) as f64;
        let (a, c) = chart.curvature_squares(eta)?;
        let phi = chart.generating_angle(eta)?;
        for j in 0..n_xi {
            let xi = xi_period * j as f64 / (n_xi - 1) as f64;
            mesh.vertices.push(chart.embed(eta, xi)?);
            mesh.uv.push([eta, xi]);
            mesh.phi.push(phi);
            mesh.density.push(a + c);
        }
    }
    mesh.faces = grid_faces(n_eta, n_xi);
    mesh.compute_normals();
    Ok(mesh)
}
