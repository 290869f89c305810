//! The pseudosphere in curvature-line coordinates (η, ξ):
//! y(η, ξ) = (cos ξ / cosh η, sin ξ / cosh η, η − tanh η),
//! metric tanh²η dη² + sech²η dξ², singular rim at η = 0.
//!
//! ξ is not reduced modulo 2π, so geodesics live on the universal cover.

use crate::chebyshev::{integrate_frame, Anchor, FrameOptions, GeneratingAngleField, Lattice};
use crate::error::{Error, Result};
use crate::geodesic::{self, AngularRule, Coords, EnergyEstimate, EnergyOptions, SurfaceChart};
use crate::mesh::{SurfaceMesh, Vec3};

/// Default distance kept from the singular rim.
pub const ETA_MIN: f64 = 1e-8;

pub fn embed(eta: f64, xi: f64) -> Result<Vec3> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta={eta} is on or beyond the singular rim eta=0")));
    }
    let r = 1.0 / eta.cosh();
    Ok([r * xi.cos(), r * xi.sin(), eta - eta.tanh()])
}

/// Generating angle 4·atan(e^{−η}).
pub fn generating_angle(eta: f64) -> f64 {
    4.0 * (-eta).exp().atan()
}

/// Squares of the principal curvatures `(1/sinh²η, sinh²η)`.
pub fn curvature_squares(eta: f64) -> (f64, f64) {
    let s2 = eta.sinh().powi(2);
    (1.0 / s2, s2)
}

/// ln cosh η₀, the radius of the largest geodesic disk centred at η₀.
pub fn max_disk_radius(eta0: f64) -> f64 {
    let a = eta0.abs();
    // ln cosh a = a + ln(1 + e^{−2a}) − ln 2, stable for large a
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Chart of the pseudosphere with a guard band at the rim.
#[derive(Debug, Clone, Copy)]
pub struct PseudosphereChart {
    pub eta_min: f64,
}

impl Default for PseudosphereChart {
    fn default() -> Self {
        Self { eta_min: ETA_MIN }
    }
}

impl SurfaceChart for PseudosphereChart {
    fn metric(&self, x: Coords) -> [f64; 3] {
        let t = x[0].tanh();
        let s = 1.0 / x[0].cosh();
        [t * t, 0.0, s * s]
    }

    fn christoffel(&self, x: Coords) -> [[f64; 3]; 2] {
        let (sh, ch) = (x[0].sinh(), x[0].cosh());
        let a = 1.0 / (sh * ch);
        [[a, 0.0, a], [0.0, -x[0].tanh(), 0.0]]
    }

    fn density(&self, x: Coords) -> f64 {
        let (a, b) = curvature_squares(x[0]);
        a + b
    }

    fn inside(&self, x: Coords) -> bool {
        x[0] > self.eta_min
    }
}

/// Bending energy of the geodesic disk of radius `radius` centred at (η₀, 0).
pub fn disk_energy(eta0: f64, radius: f64, opts: &EnergyOptions) -> Result<EnergyEstimate> {
    if !(eta0 > 0.0) {
        return Err(Error::Domain(format!("eta0={eta0} must be positive")));
    }
    geodesic::disk_energy(&PseudosphereChart::default(), [eta0, 0.0], radius, AngularRule::FullCircle, opts)
}

/// Generating angle in asymptotic coordinates, φ(u, v) = 4·atan(e^{−(u+v)}).
pub fn cnet_angle(u: f64, v: f64) -> f64 {
    generating_angle(u + v)
}

/// Closed-form point at asymptotic coordinates (u, v): η = u + v, ξ = u − v.
pub fn cnet_point(u: f64, v: f64) -> Result<Vec3> {
    embed(u + v, u - v)
}

/// Frame-integrated C-net patch `[u0, u0+len]²` with `n` nodes per side.
/// The patch must stay off the rim (u + v > 0).
pub fn cnet_mesh(u0: f64, len: f64, n: usize) -> Result<SurfaceMesh> {
    let lattice = Lattice::square(u0, u0, len, n);
    let field = GeneratingAngleField::from_fn(lattice, 1.0, cnet_angle)?;
    integrate_frame(&field, &Anchor::default(), &FrameOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn embed_values() {
        let p = embed(1.0, 0.0).unwrap();
        assert!((p[0] - 0.648_054_273_663_885_4).abs() < 1e-15);
        assert!((p[2] - (1.0 - 1f64.tanh())).abs() < 1e-15);
        assert!(embed(0.0, 1.0).is_err());
    }

    #[test]
    fn symmetric_point() {
        let eta = (1.0 + 2f64.sqrt()).ln();
        assert!((generating_angle(eta) - FRAC_PI_2).abs() < 1e-15);
        let (a, b) = curvature_squares(eta);
        assert!((a - 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn max_radius_closed_form() {
        assert!((max_disk_radius(3.0) - 3f64.cosh().ln()).abs() < 1e-15);
        assert!(max_disk_radius(1e-9) < 1e-17);
        assert!((max_disk_radius(40.0) - (40.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }
}
