//! Periodic Amsler surfaces.
//!
//! The Amsler surface contains two straight asymptotic lines meeting at
//! angle π/n. In asymptotic coordinates its generating angle depends only on
//! z = 2√(uv) and solves the Painlevé III equation φ'' + φ'/z = sin φ with
//! φ(0) = π/n, φ'(0) = 0. The fundamental sector u, v ≥ 0 ends at the
//! singular curve z = z_n where φ reaches π; rotating it by π about its
//! straight edges 2n − 1 times closes up into an n-wave surface.

use std::f64::consts::{FRAC_PI_4, PI};
use std::io::{self, Write};

use rayon::prelude::*;

use crate::chebyshev::{
    bending_density, integrate_frame, Anchor, FrameOptions, GeneratingAngleField, Lattice, ANGLE_GUARD,
};
use crate::error::{Error, Result};
use crate::geodesic::{
    self, build_polar_grid_with, shoot_geodesic, AngularRule, Coords, EnergyEstimate, EnergyOptions, GeodesicOptions,
    GeodesicPolarGrid, SurfaceChart,
};
use crate::mesh::{dot, norm, scale, sub, SurfaceMesh, Vec3};
use crate::ode::{Dopri5, OdeOptions};
use crate::quadrature;

/// Where the series launch hands over to the integrator.
pub const SERIES_SWITCH: f64 = 1e-3;
/// Spacing of the dense profile table.
pub const TABLE_STEP: f64 = 1e-3;

/// Solution φ_n(z) of the Painlevé III equation on [0, z_n], tabulated for
/// quintic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct AmslerProfile {
    pub n: usize,
    /// Initial angle π/n.
    pub a: f64,
    /// First z with φ(z) = π, or the end of the integration range if
    /// `found` is false.
    pub z_singular: f64,
    pub found: bool,
    /// (φ, φ', φ'') at z = SERIES_SWITCH + k·TABLE_STEP.
    table: Vec<[f64; 3]>,
}

fn series(a: f64, z: f64) -> [f64; 3] {
    let (s, c) = a.sin_cos();
    let z2 = z * z;
    [a + 0.25 * s * z2 + s * c / 64.0 * z2 * z2, 0.5 * s * z + s * c / 16.0 * z2 * z, 0.5 * s + 3.0 * s * c / 16.0 * z2]
}

fn painleve_rhs(z: f64, y: &[f64; 2]) -> [f64; 2] {
    [y[1], y[0].sin() - y[1] / z]
}

/// Solve the Painlevé III problem for the n-wave surface out to `z_max` and
/// locate the first crossing of π.
pub fn painleve_solve(n: usize, z_max: f64) -> Result<AmslerProfile> {
    if n < 2 {
        return Err(Error::Domain(format!("wave count n={n} must be at least 2")));
    }
    if !(z_max > SERIES_SWITCH) {
        return Err(Error::Domain(format!("z_max={z_max} must exceed {SERIES_SWITCH}")));
    }
    let a = PI / n as f64;
    let s0 = series(a, SERIES_SWITCH);
    let opts = OdeOptions::tolerances(1e-13, 1e-14).with_h_init(1e-4).with_h_max(TABLE_STEP);
    let mut ode = Dopri5::new(painleve_rhs, SERIES_SWITCH, [s0[0], s0[1]], opts);
    let mut table = vec![s0];
    let mut crossing: Option<f64> = None;
    // keep a few nodes past the crossing so interpolation near z_n is centred
    let mut extra = 0;
    let mut k = 1;
    loop {
        let z = SERIES_SWITCH + k as f64 * TABLE_STEP;
        if z > z_max || extra >= 8 {
            break;
        }
        while ode.t() < z {
            let step = ode.advance(z)?;
            if crossing.is_none() && step.y1[0] >= PI {
                let (t, _) = ode.locate_root(&step, |_t, y| y[0] - PI, 1e-13);
                crossing = Some(t);
            }
        }
        let y = *ode.y();
        table.push([y[0], y[1], painleve_rhs(z, &y)[1]]);
        if crossing.is_some() {
            extra += 1;
        }
        k += 1;
    }
    let z_end = SERIES_SWITCH + (table.len() - 1) as f64 * TABLE_STEP;
    Ok(AmslerProfile { n, a, z_singular: crossing.unwrap_or(z_end), found: crossing.is_some(), table })
}

impl AmslerProfile {
    /// Largest z covered by the table.
    pub fn z_end(&self) -> f64 {
        SERIES_SWITCH + (self.table.len() - 1) as f64 * TABLE_STEP
    }

    /// (φ, φ') at z ≥ 0.
    pub fn eval(&self, z: f64) -> (f64, f64) {
        if z < SERIES_SWITCH {
            let s = series(self.a, z.max(0.0));
            return (s[0], s[1]);
        }
        let x = (z - SERIES_SWITCH) / TABLE_STEP;
        let k = (x.floor() as usize).min(self.table.len() - 2);
        let t = x - k as f64;
        let h = TABLE_STEP;
        let [p0, d0, s0] = self.table[k];
        let [p1, d1, s1] = self.table[k + 1];
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let phi = p0 * (1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5)
            + h * d0 * (t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5)
            + h * h * s0 * (0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5)
            + p1 * (10.0 * t3 - 15.0 * t4 + 6.0 * t5)
            + h * d1 * (-4.0 * t3 + 7.0 * t4 - 3.0 * t5)
            + h * h * s1 * (0.5 * t3 - t4 + 0.5 * t5);
        let dphi = (p0 * (-30.0 * t2 + 60.0 * t3 - 30.0 * t4) + p1 * (30.0 * t2 - 60.0 * t3 + 30.0 * t4)) / h
            + d0 * (1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4)
            + d1 * (-12.0 * t2 + 28.0 * t3 - 15.0 * t4)
            + h * s0 * (t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4)
            + h * s1 * (1.5 * t2 - 4.0 * t3 + 2.5 * t4);
        (phi, dphi)
    }

    pub fn phi(&self, z: f64) -> f64 {
        self.eval(z).0
    }

    /// q(z) = 2φ'(z)/z, smooth at z = 0 with q(0) = sin(π/n).
    pub fn q(&self, z: f64) -> f64 {
        if z < SERIES_SWITCH {
            let (s, c) = self.a.sin_cos();
            s + s * c / 8.0 * z * z
        } else {
            2.0 * self.eval(z).1 / z
        }
    }

    /// Generating angle at asymptotic coordinates (u, v), u, v ≥ 0.
    pub fn angle(&self, u: f64, v: f64) -> f64 {
        self.phi(similarity(u, v))
    }

    /// Arclength of the diagonal u = v from the origin to the singular
    /// curve, ∫₀^{z_n} cos(φ/2) dz.
    pub fn diagonal_distance(&self) -> f64 {
        quadrature::integrate(|z| (0.5 * self.phi(z)).cos(), 0.0, self.z_singular, 1e-12, 1e-12).0
    }

    pub const CSV_HEADER: &'static str = "z,phi";

    /// Profile samples every `stride` table nodes, up to z_n.
    pub fn write_csv<W: Write>(&self, mut w: W, stride: usize) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        writeln!(w, "0,{}", self.a)?;
        for (k, row) in self.table.iter().enumerate().step_by(stride.max(1)) {
            let z = SERIES_SWITCH + k as f64 * TABLE_STEP;
            if z > self.z_singular {
                break;
            }
            writeln!(w, "{},{}", z, row[0])?;
        }
        if self.found {
            writeln!(w, "{},{}", self.z_singular, PI)?;
        }
        Ok(())
    }
}

/// z = 2√(uv), with small negative round-off clamped.
#[inline]
pub fn similarity(u: f64, v: f64) -> f64 {
    2.0 * (u.max(0.0) * v.max(0.0)).sqrt()
}

/// The fundamental sector as a chart: metric du² + 2cos φ du dv + dv².
impl SurfaceChart for AmslerProfile {
    fn metric(&self, x: Coords) -> [f64; 3] {
        [1.0, self.angle(x[0], x[1]).cos(), 1.0]
    }

    fn christoffel(&self, x: Coords) -> [[f64; 3]; 2] {
        let z = similarity(x[0], x[1]);
        let (phi, _) = self.eval(z);
        let q = self.q(z);
        let (pu, pv) = (x[1].max(0.0) * q, x[0].max(0.0) * q);
        let (s, c) = phi.sin_cos();
        [[c / s * pu, 0.0, -pv / s], [-pu / s, 0.0, c / s * pv]]
    }

    fn density(&self, x: Coords) -> f64 {
        bending_density(self.angle(x[0], x[1])).unwrap_or(f64::INFINITY)
    }

    fn inside(&self, x: Coords) -> bool {
        const EDGE: f64 = -1e-12;
        x[0] >= EDGE
            && x[1] >= EDGE
            && similarity(x[0], x[1]) < self.z_end()
            && self.angle(x[0], x[1]) < PI - ANGLE_GUARD
    }
}

/// Geodesic polar angle Ψ of the launch direction cos ψ ∂_u + sin ψ ∂_v at
/// the origin, where ∂_u and ∂_v are unit vectors at angle π/n.
pub fn polar_angle(psi: f64, n: usize) -> f64 {
    let (s, c) = (PI / n as f64).sin_cos();
    (psi.sin() * s).atan2(psi.cos() + psi.sin() * c)
}

/// Inverse of [`polar_angle`] on the sector, by bisection.
pub fn launch_angle(polar: f64, n: usize) -> f64 {
    let (mut lo, mut hi) = (0.0, 0.5 * PI);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if polar_angle(mid, n) < polar {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Result of the maximal-radius search.
#[derive(Debug, Clone, Copy)]
pub struct RadiusSearch {
    pub radius: f64,
    /// Minimizing launch angle ψ ∈ (0, π/4].
    pub psi: f64,
}

/// An n-wave Amsler surface.
#[derive(Debug, Clone)]
pub struct AmslerSurface {
    pub profile: AmslerProfile,
    pub geodesic: GeodesicOptions,
}

impl AmslerSurface {
    pub fn new(n: usize) -> Result<Self> {
        let profile = painleve_solve(n, 12.0)?;
        if !profile.found {
            return Err(Error::NoRoot(format!("generating angle of the {n}-wave surface never reaches pi")));
        }
        Ok(Self { profile, geodesic: GeodesicOptions::default() })
    }

    pub fn n(&self) -> usize {
        self.profile.n
    }

    /// Arclength at which the geodesic from the origin with launch angle ψ
    /// meets the singular curve.
    pub fn first_hit(&self, psi: f64) -> Result<f64> {
        let dir = [psi.cos(), psi.sin()];
        let cap = 2.0 * self.profile.z_singular + 1.0;
        let path = shoot_geodesic(&self.profile, [0.0, 0.0], dir, cap, &self.geodesic)?;
        if !path.hit_boundary {
            return Err(Error::NoRoot(format!("geodesic at psi={psi} does not reach the singular curve")));
        }
        Ok(path.reached)
    }

    /// Shortest distance from the origin to the singular curve: a scan over
    /// ψ ∈ (0, π/4] (the sector is symmetric under u ↔ v) refined by
    /// golden-section search.
    pub fn max_radius(&self) -> Result<RadiusSearch> {
        const SCAN: usize = 16;
        let psis: Vec<f64> = (1..=SCAN).map(|k| FRAC_PI_4 * k as f64 / SCAN as f64).collect();
        let hits: Vec<Result<f64>> = psis.par_iter().map(|&p| self.first_hit(p)).collect();
        let hits: Vec<f64> = hits.into_iter().collect::<Result<_>>()?;
        let best = (0..SCAN).min_by(|&i, &j| hits[i].total_cmp(&hits[j])).unwrap();
        let lo = if best == 0 { 0.5 * psis[0] } else { psis[best - 1] };
        let hi = if best + 1 == SCAN { FRAC_PI_4 } else { psis[best + 1] };
        if best + 1 == SCAN && hits[best] <= hits[best - 1] {
            // the scan ends at the symmetry line; check the interior side
            let (psi, radius) = golden(|p| self.first_hit(p), lo, hi, 1e-7)?;
            return Ok(if hits[best] <= radius {
                RadiusSearch { radius: hits[best], psi: FRAC_PI_4 }
            } else {
                RadiusSearch { radius, psi }
            });
        }
        let (psi, radius) = golden(|p| self.first_hit(p), lo, hi, 1e-7)?;
        Ok(RadiusSearch { radius, psi })
    }

    /// Geodesic polar grid over the fundamental sector Ψ ∈ [0, π/n].
    pub fn polar_grid(&self, radius: f64, n_r: usize, n_psi: usize) -> Result<GeodesicPolarGrid> {
        build_polar_grid_with(&self.profile, [0.0, 0.0], radius, n_r, n_psi, self.sector_rule(), &self.geodesic)
    }

    fn sector_rule(&self) -> AngularRule {
        let n = self.n() as f64;
        AngularRule::Sector { start: 0.0, end: PI / n, copies: 2.0 * n }
    }

    /// Bending energy of the geodesic disk of radius `radius` on the n-wave
    /// surface, 2n times the sector integral.
    pub fn disk_energy(&self, radius: f64, opts: &EnergyOptions) -> Result<EnergyEstimate> {
        geodesic::disk_energy(&self.profile, [0.0, 0.0], radius, self.sector_rule(), opts)
    }

    /// Frame-integrated fundamental sector on the square [0, R/2]², the
    /// largest asymptotic square the triangle inequality keeps inside the
    /// geodesic disk of radius R. `step` is the target lattice spacing.
    pub fn sector_mesh(&self, radius: f64, step: f64) -> Result<SurfaceMesh> {
        if !(radius > 0.0 && step > 0.0) {
            return Err(Error::Domain(format!("radius={radius} and step={step} must be positive")));
        }
        if radius >= self.profile.z_singular {
            return Err(Error::BoundaryExceeded { direction: FRAC_PI_4, max_radius: self.profile.z_singular });
        }
        let len = 0.5 * radius;
        let nodes = ((len / step).round() as usize).max(2) + 1;
        let lattice = Lattice::square(0.0, 0.0, len, nodes);
        let field = GeneratingAngleField::from_fn(lattice, 1.0, |u, v| self.profile.angle(u, v))?;
        integrate_frame(&field, &Anchor::default(), &FrameOptions::default())
    }

    /// The n-wave mesh: the sector and its 2n − 1 images under rotation by π
    /// about the straight edge shared with the previous copy. Seam vertices
    /// are shared; the closing seam is welded within 1e-9.
    pub fn periodic_mesh(&self, radius: f64, step: f64) -> Result<SurfaceMesh> {
        let sector = self.sector_mesh(radius, step)?;
        let side = (sector.vertices.len() as f64).sqrt().round() as usize;
        let idx = |i: usize, j: usize| i * side + j;
        // edge directions in R³: the u-line (j = 0) and v-line (i = 0)
        let u_dir = crate::mesh::normalize(sector.vertices[idx(side - 1, 0)]);
        let v_dir = crate::mesh::normalize(sector.vertices[idx(0, side - 1)]);
        let mut out = sector.clone();
        // vertex index of each sector node in the previous copy
        let mut prev: Vec<usize> = (0..side * side).collect();
        let mut verts: Vec<Vec3> = sector.vertices.clone();
        let mut normals: Vec<Vec3> = sector.normals.clone();
        let (mut line_u, mut line_v) = (u_dir, v_dir);
        for k in 1..2 * self.n() {
            // odd copies turn about the image of the v-line, even ones about the u-line
            let axis = if k % 2 == 1 { line_v } else { line_u };
            let turn = |p: Vec3| sub(scale(axis, 2.0 * dot(p, axis)), p);
            verts = verts.iter().map(|&p| turn(p)).collect();
            normals = normals.iter().map(|&p| turn(p)).collect();
            if k % 2 == 1 {
                line_u = turn(line_u);
            } else {
                line_v = turn(line_v);
            }
            let mut map = vec![usize::MAX; side * side];
            for i in 0..side {
                for j in 0..side {
                    let node = idx(i, j);
                    let shared = if k % 2 == 1 { i == 0 } else { j == 0 };
                    if shared {
                        map[node] = prev[node];
                    } else if k == 2 * self.n() - 1 && j == 0 {
                        // closing seam against the original u-line
                        let target = idx(i, 0);
                        let gap = norm(sub(verts[node], sector.vertices[target]));
                        if gap > 1e-9 {
                            return Err(Error::Integration(format!("periodic mesh fails to close: seam gap {gap:e}")));
                        }
                        map[node] = target;
                    } else {
                        map[node] = out.vertices.len();
                        out.vertices.push(verts[node]);
                        // every turn swaps the sides of the surface
                        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
                        out.normals.push(scale(normals[node], sign));
                        out.uv.push(sector.uv[node]);
                        out.phi.push(sector.phi[node]);
                        out.density.push(sector.density[node]);
                    }
                }
            }
            for f in &sector.faces {
                let q = [map[f[0]], map[f[1]], map[f[2]], map[f[3]]];
                // odd copies are mirror images in the chart; reverse winding
                out.faces.push(if k % 2 == 1 { [q[0], q[3], q[2], q[1]] } else { q });
            }
            prev = map;
        }
        Ok(out)
    }
}

/// Golden-section minimization of a unimodal `f` on [lo, hi].
fn golden<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Shortest geodesic distance from the origin to the singular curve.
pub fn max_radius(n: usize) -> Result<f64> {
    Ok(AmslerSurface::new(n)?.max_radius()?.radius)
}

/// Bending energy of the geodesic disk of radius `radius` on the n-wave surface.
pub fn disk_energy(n: usize, radius: f64, opts: &EnergyOptions) -> Result<EnergyEstimate> {
    AmslerSurface::new(n)?.disk_energy(radius, opts)
}

/// Welded n-wave mesh with target lattice spacing `step`.
pub fn build_periodic_mesh(n: usize, radius: f64, step: f64) -> Result<SurfaceMesh> {
    AmslerSurface::new(n)?.periodic_mesh(radius, step)
}

/// Share of a polar grid's energy carried by its densest region covering
/// `fraction` of the disk area. Nodes are ranked by density and taken, with
/// their quadrature area weights, until the area fraction is reached.
pub fn energy_share_of_densest(grid: &GeodesicPolarGrid, fraction: f64) -> f64 {
    let mut parts: Vec<(f64, f64)> = Vec::new();
    for (j, wj) in grid.angle_weights.iter().enumerate() {
        for (i, wi) in grid.radial_weights.iter().enumerate() {
            if *wi > 0.0 {
                parts.push((grid.node_density[j][i], wj * wi * grid.radii[i].sinh()));
            }
        }
    }
    parts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let area: f64 = parts.iter().map(|p| p.1).sum();
    let energy: f64 = parts.iter().map(|p| p.0 * p.1).sum();
    let (mut taken, mut top) = (0.0, 0.0);
    for (d, w) in parts {
        let w = w.min(fraction * area - taken);
        if w <= 0.0 {
            break;
        }
        taken += w;
        top += d * w;
    }
    top / energy
}
