//! Geodesics on a two-dimensional chart, geodesic polar grids and bending
//! energy quadrature in geodesic polar coordinates.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeOptions, Step};
use crate::quadrature::gauss_legendre_panels;

pub type Coords = [f64; 2];

/// A surface patch described intrinsically by its chart.
pub trait SurfaceChart: Sync {
    /// `(g11, g12, g22)` at `x`.
    fn metric(&self, x: Coords) -> [f64; 3];
    /// `[[Γ¹₁₁, Γ¹₁₂, Γ¹₂₂], [Γ²₁₁, Γ²₁₂, Γ²₂₂]]` at `x`.
    fn christoffel(&self, x: Coords) -> [[f64; 3]; 2];
    /// Bending density k₁² + k₂² at `x`.
    fn density(&self, x: Coords) -> f64;
    /// False once `x` is on or too close to a singular set of the chart.
    fn inside(&self, x: Coords) -> bool;
}

/// Squared speed of the tangent `d` at `x`.
pub fn metric_norm2<C: SurfaceChart + ?Sized>(chart: &C, x: Coords, d: Coords) -> f64 {
    let [g11, g12, g22] = chart.metric(x);
    g11 * d[0] * d[0] + 2.0 * g12 * d[0] * d[1] + g22 * d[1] * d[1]
}

/// Coordinate tangent at polar angle `psi` in the orthonormal frame obtained
/// from ∂₁ by Gram–Schmidt (∂₁ at angle 0, ∂₂ on the positive side).
pub fn unit_direction<C: SurfaceChart + ?Sized>(chart: &C, x: Coords, psi: f64) -> Coords {
    let [g11, g12, g22] = chart.metric(x);
    let a = g11.sqrt();
    let det = (g11 * g22 - g12 * g12).sqrt();
    // e1 = ∂₁/a, e2 = (g11 ∂₂ − g12 ∂₁)/(a·det)
    let e1 = [1.0 / a, 0.0];
    let e2 = [-g12 / (a * det), g11 / (a * det)];
    let (s, c) = psi.sin_cos();
    [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1]]
}

/// Polar angle of a coordinate tangent, the inverse of [`unit_direction`].
pub fn tangent_angle<C: SurfaceChart + ?Sized>(chart: &C, x: Coords, d: Coords) -> f64 {
    let [g11, g12, g22] = chart.metric(x);
    let a = g11.sqrt();
    let det = (g11 * g22 - g12 * g12).sqrt();
    let along = (g11 * d[0] + g12 * d[1]) / a;
    let across = d[1] * det / a;
    across.atan2(along)
}

#[derive(Debug, Clone, Copy)]
pub struct GeodesicOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Tolerance of arclength events (radius crossings, boundary hits).
    pub event_tol: f64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, event_tol: 1e-12 }
    }
}

impl GeodesicOptions {
    fn ode(&self) -> OdeOptions {
        OdeOptions::tolerances(self.rtol, self.atol).with_h_init(1e-2).with_h_max(0.1)
    }
}

/// State is (x¹, x², ẋ¹, ẋ², s) with s the accumulated arclength.
type State = [f64; 5];

fn geodesic_rhs<C: SurfaceChart + ?Sized>(chart: &C, y: &State) -> State {
    let x = [y[0], y[1]];
    let (d1, d2) = (y[2], y[3]);
    let g = chart.christoffel(x);
    let a1 = -(g[0][0] * d1 * d1 + 2.0 * g[0][1] * d1 * d2 + g[0][2] * d2 * d2);
    let a2 = -(g[1][0] * d1 * d1 + 2.0 * g[1][1] * d1 * d2 + g[1][2] * d2 * d2);
    let speed = metric_norm2(chart, x, [d1, d2]).max(0.0).sqrt();
    [d1, d2, a1, a2, speed]
}

/// A geodesic sampled at every accepted integrator step.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    /// Points `(arclength, x¹, x², ẋ¹, ẋ²)`.
    pub samples: Vec<[f64; 5]>,
    /// Arclength actually reached: the requested length, or the boundary hit.
    pub reached: f64,
    pub hit_boundary: bool,
}

impl GeodesicPath {
    pub fn end(&self) -> Coords {
        let last = self.samples.last().unwrap();
        [last[1], last[2]]
    }
}

/// Outcome of shooting one ray out to a list of radii.
#[derive(Debug, Clone)]
pub struct Ray {
    /// Chart coordinates at each requested radius that was reached.
    pub nodes: Vec<Coords>,
    /// First boundary hit, if any, as an arclength.
    pub blocked_at: Option<f64>,
}

fn start_state<C: SurfaceChart + ?Sized>(chart: &C, start: Coords, direction: Coords) -> Result<State> {
    if !chart.inside(start) {
        return Err(Error::StartOnSingularity);
    }
    let n2 = metric_norm2(chart, start, direction);
    if !(n2 > 0.0 && n2.is_finite()) {
        return Err(Error::Domain("geodesic direction has zero length".into()));
    }
    let k = 1.0 / n2.sqrt();
    Ok([start[0], start[1], direction[0] * k, direction[1] * k, 0.0])
}

/// Shoot from `start` along `direction` (rescaled to unit speed) and record
/// the chart coordinates where the arclength equals each of `radii`, which
/// must be non-decreasing. Stops at the first boundary hit.
pub fn shoot_to_radii<C: SurfaceChart + ?Sized>(
    chart: &C,
    start: Coords,
    direction: Coords,
    radii: &[f64],
    opts: &GeodesicOptions,
) -> Result<Ray> {
    let y0 = start_state(chart, start, direction)?;
    let mut nodes = Vec::with_capacity(radii.len());
    let mut next = 0;
    while next < radii.len() && radii[next] <= 0.0 {
        nodes.push(start);
        next += 1;
    }
    if next == radii.len() {
        return Ok(Ray { nodes, blocked_at: None });
    }
    let f = |_t: f64, y: &State| geodesic_rhs(chart, y);
    let mut ode = Dopri5::new(f, 0.0, y0, opts.ode());
    let t_cap = 4.0 * radii[radii.len() - 1] + 10.0;
    while next < radii.len() {
        if ode.t() >= t_cap {
            return Err(Error::Integration("geodesic speed collapsed before reaching the requested length".into()));
        }
        let step = match ode.advance(t_cap) {
            Ok(s) => s,
            Err(e) => {
                // a blow-up right at a singular set is reported as a boundary hit
                if !chart.inside([ode.y()[0], ode.y()[1]]) || is_near_blocked(chart, &ode, opts) {
                    return Ok(Ray { nodes, blocked_at: Some(ode.y()[4]) });
                }
                return Err(e);
            }
        };
        let left = !chart.inside([step.y1[0], step.y1[1]]);
        let step = if left {
            let (t, y) = ode.locate_first(&step, |_t, y| !chart.inside([y[0], y[1]]), opts.event_tol);
            Step { t0: step.t0, y0: step.y0, t1: t, y1: y }
        } else {
            step
        };
        while next < radii.len() && step.y1[4] >= radii[next] {
            let r = radii[next];
            let (_, y) = ode.locate_root(&step, |_t, y| y[4] - r, opts.event_tol);
            nodes.push([y[0], y[1]]);
            next += 1;
        }
        if left {
            return Ok(Ray { nodes, blocked_at: Some(step.y1[4]) });
        }
    }
    Ok(Ray { nodes, blocked_at: None })
}

fn is_near_blocked<C: SurfaceChart + ?Sized, F>(chart: &C, ode: &Dopri5<5, F>, _opts: &GeodesicOptions) -> bool
where
    F: Fn(f64, &State) -> State,
{
    // probe a tiny Euler step ahead: failing steps next to a singular set
    let y = ode.y();
    let probe = [y[0] + 1e-9 * y[2], y[1] + 1e-9 * y[3]];
    !chart.inside(probe)
}

/// Integrate a geodesic of arclength `length`, recording every step.
pub fn shoot_geodesic<C: SurfaceChart + ?Sized>(
    chart: &C,
    start: Coords,
    direction: Coords,
    length: f64,
    opts: &GeodesicOptions,
) -> Result<GeodesicPath> {
    let y0 = start_state(chart, start, direction)?;
    let f = |_t: f64, y: &State| geodesic_rhs(chart, y);
    let mut ode = Dopri5::new(f, 0.0, y0, opts.ode());
    let mut samples = vec![[0.0, y0[0], y0[1], y0[2], y0[3]]];
    if length <= 0.0 {
        return Ok(GeodesicPath { samples, reached: 0.0, hit_boundary: false });
    }
    let t_cap = 4.0 * length + 10.0;
    loop {
        let step = ode.advance(t_cap)?;
        if !chart.inside([step.y1[0], step.y1[1]]) {
            let (_, y) = ode.locate_first(&step, |_t, y| !chart.inside([y[0], y[1]]), opts.event_tol);
            samples.push([y[4], y[0], y[1], y[2], y[3]]);
            return Ok(GeodesicPath { samples, reached: y[4], hit_boundary: true });
        }
        if step.y1[4] >= length {
            let (_, y) = ode.locate_root(&step, |_t, y| y[4] - length, opts.event_tol);
            samples.push([y[4], y[0], y[1], y[2], y[3]]);
            return Ok(GeodesicPath { samples, reached: y[4], hit_boundary: false });
        }
        let y = step.y1;
        samples.push([y[4], y[0], y[1], y[2], y[3]]);
        if ode.t() >= t_cap {
            return Err(Error::Integration("geodesic speed collapsed before reaching the requested length".into()));
        }
    }
}

/// Lattice in geodesic polar coordinates around a centre.
#[derive(Debug, Clone)]
pub struct GeodesicPolarGrid {
    pub center: Coords,
    pub radius: f64,
    /// Radial nodes; the first is the centre r = 0 (zero weight).
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub angles: Vec<f64>,
    pub angle_weights: Vec<f64>,
    /// `node_coords[j][i]` is the chart point at `(radii[i], angles[j])`.
    pub node_coords: Vec<Vec<Coords>>,
    pub node_density: Vec<Vec<f64>>,
    /// Number of congruent copies of the gridded sector making up the disk.
    pub multiplicity: f64,
}

impl GeodesicPolarGrid {
    pub const CSV_HEADER: &'static str = "r,psi,density";

    /// One row per node; sector grids cover only their own angular range.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for (psi, dens) in self.angles.iter().zip(&self.node_density) {
            for (r, d) in self.radii.iter().zip(dens) {
                writeln!(w, "{r},{psi},{d}")?;
            }
        }
        Ok(())
    }
}

/// Angular sampling of a polar grid.
#[derive(Debug, Clone, Copy)]
pub enum AngularRule {
    /// Ψ_j = j·2π/N, equal weights (periodic trapezoid).
    FullCircle,
    /// Midpoints of N equal cells of `[start, end]`, with the disk made of
    /// `copies` such sectors.
    Sector { start: f64, end: f64, copies: f64 },
}

/// Radial Gauss–Legendre nodes: `n_r` nodes in panels of at most 8.
pub fn radial_nodes(radius: f64, n_r: usize) -> (Vec<f64>, Vec<f64>) {
    let order = n_r.clamp(1, 8);
    let panels = n_r.div_ceil(order).max(1);
    let (mut x, mut w) = gauss_legendre_panels(0.0, radius, panels, order);
    x.insert(0, 0.0);
    w.insert(0, 0.0);
    (x, w)
}

/// Shoot geodesics in all grid directions and record the nodes.
pub fn build_polar_grid_with<C: SurfaceChart + ?Sized>(
    chart: &C,
    center: Coords,
    radius: f64,
    n_r: usize,
    n_psi: usize,
    rule: AngularRule,
    opts: &GeodesicOptions,
) -> Result<GeodesicPolarGrid> {
    if !(radius >= 0.0) || n_psi == 0 {
        return Err(Error::Domain(format!("invalid polar grid: R={radius}, N_psi={n_psi}")));
    }
    if !chart.inside(center) {
        return Err(Error::StartOnSingularity);
    }
    if radius == 0.0 {
        return Ok(GeodesicPolarGrid {
            center,
            radius,
            radii: vec![0.0],
            radial_weights: vec![0.0],
            angles: vec![0.0],
            angle_weights: vec![0.0],
            node_coords: vec![vec![center]],
            node_density: vec![vec![chart.density(center)]],
            multiplicity: 1.0,
        });
    }
    let (radii, radial_weights) = radial_nodes(radius, n_r);
    let (angles, angle_weights, multiplicity): (Vec<f64>, Vec<f64>, f64) = match rule {
        AngularRule::FullCircle => {
            let d = 2.0 * PI / n_psi as f64;
            ((0..n_psi).map(|j| j as f64 * d).collect(), vec![d; n_psi], 1.0)
        }
        AngularRule::Sector { start, end, copies } => {
            let d = (end - start) / n_psi as f64;
            ((0..n_psi).map(|j| start + (j as f64 + 0.5) * d).collect(), vec![d; n_psi], copies)
        }
    };
    // every ray must reach R itself, not just the outermost quadrature node
    let mut targets = radii.clone();
    targets.push(radius);
    let rays: Vec<Result<Ray>> = angles
        .par_iter()
        .map(|&psi| {
            let dir = unit_direction(chart, center, psi);
            shoot_to_radii(chart, center, dir, &targets, opts)
        })
        .collect();
    let mut node_coords = Vec::with_capacity(angles.len());
    let mut blocked: Option<(f64, f64)> = None;
    for (ray, &psi) in rays.into_iter().zip(&angles) {
        let mut ray = ray?;
        if let Some(r) = ray.blocked_at {
            if ray.nodes.len() < targets.len() && blocked.is_none_or(|(_, b)| r < b) {
                blocked = Some((psi, r));
            }
        }
        ray.nodes.truncate(radii.len());
        node_coords.push(ray.nodes);
    }
    if let Some((direction, max_radius)) = blocked {
        return Err(Error::BoundaryExceeded { direction, max_radius });
    }
    let node_density = node_coords.iter().map(|ray| ray.iter().map(|&x| chart.density(x)).collect()).collect();
    Ok(GeodesicPolarGrid {
        center,
        radius,
        radii,
        radial_weights,
        angles,
        angle_weights,
        node_coords,
        node_density,
        multiplicity,
    })
}

/// Full-circle polar grid of radius `radius` around `center`.
pub fn build_polar_grid<C: SurfaceChart + ?Sized>(
    chart: &C,
    center: Coords,
    radius: f64,
    n_r: usize,
    n_psi: usize,
) -> Result<GeodesicPolarGrid> {
    build_polar_grid_with(chart, center, radius, n_r, n_psi, AngularRule::FullCircle, &GeodesicOptions::default())
}

/// Whether geodesics of length `radius` in `n_psi` evenly spaced directions
/// all stay inside the chart. On failure returns the blocking direction and
/// the shortest boundary distance found.
pub fn disk_fits<C: SurfaceChart + ?Sized>(
    chart: &C,
    center: Coords,
    radius: f64,
    n_psi: usize,
    opts: &GeodesicOptions,
) -> Result<Option<(f64, f64)>> {
    let d = 2.0 * PI / n_psi as f64;
    let hits: Vec<Result<Option<(f64, f64)>>> = (0..n_psi)
        .into_par_iter()
        .map(|j| {
            let psi = j as f64 * d;
            let dir = unit_direction(chart, center, psi);
            let ray = shoot_to_radii(chart, center, dir, &[radius], opts)?;
            Ok(if ray.nodes.is_empty() { Some((psi, ray.blocked_at.unwrap_or(0.0))) } else { None })
        })
        .collect();
    let mut worst: Option<(f64, f64)> = None;
    for h in hits {
        if let Some((psi, r)) = h? {
            if worst.is_none_or(|(_, b)| r < b) {
                worst = Some((psi, r));
            }
        }
    }
    Ok(worst)
}

/// Largest disk radius around `center` by bisection on [`disk_fits`],
/// starting from the bracket `[0, hi]`.
pub fn max_radius_bisection<C: SurfaceChart + ?Sized>(
    chart: &C,
    center: Coords,
    n_psi: usize,
    hi: f64,
    tol: f64,
    opts: &GeodesicOptions,
) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, hi);
    if disk_fits(chart, center, hi, n_psi, opts)?.is_none() {
        return Err(Error::NoRoot(format!("disk of radius {hi} still fits; enlarge the bracket")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if disk_fits(chart, center, mid, n_psi, opts)?.is_none() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// ∫∫ sinh(r)·(k₁²+k₂²) dr dΨ over the grid.
pub fn bending_energy(grid: &GeodesicPolarGrid) -> f64 {
    let mut total = 0.0;
    for (j, wj) in grid.angle_weights.iter().enumerate() {
        let mut ray = 0.0;
        for (i, wi) in grid.radial_weights.iter().enumerate() {
            ray += wi * grid.radii[i].sinh() * grid.node_density[j][i];
        }
        total += wj * ray;
    }
    grid.multiplicity * total
}

/// Resolution and stopping rule for disk energies.
#[derive(Debug, Clone, Copy)]
pub struct EnergyOptions {
    pub n_r: usize,
    pub n_psi: usize,
    /// Relative agreement required between successive refinements.
    pub rel_tol: f64,
    pub max_doublings: usize,
    pub geodesic: GeodesicOptions,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self { n_r: 128, n_psi: 256, rel_tol: 1e-4, max_doublings: 3, geodesic: GeodesicOptions::default() }
    }
}

impl EnergyOptions {
    pub fn coarse(n_r: usize, n_psi: usize) -> Self {
        Self { n_r, n_psi, ..Self::default() }
    }
}

/// One row of an energy table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub radius: f64,
    pub energy: f64,
    pub err_estimate: f64,
    pub n_r: usize,
    pub n_psi: usize,
}

/// Disk energy with automatic refinement: both resolutions are doubled
/// until successive values agree to `rel_tol`.
pub fn disk_energy<C: SurfaceChart + ?Sized>(
    chart: &C,
    center: Coords,
    radius: f64,
    rule: AngularRule,
    opts: &EnergyOptions,
) -> Result<EnergyEstimate> {
    let eval = |n_r: usize, n_psi: usize| -> Result<f64> {
        let grid = build_polar_grid_with(chart, center, radius, n_r, n_psi, rule, &opts.geodesic)?;
        Ok(bending_energy(&grid))
    };
    if radius == 0.0 {
        return Ok(EnergyEstimate { radius, energy: 0.0, err_estimate: 0.0, n_r: opts.n_r, n_psi: opts.n_psi });
    }
    let (mut n_r, mut n_psi) = (opts.n_r, opts.n_psi);
    let mut prev = eval(n_r, n_psi)?;
    for _ in 0..opts.max_doublings.max(1) {
        let (nr2, np2) = (2 * n_r, 2 * n_psi);
        let cur = eval(nr2, np2)?;
        let err = (cur - prev).abs();
        n_r = nr2;
        n_psi = np2;
        if err <= opts.rel_tol * cur.abs() {
            return Ok(EnergyEstimate { radius, energy: cur, err_estimate: err, n_r, n_psi });
        }
        prev = cur;
    }
    let cur = prev;
    let err = (cur - eval(n_r / 2, n_psi / 2)?).abs();
    Ok(EnergyEstimate { radius, energy: cur, err_estimate: err, n_r, n_psi })
}

/// Lower bound 4π(cosh R − 1): the density is at least 2 everywhere.
pub fn energy_floor(radius: f64) -> f64 {
    4.0 * PI * (radius.cosh() - 1.0)
}

/// Energy-versus-radius table for one surface.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub surface: String,
    pub param: f64,
    pub rows: Vec<EnergyEstimate>,
}

impl EnergyReport {
    pub const CSV_HEADER: &'static str = "surface,param,R,energy,err_estimate,N_r,N_psi";

    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> io::Result<()> {
        if header {
            writeln!(w, "{}", Self::CSV_HEADER)?;
        }
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.surface, self.param, r.radius, r.energy, r.err_estimate, r.n_r, r.n_psi
            )?;
        }
        Ok(())
    }
}

/// Flat chart with Γ ≡ 0 and constant density.
#[derive(Debug, Clone, Copy)]
pub struct EuclideanChart {
    pub density: f64,
}

impl SurfaceChart for EuclideanChart {
    fn metric(&self, _x: Coords) -> [f64; 3] {
        [1.0, 0.0, 1.0]
    }
    fn christoffel(&self, _x: Coords) -> [[f64; 3]; 2] {
        [[0.0; 3]; 2]
    }
    fn density(&self, _x: Coords) -> f64 {
        self.density
    }
    fn inside(&self, _x: Coords) -> bool {
        true
    }
}

/// Hyperbolic plane in geodesic polar coordinates (r, Ψ) with constant
/// density; `r = 0` is excluded since the chart degenerates there.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicPolarChart {
    pub density: f64,
}

impl SurfaceChart for HyperbolicPolarChart {
    fn metric(&self, x: Coords) -> [f64; 3] {
        let s = x[0].sinh();
        [1.0, 0.0, s * s]
    }
    fn christoffel(&self, x: Coords) -> [[f64; 3]; 2] {
        let (s, c) = (x[0].sinh(), x[0].cosh());
        [[0.0, 0.0, -s * c], [0.0, c / s, 0.0]]
    }
    fn density(&self, _x: Coords) -> f64 {
        self.density
    }
    fn inside(&self, x: Coords) -> bool {
        x[0] > 1e-9
    }
}
