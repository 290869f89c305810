//! Chebyshev nets on K = −1 surfaces: the generating angle φ(u, v), its
//! curvature densities, sine-Gordon residuals and reconstruction of the
//! immersion by integrating the Gauss–Weingarten frame.
//!
//! Conventions: metric du² + 2 cos φ du dv + dv², second fundamental form
//! 2 sin φ du dv (the opposite sign is the mirror image), unit normal
//! N = x_u × x_v / sin φ.

use crate::error::{Error, Result};
use crate::mesh::{cross, grid_faces, grid_index, normalize, SurfaceMesh, Vec3};

/// Default guard band around the singular angles 0 and π.
pub const ANGLE_GUARD: f64 = 1e-6;

/// Squares of the principal curvatures, `(tan²(φ/2), cot²(φ/2))`.
pub fn principal_curvature_squares(phi: f64) -> Result<(f64, f64)> {
    if !(phi > 0.0 && phi < std::f64::consts::PI) {
        return Err(Error::SingularAngle { angle: phi, guard: 0.0 });
    }
    let t = (0.5 * phi).tan();
    let t2 = t * t;
    Ok((t2, 1.0 / t2))
}

/// Bending energy density k₁² + k₂² = 4/sin²φ − 2.
pub fn bending_density(phi: f64) -> Result<f64> {
    let (a, b) = principal_curvature_squares(phi)?;
    Ok(a + b)
}

/// Sampled generating angle on a uniform (u, v) lattice. Node (i, j) sits at
/// `(u0 + i·hu, v0 + j·hv)`; values are stored row-major with j fastest.
#[derive(Debug, Clone)]
pub struct GeneratingAngleField {
    pub u0: f64,
    pub v0: f64,
    pub hu: f64,
    pub hv: f64,
    pub nu: usize,
    pub nv: usize,
    /// Scale in φ_uv = λ sin φ; the lattice spacing in arclength is √λ·h.
    pub lambda: f64,
    values: Vec<f64>,
}

/// Lattice geometry shared by field constructors.
#[derive(Debug, Clone, Copy)]
pub struct Lattice {
    pub u0: f64,
    pub v0: f64,
    pub hu: f64,
    pub hv: f64,
    pub nu: usize,
    pub nv: usize,
}

impl Lattice {
    /// Square lattice with `n` nodes per side covering `[u0, u0+len] × [v0, v0+len]`.
    pub fn square(u0: f64, v0: f64, len: f64, n: usize) -> Self {
        let h = len / (n - 1) as f64;
        Self { u0, v0, hu: h, hv: h, nu: n, nv: n }
    }
}

impl GeneratingAngleField {
    pub fn new(lattice: Lattice, lambda: f64, values: Vec<f64>) -> Result<Self> {
        let Lattice { u0, v0, hu, hv, nu, nv } = lattice;
        if !(hu > 0.0 && hv > 0.0) {
            return Err(Error::Domain(format!("lattice spacings must be positive, got ({hu}, {hv})")));
        }
        if nu < 2 || nv < 2 {
            return Err(Error::Domain(format!("lattice needs at least 2×2 nodes, got {nu}×{nv}")));
        }
        if values.len() != nu * nv {
            return Err(Error::Domain(format!("expected {} values, got {}", nu * nv, values.len())));
        }
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("lambda={lambda} must be non-negative")));
        }
        if let Some(&bad) = values.iter().find(|p| !(**p > 0.0 && **p < std::f64::consts::PI)) {
            return Err(Error::SingularAngle { angle: bad, guard: 0.0 });
        }
        Ok(Self { u0, v0, hu, hv, nu, nv, lambda, values })
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(lattice: Lattice, lambda: f64, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(lattice.nu * lattice.nv);
        for i in 0..lattice.nu {
            for j in 0..lattice.nv {
                values.push(f(lattice.u0 + i as f64 * lattice.hu, lattice.v0 + j as f64 * lattice.hv));
            }
        }
        Self::new(lattice, lambda, values)
    }

    pub fn lattice(&self) -> Lattice {
        Lattice { u0: self.u0, v0: self.v0, hu: self.hu, hv: self.hv, nu: self.nu, nv: self.nv }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[grid_index(i, j, self.nv)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn u(&self, i: usize) -> f64 {
        self.u0 + i as f64 * self.hu
    }

    #[inline]
    pub fn v(&self, j: usize) -> f64 {
        self.v0 + j as f64 * self.hv
    }

    /// Values within `guard` of 0 or π.
    pub fn near_singular(&self, guard: f64) -> Option<f64> {
        self.values.iter().copied().find(|&p| p <= guard || p >= std::f64::consts::PI - guard)
    }
}

/// Max over interior nodes of |D_uv φ − λ sin φ| with the centred
/// cross-difference D_uv.
pub fn sine_gordon_residual(field: &GeneratingAngleField) -> f64 {
    let mut worst = 0.0_f64;
    let denom = 4.0 * field.hu * field.hv;
    for i in 1..field.nu - 1 {
        for j in 1..field.nv - 1 {
            let d = (field.at(i + 1, j + 1) - field.at(i + 1, j - 1) - field.at(i - 1, j + 1) + field.at(i - 1, j - 1))
                / denom;
            worst = worst.max((d - field.lambda * field.at(i, j).sin()).abs());
        }
    }
    worst
}

/// Position and orientation pinned at one lattice node.
#[derive(Debug, Clone, Copy)]
pub struct Anchor {
    pub node: (usize, usize),
    pub position: Vec3,
    /// Direction of x_u; normalized internally.
    pub tangent_u: Vec3,
    /// Surface normal; its component along `tangent_u` is discarded.
    pub normal: Vec3,
}

impl Default for Anchor {
    fn default() -> Self {
        Self { node: (0, 0), position: [0.0; 3], tangent_u: [1.0, 0.0, 0.0], normal: [0.0, 0.0, 1.0] }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FrameOptions {
    /// Guard band around 0 and π.
    pub guard: f64,
    /// Largest admissible sine-Gordon residual of the input field.
    pub residual_threshold: f64,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self { guard: ANGLE_GUARD, residual_threshold: 1e-2 }
    }
}

/// Frame rows: x_u, x_v, N, x.
type Frame = [Vec3; 4];
type Mat4 = [[f64; 4]; 4];

fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            if a[i][k] != 0.0 {
                for j in 0..4 {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
fn expm(a: &Mat4) -> Mat4 {
    let norm = a.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.125 { (norm / 0.125).log2().ceil() as i32 } else { 0 };
    let s = 0.5f64.powi(squarings);
    let mut b = *a;
    for row in b.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    let mut result = [[0.0; 4]; 4];
    let mut term = [[0.0; 4]; 4];
    for i in 0..4 {
        result[i][i] = 1.0;
        term[i][i] = 1.0;
    }
    for k in 1..=12 {
        term = mat_mul(&term, &b);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

fn apply(m: &Mat4, f: &Frame) -> Frame {
    let mut out = [[0.0; 3]; 4];
    for i in 0..4 {
        for k in 0..4 {
            for c in 0..3 {
                out[i][c] += m[i][k] * f[k][c];
            }
        }
    }
    out
}

/// Generator of the frame ODE along u (or along v when `along_v`), using the
/// angle and its derivative at the midpoint of the step.
fn generator(phi: f64, dphi: f64, step: f64, along_v: bool) -> Mat4 {
    let (s, c) = phi.sin_cos();
    let cot = c / s;
    let csc = 1.0 / s;
    let a: Mat4 = if along_v {
        [[0.0, 0.0, s, 0.0], [-csc * dphi, cot * dphi, 0.0, 0.0], [-csc, c * csc, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]
    } else {
        [[cot * dphi, -csc * dphi, 0.0, 0.0], [0.0, 0.0, s, 0.0], [c * csc, -csc, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]]
    };
    let mut a = a;
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x *= step;
        }
    }
    expm(&a)
}

fn check_field(field: &GeneratingAngleField, opts: &FrameOptions) -> Result<()> {
    if !(field.lambda > 0.0) {
        return Err(Error::Domain("frame integration needs lambda > 0".into()));
    }
    if let Some(bad) = field.near_singular(opts.guard) {
        return Err(Error::SingularAngle { angle: bad, guard: opts.guard });
    }
    if field.nu >= 3 && field.nv >= 3 {
        let residual = sine_gordon_residual(field);
        if !(residual <= opts.residual_threshold) {
            return Err(Error::InconsistentField { residual, threshold: opts.residual_threshold });
        }
    }
    Ok(())
}

fn initial_frame(field: &GeneratingAngleField, anchor: &Anchor) -> Result<Frame> {
    let (i0, j0) = anchor.node;
    if i0 >= field.nu || j0 >= field.nv {
        return Err(Error::Domain(format!("anchor node ({i0}, {j0}) outside the lattice")));
    }
    let e1 = normalize(anchor.tangent_u);
    let n = anchor.normal;
    let n = normalize(crate::mesh::sub(n, crate::mesh::scale(e1, crate::mesh::dot(n, e1))));
    let w = cross(n, e1);
    let (s, c) = field.at(i0, j0).sin_cos();
    let xv = [c * e1[0] + s * w[0], c * e1[1] + s * w[1], c * e1[2] + s * w[2]];
    Ok([e1, xv, n, anchor.position])
}

/// March the frame over the whole lattice. When `u_first` the anchor row is
/// swept along u and every column then along v; otherwise the roles swap.
fn march(field: &GeneratingAngleField, start: Frame, anchor: (usize, usize), u_first: bool) -> Vec<Frame> {
    let (nu, nv) = (field.nu, field.nv);
    let scale = field.lambda.sqrt();
    let (hu, hv) = (field.hu * scale, field.hv * scale);
    let mut frames = vec![[[0.0; 3]; 4]; nu * nv];
    let idx = |i: usize, j: usize| grid_index(i, j, nv);
    let step_u = |f: &Frame, i: usize, j: usize, forward: bool| -> Frame {
        // from node i to i±1 along u at column j
        let (a, b) = if forward { (i, i + 1) } else { (i - 1, i) };
        let (pa, pb) = (field.at(a, j), field.at(b, j));
        let m = generator(0.5 * (pa + pb), (pb - pa) / hu, if forward { hu } else { -hu }, false);
        apply(&m, f)
    };
    let step_v = |f: &Frame, i: usize, j: usize, forward: bool| -> Frame {
        let (a, b) = if forward { (j, j + 1) } else { (j - 1, j) };
        let (pa, pb) = (field.at(i, a), field.at(i, b));
        let m = generator(0.5 * (pa + pb), (pb - pa) / hv, if forward { hv } else { -hv }, true);
        apply(&m, f)
    };
    let (i0, j0) = anchor;
    frames[idx(i0, j0)] = start;
    if u_first {
        for i in i0..nu - 1 {
            frames[idx(i + 1, j0)] = step_u(&frames[idx(i, j0)], i, j0, true);
        }
        for i in (1..=i0).rev() {
            frames[idx(i - 1, j0)] = step_u(&frames[idx(i, j0)], i, j0, false);
        }
        for i in 0..nu {
            for j in j0..nv - 1 {
                frames[idx(i, j + 1)] = step_v(&frames[idx(i, j)], i, j, true);
            }
            for j in (1..=j0).rev() {
                frames[idx(i, j - 1)] = step_v(&frames[idx(i, j)], i, j, false);
            }
        }
    } else {
        for j in j0..nv - 1 {
            frames[idx(i0, j + 1)] = step_v(&frames[idx(i0, j)], i0, j, true);
        }
        for j in (1..=j0).rev() {
            frames[idx(i0, j - 1)] = step_v(&frames[idx(i0, j)], i0, j, false);
        }
        for j in 0..nv {
            for i in i0..nu - 1 {
                frames[idx(i + 1, j)] = step_u(&frames[idx(i, j)], i, j, true);
            }
            for i in (1..=i0).rev() {
                frames[idx(i - 1, j)] = step_u(&frames[idx(i, j)], i, j, false);
            }
        }
    }
    frames
}

/// Reconstruct the immersion from a generating-angle field. The frame is
/// marched along u from the anchor, then along v; positions are unique up to
/// the rigid motion fixed by the anchor.
pub fn integrate_frame(field: &GeneratingAngleField, anchor: &Anchor, opts: &FrameOptions) -> Result<SurfaceMesh> {
    check_field(field, opts)?;
    let start = initial_frame(field, anchor)?;
    let frames = march(field, start, anchor.node, true);
    let mut mesh = SurfaceMesh {
        vertices: frames.iter().map(|f| f[3]).collect(),
        normals: frames.iter().map(|f| normalize(f[2])).collect(),
        faces: grid_faces(field.nu, field.nv),
        ..Default::default()
    };
    for i in 0..field.nu {
        for j in 0..field.nv {
            let p = field.at(i, j);
            mesh.uv.push([field.u(i), field.v(j)]);
            mesh.phi.push(p);
            mesh.density.push(bending_density(p)?);
        }
    }
    Ok(mesh)
}

/// Largest distance between the vertex positions obtained by marching u
/// first and v first. Vanishes as h → 0 exactly when the field satisfies
/// sine-Gordon, so it measures path dependence of the reconstruction.
pub fn compatibility_gap(field: &GeneratingAngleField, anchor: &Anchor, opts: &FrameOptions) -> Result<f64> {
    check_field(field, opts)?;
    let start = initial_frame(field, anchor)?;
    let a = march(field, start, anchor.node, true);
    let b = march(field, start, anchor.node, false);
    Ok(a.iter().zip(&b).map(|(p, q)| crate::mesh::norm(crate::mesh::sub(p[3], q[3]))).fold(0.0, f64::max))
}
