//! Quad meshes in R³ with per-vertex chart data, discrete curvature and
//! OBJ/CSV export.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{self, Write};

pub type Vec3 = [f64; 3];

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// A quad mesh. Faces are counter-clockwise index quadruples; every vertex
/// carries the chart coordinates it came from, the generating angle and the
/// bending density there.
#[derive(Debug, Clone, Default)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub faces: Vec<[usize; 4]>,
    pub uv: Vec<[f64; 2]>,
    pub phi: Vec<f64>,
    pub density: Vec<f64>,
}

/// Row-major index of lattice node (i, j) with `nv` nodes along v.
#[inline]
pub fn grid_index(i: usize, j: usize, nv: usize) -> usize {
    i * nv + j
}

/// Faces of an `nu × nv` lattice, oriented so that (u, v) is counter-clockwise.
pub fn grid_faces(nu: usize, nv: usize) -> Vec<[usize; 4]> {
    let mut faces = Vec::with_capacity(nu.saturating_sub(1) * nv.saturating_sub(1));
    for i in 0..nu.saturating_sub(1) {
        for j in 0..nv.saturating_sub(1) {
            faces.push([
                grid_index(i, j, nv),
                grid_index(i + 1, j, nv),
                grid_index(i + 1, j + 1, nv),
                grid_index(i, j + 1, nv),
            ]);
        }
    }
    faces
}

/// Area of a (possibly non-planar) quad, half the cross product of its diagonals.
pub fn quad_area(p: [Vec3; 4]) -> f64 {
    0.5 * norm(cross(sub(p[2], p[0]), sub(p[3], p[1])))
}

fn angle_between(a: Vec3, b: Vec3) -> f64 {
    let c = cross(a, b);
    norm(c).atan2(dot(a, b))
}

impl SurfaceMesh {
    /// Recompute vertex normals as area-weighted averages of face normals,
    /// keeping the orientation of any normals already present.
    pub fn compute_normals(&mut self) {
        let mut acc = vec![[0.0; 3]; self.vertices.len()];
        for f in &self.faces {
            let p: Vec<Vec3> = f.iter().map(|&k| self.vertices[k]).collect();
            // twice the vector area of the quad
            let n = cross(sub(p[2], p[0]), sub(p[3], p[1]));
            for &k in f {
                acc[k] = add(acc[k], n);
            }
        }
        let old = std::mem::take(&mut self.normals);
        self.normals = acc
            .into_iter()
            .enumerate()
            .map(|(k, n)| {
                let len = norm(n);
                let n = if len > 0.0 { scale(n, 1.0 / len) } else { [0.0, 0.0, 1.0] };
                match old.get(k) {
                    Some(o) if dot(*o, n) < 0.0 => scale(n, -1.0),
                    _ => n,
                }
            })
            .collect();
    }

    /// Vertices lying on an edge used by only one face.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut edges: HashMap<(usize, usize), u32> = HashMap::new();
        for f in &self.faces {
            for k in 0..4 {
                let (a, b) = (f[k], f[(k + 1) % 4]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut boundary = vec![false; self.vertices.len()];
        let mut used = vec![false; self.vertices.len()];
        for f in &self.faces {
            for &k in f {
                used[k] = true;
            }
        }
        for ((a, b), count) in edges {
            if count == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
        }
        for (k, u) in used.iter().enumerate() {
            if !u {
                boundary[k] = true;
            }
        }
        boundary
    }

    /// Discrete Gaussian curvature at interior vertices: angle defect divided
    /// by the vertex area, a quarter of the incident quad areas. Boundary
    /// vertices give `None`.
    ///
    /// The defect is the mean over the two triangulations obtained by
    /// splitting every quad along one or the other diagonal. On
    /// asymptotic-line meshes the quad edges at a vertex lie in the tangent
    /// plane up to O(h³), so the plain quad angle sum is 2π to leading order
    /// whatever the curvature; the diagonals follow curvature lines and
    /// carry the defect.
    pub fn gaussian_curvature(&self) -> Vec<Option<f64>> {
        let nvert = self.vertices.len();
        let mut angle_sum = vec![0.0; nvert];
        let mut area = vec![0.0; nvert];
        for f in &self.faces {
            let p = [self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]], self.vertices[f[3]]];
            let a = quad_area(p);
            for k in 0..4 {
                let next = sub(p[(k + 1) % 4], p[k]);
                let diag = sub(p[(k + 2) % 4], p[k]);
                let prev = sub(p[(k + 3) % 4], p[k]);
                let corner = angle_between(next, prev);
                let split = angle_between(next, diag) + angle_between(diag, prev);
                angle_sum[f[k]] += 0.5 * (corner + split);
                area[f[k]] += 0.25 * a;
            }
        }
        let boundary = self.boundary_vertices();
        (0..nvert)
            .map(|k| if boundary[k] || area[k] == 0.0 { None } else { Some((2.0 * PI - angle_sum[k]) / area[k]) })
            .collect()
    }

    /// Wavefront OBJ with vertex normals and quad faces.
    pub fn write_obj<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {} vertices, {} quads", self.vertices.len(), self.faces.len())?;
        for p in &self.vertices {
            writeln!(w, "v {:.12} {:.12} {:.12}", p[0], p[1], p[2])?;
        }
        for n in &self.normals {
            writeln!(w, "vn {:.12} {:.12} {:.12}", n[0], n[1], n[2])?;
        }
        let with_normals = self.normals.len() == self.vertices.len();
        for f in &self.faces {
            if with_normals {
                writeln!(w, "f {0}//{0} {1}//{1} {2}//{2} {3}//{3}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
            } else {
                writeln!(w, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
            }
        }
        Ok(())
    }

    pub const CSV_HEADER: &'static str = "u,v,x,y,z,phi,k1sq+k2sq";

    /// One row per vertex: chart coordinates, position, angle, density.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for k in 0..self.vertices.len() {
            let p = self.vertices[k];
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.uv[k][0], self.uv[k][1], p[0], p[1], p[2], self.phi[k], self.density[k]
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_grid_has_zero_curvature() {
        let (nu, nv) = (5, 4);
        let mut mesh = SurfaceMesh::default();
        for i in 0..nu {
            for j in 0..nv {
                mesh.vertices.push([i as f64 * 0.1, j as f64 * 0.2, 0.0]);
                mesh.uv.push([i as f64, j as f64]);
                mesh.phi.push(1.0);
                mesh.density.push(2.0);
            }
        }
        mesh.faces = grid_faces(nu, nv);
        mesh.compute_normals();
        assert!(mesh.normals.iter().all(|n| (n[2] - 1.0).abs() < 1e-15));
        let k = mesh.gaussian_curvature();
        assert_eq!(k.iter().filter(|x| x.is_some()).count(), (nu - 2) * (nv - 2));
        assert!(k.iter().flatten().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn sphere_patch_has_unit_curvature() {
        let n = 41;
        let h = 0.4 / (n - 1) as f64;
        let mut mesh = SurfaceMesh::default();
        for i in 0..n {
            for j in 0..n {
                let (t, p) = (1.0 + i as f64 * h, j as f64 * h);
                mesh.vertices.push([t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]);
            }
        }
        mesh.faces = grid_faces(n, n);
        let k = mesh.gaussian_curvature();
        let centre = k[grid_index(n / 2, n / 2, n)].unwrap();
        assert!((centre - 1.0).abs() < 1e-3, "{centre}");
    }

    #[test]
    fn csv_and_obj_shapes() {
        let mut mesh = SurfaceMesh::default();
        for i in 0..2 {
            for j in 0..2 {
                mesh.vertices.push([i as f64, j as f64, 0.0]);
                mesh.uv.push([i as f64, j as f64]);
                mesh.phi.push(1.0);
                mesh.density.push(2.0);
            }
        }
        mesh.faces = grid_faces(2, 2);
        mesh.compute_normals();
        let mut csv = Vec::new();
        mesh.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 5);
        let mut obj = Vec::new();
        mesh.write_obj(&mut obj).unwrap();
        let obj = String::from_utf8(obj).unwrap();
        assert!(obj.contains("f 1//1 3//3 4//4 2//2"));
    }
}
