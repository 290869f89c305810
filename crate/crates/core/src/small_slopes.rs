//! Small-slopes saddles: solutions of det D²ω = −1 built from the quadratic
//! family ω_a = (a u² − v²/a)/2 and extended oddly across its zero lines to
//! an n-wave height field on the disk.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_panels;

/// ω_a(u, v) = (a u² − v²/a)/2; every member solves det D²ω = −1.
pub fn omega_a(a: f64, u: f64, v: f64) -> f64 {
    0.5 * (a * u * u - v * v / a)
}

/// Odd n-wave extension of ω_a with a = tan(π/2n).
#[derive(Debug, Clone, Copy)]
pub struct PeriodicSaddle {
    pub n: usize,
    pub a: f64,
}

impl PeriodicSaddle {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("wave count n={n} must be at least 2")));
        }
        Ok(Self { n, a: (PI / (2.0 * n as f64)).tan() })
    }

    /// Angular width π/n of one sector.
    pub fn sector_width(&self) -> f64 {
        PI / self.n as f64
    }

    /// Height at (u, v). Sector k covers θ ∈ [kπ/n, (k+1)π/n]; there the
    /// field is (−1)^k times ω_a rotated so its zero lines are the sector edges.
    pub fn height(&self, u: f64, v: f64) -> f64 {
        let r2 = u * u + v * v;
        if r2 == 0.0 {
            return 0.0;
        }
        let w = self.sector_width();
        let theta = v.atan2(u).rem_euclid(2.0 * PI);
        let k = ((theta / w).floor() as usize).min(2 * self.n - 1);
        let local = theta - k as f64 * w - 0.5 * w;
        let (s, c) = local.sin_cos();
        let value = 0.5 * r2 * (self.a * c * c - s * s / self.a);
        if k.is_multiple_of(2) {
            value
        } else {
            -value
        }
    }

    /// Angular distance from (u, v) to the nearest seam line.
    pub fn seam_distance(&self, u: f64, v: f64) -> f64 {
        let w = self.sector_width();
        let theta = v.atan2(u).rem_euclid(w);
        theta.min(w - theta)
    }

    /// Euclidean distance from (u, v) to the nearest seam ray.
    pub fn seam_gap(&self, u: f64, v: f64) -> f64 {
        let r = u.hypot(v);
        let d = self.seam_distance(u, v);
        if d >= 0.5 * PI {
            r
        } else {
            r * d.sin()
        }
    }

    /// ‖D²ω‖² = a² + 1/a² inside every sector.
    pub fn density(&self) -> f64 {
        self.a * self.a + 1.0 / (self.a * self.a)
    }

    /// Largest height on the disk of radius R.
    pub fn amplitude(&self, radius: f64) -> f64 {
        0.5 * self.a * radius * radius
    }

    /// Sample on a square lattice covering [−R, R]².
    pub fn sample(&self, radius: f64, nodes: usize) -> HeightField {
        let h = 2.0 * radius / (nodes - 1) as f64;
        let mut values = Vec::with_capacity(nodes * nodes);
        for i in 0..nodes {
            for j in 0..nodes {
                values.push(self.height(-radius + i as f64 * h, -radius + j as f64 * h));
            }
        }
        HeightField { x0: -radius, y0: -radius, h, nx: nodes, ny: nodes, values }
    }
}

/// Heights on a uniform square lattice, row-major with y fastest.
#[derive(Debug, Clone)]
pub struct HeightField {
    pub x0: f64,
    pub y0: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl HeightField {
    pub fn from_fn<F: Fn(f64, f64) -> f64>(x0: f64, y0: f64, h: f64, nx: usize, ny: usize, f: F) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                values.push(f(x0 + i as f64 * h, y0 + j as f64 * h));
            }
        }
        Self { x0, y0, h, nx, ny, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ny + j]
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.h
    }

    pub const CSV_HEADER: &'static str = "x,y,omega";

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for i in 0..self.nx {
            for j in 0..self.ny {
                writeln!(w, "{},{},{}", self.x(i), self.y(j), self.at(i, j))?;
            }
        }
        Ok(())
    }
}

/// Max over interior nodes of |ω_uu ω_vv − ω_uv² + 1| with centred
/// differences, skipping nodes where `exclude(x, y)` holds.
pub fn monge_ampere_residual<E: Fn(f64, f64) -> bool>(field: &HeightField, exclude: E) -> f64 {
    let h2 = field.h * field.h;
    let mut worst = 0.0_f64;
    for i in 1..field.nx - 1 {
        for j in 1..field.ny - 1 {
            if exclude(field.x(i), field.y(j)) {
                continue;
            }
            let c = field.at(i, j);
            let uu = (field.at(i + 1, j) - 2.0 * c + field.at(i - 1, j)) / h2;
            let vv = (field.at(i, j + 1) - 2.0 * c + field.at(i, j - 1)) / h2;
            let uv = (field.at(i + 1, j + 1) - field.at(i + 1, j - 1) - field.at(i - 1, j + 1)
                + field.at(i - 1, j - 1))
                / (4.0 * h2);
            worst = worst.max((uu * vv - uv * uv + 1.0).abs());
        }
    }
    worst
}

/// Closed-form and quadrature energies of the n-wave saddle on a disk.
#[derive(Debug, Clone, Copy)]
pub struct SaddleEnergy {
    pub closed_form: f64,
    pub quadrature: f64,
}

/// πR²(tan²(π/2n) + cot²(π/2n)).
pub fn periodic_energy_closed_form(n: usize, radius: f64) -> Result<f64> {
    let s = PeriodicSaddle::new(n)?;
    Ok(PI * radius * radius * s.density())
}

/// ∫_disk ‖D²ω‖² by polar quadrature of a finite-difference Hessian of the
/// extended field: Gauss–Legendre in r, midpoints in θ within each sector.
pub fn periodic_energy_quadrature(n: usize, radius: f64, n_r: usize, n_theta: usize) -> Result<f64> {
    let s = PeriodicSaddle::new(n)?;
    let (rs, wr) = gauss_legendre_panels(0.0, radius, n_r.div_ceil(8).max(1), 8);
    let w = s.sector_width();
    let dt = w / n_theta as f64;
    let mut total = 0.0;
    for k in 0..2 * n {
        for t in 0..n_theta {
            let theta = k as f64 * w + (t as f64 + 0.5) * dt;
            let (st, ct) = theta.sin_cos();
            for (r, wi) in rs.iter().zip(&wr) {
                let (u, v) = (r * ct, r * st);
                // keep the stencil inside the sector
                let e = 0.25 * s.seam_gap(u, v).max(1e-300);
                let f = |x: f64, y: f64| s.height(x, y);
                let c = f(u, v);
                let uu = (f(u + e, v) - 2.0 * c + f(u - e, v)) / (e * e);
                let vv = (f(u, v + e) - 2.0 * c + f(u, v - e)) / (e * e);
                let uv = (f(u + e, v + e) - f(u + e, v - e) - f(u - e, v + e) + f(u - e, v - e)) / (4.0 * e * e);
                total += wi * r * dt * (uu * uu + 2.0 * uv * uv + vv * vv);
            }
        }
    }
    Ok(total)
}

/// Both energies; fails if they disagree by more than 1e-6 relative.
pub fn periodic_energy(n: usize, radius: f64) -> Result<SaddleEnergy> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius={radius} must be positive")));
    }
    let closed_form = periodic_energy_closed_form(n, radius)?;
    let quadrature = periodic_energy_quadrature(n, radius, 16, 8)?;
    let rel = ((quadrature - closed_form) / closed_form).abs();
    if rel > 1e-6 {
        return Err(Error::Integration(format!(
            "saddle energy quadrature {quadrature} disagrees with closed form {closed_form} (rel {rel:e})"
        )));
    }
    Ok(SaddleEnergy { closed_form, quadrature })
}

/// A_n(R) = tan(π/2n)·R²/2.
pub fn amplitude(n: usize, radius: f64) -> Result<f64> {
    Ok(PeriodicSaddle::new(n)?.amplitude(radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_saddles_have_zero_residual() {
        let f = HeightField::from_fn(-1.0, -1.0, 0.05, 41, 41, |u, v| omega_a(1.0, u, v));
        assert!(monge_ampere_residual(&f, |_, _| false) < 1e-10);
        let f = HeightField::from_fn(-1.0, -1.0, 0.05, 41, 41, |u, v| 0.5 * (u * u + v * v));
        assert!((monge_ampere_residual(&f, |_, _| false) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn heights_vanish_on_seams_and_alternate() {
        let s = PeriodicSaddle::new(3).unwrap();
        let w = s.sector_width();
        for k in 0..6usize {
            let t = k as f64 * w;
            assert!(s.height(t.cos(), t.sin()).abs() < 1e-14);
            let m = t + 0.5 * w;
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            assert!((s.height(m.cos(), m.sin()) - sign * s.amplitude(1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_forms() {
        assert!((periodic_energy_closed_form(2, 1.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((periodic_energy_closed_form(3, 1.0).unwrap() - 10.0 * PI / 3.0).abs() < 1e-13);
        assert!((amplitude(2, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(PeriodicSaddle::new(1).is_err());
    }
}
