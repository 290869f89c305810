//! The inverted pendulum ψ'' = λ sin ψ and its time-of-flight relation.
//!
//! A trajectory with turning point ψ(1) = ε takes time
//! T(ε) = ∫_ε^{π−ε} dθ / √(2λ(cos ε − cos θ))
//! to travel between ε and π − ε; requiring T = 1 fixes ε(λ).

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeOptions};
use crate::quadrature;

/// Bracket searched for ε.
pub const EPS_BRACKET: (f64, f64) = (1e-6, FRAC_PI_2 - 1e-6);
const MAX_BISECTIONS: usize = 200;

/// Travel time from ε to π − ε for λ = 1; for general λ divide by √λ.
///
/// θ = ε + s² removes the inverse square root at the turning point, and the
/// product form cos ε − cos θ = 2 sin((θ+ε)/2) sin((θ−ε)/2) avoids
/// cancellation next to it.
pub fn unit_travel_time(eps: f64) -> f64 {
    let top = (PI - 2.0 * eps).max(0.0).sqrt();
    let integrand = |s: f64| {
        if s == 0.0 {
            return 2.0 / (2.0 * eps.sin()).sqrt();
        }
        let theta = eps + s * s;
        let gap = 2.0 * (0.5 * (theta + eps)).sin() * (0.5 * s * s).sin();
        2.0 * s / (2.0 * gap).sqrt()
    };
    quadrature::integrate(integrand, 0.0, top, 1e-15, 1e-14).0
}

/// Travel time from ε to π − ε under ψ'' = λ sin ψ.
pub fn travel_time(eps: f64, lambda: f64) -> f64 {
    unit_travel_time(eps) / lambda.sqrt()
}

/// Solve T(ε) = 1 by bisection on `EPS_BRACKET`.
pub fn epsilon_from_time_of_flight(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda={lambda} must be positive")));
    }
    let g = |e: f64| travel_time(e, lambda) - 1.0;
    let (mut lo, mut hi) = EPS_BRACKET;
    let (g_lo, g_hi) = (g(lo), g(hi));
    // T decreases in ε, so a root needs T(lo) > 1 > T(hi)
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::NoRoot(format!(
            "time of flight for lambda={lambda} spans [{:.6}, {:.6}] on the bracket, which misses 1",
            g_hi + 1.0,
            g_lo + 1.0
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The ansatz φ(u, v) = ψ(u + v) on the unit square.
#[derive(Debug, Clone)]
pub struct PendulumSolution {
    pub lambda: f64,
    pub epsilon: f64,
    /// E = λ cos ε, the value of ψ'²/2 + λ cos ψ.
    pub energy_constant: f64,
    /// Samples `(t, ψ, ψ')` on a uniform grid of [0, 2].
    pub trajectory: Vec<[f64; 3]>,
}

impl PendulumSolution {
    /// Largest drift of ψ'²/2 + λ cos ψ along the samples.
    pub fn energy_drift(&self) -> f64 {
        self.trajectory
            .iter()
            .map(|p| (0.5 * p[2] * p[2] + self.lambda * p[1].cos() - self.energy_constant).abs())
            .fold(0.0, f64::max)
    }
}

/// Find ε(λ) and integrate ψ from the turning point t = 1 out to 0 and 2.
/// `samples` is the number of trajectory points on [0, 2].
pub fn pendulum_ansatz(lambda: f64, samples: usize) -> Result<PendulumSolution> {
    let epsilon = epsilon_from_time_of_flight(lambda)?;
    let samples = samples.max(3) | 1;
    let f = |_t: f64, y: &[f64; 2]| [y[1], lambda * y[0].sin()];
    let opts = OdeOptions::tolerances(1e-13, 1e-14).with_h_max(0.01);
    let mid = samples / 2;
    let dt = 2.0 / (samples - 1) as f64;
    let mut trajectory = vec![[0.0; 3]; samples];
    trajectory[mid] = [1.0, epsilon, 0.0];
    for dir in [1.0f64, -1.0] {
        let mut ode = Dopri5::new(f, 1.0, [epsilon, 0.0], opts);
        for k in 1..=mid {
            let t = 1.0 + dir * k as f64 * dt;
            let y = ode.integrate_to(t)?;
            let idx = if dir > 0.0 { mid + k } else { mid - k };
            trajectory[idx] = [t, y[0], y[1]];
        }
    }
    Ok(PendulumSolution { lambda, epsilon, energy_constant: lambda * epsilon.cos(), trajectory })
}

/// g(x) = √x + √(x+1), which maps cot²φ to max(|k₁|, |k₂|).
pub fn g(x: f64) -> f64 {
    x.sqrt() + (x + 1.0).sqrt()
}

/// `(I_∞, M)` from the ansatz: I_∞ = cot²ε and M = g(I_∞).
pub fn curvature_bound(lambda: f64) -> Result<(f64, f64)> {
    let eps = epsilon_from_time_of_flight(lambda)?;
    let c = 1.0 / eps.tan();
    let i_inf = c * c;
    Ok((i_inf, g(i_inf)))
}
