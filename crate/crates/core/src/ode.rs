//! Dormand–Prince 5(4) integrator with adaptive step control.
//!
//! Events are located by replaying a single step from the last accepted
//! state with a shortened step size, so an event time is as accurate as the
//! integrator itself rather than an interpolant.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_init: 1e-3, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }
}

impl OdeOptions {
    pub fn tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    pub fn with_h_init(mut self, h_init: f64) -> Self {
        self.h_init = h_init;
        self
    }
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

/// One accepted step of an integration.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub t1: f64,
    pub y1: [f64; N],
}

/// Adaptive Dormand–Prince integrator for `y' = f(t, y)` over `[f64; N]`.
///
/// Integration may run forward or backward in `t`; the sign of the step is
/// taken from the requested end point.
pub struct Dopri5<const N: usize, F>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    opts: OdeOptions,
    t: f64,
    y: [f64; N],
    h: f64,
    steps: usize,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(f: F, t0: f64, y0: [f64; N], opts: OdeOptions) -> Self {
        Self { f, opts, t: t0, y: y0, h: opts.h_init, steps: 0 }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        (self.f)(t, y)
    }

    /// A single Dormand–Prince step of signed size `h` from `(t, y)`.
    /// Returns the fifth-order solution and the scaled error norm.
    pub fn trial_step(&self, t: f64, y: &[f64; N], h: f64) -> ([f64; N], f64) {
        let f = &self.f;
        let k1 = f(t, y);
        let k2 = f(t + C2 * h, &axpy(y, &[(h * A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(y, &[(h * A31, &k1), (h * A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = f(t + C5 * h, &axpy(y, &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]));
        let k6 = f(t + h, &axpy(y, &[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)]));
        let y1 = axpy(y, &[(h * B1, &k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)]);
        let k7 = f(t + h, &y1);
        let mut acc = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(y1[i].abs());
            acc += (e / sc) * (e / sc);
        }
        let err = (acc / N as f64).sqrt();
        let finite = y1.iter().all(|v| v.is_finite());
        (y1, if err.is_finite() && finite { err } else { f64::INFINITY })
    }

    /// Take one accepted step towards `t_end`, never stepping past it.
    pub fn advance(&mut self, t_end: f64) -> Result<Step<N>> {
        let dir = if t_end >= self.t { 1.0 } else { -1.0 };
        let remaining = (t_end - self.t).abs();
        if remaining == 0.0 {
            return Ok(Step { t0: self.t, y0: self.y, t1: self.t, y1: self.y });
        }
        let mut h = self.h.abs().min(self.opts.h_max).min(remaining);
        loop {
            self.steps += 1;
            if self.steps > self.opts.max_steps {
                return Err(Error::Integration(format!("exceeded {} steps at t={}", self.opts.max_steps, self.t)));
            }
            let last = h >= remaining;
            let hs = if last { remaining * dir } else { h * dir };
            let (y1, err) = self.trial_step(self.t, &self.y, hs);
            if err <= 1.0 {
                let step = Step { t0: self.t, y0: self.y, t1: if last { t_end } else { self.t + hs }, y1 };
                self.t = step.t1;
                self.y = y1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // keep the pre-clipping step size so a short final step does not shrink the next run
                self.h = (h * fac).min(self.opts.h_max);
                return Ok(step);
            }
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.25 };
            h *= fac;
            if h < 1e-15 * (1.0 + self.t.abs()) {
                return Err(Error::Integration(format!("step size underflow at t={}", self.t)));
            }
        }
    }

    /// Restart from a given state (used after an event has been located).
    pub fn reset(&mut self, t: f64, y: [f64; N]) {
        self.t = t;
        self.y = y;
    }

    /// Integrate to `t_end` and return the final state.
    pub fn integrate_to(&mut self, t_end: f64) -> Result<[f64; N]> {
        while self.t != t_end {
            self.advance(t_end)?;
        }
        Ok(self.y)
    }

    /// Locate a sign change of `g` inside an accepted step by replaying
    /// the step with shortened size. Stops once the bracket is shorter than
    /// `tol` in `t` or |g| ≤ `tol`. Returns `(t, y)` at the root.
    pub fn locate_root<G>(&self, step: &Step<N>, g: G, tol: f64) -> (f64, [f64; N])
    where
        G: Fn(f64, &[f64; N]) -> f64,
    {
        let h = step.t1 - step.t0;
        let state_at = |theta: f64| -> [f64; N] {
            if theta <= 0.0 {
                step.y0
            } else if theta >= 1.0 {
                step.y1
            } else {
                self.trial_step(step.t0, &step.y0, theta * h).0
            }
        };
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut g_lo = g(step.t0, &step.y0);
        let mut g_hi = g(step.t1, &step.y1);
        let mut side = 0i32;
        for _ in 0..200 {
            if (hi - lo) * h.abs() <= tol {
                break;
            }
            // Illinois-modified regula falsi, falling back to bisection
            let mut theta = if g_hi != g_lo { (lo * g_hi - hi * g_lo) / (g_hi - g_lo) } else { 0.5 * (lo + hi) };
            if !(theta > lo && theta < hi) || !theta.is_finite() {
                theta = 0.5 * (lo + hi);
            }
            let y = state_at(theta);
            let gv = g(step.t0 + theta * h, &y);
            if !gv.is_finite() {
                hi = theta;
                g_hi = f64::NAN;
                side = 0;
                continue;
            }
            if gv.abs() <= tol {
                return (step.t0 + theta * h, y);
            }
            if (gv > 0.0) == (g_lo > 0.0) {
                lo = theta;
                g_lo = gv;
                if side == -1 {
                    g_hi *= 0.5;
                }
                side = -1;
            } else {
                hi = theta;
                g_hi = gv;
                if side == 1 {
                    g_lo *= 0.5;
                }
                side = 1;
            }
            if !g_hi.is_finite() {
                g_hi = g_lo;
            }
        }
        let theta = 0.5 * (lo + hi);
        (step.t0 + theta * h, state_at(theta))
    }

    /// Locate the first point inside a step where `pred` becomes true,
    /// assuming it is false at the start. Bisection to `tol` in `t`.
    pub fn locate_first<P>(&self, step: &Step<N>, pred: P, tol: f64) -> (f64, [f64; N])
    where
        P: Fn(f64, &[f64; N]) -> bool,
    {
        let h = step.t1 - step.t0;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut y_lo = step.y0;
        for _ in 0..200 {
            if (hi - lo) * h.abs() <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let (y, err) = self.trial_step(step.t0, &step.y0, mid * h);
            if !err.is_finite() || pred(step.t0 + mid * h, &y) {
                hi = mid;
            } else {
                lo = mid;
                y_lo = y;
            }
        }
        (step.t0 + lo * h, y_lo)
    }
}

/// Classic fixed-step fourth-order Runge–Kutta step.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, &[(0.5 * h, &k1)]));
    let k3 = f(t + 0.5 * h, &axpy(y, &[(0.5 * h, &k2)]));
    let k4 = f(t + h, &axpy(y, &[(h, &k3)]));
    axpy(y, &[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)])
}
