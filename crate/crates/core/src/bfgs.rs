//! Dense BFGS with a strong-Wolfe line search and central-difference
//! gradients.

use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop when the largest gradient component falls below this.
    pub gtol: f64,
    /// Stop after `stall_iters` iterations whose relative decrease is below this.
    pub ftol: f64,
    pub stall_iters: usize,
    /// Step of the central-difference gradient.
    pub fd_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { max_iter: 2000, gtol: 1e-7, ftol: 1e-13, stall_iters: 5, fd_step: 1e-7 }
    }
}

#[derive(Debug, Clone)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Central-difference gradient, evaluated in parallel over components.
pub fn numerical_gradient<F>(f: &F, x: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..x.len())
        .into_par_iter()
        .map(|k| {
            let mut xp = x.to_vec();
            xp[k] += step;
            let fp = f(&xp);
            xp[k] = x[k] - step;
            let fm = f(&xp);
            (fp - fm) / (2.0 * step)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + alpha * b).collect()
}

struct LineSearch<'a, F> {
    f: &'a F,
    x: &'a [f64],
    d: &'a [f64],
    step: f64,
    evals: usize,
}

impl<F> LineSearch<'_, F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    /// φ(α) and φ'(α) along the search direction.
    fn eval(&mut self, alpha: f64) -> (f64, f64, Vec<f64>, Vec<f64>) {
        self.evals += 1;
        let xa = axpy(self.x, alpha, self.d);
        let fa = (self.f)(&xa);
        let ga = numerical_gradient(self.f, &xa, self.step);
        let da = dot(&ga, self.d);
        (fa, da, xa, ga)
    }
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

/// Strong-Wolfe line search (bracketing then zoom by safeguarded cubic
/// interpolation). Returns the accepted point, its value and gradient.
fn wolfe<F>(ls: &mut LineSearch<'_, F>, f0: f64, d0: f64) -> Option<(f64, Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut a_prev = 0.0;
    let (mut f_prev, mut d_prev) = (f0, d0);
    let mut alpha = 1.0;
    for i in 0..30 {
        let (fa, da, xa, ga) = ls.eval(alpha);
        if !fa.is_finite() {
            alpha = 0.5 * (a_prev + alpha);
            continue;
        }
        if fa > f0 + C1 * alpha * d0 || (i > 0 && fa >= f_prev) {
            return zoom(ls, f0, d0, (a_prev, f_prev, d_prev), (alpha, fa, da));
        }
        if da.abs() <= -C2 * d0 {
            return Some((fa, xa, ga));
        }
        if da >= 0.0 {
            return zoom(ls, f0, d0, (alpha, fa, da), (a_prev, f_prev, d_prev));
        }
        a_prev = alpha;
        f_prev = fa;
        d_prev = da;
        alpha *= 2.0;
    }
    None
}

fn cubic_min(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    let (x0, f0, g0) = a;
    let (x1, f1, g1) = b;
    let d1 = g0 + g1 - 3.0 * (f0 - f1) / (x0 - x1);
    let disc = d1 * d1 - g0 * g1;
    if disc < 0.0 {
        return 0.5 * (x0 + x1);
    }
    let d2 = (x1 - x0).signum() * disc.sqrt();
    let t = x1 - (x1 - x0) * (g1 + d2 - d1) / (g1 - g0 + 2.0 * d2);
    let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
    let margin = 0.1 * (hi - lo);
    if !t.is_finite() || t < lo + margin || t > hi - margin {
        0.5 * (x0 + x1)
    } else {
        t
    }
}

fn zoom<F>(
    ls: &mut LineSearch<'_, F>,
    f0: f64,
    d0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
) -> Option<(f64, Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    for _ in 0..30 {
        let alpha = cubic_min(lo, hi);
        let (fa, da, xa, ga) = ls.eval(alpha);
        if fa > f0 + C1 * alpha * d0 || fa >= lo.1 {
            hi = (alpha, fa, da);
        } else {
            if da.abs() <= -C2 * d0 {
                return Some((fa, xa, ga));
            }
            if da * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (alpha, fa, da);
        }
        if (hi.0 - lo.0).abs() < 1e-14 {
            break;
        }
    }
    // accept the best sufficient-decrease point found, if any
    if lo.0 > 0.0 && lo.1 < f0 {
        let x = axpy(ls.x, lo.0, ls.d);
        let g = numerical_gradient(ls.f, &x, ls.step);
        return Some((lo.1, x, g));
    }
    None
}

/// Minimize `f` from `x0`.
pub fn minimize<F>(f: &F, x0: &[f64], opts: &BfgsOptions) -> BfgsResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = numerical_gradient(f, &x, opts.fd_step);
    // inverse Hessian approximation, row-major
    let mut h = vec![0.0; n * n];
    let reset = |h: &mut Vec<f64>| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
    };
    reset(&mut h);
    let mut stall = 0;
    let mut fresh = true;
    for iter in 0..opts.max_iter {
        let gmax = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if gmax <= opts.gtol {
            return BfgsResult { x, f: fx, iterations: iter, converged: true };
        }
        let mut d: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut d0 = dot(&g, &d);
        if d0 >= 0.0 {
            reset(&mut h);
            d = g.iter().map(|v| -v).collect();
            d0 = dot(&g, &d);
        }
        let mut ls = LineSearch { f, x: &x, d: &d, step: opts.fd_step, evals: 0 };
        let Some((f_new, x_new, g_new)) = wolfe(&mut ls, fx, d0) else {
            if fresh {
                // no progress even along steepest descent
                return BfgsResult { x, f: fx, iterations: iter, converged: gmax <= 1e3 * opts.gtol };
            }
            reset(&mut h);
            fresh = true;
            continue;
        };
        fresh = false;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if iter == 0 && sy > 0.0 {
            // scale the initial inverse Hessian
            let gamma = sy / dot(&y, &y);
            for i in 0..n {
                h[i * n + i] = gamma;
            }
        }
        if sy > 1e-16 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        let decrease = (fx - f_new) / fx.abs().max(1e-300);
        stall = if decrease < opts.ftol { stall + 1 } else { 0 };
        x = x_new;
        fx = f_new;
        g = g_new;
        if stall >= opts.stall_iters {
            return BfgsResult { x, f: fx, iterations: iter + 1, converged: true };
        }
    }
    BfgsResult { x, f: fx, iterations: opts.max_iter, converged: false }
}
