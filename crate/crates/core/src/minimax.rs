//! Curvature lower bound for smooth immersions: minimize ‖cot²φ‖_p over
//! discrete solutions of φ_uv = λ sin φ on the unit square.
//!
//! A discrete solution is fixed by its Goursat data, the values on the
//! characteristic lines v = 0 and u = 0, and the interior is obtained by
//! marching the compact cell scheme
//! φ(i+1,j+1) = φ(i+1,j) + φ(i,j+1) − φ(i,j) + h²λ sin((φ(i+1,j) + φ(i,j+1))/2).
//! The constraint therefore holds exactly and the optimizer only sees the
//! 2N − 1 boundary values.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bfgs::{self, BfgsOptions};
use crate::error::{Error, Result};
use crate::pendulum;

/// Angles are kept in [BARRIER, π − BARRIER] by a quadratic penalty.
pub const BARRIER: f64 = 1e-3;
const PENALTY: f64 = 1e6;

/// March the Goursat data `x` (φ(u_i, 0) for all i, then φ(0, v_j) for
/// j ≥ 1) into an N×N field, row-major with j fastest.
pub fn march(x: &[f64], lambda: f64) -> Vec<f64> {
    let n = x.len().div_ceil(2);
    let h = 1.0 / (n - 1) as f64;
    let c = h * h * lambda;
    let mut phi = vec![0.0; n * n];
    for i in 0..n {
        phi[i * n] = x[i];
    }
    for j in 1..n {
        phi[j] = x[n + j - 1];
    }
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let a = phi[(i + 1) * n + j];
            let b = phi[i * n + j + 1];
            phi[(i + 1) * n + j + 1] = a + b - phi[i * n + j] + c * (0.5 * (a + b)).sin();
        }
    }
    phi
}

/// Mean-normalized ℓ^p norm of cot²φ, (mean (cot²φ)^p)^(1/p), evaluated in
/// max-factored form so large p does not overflow; angles outside the
/// barrier band are clamped and penalized.
pub fn objective(phi: &[f64], p: f64) -> f64 {
    let mut penalty = 0.0;
    let mut vals = Vec::with_capacity(phi.len());
    let mut mx = 0.0_f64;
    for &f in phi {
        let mut f = f;
        if !f.is_finite() {
            return f64::INFINITY;
        }
        if f < BARRIER {
            penalty += (BARRIER - f).powi(2);
            f = BARRIER;
        } else if f > PI - BARRIER {
            penalty += (f - PI + BARRIER).powi(2);
            f = PI - BARRIER;
        }
        let c = f.cos() / f.sin();
        let c2 = c * c;
        mx = mx.max(c2);
        vals.push(c2);
    }
    let norm = if mx == 0.0 {
        0.0
    } else {
        let pi = p.round();
        let integer = (p - pi).abs() < 1e-12 && pi <= 64.0;
        let s: f64 = if integer {
            vals.iter().map(|v| (v / mx).powi(pi as i32)).sum()
        } else {
            vals.iter().map(|v| (v / mx).powf(p)).sum()
        };
        mx * (s / vals.len() as f64).powf(1.0 / p)
    };
    norm + PENALTY * penalty
}

/// Largest residual of the compact scheme on a field (≈ 0 by construction).
pub fn compact_residual(phi: &[f64], n: usize, lambda: f64) -> f64 {
    let h = 1.0 / (n - 1) as f64;
    let mut worst = 0.0_f64;
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let a = phi[(i + 1) * n + j];
            let b = phi[i * n + j + 1];
            let lhs = (phi[(i + 1) * n + j + 1] - a - b + phi[i * n + j]) / (h * h);
            worst = worst.max((lhs - lambda * (0.5 * (a + b)).sin()).abs());
        }
    }
    worst
}

/// Largest centred cross-difference residual |D_uv φ − λ sin φ| at interior
/// nodes, which is O(h²) for a marched field.
pub fn centered_residual(phi: &[f64], n: usize, lambda: f64) -> f64 {
    let h = 1.0 / (n - 1) as f64;
    let at = |i: usize, j: usize| phi[i * n + j];
    let mut worst = 0.0_f64;
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let d = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4.0 * h * h);
            worst = worst.max((d - lambda * at(i, j).sin()).abs());
        }
    }
    worst
}

/// Largest spread max − min of φ along any anti-diagonal i + j = const;
/// zero exactly when φ is a function of u + v.
pub fn collapse_spread(phi: &[f64], n: usize) -> f64 {
    let mut lo = vec![f64::INFINITY; 2 * n - 1];
    let mut hi = vec![f64::NEG_INFINITY; 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            let v = phi[i * n + j];
            lo[i + j] = lo[i + j].min(v);
            hi[i + j] = hi[i + j].max(v);
        }
    }
    lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max)
}

/// Node indices maximizing cot²φ, max(tan(φ/2), cot(φ/2)) and (φ − π/2)².
/// All three are monotone in |φ − π/2|, so the indices coincide.
pub fn argmax_equivalent(phi: &[f64]) -> [usize; 3] {
    let arg = |key: &dyn Fn(f64) -> f64| -> usize {
        let mut best = 0;
        for (k, &v) in phi.iter().enumerate() {
            if key(v) > key(phi[best]) {
                best = k;
            }
        }
        best
    };
    [
        arg(&|f: f64| (f.cos() / f.sin()).powi(2)),
        arg(&|f: f64| (0.5 * f).tan().max(1.0 / (0.5 * f).tan())),
        arg(&|f: f64| (f - FRAC_PI_2).powi(2)),
    ]
}

/// A minimizer of the discrete problem.
#[derive(Debug, Clone)]
pub struct GridSolution {
    pub n: usize,
    pub lambda: f64,
    pub p: f64,
    /// N×N angles, row-major with j (the v index) fastest.
    pub phi: Vec<f64>,
    /// ‖cot²φ‖_p, mean-normalized: I_p.
    pub objective: f64,
    pub sup_cot2: f64,
    /// Residual of the marched compact scheme.
    pub sg_residual: f64,
    /// Centred cross-difference residual, an O(h²) consistency diagnostic.
    pub centered_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl GridSolution {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.phi[i * self.n + j]
    }

    pub fn collapse_spread(&self) -> f64 {
        collapse_spread(&self.phi, self.n)
    }

    fn from_data(x: &[f64], lambda: f64, p: f64, converged: bool, iterations: usize) -> Self {
        let n = x.len().div_ceil(2);
        let phi = march(x, lambda);
        let sup_cot2 = phi.iter().map(|f| (f.cos() / f.sin()).powi(2)).fold(0.0, f64::max);
        Self {
            n,
            lambda,
            p,
            objective: objective(&phi, p),
            sup_cot2,
            sg_residual: compact_residual(&phi, n, lambda),
            centered_residual: centered_residual(&phi, n, lambda),
            phi,
            converged,
            iterations,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimaxOptions {
    /// Random perturbed starts in addition to φ ≡ π/2 and the ansatz.
    pub random_starts: usize,
    pub seed: u64,
    /// Coarsest level of the coarse-to-fine continuation.
    pub coarsest: usize,
    pub bfgs: BfgsOptions,
    /// Largest acceptable compact-scheme residual.
    pub residual_tol: f64,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        Self { random_starts: 2, seed: 0, coarsest: 8, bfgs: BfgsOptions::default(), residual_tol: 1e-8 }
    }
}

/// Resample Goursat data from `from` nodes per line to `to` nodes by linear
/// interpolation in u (and v) on [0, 1].
pub fn resample(x: &[f64], to: usize) -> Vec<f64> {
    let from = x.len().div_ceil(2);
    let mut line_u = Vec::with_capacity(from);
    let mut line_v = Vec::with_capacity(from);
    for i in 0..from {
        line_u.push(x[i]);
        line_v.push(if i == 0 { x[0] } else { x[from + i - 1] });
    }
    let interp = |line: &[f64], t: f64| -> f64 {
        let s = t * (from - 1) as f64;
        let k = (s.floor() as usize).min(from - 2);
        let w = s - k as f64;
        line[k] * (1.0 - w) + line[k + 1] * w
    };
    let mut out = Vec::with_capacity(2 * to - 1);
    for i in 0..to {
        out.push(interp(&line_u, i as f64 / (to - 1) as f64));
    }
    for j in 1..to {
        out.push(interp(&line_v, j as f64 / (to - 1) as f64));
    }
    out
}

/// Goursat data of the ansatz φ = ψ(u + v) on `n` nodes per line.
pub fn ansatz_data(lambda: f64, n: usize) -> Result<Vec<f64>> {
    let sol = pendulum::pendulum_ansatz(lambda, 2 * (n - 1) + 1)?;
    // trajectory samples t = k/(n−1) for k = 0..2(n−1); the boundary lines
    // carry ψ(t) for t ∈ [0, 1]
    let line: Vec<f64> = (0..n).map(|k| sol.trajectory[k][1]).collect();
    let mut x = line.clone();
    x.extend_from_slice(&line[1..]);
    Ok(x)
}

fn levels(coarsest: usize, n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = coarsest.min(n);
    while m < n {
        out.push(m);
        m *= 2;
    }
    out.push(n);
    out
}

/// Coarse-to-fine BFGS from the Goursat data `x0` (at the coarsest level).
fn solve_from(x0: Vec<f64>, lambda: f64, p: f64, n: usize, opts: &MinimaxOptions) -> (Vec<f64>, bool, usize) {
    let mut x = x0;
    let mut converged = false;
    let mut iterations = 0;
    for level in levels(opts.coarsest, n) {
        if x.len().div_ceil(2) != level {
            x = resample(&x, level);
        }
        let f = |d: &[f64]| objective(&march(d, lambda), p);
        let r = bfgs::minimize(&f, &x, &opts.bfgs);
        x = r.x;
        converged = r.converged;
        iterations += r.iterations;
    }
    (x, converged, iterations)
}

/// Minimize ‖cot²φ‖_p over discrete sine-Gordon solutions on an N×N grid.
/// Runs are started from φ ≡ π/2, from the pendulum ansatz and from seeded
/// perturbations of π/2, in parallel; the best result is returned.
pub fn grid_minimize(lambda: f64, p: f64, n: usize, opts: &MinimaxOptions) -> Result<GridSolution> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda={lambda} must be non-negative")));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("norm order p={p} must be at least 1")));
    }
    if n < 8 {
        return Err(Error::Domain(format!("grid size N={n} must be at least 8")));
    }
    let m0 = opts.coarsest.clamp(2, n);
    let mut starts = vec![vec![FRAC_PI_2; 2 * m0 - 1]];
    if lambda > 0.0 {
        if let Ok(x) = ansatz_data(lambda, m0) {
            starts.push(x);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.random_starts {
            starts.push((0..2 * m0 - 1).map(|_| FRAC_PI_2 + rng.gen_range(-0.3..0.3)).collect());
        }
    }
    let runs: Vec<(Vec<f64>, bool, usize)> =
        starts.into_par_iter().map(|x0| solve_from(x0, lambda, p, n, opts)).collect();
    let best = runs
        .into_iter()
        .map(|(x, conv, it)| GridSolution::from_data(&x, lambda, p, conv, it))
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .expect("at least one start");
    if best.sg_residual > opts.residual_tol {
        return Err(Error::InconsistentField { residual: best.sg_residual, threshold: opts.residual_tol });
    }
    Ok(best)
}

/// One row of the minimax table.
#[derive(Debug, Clone)]
pub struct MinimaxRow {
    pub lambda: f64,
    pub p: f64,
    pub n: usize,
    pub i_p: f64,
    pub sup_cot2: f64,
    pub eps: f64,
    pub i_inf: f64,
    pub m: f64,
    pub converged: bool,
}

impl MinimaxRow {
    pub const CSV_HEADER: &'static str = "lambda,p,N,I_p,sup_cot2,eps,I_inf,M,converged";

    /// Combine a grid solution with the ansatz values at the same λ.
    pub fn new(sol: &GridSolution) -> Result<Self> {
        let eps = pendulum::epsilon_from_time_of_flight(sol.lambda)?;
        let (i_inf, m) = pendulum::curvature_bound(sol.lambda)?;
        Ok(Self {
            lambda: sol.lambda,
            p: sol.p,
            n: sol.n,
            i_p: sol.objective,
            sup_cot2: sol.sup_cot2,
            eps,
            i_inf,
            m,
            converged: sol.converged,
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> io::Result<()> {
        if header {
            writeln!(w, "{}", Self::CSV_HEADER)?;
        }
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            self.lambda, self.p, self.n, self.i_p, self.sup_cot2, self.eps, self.i_inf, self.m, self.converged
        )
    }
}
