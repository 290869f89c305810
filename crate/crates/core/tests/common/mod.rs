//! Independent oracles shared by the integration tests. Nothing here calls
//! into the crate's own integrators or quadrature.
#![allow(dead_code)]

/// Adaptive Simpson on [a, b].
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Fixed-step classical RK4 for y' = f(t, y) from t0 to t1 in `steps` steps.
pub fn rk4<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    steps: usize,
) -> [f64; N] {
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    let mut t = t0;
    let axpy = |y: &[f64; N], k: &[f64; N], s: f64| -> [f64; N] {
        let mut o = *y;
        for i in 0..N {
            o[i] += s * k[i];
        }
        o
    };
    for _ in 0..steps {
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = f(t + h, &axpy(&y, &k3, h));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
    }
    y
}

/// (sn, cn, dn) at u by integrating sn' = cn·dn, cn' = −sn·dn, dn' = −m·sn·cn.
pub fn jacobi_by_ode(u: f64, m: f64) -> [f64; 3] {
    rk4(|_t, y: &[f64; 3]| [y[1] * y[2], -y[0] * y[2], -m * y[0] * y[1]], 0.0, [0.0, 1.0, 1.0], u, 20_000)
}

/// Legendre F(φ|m) by Simpson.
pub fn legendre_f(phi: f64, m: f64) -> f64 {
    simpson(&|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-14)
}

/// Legendre E(φ|m) by Simpson.
pub fn legendre_e(phi: f64, m: f64) -> f64 {
    simpson(&|t: f64| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-14)
}

/// Bending energy of the pseudosphere disk of radius R centred at η₀.
///
/// With x = ξ and y = cosh η the pseudosphere metric is the half-plane
/// metric (dx² + dy²)/y², in which the geodesic disk is the Euclidean disk
/// with centre (0, y₀ cosh R) and radius y₀ sinh R. The density is
/// sinh²η + 1/sinh²η = (y² − 1) + 1/(y² − 1), so the energy reduces to a
/// single integral over the height y = c + ρ sin θ.
pub fn pseudosphere_energy(eta0: f64, radius: f64) -> f64 {
    let y0 = eta0.cosh();
    let (c, rho) = (y0 * radius.cosh(), y0 * radius.sinh());
    let f = |t: f64| {
        let y = c + rho * t.sin();
        let s2 = y * y - 1.0;
        2.0 * rho * rho * t.cos().powi(2) * (s2 + 1.0 / s2) / (y * y)
    };
    simpson(&f, -0.5 * std::f64::consts::PI, 0.5 * std::f64::consts::PI, 1e-11)
}

/// Bending energy of the hyperboloid disk of radius R centred on the waist,
/// for elliptic modulus k = b².
///
/// In Fermi coordinates (s, t) about the waist geodesic the metric is
/// ds² + cosh²s dt² and cosh d = cosh s·cosh t. The surface of revolution
/// has parallel radius ρ = c·cosh s with c = k′/k, giving principal
/// curvatures √(1 − c² sinh² s)/(c cosh s) and its negative reciprocal.
pub fn hyperboloid_energy(k: f64, radius: f64) -> f64 {
    let c = (1.0 - k * k).sqrt() / k;
    let dens = |s: f64| {
        let a2 = (1.0 - (c * s.sinh()).powi(2)) / (c * s.cosh()).powi(2);
        a2 + 1.0 / a2
    };
    // s = R sin θ removes the square-root endpoint behaviour of t_max(s)
    let f = |th: f64| {
        let s = radius * th.sin();
        let tmax = (radius.cosh() / s.cosh()).max(1.0).acosh();
        radius * th.cos() * s.cosh() * dens(s) * 2.0 * tmax
    };
    simpson(&f, -0.5 * std::f64::consts::PI, 0.5 * std::f64::consts::PI, 1e-11)
}

/// Least-squares line through points: returns (slope, intercept).
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// ε(λ) by shooting: RK4 from the turning point ψ(1) = ε, ψ'(1) = 0 to
/// t = 2, with ψ(2) = π − ε found by bisection on ε.
pub fn epsilon_by_shooting(lambda: f64) -> f64 {
    let miss = |eps: f64| {
        let y = rk4(|_t, y: &[f64; 2]| [y[1], lambda * y[0].sin()], 1.0, [eps, 0.0], 2.0, 4000);
        y[0] - (std::f64::consts::PI - eps)
    };
    // small ε undershoots π − ε at t = 2, ε near π/2 overshoots
    let (mut lo, mut hi) = (1e-6, 0.5 * std::f64::consts::PI - 1e-9);
    if miss(lo) > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if miss(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
