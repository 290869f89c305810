//! Jacobi elliptic functions and incomplete elliptic integrals of the first
//! and second kind, all in terms of the parameter `m = k²`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const AGM_TOL: f64 = 1e-14;
const MAX_AGM: usize = 64;

/// Values of sn, cn, dn and the amplitude at a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    pub am: f64,
}

fn check_parameter(m: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("elliptic parameter m={m} outside [0, 1]")));
    }
    Ok(())
}

/// Arithmetic-geometric mean sequence starting from (1, √(1−m), √m).
/// Returns the `a_n` and `c_n` sequences.
fn agm_sequence(m: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![1.0];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while c.last().unwrap().abs() > AGM_TOL && a.len() < MAX_AGM {
        let an = *a.last().unwrap();
        a.push(0.5 * (an + b));
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
    }
    (a, c)
}

/// Complete elliptic integral of the first kind K(m). Infinite at m = 1.
pub fn complete_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    if m == 1.0 {
        return Ok(f64::INFINITY);
    }
    let (a, _) = agm_sequence(m);
    Ok(FRAC_PI_2 / a.last().unwrap())
}

/// Complete elliptic integral of the second kind E(m).
pub fn complete_e(m: f64) -> Result<f64> {
    check_parameter(m)?;
    if m == 1.0 {
        return Ok(1.0);
    }
    let (a, c) = agm_sequence(m);
    let k = FRAC_PI_2 / a.last().unwrap();
    let mut s = 0.0;
    let mut pow = 0.5;
    for cn in &c {
        s += pow * cn * cn;
        pow *= 2.0;
    }
    Ok(k * (1.0 - s))
}

/// Jacobi elliptic functions sn, cn, dn and the amplitude am at `(u, m)`.
///
/// The amplitude is continued through every half period, so `am` is a
/// monotone function of `u` with `am(u + 2K) = am(u) + π`.
pub fn jacobi(u: f64, m: f64) -> Result<EllipticTriple> {
    check_parameter(m)?;
    if !u.is_finite() {
        return Err(Error::Domain(format!("elliptic argument u={u} is not finite")));
    }
    if m == 0.0 {
        let (s, c) = u.sin_cos();
        return Ok(EllipticTriple { sn: s, cn: c, dn: 1.0, am: u });
    }
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok(EllipticTriple { sn: u.tanh(), cn: sech, dn: sech, am: u.sinh().atan() });
    }
    let (a, c) = agm_sequence(m);
    let n = a.len() - 1;
    let k = FRAC_PI_2 / a[n];
    // fold onto [-K, K] and count half periods exactly
    let half_periods = (u / (2.0 * k)).round();
    let r = u - half_periods * 2.0 * k;
    let mut phi = (1u64 << n) as f64 * a[n] * r;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let am = phi + half_periods * PI;
    let (sn, cn) = am.sin_cos();
    let dn = (cn * cn + (1.0 - m) * sn * sn).sqrt();
    Ok(EllipticTriple { sn, cn, dn, am })
}

/// Incomplete integrals (F, E) on the reduced range |φ| ≤ π/2, 0 ≤ m < 1.
fn incomplete_reduced(phi: f64, m: f64) -> (f64, f64) {
    if phi == 0.0 {
        return (0.0, 0.0);
    }
    let sign = phi.signum();
    let phi = phi.abs();
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    let mut c = m.sqrt();
    let mut ph = phi;
    let mut pow = 1.0;
    let mut c_sum = 0.5 * c * c;
    let mut sin_sum = 0.0;
    for _ in 0..MAX_AGM {
        if c.abs() <= AGM_TOL {
            break;
        }
        let delta = (b / a * ph.tan()).atan();
        let turns = ((ph - delta) / PI).round();
        ph = ph + delta + turns * PI;
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        c_sum += 0.5 * pow * c * c;
        sin_sum += c * ph.sin();
    }
    let f = ph / (pow * a);
    let e = f * (1.0 - c_sum) + sin_sum;
    (sign * f, sign * e)
}

/// Incomplete elliptic integral of the first kind F(φ | m).
pub fn incomplete_f(phi: f64, m: f64) -> Result<f64> {
    check_parameter(m)?;
    if m == 1.0 {
        if phi.abs() >= FRAC_PI_2 {
            return Ok(phi.signum() * f64::INFINITY);
        }
        return Ok(phi.tan().asinh());
    }
    let j = (phi / PI).round();
    let r = phi - j * PI;
    let (f, _) = incomplete_reduced(r, m);
    if j == 0.0 {
        Ok(f)
    } else {
        Ok(f + 2.0 * j * complete_k(m)?)
    }
}

/// Incomplete elliptic integral of the second kind E(φ | m).
pub fn incomplete_e(phi: f64, m: f64) -> Result<f64> {
    check_parameter(m)?;
    let j = (phi / PI).round();
    let r = phi - j * PI;
    if m == 1.0 {
        return Ok(2.0 * j + r.sin());
    }
    let (_, e) = incomplete_reduced(r, m);
    if j == 0.0 {
        Ok(e)
    } else {
        Ok(e + 2.0 * j * complete_e(m)?)
    }
}
