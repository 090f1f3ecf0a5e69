//! Characteristic exponents of Mathieu's equation y'' + (a − 2q cos 2τ) y = 0.
//!
//! The exponent ν is returned unreduced: its integer part is fixed by the
//! number of characteristic values a_r, b_r below a, and cos πν comes from
//! either the infinite Hill determinant or the monodromy trace.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hill::{hill_monodromy, HillError, HillSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MathieuParams {
    pub a: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MathieuMethod {
    Monodromy,
    HillDeterminant,
}

/// Uniform ρ-modulation: a = (2ω_s/Ω)², q = −2ε(ω_s/Ω)².
pub fn mathieu_map_rho(omega_s: f64, omega: f64, eps: f64) -> MathieuParams {
    let r = omega_s / omega;
    MathieuParams { a: 4.0 * r * r, q: -2.0 * eps * r * r }
}

/// Joint ρ, κ modulation at leading order: a = (2ω_s/Ω)², q = −ε.
pub fn mathieu_map_rho_kappa(omega_s: f64, omega: f64, eps: f64) -> MathieuParams {
    let r = omega_s / omega;
    MathieuParams { a: 4.0 * r * r, q: -eps }
}

// Number of eigenvalues below x of the symmetric tridiagonal matrix (d, e).
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut p = d[0] - x;
    if p < 0.0 {
        count += 1;
    }
    for k in 1..d.len() {
        let prev = if p == 0.0 { f64::EPSILON * (d[k - 1].abs() + e[k - 1].abs()).max(1e-300) } else { p };
        p = d[k] - x - e[k - 1] * e[k - 1] / prev;
        if p < 0.0 {
            count += 1;
        }
    }
    count
}

/// Number of characteristic values a_r (r ≥ 0) and b_r (r ≥ 1) strictly
/// below `a`.
pub fn characteristic_count(a: f64, q: f64) -> usize {
    let size = ((a.abs() + 4.0 * q.abs() + 10.0).sqrt() / 2.0).ceil() as usize + 12;
    let mut total = 0;
    // even π-periodic: cos 2rτ
    let d: Vec<f64> = (0..size).map(|r| (2 * r * 2 * r) as f64).collect();
    let mut e = vec![q; size - 1];
    e[0] = 2f64.sqrt() * q;
    total += sturm_count(&d, &e, a);
    // odd π-periodic: sin 2rτ, r ≥ 1
    let d: Vec<f64> = (1..=size).map(|r| (2 * r * 2 * r) as f64).collect();
    let e = vec![q; size - 1];
    total += sturm_count(&d, &e, a);
    // even and odd 2π-periodic: cos/sin (2r+1)τ
    let odd: Vec<f64> = (0..size).map(|r| ((2 * r + 1) * (2 * r + 1)) as f64).collect();
    let mut d = odd.clone();
    d[0] += q;
    total += sturm_count(&d, &e, a);
    let mut d = odd;
    d[0] -= q;
    total += sturm_count(&d, &e, a);
    total
}

/// True when a characteristic value lies within `width` of a.
pub fn near_tongue_boundary(p: MathieuParams, width: f64) -> bool {
    characteristic_count(p.a - width, p.q) != characteristic_count(p.a + width, p.q)
}

fn cos_pi_sqrt(a: f64) -> f64 {
    if a >= 0.0 {
        (PI * a.sqrt()).cos()
    } else {
        (PI * (-a).sqrt()).cosh()
    }
}

// Δ(0) of the normalised three-term recurrence, rows n = −k..k.
fn hill_delta(a: f64, q: f64, k: usize) -> f64 {
    let xi = |n: i64| q / ((4 * n * n) as f64 - a);
    let mut d_prev = 1.0;
    let mut d = 1.0;
    let mut x_prev = 0.0;
    for n in -(k as i64)..=k as i64 {
        let x = xi(n);
        let next = d - x * x_prev * d_prev;
        d_prev = d;
        d = next;
        x_prev = x;
    }
    d
}

fn cos_pi_nu_determinant(a: f64, q: f64, k: usize) -> f64 {
    if q == 0.0 {
        return cos_pi_sqrt(a);
    }
    let f = |a: f64| 1.0 - hill_delta(a, q, k) * (1.0 - cos_pi_sqrt(a));
    let n0 = (a.max(0.0).sqrt() / 2.0).round();
    if (4.0 * n0 * n0 - a).abs() < 1e-5 {
        // Δ(0) is singular at a = 4n²; interpolate the smooth product
        let h = 1e-3;
        return (-f(a + 2.0 * h) + 4.0 * f(a + h) + 4.0 * f(a - h) - f(a - 2.0 * h)) / 6.0;
    }
    f(a)
}

// (cos πν, sin² πν) from the monodromy entries. sin² πν = −((w₁₁−w₂₂)²/4 +
// w₁₂w₂₁) keeps full precision where cos πν is close to ±1.
fn trig_pi_nu_monodromy(a: f64, q: f64, tol: f64) -> Result<(f64, f64), HillError> {
    let sys = HillSystem::scalar(PI, move |t| a - 2.0 * q * (2.0 * t).cos())?;
    let m = hill_monodromy(&sys, tol)?;
    let w = |i, j| m.w[(i, j)].re;
    let half_diff = 0.5 * (w(0, 0) - w(1, 1));
    Ok((0.5 * (w(0, 0) + w(1, 1)), -(half_diff * half_diff + w(0, 1) * w(1, 0))))
}

fn exponent_from_trig(x: f64, sin2: f64, count: usize) -> Complex64 {
    if count % 2 == 1 {
        let n = ((count - 1) / 2) as f64;
        let theta = sin2.max(0.0).sqrt().atan2(x) / PI;
        let frac = if (count - 1) / 2 % 2 == 0 { theta } else { 1.0 - theta };
        Complex64::new(n + frac, 0.0)
    } else {
        Complex64::new((count / 2) as f64, (-sin2).max(0.0).sqrt().asinh() / PI)
    }
}

/// Unreduced ν from x = cos πν and the characteristic-value count.
pub fn exponent_from_trace(x: f64, count: usize) -> Complex64 {
    if count % 2 == 1 {
        let n = ((count - 1) / 2) as f64;
        let theta = x.clamp(-1.0, 1.0).acos() / PI;
        let frac = if (count - 1) / 2 % 2 == 0 { theta } else { 1.0 - theta };
        Complex64::new(n + frac, 0.0)
    } else {
        let n = count / 2;
        let y = if n % 2 == 0 { x } else { -x };
        let mu = y.max(1.0).acosh() / PI;
        Complex64::new(n as f64, mu)
    }
}

/// ν for the given method; the monodromy route integrates at tolerance
/// 1e-12.
pub fn mathieu_char_exponent(p: MathieuParams, method: MathieuMethod) -> Result<Complex64, HillError> {
    mathieu_char_exponent_with(p, method, 1e-12)
}

pub fn mathieu_char_exponent_with(
    p: MathieuParams,
    method: MathieuMethod,
    ode_tolerance: f64,
) -> Result<Complex64, HillError> {
    if !(p.a.is_finite() && p.q.is_finite()) {
        return Err(HillError::Invalid(format!("non-finite Mathieu parameters {p:?}")));
    }
    let count = characteristic_count(p.a, p.q);
    match method {
        MathieuMethod::Monodromy => {
            let (x, sin2) = trig_pi_nu_monodromy(p.a, p.q, ode_tolerance)?;
            Ok(exponent_from_trig(x, sin2, count))
        }
        MathieuMethod::HillDeterminant if p.q == 0.0 => {
            // Δ(0) = 1: cos πν = cos π√a, with the matching sine
            let r = p.a.abs().sqrt() * PI;
            let sin2 = if p.a >= 0.0 { r.sin().powi(2) } else { -r.sinh().powi(2) };
            Ok(exponent_from_trig(cos_pi_sqrt(p.a), sin2, count))
        }
        MathieuMethod::HillDeterminant => {
            let mut k = ((p.a.abs() + p.q.abs()).sqrt() as usize + 16).max(20);
            let mut nu = exponent_from_trace(cos_pi_nu_determinant(p.a, p.q, k), count);
            let mut change = f64::INFINITY;
            while k <= 4096 {
                k *= 2;
                let next = exponent_from_trace(cos_pi_nu_determinant(p.a, p.q, k), count);
                change = (next - nu).norm();
                nu = next;
                if change <= 1e-14 * nu.norm().max(1.0) {
                    break;
                }
            }
            if change > 1e-9 {
                return Err(HillError::DeterminantNotConverged { change, order: k });
            }
            Ok(nu)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(a: f64, q: f64) -> Complex64 {
        mathieu_char_exponent(MathieuParams { a, q }, MathieuMethod::HillDeterminant).unwrap()
    }

    #[test]
    fn unmodulated() {
        assert!((det(0.25, 0.0) - 0.5).norm() < 1e-15);
        assert!((det(4.0, 0.0) - 2.0).norm() < 1e-12);
        assert!(det(0.0, 0.0).norm() < 1e-15);
        assert!((det(7.3, 0.0) - 7.3f64.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn first_tongue() {
        let nu = det(1.0, 0.1);
        assert!(nu.im > 1e-3);
        assert_eq!(nu.re, 1.0);
        let mono = mathieu_char_exponent(MathieuParams { a: 1.0, q: 0.1 }, MathieuMethod::Monodromy).unwrap();
        assert!((nu - mono).norm() < 1e-8);
    }

    #[test]
    fn maps() {
        let p = mathieu_map_rho(0.1, 0.2, 0.3);
        assert!((p.a - 1.0).abs() < 1e-15 && (p.q + 0.15).abs() < 1e-15);
        let p = mathieu_map_rho_kappa(0.1, 0.2, 0.3);
        assert!((p.a - 1.0).abs() < 1e-15 && (p.q + 0.3).abs() < 1e-15);
    }

    #[test]
    fn counts_at_small_q() {
        // a₀ ≈ −q²/2, b₁ ≈ 1 − q, a₁ ≈ 1 + q
        assert_eq!(characteristic_count(0.5, 0.1), 1);
        assert_eq!(characteristic_count(1.0, 0.1), 2);
        assert_eq!(characteristic_count(1.5, 0.1), 3);
        assert_eq!(characteristic_count(-0.1, 0.1), 0);
    }
}
