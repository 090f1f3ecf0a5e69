//! Adaptive Dormand–Prince 5(4) for complex linear systems.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            s += k[i] * *c;
        }
        *o = y[i] + s * h;
    }
}

/// Integrates y' = f(t, y) from t0 to t1 in place. `rhs(t, y, dy)` writes
/// the derivative. Mixed absolute/relative control with atol = rtol = tol.
pub fn integrate<F>(mut rhs: F, t0: f64, t1: f64, y: &mut [Complex64], tol: f64) -> Result<OdeStats, OdeError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(OdeStats { accepted: 0, rejected: 0 });
    }
    let dir = span.signum();
    let max_steps = 2_000_000;
    let mut k1 = vec![Complex64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut tmp = k1.clone();
    let mut ynew = k1.clone();

    let mut t = t0;
    rhs(t, y, &mut k1);
    let sc = |a: Complex64, b: Complex64| tol + tol * a.norm().max(b.norm());

    // initial step guess
    let d0 = (y.iter().map(|v| (v.norm() / sc(*v, *v)).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d1 = (y.iter().zip(&k1).map(|(v, f)| (f.norm() / sc(*v, *v)).powi(2)).sum::<f64>() / n as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span.abs());
    axpy(&mut tmp, y, dir * h, &[(1.0, &k1)]);
    rhs(t + dir * h, &tmp, &mut k2);
    let d2 = (y
        .iter()
        .zip(k2.iter().zip(&k1))
        .map(|(v, (a, b))| ((a - b).norm() / sc(*v, *v)).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt()
        / h;
    let h1 = if d1.max(d2) <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    h = (100.0 * h).min(h1).min(span.abs());

    let mut stats = OdeStats { accepted: 0, rejected: 0 };
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    loop {
        if stats.accepted + stats.rejected > max_steps {
            return Err(OdeError::TooManySteps(max_steps));
        }
        let remaining = (t1 - t) * dir;
        let last = h >= remaining * (1.0 - 1e-12);
        if last {
            h = remaining;
        }
        if h < 1e-14 * span.abs() {
            return Err(OdeError::StepUnderflow { t, h });
        }
        let hs = dir * h;
        axpy(&mut tmp, y, hs, &[(A21, &k1)]);
        rhs(t + C2 * hs, &tmp, &mut k2);
        axpy(&mut tmp, y, hs, &[(A31, &k1), (A32, &k2)]);
        rhs(t + C3 * hs, &tmp, &mut k3);
        axpy(&mut tmp, y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        rhs(t + C4 * hs, &tmp, &mut k4);
        axpy(&mut tmp, y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        rhs(t + C5 * hs, &tmp, &mut k5);
        axpy(&mut tmp, y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let tn = if last { t1 } else { t + hs };
        rhs(tn, &tmp, &mut k6);
        axpy(&mut ynew, y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        rhs(tn, &ynew, &mut k7);

        let mut err = 0.0;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            err += (e.norm() / sc(y[i], ynew[i])).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            if ynew.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) && h < 1e-10 * span.abs() {
                return Err(OdeError::NonFinite(t));
            }
            h *= 0.1;
            stats.rejected += 1;
            continue;
        }
        // PI step control
        let fac11 = err.powf(0.2 - 0.04 * 0.75);
        let mut fac = fac11 / fac_old.powf(0.04);
        fac = (fac / 0.9).clamp(1.0 / 10.0, 1.0 / 0.2);
        let hnew = h / fac;
        if err <= 1.0 {
            fac_old = err.max(1e-4);
            stats.accepted += 1;
            y.copy_from_slice(&ynew);
            std::mem::swap(&mut k1, &mut k7);
            t = tn;
            if last {
                return Ok(stats);
            }
            h = if last_rejected { hnew.min(h) } else { hnew };
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / 0.9).min(1.0 / 0.2);
            last_rejected = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let w = 1.7;
        let mut y = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        integrate(|_, y, dy| {
            dy[0] = y[1];
            dy[1] = -y[0] * (w * w);
        }, 0.0, 10.0, &mut y, 1e-12)
        .unwrap();
        assert!((y[0].re - (w * 10.0).cos()).abs() < 1e-10);
        assert!((y[1].re + w * (w * 10.0).sin()).abs() < 1e-10);
    }

    #[test]
    fn complex_exponential() {
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let i = Complex64::new(0.0, 1.0);
        integrate(|_, y, dy| dy[0] = i * y[0], 0.0, 3.0, &mut y, 1e-11).unwrap();
        assert!((y[0] - (i * 3.0).exp()).norm() < 1e-9);
    }
}
