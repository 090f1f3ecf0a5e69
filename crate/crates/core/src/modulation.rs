//! Periodic time laws: truncated Fourier series for 1/ρ_i(t) and 1/κ_i(t),
//! and the uniform-modulation laws of the homogeneous background.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModulationError {
    #[error("modulation frequency must be positive, got {0}")]
    NonpositiveOmega(f64),
    #[error("modulation amplitude must lie in [0, 1), got {0}")]
    AmplitudeOutOfRange(f64),
    #[error("coefficients are not conjugate-symmetric (defect {0:e})")]
    NotConjugateSymmetric(f64),
    #[error("time law of resonator {resonator} is not positive at t = {t}")]
    NonpositiveLaw { resonator: usize, t: f64 },
    #[error("profile has {rho} ρ-laws and {kappa} κ-laws")]
    LengthMismatch { rho: usize, kappa: usize },
    #[error("invalid modulation: {0}")]
    Invalid(String),
}

/// s(t) = Σ_{n=−M}^{M} c_n e^{inΩt}, real for conjugate-symmetric c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub omega: f64,
    /// c_{−M}, ..., c_M
    pub coeffs: Vec<Complex64>,
}

fn check_eps(eps: f64) -> Result<(), ModulationError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(ModulationError::AmplitudeOutOfRange(eps));
    }
    Ok(())
}

impl FourierSeries {
    pub fn new(omega: f64, coeffs: Vec<Complex64>) -> Result<Self, ModulationError> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(ModulationError::NonpositiveOmega(omega));
        }
        if coeffs.len() % 2 != 1 {
            return Err(ModulationError::Invalid("coefficient list must have odd length 2M+1".into()));
        }
        let s = FourierSeries { omega, coeffs };
        let d = s.symmetry_defect();
        if d > 1e-12 {
            return Err(ModulationError::NotConjugateSymmetric(d));
        }
        Ok(s)
    }

    pub fn constant(omega: f64, v: f64) -> Self {
        FourierSeries { omega, coeffs: vec![Complex64::new(v, 0.0)] }
    }

    /// 1 + ε cos(Ωt + φ).
    pub fn cosine(omega: f64, eps: f64, phase: f64) -> Result<Self, ModulationError> {
        check_eps(eps)?;
        let c = Complex64::from_polar(eps / 2.0, phase);
        Self::new(omega, vec![c.conj(), Complex64::new(1.0, 0.0), c])
    }

    /// 1/(1 + ε cos(Ωt + φ)), truncated where the geometric tail drops
    /// below 1e-17.
    pub fn reciprocal_cosine(omega: f64, eps: f64, phase: f64) -> Result<Self, ModulationError> {
        check_eps(eps)?;
        if eps == 0.0 {
            return Ok(Self::constant(omega, 1.0));
        }
        let root = (1.0 - eps * eps).sqrt();
        let beta = (1.0 - root) / eps;
        let m = ((1e-17f64).ln() / beta.ln()).ceil().max(1.0) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
        for n in -(m as i64)..=m as i64 {
            let mag = (-beta).powi(n.unsigned_abs() as i32) / root;
            coeffs[(n + m as i64) as usize] = Complex64::from_polar(1.0, n as f64 * phase) * mag;
        }
        Self::new(omega, coeffs)
    }

    /// Samples a real T-periodic law and keeps harmonics |n| ≤ order.
    pub fn from_samples<F: Fn(f64) -> f64>(omega: f64, order: usize, f: F) -> Result<Self, ModulationError> {
        let p = 8 * order.max(16) + 1;
        let period = 2.0 * PI / omega;
        let vals: Vec<f64> = (0..p).map(|k| f(period * k as f64 / p as f64)).collect();
        let mut coeffs = Vec::with_capacity(2 * order + 1);
        for n in -(order as i64)..=order as i64 {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, v) in vals.iter().enumerate() {
                s += Complex64::from_polar(*v, -2.0 * PI * (n * k as i64) as f64 / p as f64);
            }
            coeffs.push(s / p as f64);
        }
        // enforce exact symmetry lost to rounding
        let m = order;
        for n in 1..=m {
            let avg = (coeffs[m + n] + coeffs[m - n].conj()) * 0.5;
            coeffs[m + n] = avg;
            coeffs[m - n] = avg.conj();
        }
        coeffs[m].im = 0.0;
        Self::new(omega, coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn symmetry_defect(&self) -> f64 {
        let m = self.order();
        (0..=m)
            .map(|n| (self.coeffs[m + n] - self.coeffs[m - n].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// (s, s', s'') at time t.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let m = self.order() as i64;
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let n = k as i64 - m;
            let w = n as f64 * self.omega;
            let e = *c * Complex64::from_polar(1.0, w * t);
            v += e.re;
            d1 += -w * e.im;
            d2 += -w * w * e.re;
        }
        (v, d1, d2)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[self.order()].re
    }

    pub fn min_on_grid(&self, points: usize) -> f64 {
        let period = 2.0 * PI / self.omega;
        (0..points)
            .map(|k| self.value(period * k as f64 / points as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// −s''/(2s) + s'²/(4s²): the κ-correction (√κ/2)(κ'/κ^{3/2})' written in
/// terms of s = 1/κ.
pub fn kappa_correction(s: f64, s1: f64, s2: f64) -> f64 {
    -s2 / (2.0 * s) + s1 * s1 / (4.0 * s * s)
}

/// Per-resonator laws of 1/ρ_i and 1/κ_i sharing one frequency Ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationProfile {
    pub omega: f64,
    pub inv_rho: Vec<FourierSeries>,
    pub inv_kappa: Vec<FourierSeries>,
}

impl ModulationProfile {
    pub fn new(omega: f64, inv_rho: Vec<FourierSeries>, inv_kappa: Vec<FourierSeries>) -> Result<Self, ModulationError> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(ModulationError::NonpositiveOmega(omega));
        }
        if inv_rho.len() != inv_kappa.len() || inv_rho.is_empty() {
            return Err(ModulationError::LengthMismatch { rho: inv_rho.len(), kappa: inv_kappa.len() });
        }
        for s in inv_rho.iter().chain(&inv_kappa) {
            if (s.omega - omega).abs() > 1e-14 * omega {
                return Err(ModulationError::Invalid("all laws must share the profile frequency".into()));
            }
            let d = s.symmetry_defect();
            if d > 1e-12 {
                return Err(ModulationError::NotConjugateSymmetric(d));
            }
        }
        let p = ModulationProfile { omega, inv_rho, inv_kappa };
        p.check_positive()?;
        Ok(p)
    }

    /// ρ_i = κ_i = 1 for every resonator.
    pub fn unmodulated(omega: f64, n: usize) -> Result<Self, ModulationError> {
        let one = FourierSeries::constant(omega, 1.0);
        Self::new(omega, vec![one.clone(); n], vec![one; n])
    }

    /// κ_i(t) = 1/(1 + ε cos(Ωt + φ_i)), ρ_i = 1.
    pub fn kappa_cosine(omega: f64, eps: f64, phases: &[f64]) -> Result<Self, ModulationError> {
        let inv_kappa = phases.iter().map(|&p| FourierSeries::cosine(omega, eps, p)).collect::<Result<Vec<_>, _>>()?;
        let inv_rho = vec![FourierSeries::constant(omega, 1.0); phases.len()];
        Self::new(omega, inv_rho, inv_kappa)
    }

    /// ρ_i(t) = 1/(1 + ε cos(Ωt + φ_i)), κ_i = 1.
    pub fn rho_cosine(omega: f64, eps: f64, phases: &[f64]) -> Result<Self, ModulationError> {
        let inv_rho = phases.iter().map(|&p| FourierSeries::cosine(omega, eps, p)).collect::<Result<Vec<_>, _>>()?;
        let inv_kappa = vec![FourierSeries::constant(omega, 1.0); phases.len()];
        Self::new(omega, inv_rho, inv_kappa)
    }

    /// κ_i = 1/ρ_i = 1 + ε cos(Ωt + φ_i).
    pub fn constant_impedance(omega: f64, eps: f64, phases: &[f64]) -> Result<Self, ModulationError> {
        let inv_rho = phases.iter().map(|&p| FourierSeries::cosine(omega, eps, p)).collect::<Result<Vec<_>, _>>()?;
        let inv_kappa =
            phases.iter().map(|&p| FourierSeries::reciprocal_cosine(omega, eps, p)).collect::<Result<Vec<_>, _>>()?;
        Self::new(omega, inv_rho, inv_kappa)
    }

    pub fn len(&self) -> usize {
        self.inv_rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_rho.is_empty()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn check_positive(&self) -> Result<(), ModulationError> {
        let period = self.period();
        for (i, (r, k)) in self.inv_rho.iter().zip(&self.inv_kappa).enumerate() {
            for j in 0..1024 {
                let t = period * j as f64 / 1024.0;
                let (a, b) = (r.value(t), k.value(t));
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(ModulationError::NonpositiveLaw { resonator: i, t });
                }
            }
        }
        Ok(())
    }
}

/// Uniform modulation laws of the background medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum UniformLaw {
    /// ρ_t = 1/(1 + ε cos Ωt), κ_t = 1.
    RhoCosine,
    /// 1/ρ_t = 1/κ_t = 1 + ε cos Ωt, leading order in ε.
    RhoKappaCosine,
    /// ρ_t piecewise constant, ρ₁ on (−T/2, t₀) and ρ₂ on (t₀, T/2).
    Meissner { rho1: f64, rho2: f64, t0: f64 },
    /// κ_t = 1/(1 + ε cos Ωt), ρ_t = 1/κ_t.
    ConstantImpedance,
}

impl UniformLaw {
    pub fn name(&self) -> &'static str {
        match self {
            UniformLaw::RhoCosine => "rho-cosine",
            UniformLaw::RhoKappaCosine => "rho-kappa-cosine",
            UniformLaw::Meissner { .. } => "meissner",
            UniformLaw::ConstantImpedance => "constant-impedance",
        }
    }

    /// Series of (1/ρ_t, 1/κ_t) for the smooth laws; `None` for Meissner.
    pub fn series(&self, omega: f64, eps: f64) -> Result<Option<(FourierSeries, FourierSeries)>, ModulationError> {
        Ok(match self {
            UniformLaw::RhoCosine => {
                Some((FourierSeries::cosine(omega, eps, 0.0)?, FourierSeries::constant(omega, 1.0)))
            }
            UniformLaw::RhoKappaCosine => {
                Some((FourierSeries::cosine(omega, eps, 0.0)?, FourierSeries::cosine(omega, eps, 0.0)?))
            }
            UniformLaw::ConstantImpedance => {
                Some((FourierSeries::reciprocal_cosine(omega, eps, 0.0)?, FourierSeries::cosine(omega, eps, 0.0)?))
            }
            UniformLaw::Meissner { .. } => None,
        })
    }

    /// κ̃ = (1/T)∫κ_t dt for the constant-impedance law.
    pub fn mean_kappa(eps: f64) -> f64 {
        1.0 / (1.0 - eps * eps).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_matches() {
        let s = FourierSeries::reciprocal_cosine(0.3, 0.6, 0.4).unwrap();
        for k in 0..20 {
            let t = k as f64 * 0.7;
            let want = 1.0 / (1.0 + 0.6 * (0.3 * t + 0.4).cos());
            assert!((s.value(t) - want).abs() < 1e-15);
        }
        assert!((s.mean() - UniformLaw::mean_kappa(0.6)).abs() < 1e-15);
    }

    #[test]
    fn derivatives() {
        let s = FourierSeries::cosine(0.5, 0.3, 1.0).unwrap();
        let (v, d1, d2) = s.eval(0.8);
        let x: f64 = 0.5 * 0.8 + 1.0;
        assert!((v - (1.0 + 0.3 * x.cos())).abs() < 1e-15);
        assert!((d1 + 0.15 * x.sin()).abs() < 1e-15);
        assert!((d2 + 0.075 * x.cos()).abs() < 1e-15);
    }

    #[test]
    fn sampled_series() {
        let s = FourierSeries::from_samples(1.0, 40, |t| 1.0 / (1.0 + 0.3 * t.cos())).unwrap();
        let r = FourierSeries::reciprocal_cosine(1.0, 0.3, 0.0).unwrap();
        for k in 0..10 {
            assert!((s.value(k as f64) - r.value(k as f64)).abs() < 1e-14);
        }
    }

    #[test]
    fn amplitude_range() {
        assert_eq!(FourierSeries::cosine(1.0, 1.0, 0.0), Err(ModulationError::AmplitudeOutOfRange(1.0)));
    }
}
