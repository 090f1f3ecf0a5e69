//! Hill systems Ψ'' + M(t)Ψ = 0, their monodromy matrices and Floquet
//! exponents.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacitance::ResonatorArray;
use crate::lattice::fold_quasifrequency;
use crate::linalg::{determinant, eigen, eigenvector_condition, CMatrix};
use crate::modulation::{kappa_correction, FourierSeries, ModulationError, ModulationProfile};
use crate::ode::{integrate, OdeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HillError {
    #[error("integration failed: {0}")]
    IntegrationFailure(#[from] OdeError),
    #[error("ode tolerance {0:e} outside [1e-13, 1e-6]")]
    ToleranceOutOfRange(f64),
    #[error("κ_t is not positive at t = {0}")]
    NonpositiveKappa(f64),
    #[error("material law of resonator {resonator} is not positive at t = {t}")]
    NonpositiveParameter { resonator: usize, t: f64 },
    #[error("Hill determinant did not converge (last change {change:e} at order {order})")]
    DeterminantNotConverged { change: f64, order: usize },
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    #[error("invalid Hill system: {0}")]
    Invalid(String),
}

pub type CoefficientFn = Arc<dyn Fn(f64, &mut CMatrix) + Send + Sync>;

/// N-dimensional T-periodic Hill system.
#[derive(Clone)]
pub struct HillSystem {
    dim: usize,
    period: f64,
    coefficient: CoefficientFn,
}

impl std::fmt::Debug for HillSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HillSystem").field("dim", &self.dim).field("period", &self.period).finish()
    }
}

impl HillSystem {
    pub fn new(dim: usize, period: f64, coefficient: CoefficientFn) -> Result<Self, HillError> {
        if dim == 0 {
            return Err(HillError::Invalid("dimension must be positive".into()));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(HillError::Invalid(format!("period must be positive, got {period}")));
        }
        Ok(HillSystem { dim, period, coefficient })
    }

    pub fn constant(m: CMatrix, period: f64) -> Result<Self, HillError> {
        if m.nrows() != m.ncols() {
            return Err(HillError::Invalid("coefficient must be square".into()));
        }
        let dim = m.nrows();
        Self::new(dim, period, Arc::new(move |_, out: &mut CMatrix| out.copy_from(&m)))
    }

    /// Scalar equation y'' + f(t) y = 0.
    pub fn scalar<F: Fn(f64) -> f64 + Send + Sync + 'static>(period: f64, f: F) -> Result<Self, HillError> {
        Self::new(1, period, Arc::new(move |t, out: &mut CMatrix| out[(0, 0)] = Complex64::new(f(t), 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn eval(&self, t: f64) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        (self.coefficient)(t, &mut m);
        m
    }

    /// max ‖M(t+T) − M(t)‖ over `samples` points of one period.
    pub fn periodicity_defect(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let t = self.period * k as f64 / samples as f64;
                (self.eval(t + self.period) - self.eval(t)).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct Monodromy {
    /// [[Ψ(T)], [Ψ'(T)]] for the 2N unit initial conditions.
    pub w: CMatrix,
    pub period: f64,
    pub ode_tolerance: f64,
    pub steps: usize,
}

impl Monodromy {
    pub fn determinant(&self) -> Complex64 {
        determinant(&self.w)
    }
}

/// Integrates the 2N companion problems over one period.
pub fn hill_monodromy(system: &HillSystem, ode_tolerance: f64) -> Result<Monodromy, HillError> {
    if !(1e-13..=1e-6).contains(&ode_tolerance) {
        return Err(HillError::ToleranceOutOfRange(ode_tolerance));
    }
    let n = system.dim;
    let n2 = 2 * n;
    // column-major state: column j holds (ψ_j, ψ_j')
    let mut y = vec![Complex64::new(0.0, 0.0); n2 * n2];
    for j in 0..n2 {
        y[j * n2 + j] = Complex64::new(1.0, 0.0);
    }
    let mut m = CMatrix::zeros(n, n);
    let coef = system.coefficient.clone();
    let stats = integrate(
        |t, y, dy| {
            coef(t, &mut m);
            for c in 0..n2 {
                let col = &y[c * n2..(c + 1) * n2];
                let out = &mut dy[c * n2..(c + 1) * n2];
                out[..n].copy_from_slice(&col[n..]);
                for r in 0..n {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        s += m[(r, k)] * col[k];
                    }
                    out[n + r] = -s;
                }
            }
        },
        0.0,
        system.period,
        &mut y,
        ode_tolerance,
    )?;
    Ok(Monodromy {
        w: CMatrix::from_column_slice(n2, n2, &y),
        period: system.period,
        ode_tolerance,
        steps: stats.accepted + stats.rejected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetSpectrum {
    pub omega: f64,
    /// Folded exponents, sorted by real then imaginary part.
    pub exponents: Vec<Complex64>,
    pub multipliers: Vec<Complex64>,
    /// 2-norm condition number of the eigenvector matrix (+∞ if defective).
    pub ep_condition: f64,
}

impl FloquetSpectrum {
    pub fn max_imag(&self) -> f64 {
        self.exponents.iter().map(|w| w.im.abs()).fold(0.0, f64::max)
    }
}

/// ω = log(λ)/(iT) on the principal branch, folded into [−Ω/2, Ω/2).
pub fn exponent_from_multiplier(lambda: Complex64, period: f64, omega: f64) -> Complex64 {
    let w = lambda.ln() / Complex64::new(0.0, period);
    fold_quasifrequency(w, omega)
}

pub fn floquet_exponents(mono: &Monodromy, omega: f64) -> FloquetSpectrum {
    spectrum_of(&mono.w, mono.period, omega)
}

pub fn spectrum_of(w: &CMatrix, period: f64, omega: f64) -> FloquetSpectrum {
    let e = eigen(w);
    let cond = eigenvector_condition(&e);
    let mut pairs: Vec<(Complex64, Complex64)> =
        e.values.iter().map(|&l| (exponent_from_multiplier(l, period, omega), l)).collect();
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    FloquetSpectrum {
        omega,
        exponents: pairs.iter().map(|p| p.0).collect(),
        multipliers: pairs.iter().map(|p| p.1).collect(),
        ep_condition: cond,
    }
}

fn transfer(w: f64, dt: f64) -> [[f64; 2]; 2] {
    if w == 0.0 {
        return [[1.0, dt], [0.0, 1.0]];
    }
    let (s, c) = (w * dt).sin_cos();
    [[c, s / w], [-w * s, c]]
}

fn mul2(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut r = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

/// Transfer matrix over one period of the two-level step law, starting at
/// t = −T/2.
pub fn meissner_transfer(omega_s: f64, rho1: f64, rho2: f64, t0: f64, period: f64) -> [[f64; 2]; 2] {
    let w1 = omega_s / rho1.sqrt();
    let w2 = omega_s / rho2.sqrt();
    mul2(transfer(w2, period / 2.0 - t0), transfer(w1, t0 + period / 2.0))
}

/// Folded exponent pair of the Meissner equation.
pub fn meissner_exponents(
    omega_s: f64,
    rho1: f64,
    rho2: f64,
    t0: f64,
    period: f64,
) -> Result<[Complex64; 2], HillError> {
    if !(rho1 > 0.0 && rho2 > 0.0) {
        return Err(HillError::NonpositiveParameter { resonator: 0, t: t0 });
    }
    if !(t0 > -period / 2.0 && t0 < period / 2.0) {
        return Err(HillError::Invalid(format!("switching time {t0} outside (−T/2, T/2)")));
    }
    let p = meissner_transfer(omega_s, rho1, rho2, t0, period);
    let half_trace = Complex64::new(0.5 * (p[0][0] + p[1][1]), 0.0);
    let w = half_trace.acos() / period;
    let omega = 2.0 * PI / period;
    let mut out = [fold_quasifrequency(w, omega), fold_quasifrequency(-w, omega)];
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Time law with analytic first and second derivatives.
pub trait PeriodicLaw: Send + Sync {
    /// (f, f', f'') at t.
    fn eval(&self, t: f64) -> (f64, f64, f64);
}

impl PeriodicLaw for FourierSeries {
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        FourierSeries::eval(self, t)
    }
}

/// 1/s(t) for a positive law s.
pub struct Reciprocal<L>(pub L);

impl<L: PeriodicLaw> PeriodicLaw for Reciprocal<L> {
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let (s, s1, s2) = self.0.eval(t);
        (1.0 / s, -s1 / (s * s), -s2 / (s * s) + 2.0 * s1 * s1 / (s * s * s))
    }
}

/// t ↦ ω_inst(t)² + (√κ/2)(κ'/κ^{3/2})' with the correction from analytic
/// derivatives of κ_t.
pub fn uniform_hill_coefficient<K, W>(kappa: K, omega_inst: W, period: f64) -> Result<HillSystem, HillError>
where
    K: PeriodicLaw + 'static,
    W: Fn(f64) -> f64 + Send + Sync + 'static,
{
    for j in 0..1024 {
        let t = period * j as f64 / 1024.0;
        let k = kappa.eval(t).0;
        if !(k > 0.0 && k.is_finite()) {
            return Err(HillError::NonpositiveKappa(t));
        }
    }
    HillSystem::scalar(period, move |t| {
        let (k, k1, k2) = kappa.eval(t);
        let w = omega_inst(t);
        w * w + k2 / (2.0 * k) - 0.75 * k1 * k1 / (k * k)
    })
}

/// Scalar Hill system of a uniform modulation given the series of 1/ρ_t and
/// 1/κ_t and a static frequency ω_s.
pub fn uniform_hill_system(
    inv_rho: FourierSeries,
    inv_kappa: FourierSeries,
    omega_s: f64,
) -> Result<HillSystem, HillError> {
    let period = 2.0 * PI / inv_rho.omega;
    let p = inv_rho.clone();
    let s = inv_kappa.clone();
    // ω_inst² = ω_s² κ_t/ρ_t = ω_s² p/s
    let inst = move |t: f64| omega_s * (p.value(t) / s.value(t)).max(0.0).sqrt();
    uniform_hill_coefficient(Reciprocal(inv_kappa), inst, period)
}

/// M(t) = δ v_r² W₁ C W₂ + W₃ for a resonator-modulated array; `c` may be a
/// quasiperiodic or a finite capacitance matrix.
pub fn resonator_hill_matrix(
    c: &CMatrix,
    profile: &ModulationProfile,
    array: &ResonatorArray,
) -> Result<HillSystem, HillError> {
    let n = c.nrows();
    if c.ncols() != n || profile.len() != n || array.len() != n {
        return Err(HillError::Invalid(format!(
            "sizes differ: C is {}x{}, profile {}, array {}",
            c.nrows(),
            c.ncols(),
            profile.len(),
            array.len()
        )));
    }
    resonator_hill_system(c, profile, &array.volumes(), array.material.coupling())
}

pub fn resonator_hill_system(
    c: &CMatrix,
    profile: &ModulationProfile,
    volumes: &[f64],
    coupling: f64,
) -> Result<HillSystem, HillError> {
    let n = c.nrows();
    if volumes.len() != n || profile.len() != n {
        return Err(HillError::Invalid("volumes and profile must match C".into()));
    }
    let period = profile.period();
    for j in 0..1024 {
        let t = period * j as f64 / 1024.0;
        for i in 0..n {
            let (a, b) = (profile.inv_rho[i].value(t), profile.inv_kappa[i].value(t));
            if !(a > 0.0 && b > 0.0) {
                return Err(HillError::NonpositiveParameter { resonator: i, t });
            }
        }
    }
    let c = c.clone();
    let profile = profile.clone();
    let vols = volumes.to_vec();
    let f = move |t: f64, out: &mut CMatrix| {
        let mut w1 = vec![0.0; n];
        let mut w2 = vec![0.0; n];
        let mut w3 = vec![0.0; n];
        for i in 0..n {
            let p = profile.inv_rho[i].value(t);
            let (s, s1, s2) = profile.inv_kappa[i].eval(t);
            let sqrt_kappa = 1.0 / s.sqrt();
            // ρ = 1/p, κ = 1/s
            w1[i] = sqrt_kappa / (p * vols[i]);
            w2[i] = sqrt_kappa * p;
            w3[i] = kappa_correction(s, s1, s2);
        }
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = c[(i, j)] * (coupling * w1[i] * w2[j]);
            }
            out[(i, i)] += w3[i];
        }
    };
    HillSystem::new(n, period, Arc::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_coefficient_closed_form() {
        let w0: f64 = 0.7;
        let t = 3.3;
        let sys = HillSystem::constant(CMatrix::from_element(1, 1, Complex64::new(w0 * w0, 0.0)), t).unwrap();
        let m = hill_monodromy(&sys, 1e-12).unwrap();
        let want = [[(w0 * t).cos(), (w0 * t).sin() / w0], [-w0 * (w0 * t).sin(), (w0 * t).cos()]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.w[(i, j)] - want[i][j]).norm() < 1e-10);
            }
        }
        assert!((m.determinant() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn multiplier_conventions() {
        let omega = 0.4;
        let period = 2.0 * PI / omega;
        assert!(exponent_from_multiplier(Complex64::new(1.0, 0.0), period, omega).norm() < 1e-16);
        let w = exponent_from_multiplier(Complex64::new(-1.0, 0.0), period, omega);
        assert!((w.re + omega / 2.0).abs() < 1e-15, "{w}");
    }

    #[test]
    fn jordan_monodromy_is_deficient() {
        let w = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        );
        let s = spectrum_of(&w, 1.0, 2.0 * PI);
        assert!(s.ep_condition.is_infinite());
    }

    #[test]
    fn meissner_equal_levels() {
        let period = 2.0 * PI / 0.2;
        let e = meissner_exponents(0.05, 2.0, 2.0, 1.0, period).unwrap();
        let w = 0.05 / 2f64.sqrt();
        assert!((e[0].re + w).abs() < 1e-12 && (e[1].re - w).abs() < 1e-12);
        let z = meissner_exponents(0.0, 2.0, 3.0, 1.0, period).unwrap();
        assert!(z[0].norm() < 1e-12 && z[1].norm() < 1e-12);
    }

    #[test]
    fn kappa_correction_finite_difference() {
        let omega = 0.3;
        let eps = 0.4;
        let kappa = Reciprocal(FourierSeries::cosine(omega, eps, 0.0).unwrap());
        let sys = uniform_hill_coefficient(kappa, |_| 0.0, 2.0 * PI / omega).unwrap();
        let k = |t: f64| 1.0 / (1.0 + eps * (omega * t).cos());
        // κ'/κ^{3/2} from the closed-form κ'
        let g = |t: f64| {
            let c = 1.0 + eps * (omega * t).cos();
            eps * omega * (omega * t).sin() / (c * c) / k(t).powf(1.5)
        };
        let h = 1e-5;
        let t0 = 0.0;
        let fd = k(t0).sqrt() / 2.0 * (g(t0 + h) - g(t0 - h)) / (2.0 * h);
        let got = sys.eval(t0)[(0, 0)].re;
        assert!((got - fd).abs() < 1e-6 * fd.abs(), "{got} vs {fd}");
    }
}
