//! Quasiperiodic Green's function of the Laplacian at k = 0 by Ewald
//! splitting:
//!
//! G^α(r) = −(1/|Y|) Σ_q e^{ik·r} e^{−|k|²/4η²}/|k|² − (1/4π) Σ_ℓ e^{iα·ℓ} E₁(η²|r−ℓ|²),
//!
//! with k = α + q. Both sums are cut at the same Gaussian level e^{−β},
//! β = (Q‖α₁‖)²/(4η²).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{CapacitanceError, MultipoleSettings};
use crate::lattice::{LatticeSpec, Vec2};
use crate::special::{ein, exp_int_e1, EULER_GAMMA};

#[derive(Debug, Clone)]
pub struct SpectralTerm {
    pub k: Vec2,
    /// e^{−|k|²/4η²}/|k|²
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct LatticeGreen {
    spec: LatticeSpec,
    alpha: Vec2,
    eta: f64,
    /// real-space cutoff radius for the E₁ images
    rmax: f64,
    terms: Vec<SpectralTerm>,
}

pub fn check_alpha(spec: &LatticeSpec, alpha: Vec2) -> Result<(), CapacitanceError> {
    let d = spec.dual_distance(alpha);
    if d < 1e-10 || !d.is_finite() {
        return Err(CapacitanceError::AlphaOnDualLattice { alpha: [alpha.x, alpha.y], distance: d });
    }
    Ok(())
}

impl LatticeGreen {
    pub fn new(spec: &LatticeSpec, alpha: Vec2, q: f64) -> Result<Self, CapacitanceError> {
        check_alpha(spec, alpha)?;
        let area = spec.cell_area();
        let eta = 2.0 * (PI / area).sqrt();
        let kmax = q * spec.dual()[0].norm();
        let beta = kmax * kmax / (4.0 * eta * eta);
        let rmax = (beta + 5.0).sqrt() / eta;

        let l = spec.primitive();
        let reach = kmax + alpha.norm();
        let n1 = (reach * l[0].norm() / (2.0 * PI)).ceil() as i64 + 1;
        let n2 = (reach * l[1].norm() / (2.0 * PI)).ceil() as i64 + 1;
        let mut terms = Vec::new();
        for a in -n1..=n1 {
            for b in -n2..=n2 {
                let k = alpha + spec.dual_point(a, b);
                let kk = k.norm_squared();
                if kk.sqrt() <= kmax {
                    terms.push(SpectralTerm { k, weight: (-kk / (4.0 * eta * eta)).exp() / kk });
                }
            }
        }
        Ok(LatticeGreen { spec: spec.clone(), alpha, eta, rmax, terms })
    }

    pub fn from_settings(
        spec: &LatticeSpec,
        alpha: Vec2,
        settings: &MultipoleSettings,
    ) -> Result<Self, CapacitanceError> {
        Self::new(spec, alpha, settings.lattice_sum_radius)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn rmax(&self) -> f64 {
        self.rmax
    }

    pub fn alpha(&self) -> Vec2 {
        self.alpha
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn spectral_terms(&self) -> &[SpectralTerm] {
        &self.terms
    }

    /// Lattice vectors ℓ (with Bloch phases e^{iα·ℓ}) whose translate lies
    /// within rmax + `extra` of `r`.
    pub fn images(&self, r: Vec2, extra: f64) -> Vec<(Vec2, Complex64)> {
        let reach = self.rmax + extra;
        let d = self.spec.dual();
        let c1 = r.dot(&d[0]) / (2.0 * PI);
        let c2 = r.dot(&d[1]) / (2.0 * PI);
        let s1 = reach * d[0].norm() / (2.0 * PI) + 1.0;
        let s2 = reach * d[1].norm() / (2.0 * PI) + 1.0;
        let mut out = Vec::new();
        for a in (c1 - s1).floor() as i64..=(c1 + s1).ceil() as i64 {
            for b in (c2 - s2).floor() as i64..=(c2 + s2).ceil() as i64 {
                let l = self.spec.point(a, b);
                if (r - l).norm() <= reach {
                    out.push((l, Complex64::from_polar(1.0, self.alpha.dot(&l))));
                }
            }
        }
        out
    }

    pub fn spectral(&self, r: Vec2) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            s += Complex64::from_polar(t.weight, t.k.dot(&r));
        }
        -s / self.spec.cell_area()
    }

    fn image_sum(&self, r: Vec2, skip_origin: bool) -> Complex64 {
        let e2 = self.eta * self.eta;
        let mut s = Complex64::new(0.0, 0.0);
        for (l, ph) in self.images(r, 0.0) {
            if skip_origin && l.norm_squared() == 0.0 {
                continue;
            }
            let rho2 = (r - l).norm_squared();
            s += ph * exp_int_e1(e2 * rho2);
        }
        -s / (4.0 * PI)
    }

    /// Real-space (image) part of G^α(r).
    pub fn real_space(&self, r: Vec2) -> Complex64 {
        self.image_sum(r, false)
    }

    /// Real-space part minus ln|r|/(2π); smooth near r = 0.
    pub fn real_space_regular(&self, r: Vec2) -> Complex64 {
        let e2 = self.eta * self.eta;
        let z = e2 * r.norm_squared();
        let local = -(ein(z) - EULER_GAMMA - e2.ln()) / (4.0 * PI);
        self.image_sum(r, true) + local
    }

    /// G^α(r); r must not be a lattice point.
    pub fn eval(&self, r: Vec2) -> Complex64 {
        self.spectral(r) + self.real_space(r)
    }

    /// G^α(r) − ln|r|/(2π), smooth near r = 0 (r = 0 allowed).
    pub fn regular(&self, r: Vec2) -> Complex64 {
        self.spectral(r) + self.real_space_regular(r)
    }
}

/// Evaluates G^α(r) at k = 0.
pub fn green_lattice_sum(
    spec: &LatticeSpec,
    alpha: Vec2,
    r: Vec2,
    settings: &MultipoleSettings,
) -> Result<Complex64, CapacitanceError> {
    Ok(LatticeGreen::from_settings(spec, alpha, settings)?.eval(r))
}
