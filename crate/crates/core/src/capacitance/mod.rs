//! Quasiperiodic capacitance matrices of circular resonator arrays.

mod green;
mod multipole;
mod oracle;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeSpec, Vec2};
use crate::linalg::{frobenius, hermitian_eigenvalues, CMatrix};

pub use green::{check_alpha, green_lattice_sum, LatticeGreen, SpectralTerm};
pub use multipole::{single_layer_matrix, solve_capacitance};
pub use oracle::{nystrom_capacitance, OracleSettings};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacitanceError {
    #[error("quasimomentum {alpha:?} lies on the dual lattice (distance {distance:e})")]
    AlphaOnDualLattice { alpha: [f64; 2], distance: f64 },
    #[error("truncation not converged: refined estimate {estimate:e} exceeds gate {gate:e}")]
    TruncationNotConverged { estimate: f64, gate: f64 },
    #[error("single layer operator is singular (condition number {condition:e})")]
    SingularOperator { condition: f64 },
    #[error("resonators must share one volume (radii {0:?})")]
    UnequalVolumes(Vec<f64>),
    #[error("radius must be positive, got {0}")]
    NonpositiveRadius(f64),
    #[error("resonators {i} and {j} overlap (shift {shift:?})")]
    OverlappingResonators { i: usize, j: usize, shift: [i64; 2] },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Material constants. Only δ and v_r = √(κ_r/ρ_r) enter the leading-order
/// formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub delta: f64,
    pub kappa_r: f64,
    pub rho_r: f64,
    pub kappa0: f64,
    pub rho0: f64,
}

impl Default for Material {
    fn default() -> Self {
        Material { delta: 1.0 / 9000.0, kappa_r: 1.0, rho_r: 1.0, kappa0: 1.0, rho0: 1.0 }
    }
}

impl Material {
    pub fn v_r(&self) -> f64 {
        (self.kappa_r / self.rho_r).sqrt()
    }

    pub fn v0(&self) -> f64 {
        (self.kappa0 / self.rho0).sqrt()
    }

    /// δκ_r/ρ_r = δ v_r².
    pub fn coupling(&self) -> f64 {
        self.delta * self.kappa_r / self.rho_r
    }

    pub fn validate(&self) -> Result<(), CapacitanceError> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !(ok(self.delta) && ok(self.kappa_r) && ok(self.rho_r) && ok(self.kappa0) && ok(self.rho0)) {
            return Err(CapacitanceError::Invalid(format!("material constants must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Circular resonators in one unit cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonatorArray {
    pub centers: Vec<Vec2>,
    pub radii: Vec<f64>,
    pub material: Material,
}

impl ResonatorArray {
    pub fn new(centers: Vec<Vec2>, radii: Vec<f64>, material: Material) -> Result<Self, CapacitanceError> {
        if centers.is_empty() || centers.len() != radii.len() {
            return Err(CapacitanceError::Invalid(format!(
                "{} centers and {} radii",
                centers.len(),
                radii.len()
            )));
        }
        for &r in &radii {
            if !(r > 0.0 && r.is_finite()) {
                return Err(CapacitanceError::NonpositiveRadius(r));
            }
        }
        material.validate()?;
        Ok(ResonatorArray { centers, radii, material })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn volumes(&self) -> Vec<f64> {
        self.radii.iter().map(|r| PI * r * r).collect()
    }

    /// Checks that no disk meets another one or a lattice translate.
    pub fn check_disjoint(&self, spec: &LatticeSpec) -> Result<(), CapacitanceError> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for a in -1..=1i64 {
                    for b in -1..=1i64 {
                        if i == j && a == 0 && b == 0 {
                            continue;
                        }
                        let d = (self.centers[i] + spec.point(a, b) - self.centers[j]).norm();
                        if d <= self.radii[i] + self.radii[j] {
                            return Err(CapacitanceError::OverlappingResonators { i, j, shift: [a, b] });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipoleSettings {
    /// Highest angular harmonic M_p kept on each circle.
    pub multipole_order: usize,
    /// Q: spectral cutoff ‖α+q‖ ≤ Q‖α₁‖.
    pub lattice_sum_radius: f64,
    /// Truncation multiplier of the self-check run.
    pub refine_factor: f64,
    /// Largest accepted self-check estimate.
    pub truncation_gate: f64,
}

impl Default for MultipoleSettings {
    fn default() -> Self {
        MultipoleSettings { multipole_order: 16, lattice_sum_radius: 8.0, refine_factor: 1.5, truncation_gate: 1e-5 }
    }
}

impl MultipoleSettings {
    pub fn validate(&self) -> Result<(), CapacitanceError> {
        if self.multipole_order < 2 {
            return Err(CapacitanceError::Invalid("multipole_order must be at least 2".into()));
        }
        if !(self.lattice_sum_radius >= 4.0 && self.lattice_sum_radius.is_finite()) {
            return Err(CapacitanceError::Invalid("lattice_sum_radius must be at least 4".into()));
        }
        if !(self.refine_factor > 1.0 && self.refine_factor.is_finite()) {
            return Err(CapacitanceError::Invalid("refine_factor must exceed 1".into()));
        }
        Ok(())
    }

    pub fn refined(&self) -> Self {
        let f = self.refine_factor;
        MultipoleSettings {
            multipole_order: ((self.multipole_order as f64) * f).ceil() as usize,
            lattice_sum_radius: self.lattice_sum_radius * f,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitanceDiagnostics {
    pub multipole_order: usize,
    pub lattice_sum_radius: f64,
    pub spectral_terms: usize,
    pub ewald_eta: f64,
    /// ‖C − C_refined‖_F / ‖C_refined‖_F
    pub error_estimate: f64,
    pub operator_condition: f64,
}

#[derive(Debug, Clone)]
pub struct CapacitanceMatrix {
    pub alpha: Vec2,
    pub entries: CMatrix,
    pub diagnostics: CapacitanceDiagnostics,
}

impl CapacitanceMatrix {
    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.nrows() == 0
    }

    /// Ascending eigenvalues (of the Hermitian part).
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn hermitian_defect(&self) -> f64 {
        frobenius(&(&self.entries - self.entries.adjoint())) / frobenius(&self.entries)
    }
}

/// C^α from the multipole discretisation, with the refine self-check.
pub fn capacitance_matrix(
    array: &ResonatorArray,
    spec: &LatticeSpec,
    alpha: Vec2,
    settings: &MultipoleSettings,
) -> Result<CapacitanceMatrix, CapacitanceError> {
    settings.validate()?;
    array.check_disjoint(spec)?;
    let (c, mut diag) = solve_capacitance(array, spec, alpha, settings)?;
    let (cr, _) = solve_capacitance(array, spec, alpha, &settings.refined())?;
    diag.error_estimate = frobenius(&(&c - &cr)) / frobenius(&cr);
    if !(diag.error_estimate <= settings.truncation_gate) {
        return Err(CapacitanceError::TruncationNotConverged {
            estimate: diag.error_estimate,
            gate: settings.truncation_gate,
        });
    }
    Ok(CapacitanceMatrix { alpha, entries: c, diagnostics: diag })
}

fn equal_volume(array: &ResonatorArray) -> Result<f64, CapacitanceError> {
    let r0 = array.radii[0];
    if array.radii.iter().any(|r| (r - r0).abs() > 1e-12 * r0) {
        return Err(CapacitanceError::UnequalVolumes(array.radii.clone()));
    }
    Ok(PI * r0 * r0)
}

/// Leading-order static frequencies ω_i = √(δλ_i/|D₁|)·v_r, ascending.
pub fn static_bands(c: &CapacitanceMatrix, array: &ResonatorArray) -> Result<Vec<f64>, CapacitanceError> {
    let vol = equal_volume(array)?;
    Ok(static_frequencies(&c.eigenvalues(), vol, &array.material))
}

pub fn static_frequencies(eigenvalues: &[f64], volume: f64, material: &Material) -> Vec<f64> {
    eigenvalues
        .iter()
        .map(|&l| (material.delta * l.max(0.0) / volume).sqrt() * material.v_r())
        .collect()
}

/// Capacitance 4πR of an isolated sphere.
pub fn finite_sphere_capacitance(r: f64) -> Result<f64, CapacitanceError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(CapacitanceError::NonpositiveRadius(r));
    }
    Ok(4.0 * PI * r)
}
