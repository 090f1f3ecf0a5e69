//! Band structures along Brillouin paths for the static, uniformly modulated
//! and resonator-modulated regimes.

mod detect;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use detect::{
    detect_dirac, detect_exceptional_points, detect_kgap, ranked_bands, DegeneracyKind, DegeneracyReport, DiracSettings, Location,
    Metrics,
};

use crate::capacitance::{
    capacitance_matrix, static_bands, static_frequencies, CapacitanceError, CapacitanceMatrix, Material,
    MultipoleSettings, ResonatorArray,
};
use crate::hill::{
    floquet_exponents, hill_monodromy, meissner_exponents, resonator_hill_matrix, resonator_hill_system,
    spectrum_of, uniform_hill_system, FloquetSpectrum, HillError,
};
use crate::lattice::{fold_quasifrequency, BrillouinPath, LatticeError, LatticeSpec, PathSample, Vec2};
use crate::linalg::{frobenius, CMatrix};
use crate::mathieu::{mathieu_char_exponent, mathieu_map_rho, mathieu_map_rho_kappa, MathieuMethod};
use crate::modulation::{ModulationError, ModulationProfile, UniformLaw};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BandError {
    #[error(transparent)]
    Capacitance(#[from] CapacitanceError),
    #[error(transparent)]
    Hill(#[from] HillError),
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("capacitance matrix is not symmetric (relative defect {0:e})")]
    NonSymmetricCapacitance(f64),
    #[error("window of {window} samples does not fit around sample {index} ({available_left} left, {available_right} right)")]
    WindowOutOfRange { index: usize, window: usize, available_left: usize, available_right: usize },
    #[error("no sample labelled {0} on the path")]
    UnknownPoint(String),
    #[error("band {band} out of range (sample has {count})")]
    BandOutOfRange { band: usize, count: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Static,
    Uniform,
    Resonator,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Static => "static",
            Regime::Uniform => "uniform",
            Regime::Resonator => "resonator",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub multipole: MultipoleSettings,
    pub ode_tolerance: f64,
    pub mathieu_method: MathieuMethod,
    /// |Im ω| above this counts as complex.
    pub im_tol: f64,
    /// Bisection steps used to bracket each real↔complex transition of a
    /// resonator sweep; 0 disables refinement.
    pub ep_refinement_steps: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            multipole: MultipoleSettings::default(),
            ode_tolerance: 1e-10,
            mathieu_method: MathieuMethod::HillDeterminant,
            im_tol: 1e-6,
            ep_refinement_steps: 40,
        }
    }
}

/// One path sample with its folded quasifrequencies in band order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSample {
    pub path_parameter: f64,
    pub alpha: [f64; 2],
    pub label: Option<String>,
    pub omegas: Vec<Complex64>,
    /// Eigenvector condition of the monodromy (resonator regime only).
    pub ep_condition: Option<f64>,
    /// Refine self-check of the capacitance solve.
    pub capacitance_error: f64,
    /// |det W − 1| (resonator regime only).
    pub det_defect: Option<f64>,
    /// Inserted by transition refinement rather than taken from the path.
    pub refined: bool,
}

impl BandSample {
    pub fn complex_count(&self, im_tol: f64) -> usize {
        self.omegas.iter().filter(|w| w.im.abs() > im_tol).count()
    }

    pub fn max_imag(&self) -> f64 {
        self.omegas.iter().map(|w| w.im.abs()).fold(0.0, f64::max)
    }
}

/// Adjacent samples whose best matching exceeded Ω/4; the later sample keeps
/// its raw ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityMatchFailure {
    pub sample: usize,
    pub distance: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: Option<String>,
    pub multipole_order: usize,
    pub lattice_sum_radius: f64,
    pub ode_tolerance: Option<f64>,
    pub max_capacitance_error: f64,
    pub max_det_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub regime: Regime,
    /// Modulation (or folding) frequency; `None` for unfolded static bands.
    pub omega: Option<f64>,
    pub samples: Vec<BandSample>,
    pub continuity_failures: Vec<ContinuityMatchFailure>,
    pub provenance: Provenance,
}

impl BandStructure {
    pub fn band_count(&self) -> usize {
        self.samples.first().map_or(0, |s| s.omegas.len())
    }

    pub fn max_imag(&self) -> f64 {
        self.samples.iter().map(BandSample::max_imag).fold(0.0, f64::max)
    }

    /// Index of the first sample whose label starts with `name` ("Γ" also
    /// matches "Γ(offset)").
    pub fn find_label(&self, name: &str) -> Option<usize> {
        let name = match name {
            "G" | "Gamma" | "gamma" => "Γ",
            n => n,
        };
        self.samples.iter().position(|s| s.label.as_deref().is_some_and(|l| l == name || l.starts_with(&format!("{name}("))))
    }
}

fn capacitances(
    array: &ResonatorArray,
    spec: &LatticeSpec,
    alphas: &[Vec2],
    settings: &MultipoleSettings,
) -> Result<Vec<CapacitanceMatrix>, BandError> {
    array.check_disjoint(spec)?;
    alphas
        .par_iter()
        .map(|&a| capacitance_matrix(array, spec, a, settings).map_err(BandError::from))
        .collect()
}

fn sample_from(p: &PathSample, omegas: Vec<Complex64>, c: &CapacitanceMatrix) -> BandSample {
    BandSample {
        path_parameter: p.path_parameter,
        alpha: p.alpha,
        label: p.label.clone(),
        omegas,
        ep_condition: None,
        capacitance_error: c.diagnostics.error_estimate,
        det_defect: None,
        refined: false,
    }
}

fn provenance(samples: &[BandSample], settings: &SweepSettings, ode: bool) -> Provenance {
    Provenance {
        config_hash: None,
        multipole_order: settings.multipole.multipole_order,
        lattice_sum_radius: settings.multipole.lattice_sum_radius,
        ode_tolerance: ode.then_some(settings.ode_tolerance),
        max_capacitance_error: samples.iter().map(|s| s.capacitance_error).fold(0.0, f64::max),
        max_det_defect: ode.then(|| samples.iter().filter_map(|s| s.det_defect).fold(0.0, f64::max)),
    }
}

fn alphas(path: &BrillouinPath) -> Vec<Vec2> {
    path.samples().iter().map(PathSample::alpha).collect()
}

/// Leading-order static bands ω_{s,i}^α, optionally folded by `fold`.
pub fn sweep_static(
    array: &ResonatorArray,
    spec: &LatticeSpec,
    path: &BrillouinPath,
    settings: &SweepSettings,
    fold: Option<f64>,
) -> Result<BandStructure, BandError> {
    if let Some(o) = fold {
        if !(o > 0.0 && o.is_finite()) {
            return Err(ModulationError::NonpositiveOmega(o).into());
        }
    }
    let caps = capacitances(array, spec, &alphas(path), &settings.multipole)?;
    let mut samples = Vec::with_capacity(caps.len());
    for (p, c) in path.samples().iter().zip(&caps) {
        let w = static_bands(c, array)?;
        let omegas = w
            .iter()
            .map(|&x| {
                let z = Complex64::new(x, 0.0);
                fold.map_or(z, |o| fold_quasifrequency(z, o))
            })
            .collect();
        samples.push(sample_from(p, omegas, c));
    }
    let provenance = provenance(&samples, settings, false);
    Ok(BandStructure { regime: Regime::Static, omega: fold, samples, continuity_failures: Vec::new(), provenance })
}

/// Folded exponent pair ±ω of a uniformly modulated band with static
/// frequency ω_s.
pub fn uniform_exponents(
    omega_s: f64,
    law: &UniformLaw,
    omega: f64,
    eps: f64,
    method: MathieuMethod,
) -> Result<[Complex64; 2], BandError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(ModulationError::NonpositiveOmega(omega).into());
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(ModulationError::AmplitudeOutOfRange(eps).into());
    }
    let w = match law {
        UniformLaw::RhoCosine | UniformLaw::RhoKappaCosine => {
            let p = if matches!(law, UniformLaw::RhoCosine) {
                mathieu_map_rho(omega_s, omega, eps)
            } else {
                mathieu_map_rho_kappa(omega_s, omega, eps)
            };
            mathieu_char_exponent(p, method)? * (omega / 2.0)
        }
        UniformLaw::ConstantImpedance => Complex64::new(omega_s * UniformLaw::mean_kappa(eps), 0.0),
        UniformLaw::Meissner { rho1, rho2, t0 } => {
            return Ok(meissner_exponents(omega_s, *rho1, *rho2, *t0, 2.0 * PI / omega)?);
        }
    };
    let mut out = [fold_quasifrequency(w, omega), fold_quasifrequency(-w, omega)];
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Uniform modulation of the whole medium: each static band is carried
/// through its scalar Hill equation.
pub fn sweep_uniform(
    array: &ResonatorArray,
    spec: &LatticeSpec,
    path: &BrillouinPath,
    law: &UniformLaw,
    omega: f64,
    eps: f64,
    settings: &SweepSettings,
) -> Result<BandStructure, BandError> {
    uniform_exponents(0.0, law, omega, eps, settings.mathieu_method)?;
    let caps = capacitances(array, spec, &alphas(path), &settings.multipole)?;
    let samples = path
        .samples()
        .par_iter()
        .zip(caps.par_iter())
        .map(|(p, c)| {
            let mut omegas = Vec::with_capacity(2 * c.len());
            for w in static_bands(c, array)? {
                omegas.extend(uniform_exponents(w, law, omega, eps, settings.mathieu_method)?);
            }
            Ok(sample_from(p, omegas, c))
        })
        .collect::<Result<Vec<_>, BandError>>()?;
    let mut bs = BandStructure {
        regime: Regime::Uniform,
        omega: Some(omega),
        provenance: provenance(&samples, settings, false),
        samples,
        continuity_failures: Vec::new(),
    };
    match_bands(&mut bs);
    Ok(bs)
}

fn resonator_sample(
    array: &ResonatorArray,
    profile: &ModulationProfile,
    c: &CapacitanceMatrix,
    p: &PathSample,
    tol: f64,
) -> Result<BandSample, BandError> {
    let sys = resonator_hill_matrix(&c.entries, profile, array)?;
    let mono = hill_monodromy(&sys, tol)?;
    let spec = floquet_exponents(&mono, profile.omega);
    let mut s = sample_from(p, spec.exponents, c);
    s.ep_condition = Some(spec.ep_condition);
    s.det_defect = Some((mono.determinant() - 1.0).norm());
    Ok(s)
}

/// Modulation inside the resonators: C^α → M(t) → monodromy → folded
/// Floquet exponents, with transition refinement and continuity matching.
pub fn sweep_resonator_modulated(
    array: &ResonatorArray,
    spec: &LatticeSpec,
    path: &BrillouinPath,
    profile: &ModulationProfile,
    settings: &SweepSettings,
) -> Result<BandStructure, BandError> {
    if profile.len() != array.len() {
        return Err(BandError::Invalid(format!(
            "profile has {} resonators, array has {}",
            profile.len(),
            array.len()
        )));
    }
    let caps = capacitances(array, spec, &alphas(path), &settings.multipole)?;
    let tol = settings.ode_tolerance;
    let mut samples = path
        .samples()
        .par_iter()
        .zip(caps.par_iter())
        .map(|(p, c)| resonator_sample(array, profile, c, p, tol))
        .collect::<Result<Vec<_>, BandError>>()?;

    if settings.ep_refinement_steps > 0 {
        let eval = |p: &PathSample| -> Result<BandSample, BandError> {
            let c = capacitance_matrix(array, spec, p.alpha(), &settings.multipole)?;
            resonator_sample(array, profile, &c, p, tol)
        };
        let guard = 0.5 * path.gamma_offset;
        let brackets = (0..samples.len().saturating_sub(1))
            .into_par_iter()
            .map(|i| refine_transition(&samples[i], &samples[i + 1], settings, spec, guard, &eval))
            .collect::<Result<Vec<_>, BandError>>()?;
        let mut merged = Vec::with_capacity(samples.len() + 2 * brackets.len());
        for (i, s) in samples.drain(..).enumerate() {
            merged.push(s);
            if let Some(extra) = brackets.get(i) {
                merged.extend(extra.iter().cloned());
            }
        }
        samples = merged;
    }

    let mut bs = BandStructure {
        regime: Regime::Resonator,
        omega: Some(profile.omega),
        provenance: provenance(&samples, settings, true),
        samples,
        continuity_failures: Vec::new(),
    };
    match_bands(&mut bs);
    Ok(bs)
}

// Bisects between two samples whose complex-exponent counts differ and
// returns the final bracketing pair.
fn refine_transition<F>(
    a: &BandSample,
    b: &BandSample,
    settings: &SweepSettings,
    spec: &LatticeSpec,
    guard: f64,
    eval: &F,
) -> Result<Vec<BandSample>, BandError>
where
    F: Fn(&PathSample) -> Result<BandSample, BandError>,
{
    let tol = settings.im_tol;
    let (ca, cb) = (a.complex_count(tol), b.complex_count(tol));
    if ca == cb {
        return Ok(Vec::new());
    }
    let at = |s: f64| {
        let t = (s - a.path_parameter) / (b.path_parameter - a.path_parameter);
        let alpha = Vec2::new(a.alpha[0], a.alpha[1]) * (1.0 - t) + Vec2::new(b.alpha[0], b.alpha[1]) * t;
        PathSample { path_parameter: s, alpha: [alpha.x, alpha.y], label: None }
    };
    let (mut lo, mut hi) = (a.path_parameter, b.path_parameter);
    let mut left: Option<BandSample> = None;
    let mut right: Option<BandSample> = None;
    let scale = a.path_parameter.abs().max(b.path_parameter.abs()).max(1.0);
    for _ in 0..settings.ep_refinement_steps {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 4.0 * f64::EPSILON * scale {
            break;
        }
        let p = at(mid);
        if spec.dual_distance(p.alpha()) < guard {
            break;
        }
        let mut s = eval(&p)?;
        s.refined = true;
        if s.complex_count(tol) == ca {
            lo = mid;
            left = Some(s);
        } else {
            hi = mid;
            right = Some(s);
        }
    }
    Ok(left.into_iter().chain(right).collect())
}

fn wrapped_distance(a: Complex64, b: Complex64, omega: Option<f64>) -> f64 {
    let mut d = a - b;
    if let Some(o) = omega {
        d.re -= o * (d.re / o).round();
    }
    d.norm()
}

/// Reorders each sample's exponents to continue the bands of the previous
/// sample (greedy nearest pairs, folding-aware). Samples whose best match
/// exceeds Ω/4 keep their raw order and are recorded.
pub fn match_bands(bs: &mut BandStructure) {
    let omega = bs.omega;
    let limit = omega.map_or(f64::INFINITY, |o| o / 4.0);
    bs.continuity_failures.clear();
    for i in 1..bs.samples.len() {
        let prev = bs.samples[i - 1].omegas.clone();
        let cur = &bs.samples[i].omegas;
        let n = prev.len();
        if cur.len() != n {
            continue;
        }
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
        for (j, p) in prev.iter().enumerate() {
            for (k, c) in cur.iter().enumerate() {
                pairs.push((wrapped_distance(*p, *c, omega), j, k));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut slot = vec![usize::MAX; n];
        let mut used = vec![false; n];
        let mut worst: f64 = 0.0;
        for (d, j, k) in pairs {
            if slot[j] == usize::MAX && !used[k] {
                slot[j] = k;
                used[k] = true;
                worst = worst.max(d);
            }
        }
        if worst > limit {
            bs.continuity_failures.push(ContinuityMatchFailure { sample: i, distance: worst, limit });
            continue;
        }
        let reordered: Vec<Complex64> = slot.iter().map(|&k| cur[k]).collect();
        bs.samples[i].omegas = reordered;
    }
}

/// Modulation for a finite array.
#[derive(Debug, Clone, PartialEq)]
pub enum FiniteModulation {
    /// Modulation inside the resonators.
    Resonator(ModulationProfile),
    /// Uniform modulation of the medium, integrated through the full scalar
    /// Hill equation of every static band.
    Uniform { law: UniformLaw, omega: f64, eps: f64 },
}

/// Floquet spectrum of a finite array from a supplied capacitance matrix.
pub fn sweep_finite(
    c: &CMatrix,
    modulation: &FiniteModulation,
    volumes: &[f64],
    material: &Material,
    ode_tolerance: f64,
) -> Result<FloquetSpectrum, BandError> {
    material.validate()?;
    let n = c.nrows();
    if n == 0 || c.ncols() != n || volumes.len() != n {
        return Err(BandError::Invalid(format!(
            "capacitance is {}x{} with {} volumes",
            c.nrows(),
            c.ncols(),
            volumes.len()
        )));
    }
    let defect = frobenius(&(c - c.adjoint())) / frobenius(c).max(f64::MIN_POSITIVE);
    if defect > 1e-8 {
        return Err(BandError::NonSymmetricCapacitance(defect));
    }
    match modulation {
        FiniteModulation::Resonator(profile) => {
            let sys = resonator_hill_system(c, profile, volumes, material.coupling())?;
            let mono = hill_monodromy(&sys, ode_tolerance)?;
            Ok(floquet_exponents(&mono, profile.omega))
        }
        FiniteModulation::Uniform { law, omega, eps } => {
            let v0 = volumes[0];
            if volumes.iter().any(|v| (v - v0).abs() > 1e-12 * v0) {
                return Err(CapacitanceError::UnequalVolumes(volumes.to_vec()).into());
            }
            let herm = (c + c.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = crate::linalg::hermitian_eigenvalues(&herm);
            let period = 2.0 * PI / omega;
            let mut w = CMatrix::zeros(2 * n, 2 * n);
            for (i, ws) in static_frequencies(&eig, v0, material).into_iter().enumerate() {
                let block = match law.series(*omega, *eps)? {
                    Some((inv_rho, inv_kappa)) => {
                        let sys = uniform_hill_system(inv_rho, inv_kappa, ws)?;
                        hill_monodromy(&sys, ode_tolerance)?.w
                    }
                    None => {
                        let UniformLaw::Meissner { rho1, rho2, t0 } = *law else { unreachable!() };
                        let t = crate::hill::meissner_transfer(ws, rho1, rho2, t0, period);
                        CMatrix::from_fn(2, 2, |r, k| Complex64::new(t[r][k], 0.0))
                    }
                };
                w.view_mut((2 * i, 2 * i), (2, 2)).copy_from(&block);
            }
            Ok(spectrum_of(&w, period, *omega))
        }
    }
}
