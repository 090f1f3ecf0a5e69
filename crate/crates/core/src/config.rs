//! TOML run configuration.
//!
//! A document has the blocks `lattice`, `resonators`, `material`,
//! `modulation`, `sweep`, `numerics`, `output` and, for the commands that
//! need them, `finite` and `mathieu`. Unknown keys are rejected. Presets are
//! expanded on parse, so [`emit_config`] always writes explicit geometry and
//! `parse_config(&emit_config(&c)) == c`.
//!
//! ```toml
//! [lattice]
//! preset = "square"
//!
//! [resonators]
//! preset = "dimer"
//!
//! [modulation]
//! regime = "resonator"
//! law = "kappa-cosine"
//! omega = 0.26
//! eps = 0.2
//! phases = [0.0, 3.141592653589793]
//!
//! [sweep]
//! path = ["X", "G", "M", "X"]
//! samples_per_segment = 21
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bands::{DiracSettings, FiniteModulation, SweepSettings};
use crate::capacitance::{Material, MultipoleSettings, ResonatorArray};
use crate::lattice::{brillouin_path, BrillouinPath, LatticeSpec, Vec2};
use crate::linalg::CMatrix;
use crate::mathieu::MathieuMethod;
use crate::modulation::{FourierSeries, ModulationProfile, UniformLaw};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path} = {value}: {reason}")]
    Range { path: String, value: String, reason: String },
}

fn range(path: &str, value: impl std::fmt::Debug, reason: &str) -> ConfigError {
    ConfigError::Range { path: path.to_string(), value: format!("{value:?}"), reason: reason.to_string() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LatticeBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ResonatorsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<[f64; 2]>>,
    /// Common radius, used when `radii` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialBlock {
    pub delta: f64,
    pub kappa_r: f64,
    pub rho_r: f64,
    pub kappa0: f64,
    pub rho0: f64,
}

impl Default for MaterialBlock {
    fn default() -> Self {
        let m = Material::default();
        MaterialBlock { delta: m.delta, kappa_r: m.kappa_r, rho_r: m.rho_r, kappa0: m.kappa0, rho0: m.rho0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeName {
    #[default]
    Static,
    Uniform,
    Resonator,
}

/// Time laws. `rho-cosine`, `rho-kappa-cosine`, `constant-impedance` and
/// `meissner` apply to the uniform regime; `rho-cosine`, `kappa-cosine`,
/// `constant-impedance` and `fourier` to the resonator regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawName {
    RhoCosine,
    RhoKappaCosine,
    KappaCosine,
    ConstantImpedance,
    Meissner,
    Fourier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ModulationBlock {
    #[serde(default)]
    pub regime: RegimeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<LawName>,
    /// Modulation frequency Ω; for the static regime an optional folding
    /// frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default)]
    pub eps: f64,
    /// Per-resonator phases; zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    /// Fourier coefficients of 1/ρ_i and 1/κ_i, orders −m..m as [re, im].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inv_rho: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inv_kappa: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Waypoint {
    Named(String),
    Point { label: String, alpha: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub path: Vec<Waypoint>,
    #[serde(default = "default_samples")]
    pub samples_per_segment: usize,
    /// Displacement η of samples that fall on Λ*; 1e-3·‖α₁‖ when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_offset: Option<f64>,
}

fn default_samples() -> usize {
    21
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracCheck {
    pub point: String,
    pub bands: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsBlock {
    pub multipole_order: usize,
    pub lattice_sum_radius: f64,
    pub refine_factor: f64,
    pub truncation_gate: f64,
    pub ode_tolerance: f64,
    pub mathieu_method: MathieuMethod,
    pub im_tol: f64,
    pub ep_refinement_steps: usize,
    pub cond_threshold: f64,
    pub dirac_window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_tol: Option<f64>,
    pub slope_tol: f64,
    pub residual_tol: f64,
    pub dirac: Vec<DiracCheck>,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        let s = SweepSettings::default();
        let d = DiracSettings::default();
        NumericsBlock {
            multipole_order: s.multipole.multipole_order,
            lattice_sum_radius: s.multipole.lattice_sum_radius,
            refine_factor: s.multipole.refine_factor,
            truncation_gate: s.multipole.truncation_gate,
            ode_tolerance: s.ode_tolerance,
            mathieu_method: s.mathieu_method,
            im_tol: s.im_tol,
            ep_refinement_steps: s.ep_refinement_steps,
            cond_threshold: 1e3,
            dirac_window: d.window,
            gap_tol: d.gap_tol,
            slope_tol: d.slope_tol,
            residual_tol: d.residual_tol,
            dirac: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub destination: Option<String>,
}

/// Finite array data: an explicit real symmetric capacitance matrix with
/// volumes, or an isolated sphere (C = 4πR, |D| = 4πR³/3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FiniteBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacitance: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volumes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count).map(|i| self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MathieuBlock {
    pub a: Grid,
    pub q: Grid,
    #[serde(default = "default_chart_method")]
    pub method: MathieuMethod,
}

fn default_chart_method() -> MathieuMethod {
    MathieuMethod::HillDeterminant
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub lattice: LatticeBlock,
    #[serde(default)]
    pub resonators: ResonatorsBlock,
    #[serde(default)]
    pub material: MaterialBlock,
    #[serde(default)]
    pub modulation: ModulationBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub numerics: NumericsBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite: Option<FiniteBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mathieu: Option<MathieuBlock>,
}

/// Parses, expands presets and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = toml::Deserializer::parse(text)
        .map_err(|e| ConfigError::Schema { path: ".".into(), message: e.to_string().trim().to_string() })?;
    let mut config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string().trim().to_string(),
    })?;
    expand_presets(&mut config)?;
    config.validate()?;
    Ok(config)
}

/// Canonical TOML text of a parsed configuration.
pub fn emit_config(config: &RunConfig) -> String {
    toml::to_string(config).expect("configuration serializes")
}

fn honeycomb_vectors() -> ([f64; 2], [f64; 2]) {
    let l = LatticeSpec::honeycomb();
    let [a, b] = *l.primitive();
    ([a.x, a.y], [b.x, b.y])
}

/// Centers and radius of the named resonator presets.
pub fn resonator_preset(name: &str) -> Option<(Vec<[f64; 2]>, f64)> {
    let r = 0.1;
    match name {
        "single" => Some((vec![[0.5, 0.5]], r)),
        "dimer" => Some((vec![[0.5 - 1.2 * r, 0.5], [0.5 + 1.2 * r, 0.5]], r)),
        "trimer-honeycomb" => {
            let at = |o: f64, ang: f64| [o + 3.0 * r * ang.cos(), 3.0 * r * ang.sin()];
            Some((
                vec![
                    at(1.0, 0.0),
                    at(1.0, 2.0 * PI / 3.0),
                    at(1.0, 4.0 * PI / 3.0),
                    at(2.0, PI / 3.0),
                    at(2.0, PI),
                    at(2.0, 5.0 * PI / 3.0),
                ],
                r,
            ))
        }
        _ => None,
    }
}

fn expand_presets(c: &mut RunConfig) -> Result<(), ConfigError> {
    if let Some(p) = c.lattice.preset.take() {
        if c.lattice.l1.is_some() || c.lattice.l2.is_some() {
            return Err(range("lattice.preset", &p, "give either a preset or l1/l2"));
        }
        let (l1, l2) = match p.as_str() {
            "square" => ([1.0, 0.0], [0.0, 1.0]),
            "honeycomb" => honeycomb_vectors(),
            _ => return Err(range("lattice.preset", &p, "expected \"square\" or \"honeycomb\"")),
        };
        c.lattice.l1 = Some(l1);
        c.lattice.l2 = Some(l2);
    }
    if let Some(p) = c.resonators.preset.take() {
        if c.resonators.centers.is_some() {
            return Err(range("resonators.preset", &p, "give either a preset or centers"));
        }
        let (centers, r) = resonator_preset(&p)
            .ok_or_else(|| range("resonators.preset", &p, "expected \"single\", \"dimer\" or \"trimer-honeycomb\""))?;
        if c.resonators.radius.is_none() && c.resonators.radii.is_none() {
            c.resonators.radius = Some(r);
        }
        c.resonators.centers = Some(centers);
    }
    Ok(())
}

fn positive(path: &str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(range(path, x, "must be positive and finite"))
    }
}

fn coeffs(path: &str, list: &[Vec<[f64; 2]>], n: usize) -> Result<(), ConfigError> {
    if list.len() != n {
        return Err(range(path, list.len(), &format!("needs one coefficient list per resonator ({n})")));
    }
    for (i, c) in list.iter().enumerate() {
        if c.len() % 2 == 0 {
            return Err(range(&format!("{path}[{i}]"), c.len(), "needs odd length 2m+1"));
        }
        if c.iter().flatten().any(|x| !x.is_finite()) {
            return Err(range(&format!("{path}[{i}]"), c, "coefficients must be finite"));
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.material;
        positive("material.delta", m.delta)?;
        positive("material.kappa_r", m.kappa_r)?;
        positive("material.rho_r", m.rho_r)?;
        positive("material.kappa0", m.kappa0)?;
        positive("material.rho0", m.rho0)?;

        if let (Some(l1), Some(l2)) = (self.lattice.l1, self.lattice.l2) {
            let det = l1[0] * l2[1] - l1[1] * l2[0];
            if !(det.abs() > 1e-12 && det.is_finite()) {
                return Err(range("lattice", [l1, l2], "primitive vectors must be independent and finite"));
            }
        } else if self.lattice.l1.is_some() != self.lattice.l2.is_some() {
            return Err(range("lattice", &self.lattice, "give both l1 and l2"));
        }

        let n = if let Some(centers) = &self.resonators.centers {
            if centers.is_empty() {
                return Err(range("resonators.centers", centers, "must not be empty"));
            }
            for (i, c) in centers.iter().enumerate() {
                if !(c[0].is_finite() && c[1].is_finite()) {
                    return Err(range(&format!("resonators.centers[{i}]"), c, "must be finite"));
                }
            }
            match (&self.resonators.radii, self.resonators.radius) {
                (Some(radii), None) => {
                    if radii.len() != centers.len() {
                        return Err(range("resonators.radii", radii.len(), "needs one radius per center"));
                    }
                    for (i, &r) in radii.iter().enumerate() {
                        positive(&format!("resonators.radii[{i}]"), r)?;
                    }
                }
                (None, Some(r)) => positive("resonators.radius", r)?,
                _ => return Err(range("resonators", &self.resonators, "give exactly one of radius or radii")),
            }
            Some(centers.len())
        } else {
            None
        };

        let md = &self.modulation;
        if !(0.0..1.0).contains(&md.eps) {
            return Err(range("modulation.eps", md.eps, "must lie in [0, 1)"));
        }
        if let Some(o) = md.omega {
            positive("modulation.omega", o)?;
        }
        if md.regime != RegimeName::Static && md.omega.is_none() {
            return Err(range("modulation.omega", "missing", "required for modulated regimes"));
        }
        if let (Some(p), Some(n)) = (&md.phases, n) {
            if p.len() != n {
                return Err(range("modulation.phases", p.len(), &format!("needs one phase per resonator ({n})")));
            }
        }
        if let Some(p) = &md.phases {
            if p.iter().any(|x| !x.is_finite()) {
                return Err(range("modulation.phases", p, "must be finite"));
            }
        }
        match (md.regime, md.law) {
            (RegimeName::Static, _) => {}
            (_, None) => return Err(range("modulation.law", "missing", "required for modulated regimes")),
            (RegimeName::Uniform, Some(LawName::KappaCosine | LawName::Fourier)) => {
                return Err(range("modulation.law", md.law, "not a uniform law"))
            }
            (RegimeName::Resonator, Some(LawName::RhoKappaCosine | LawName::Meissner)) => {
                return Err(range("modulation.law", md.law, "not a resonator law"))
            }
            _ => {}
        }
        if md.law == Some(LawName::Meissner) {
            let rho1 = md.rho1.ok_or_else(|| range("modulation.rho1", "missing", "required by meissner"))?;
            let rho2 = md.rho2.ok_or_else(|| range("modulation.rho2", "missing", "required by meissner"))?;
            positive("modulation.rho1", rho1)?;
            positive("modulation.rho2", rho2)?;
            let t0 = md.t0.unwrap_or(0.0);
            let half = PI / md.omega.unwrap_or(1.0);
            if !(t0 > -half && t0 < half) {
                return Err(range("modulation.t0", t0, "must lie inside (−T/2, T/2)"));
            }
        }
        if md.law == Some(LawName::Fourier) && md.regime == RegimeName::Resonator {
            let n = n.ok_or_else(|| range("resonators", "missing", "fourier law needs explicit resonators"))?;
            let r = md.inv_rho.as_ref().ok_or_else(|| range("modulation.inv_rho", "missing", "required by fourier"))?;
            let k =
                md.inv_kappa.as_ref().ok_or_else(|| range("modulation.inv_kappa", "missing", "required by fourier"))?;
            coeffs("modulation.inv_rho", r, n)?;
            coeffs("modulation.inv_kappa", k, n)?;
        }

        if let Some(s) = &self.sweep {
            if s.path.len() < 2 {
                return Err(range("sweep.path", s.path.len(), "needs at least two waypoints"));
            }
            if s.samples_per_segment < 2 {
                return Err(range("sweep.samples_per_segment", s.samples_per_segment, "must be at least 2"));
            }
            if let Some(g) = s.gamma_offset {
                positive("sweep.gamma_offset", g)?;
            }
            for (i, w) in s.path.iter().enumerate() {
                if let Waypoint::Point { alpha, .. } = w {
                    if !(alpha[0].is_finite() && alpha[1].is_finite()) {
                        return Err(range(&format!("sweep.path[{i}].alpha"), alpha, "must be finite"));
                    }
                }
            }
        }

        let nm = &self.numerics;
        if nm.multipole_order < 2 {
            return Err(range("numerics.multipole_order", nm.multipole_order, "must be at least 2"));
        }
        if !(nm.lattice_sum_radius >= 4.0 && nm.lattice_sum_radius.is_finite()) {
            return Err(range("numerics.lattice_sum_radius", nm.lattice_sum_radius, "must be at least 4"));
        }
        if !(nm.refine_factor > 1.0 && nm.refine_factor.is_finite()) {
            return Err(range("numerics.refine_factor", nm.refine_factor, "must exceed 1"));
        }
        positive("numerics.truncation_gate", nm.truncation_gate)?;
        positive("numerics.ode_tolerance", nm.ode_tolerance)?;
        if nm.ode_tolerance > 1e-3 {
            return Err(range("numerics.ode_tolerance", nm.ode_tolerance, "must not exceed 1e-3"));
        }
        positive("numerics.im_tol", nm.im_tol)?;
        positive("numerics.cond_threshold", nm.cond_threshold)?;
        if nm.dirac_window < 3 {
            return Err(range("numerics.dirac_window", nm.dirac_window, "must be at least 3"));
        }
        if let Some(g) = nm.gap_tol {
            positive("numerics.gap_tol", g)?;
        }
        positive("numerics.slope_tol", nm.slope_tol)?;
        positive("numerics.residual_tol", nm.residual_tol)?;
        for (i, d) in nm.dirac.iter().enumerate() {
            if d.bands[0] == 0 || d.bands[1] == 0 || d.bands[0] == d.bands[1] {
                return Err(range(&format!("numerics.dirac[{i}].bands"), d.bands, "two distinct 1-based bands"));
            }
        }

        if let Some(f) = &self.finite {
            match (&f.capacitance, f.sphere_radius) {
                (Some(c), None) => {
                    let k = c.len();
                    if k == 0 || c.iter().any(|row| row.len() != k) {
                        return Err(range("finite.capacitance", k, "must be a non-empty square matrix"));
                    }
                    if c.iter().flatten().any(|x| !x.is_finite()) {
                        return Err(range("finite.capacitance", c, "entries must be finite"));
                    }
                    let v = f.volumes.as_ref().ok_or_else(|| range("finite.volumes", "missing", "required with capacitance"))?;
                    if v.len() != k {
                        return Err(range("finite.volumes", v.len(), "needs one volume per row"));
                    }
                    for (i, &x) in v.iter().enumerate() {
                        positive(&format!("finite.volumes[{i}]"), x)?;
                    }
                }
                (None, Some(r)) => {
                    positive("finite.sphere_radius", r)?;
                    if f.volumes.is_some() {
                        return Err(range("finite.volumes", "given", "not used with sphere_radius"));
                    }
                }
                _ => return Err(range("finite", f, "give exactly one of capacitance or sphere_radius")),
            }
        }
        if let Some(mb) = &self.mathieu {
            for (name, g) in [("a", mb.a), ("q", mb.q)] {
                if g.count == 0 || !(g.start.is_finite() && g.stop.is_finite()) {
                    return Err(range(&format!("mathieu.{name}"), g, "needs finite bounds and count ≥ 1"));
                }
            }
        }
        Ok(())
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec, ConfigError> {
        let (l1, l2) = match (self.lattice.l1, self.lattice.l2) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(range("lattice", "missing", "give a preset or l1/l2")),
        };
        LatticeSpec::new(Vec2::new(l1[0], l1[1]), Vec2::new(l2[0], l2[1]))
            .map_err(|e| range("lattice", [l1, l2], &e.to_string()))
    }

    pub fn material(&self) -> Material {
        let m = &self.material;
        Material { delta: m.delta, kappa_r: m.kappa_r, rho_r: m.rho_r, kappa0: m.kappa0, rho0: m.rho0 }
    }

    pub fn array(&self) -> Result<ResonatorArray, ConfigError> {
        let centers = self
            .resonators
            .centers
            .as_ref()
            .ok_or_else(|| range("resonators", "missing", "give a preset or centers"))?;
        let radii = match (&self.resonators.radii, self.resonators.radius) {
            (Some(r), _) => r.clone(),
            (None, Some(r)) => vec![r; centers.len()],
            (None, None) => return Err(range("resonators.radius", "missing", "required")),
        };
        ResonatorArray::new(centers.iter().map(|c| Vec2::new(c[0], c[1])).collect(), radii, self.material())
            .map_err(|e| range("resonators", centers, &e.to_string()))
    }

    pub fn multipole(&self) -> MultipoleSettings {
        let n = &self.numerics;
        MultipoleSettings {
            multipole_order: n.multipole_order,
            lattice_sum_radius: n.lattice_sum_radius,
            refine_factor: n.refine_factor,
            truncation_gate: n.truncation_gate,
        }
    }

    pub fn sweep_settings(&self) -> SweepSettings {
        let n = &self.numerics;
        SweepSettings {
            multipole: self.multipole(),
            ode_tolerance: n.ode_tolerance,
            mathieu_method: n.mathieu_method,
            im_tol: n.im_tol,
            ep_refinement_steps: n.ep_refinement_steps,
        }
    }

    pub fn dirac_settings(&self) -> DiracSettings {
        let n = &self.numerics;
        DiracSettings { window: n.dirac_window, gap_tol: n.gap_tol, slope_tol: n.slope_tol, residual_tol: n.residual_tol }
    }

    pub fn path(&self, spec: &LatticeSpec) -> Result<BrillouinPath, ConfigError> {
        let s = self.sweep.as_ref().ok_or_else(|| range("sweep", "missing", "required by this command"))?;
        let mut wps = Vec::with_capacity(s.path.len());
        for (i, w) in s.path.iter().enumerate() {
            wps.push(match w {
                Waypoint::Named(n) => {
                    let p = spec
                        .symmetry_point(n)
                        .ok_or_else(|| range(&format!("sweep.path[{i}]"), n, "unknown symmetry point"))?;
                    let label = if matches!(n.as_str(), "G" | "Gamma" | "gamma") { "Γ".to_string() } else { n.clone() };
                    (label, p)
                }
                Waypoint::Point { label, alpha } => (label.clone(), Vec2::new(alpha[0], alpha[1])),
            });
        }
        brillouin_path(spec, &wps, s.samples_per_segment, s.gamma_offset)
            .map_err(|e| range("sweep", &s.path, &e.to_string()))
    }

    fn phases(&self, n: usize) -> Vec<f64> {
        self.modulation.phases.clone().unwrap_or_else(|| vec![0.0; n])
    }

    fn omega(&self) -> Result<f64, ConfigError> {
        self.modulation.omega.ok_or_else(|| range("modulation.omega", "missing", "required"))
    }

    /// Resonator-interior modulation profile for `n` resonators.
    pub fn profile(&self, n: usize) -> Result<ModulationProfile, ConfigError> {
        let md = &self.modulation;
        let omega = self.omega()?;
        let phases = self.phases(n);
        let wrap = |e: crate::modulation::ModulationError| range("modulation", md.law, &e.to_string());
        match md.law {
            Some(LawName::RhoCosine) => ModulationProfile::rho_cosine(omega, md.eps, &phases).map_err(wrap),
            Some(LawName::KappaCosine) => ModulationProfile::kappa_cosine(omega, md.eps, &phases).map_err(wrap),
            Some(LawName::ConstantImpedance) => {
                ModulationProfile::constant_impedance(omega, md.eps, &phases).map_err(wrap)
            }
            Some(LawName::Fourier) => {
                let series = |list: &Vec<Vec<[f64; 2]>>| -> Result<Vec<FourierSeries>, ConfigError> {
                    list.iter()
                        .map(|c| {
                            FourierSeries::new(omega, c.iter().map(|z| Complex64::new(z[0], z[1])).collect())
                                .map_err(wrap)
                        })
                        .collect()
                };
                let r = series(md.inv_rho.as_ref().ok_or_else(|| range("modulation.inv_rho", "missing", "required"))?)?;
                let k =
                    series(md.inv_kappa.as_ref().ok_or_else(|| range("modulation.inv_kappa", "missing", "required"))?)?;
                ModulationProfile::new(omega, r, k).map_err(wrap)
            }
            other => Err(range("modulation.law", other, "not a resonator law")),
        }
    }

    /// Law of the uniformly modulated medium.
    pub fn uniform_law(&self) -> Result<UniformLaw, ConfigError> {
        let md = &self.modulation;
        Ok(match md.law {
            Some(LawName::RhoCosine) => UniformLaw::RhoCosine,
            Some(LawName::RhoKappaCosine) => UniformLaw::RhoKappaCosine,
            Some(LawName::ConstantImpedance) => UniformLaw::ConstantImpedance,
            Some(LawName::Meissner) => UniformLaw::Meissner {
                rho1: md.rho1.unwrap_or(1.0),
                rho2: md.rho2.unwrap_or(1.0),
                t0: md.t0.unwrap_or(0.0),
            },
            other => return Err(range("modulation.law", other, "not a uniform law")),
        })
    }

    /// Capacitance matrix, volumes and modulation of the `finite` block.
    pub fn finite_problem(&self) -> Result<(CMatrix, Vec<f64>, FiniteModulation), ConfigError> {
        let f = self.finite.as_ref().ok_or_else(|| range("finite", "missing", "required by this command"))?;
        let (c, vols) = match (&f.capacitance, f.sphere_radius) {
            (Some(c), _) => {
                let k = c.len();
                (CMatrix::from_fn(k, k, |i, j| Complex64::new(c[i][j], 0.0)), f.volumes.clone().unwrap_or_default())
            }
            (None, Some(r)) => (
                CMatrix::from_element(1, 1, Complex64::new(4.0 * PI * r, 0.0)),
                vec![4.0 * PI * r * r * r / 3.0],
            ),
            (None, None) => return Err(range("finite", f, "give capacitance or sphere_radius")),
        };
        let modulation = match self.modulation.regime {
            RegimeName::Uniform => {
                FiniteModulation::Uniform { law: self.uniform_law()?, omega: self.omega()?, eps: self.modulation.eps }
            }
            RegimeName::Resonator => FiniteModulation::Resonator(self.profile(c.nrows())?),
            RegimeName::Static => {
                let omega = self.omega()?;
                let p = ModulationProfile::unmodulated(omega, c.nrows())
                    .map_err(|e| range("modulation", "static", &e.to_string()))?;
                FiniteModulation::Resonator(p)
            }
        };
        Ok((c, vols, modulation))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIMER: &str = r#"
[lattice]
preset = "square"

[resonators]
preset = "dimer"

[modulation]
regime = "resonator"
law = "kappa-cosine"
omega = 0.26
eps = 0.2
phases = [0.0, 3.141592653589793]

[sweep]
path = ["X", "G", "M", "X"]
"#;

    #[test]
    fn dimer_preset() {
        let c = parse_config(DIMER).unwrap();
        let centers = c.resonators.centers.clone().unwrap();
        assert_eq!(centers, vec![[0.5 - 0.12, 0.5], [0.5 + 0.12, 0.5]]);
        assert_eq!(c.resonators.radius, Some(0.1));
        assert_eq!(c.sweep.as_ref().unwrap().samples_per_segment, 21);
        assert_eq!(parse_config(&emit_config(&c)).unwrap(), c);
    }

    #[test]
    fn negative_delta() {
        let text = format!("{DIMER}\n[material]\ndelta = -1.0\n");
        match parse_config(&text) {
            Err(ConfigError::Range { path, .. }) => assert_eq!(path, "material.delta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key() {
        let text = DIMER.replace("eps = 0.2", "eps = 0.2\nepsilon = 0.1");
        match parse_config(&text) {
            Err(ConfigError::Schema { path, message }) => {
                assert!(path.starts_with("modulation"), "{path}");
                assert!(message.contains("epsilon"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trimer_preset() {
        let text = "[lattice]\npreset = \"honeycomb\"\n[resonators]\npreset = \"trimer-honeycomb\"\n";
        let c = parse_config(text).unwrap();
        let centers = c.resonators.centers.unwrap();
        assert_eq!(centers.len(), 6);
        assert!((centers[0][0] - 1.3).abs() < 1e-15 && centers[0][1] == 0.0);
        assert!((centers[4][0] - 1.7).abs() < 1e-15);
    }
}
